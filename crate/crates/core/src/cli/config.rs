use std::path::PathBuf;
use std::sync::Arc;

use crate::geometry::SurfacePatch;
use crate::scaling::{geometric_h_grid, ResolutionPolicy, SweepQuantity};
use crate::spectral::Resolution;
use crate::{Error, Result};

/// Parsed run configuration.
///
/// The on-disk format is line-oriented `key = value` with `#` comments.
/// Unknown keys are errors; every field has a default except `surface` and
/// `quantity`.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub surface: String,
    pub quantity: SweepQuantity,
    /// Theta extent; `None` means the per-surface default.
    pub omega: Option<f64>,
    /// z extent; `None` means the per-surface, per-quantity default.
    pub l: Option<f64>,
    pub radius: f64,
    /// Explicit thickness grid; `None` means the quantity default.
    pub h_grid: Option<Vec<f64>>,
    pub resolution_policy: PolicyChoice,
    pub theta_modes: Option<usize>,
    pub z_modes: Option<usize>,
    pub z_poly_degree: Option<usize>,
    pub t_degree: Option<usize>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub serial: bool,
    pub exact_volume_element: bool,
    pub transport_branch: f64,
    pub phase_scale: f64,
    pub drop_first: usize,
    pub export_matrices: bool,
    pub n_samples: usize,
    pub grid_resolution: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyChoice {
    Fixed,
    HAdaptive,
}

impl RunConfig {
    /// Parses the `key = value` text; errors carry the 1-based line number.
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut surface: Option<String> = None;
        let mut quantity: Option<SweepQuantity> = None;
        let mut cfg = RunConfig {
            surface: String::new(),
            quantity: SweepQuantity::KornConstant,
            omega: None,
            l: None,
            radius: 1.0,
            h_grid: None,
            resolution_policy: PolicyChoice::HAdaptive,
            theta_modes: None,
            z_modes: None,
            z_poly_degree: None,
            t_degree: None,
            seed: 0,
            out_dir: PathBuf::from("out"),
            serial: false,
            exact_volume_element: false,
            transport_branch: 1.0,
            phase_scale: 2.0,
            drop_first: 1,
            export_matrices: false,
            n_samples: 100,
            grid_resolution: 32,
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let stripped = stripped.trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, got `{stripped}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |message: String| Error::Config { line, message };
            let parse_f64 = |v: &str| {
                v.parse::<f64>().map_err(|_| bad(format!("`{key}` expects a number, got `{v}`")))
            };
            let parse_usize = |v: &str| {
                v.parse::<usize>().map_err(|_| bad(format!("`{key}` expects an integer, got `{v}`")))
            };
            let parse_bool = |v: &str| match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(bad(format!("`{key}` expects true/false, got `{v}`"))),
            };
            match key {
                "surface" => surface = Some(value.to_string()),
                "quantity" => {
                    quantity = Some(SweepQuantity::parse(value).ok_or_else(|| {
                        bad(format!(
                            "unknown quantity `{value}`; expected ansatz-quotient-neg, \
                             ansatz-quotient-pos, korn-constant, or uniform-kp"
                        ))
                    })?)
                }
                "omega" => cfg.omega = Some(parse_f64(value)?),
                "l" => cfg.l = Some(parse_f64(value)?),
                "radius" => cfg.radius = parse_f64(value)?,
                "h_grid" => cfg.h_grid = Some(parse_h_grid(value).map_err(bad)?),
                "resolution_policy" => {
                    cfg.resolution_policy = match value {
                        "fixed" => PolicyChoice::Fixed,
                        "h-adaptive" | "adaptive" => PolicyChoice::HAdaptive,
                        _ => return Err(bad(format!("unknown resolution policy `{value}`"))),
                    }
                }
                "theta_modes" => cfg.theta_modes = Some(parse_usize(value)?),
                "z_modes" => cfg.z_modes = Some(parse_usize(value)?),
                "z_poly_degree" => cfg.z_poly_degree = Some(parse_usize(value)?),
                "t_degree" => cfg.t_degree = Some(parse_usize(value)?),
                "seed" => {
                    cfg.seed = value
                        .parse::<u64>()
                        .map_err(|_| bad(format!("`seed` expects an integer, got `{value}`")))?
                }
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                "serial" => cfg.serial = parse_bool(value)?,
                "exact_volume_element" => cfg.exact_volume_element = parse_bool(value)?,
                "transport_branch" => {
                    let b = parse_f64(value)?;
                    if b != 1.0 && b != -1.0 {
                        return Err(bad(format!("`transport_branch` must be +1 or -1, got {b}")));
                    }
                    cfg.transport_branch = b;
                }
                "phase_scale" => cfg.phase_scale = parse_f64(value)?,
                "drop_first" => cfg.drop_first = parse_usize(value)?,
                "export_matrices" => cfg.export_matrices = parse_bool(value)?,
                "n_samples" => cfg.n_samples = parse_usize(value)?,
                "grid_resolution" => cfg.grid_resolution = parse_usize(value)?,
                other => {
                    return Err(bad(format!("unknown key `{other}`")));
                }
            }
        }
        cfg.surface = surface.ok_or(Error::Config {
            line: 0,
            message: "missing required key `surface`".into(),
        })?;
        cfg.quantity = quantity.ok_or(Error::Config {
            line: 0,
            message: "missing required key `quantity`".into(),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Per-surface default theta extent.
    pub fn resolved_omega(&self) -> f64 {
        self.omega.unwrap_or(match self.surface.as_str() {
            "sphere" => std::f64::consts::FRAC_PI_2,
            _ => std::f64::consts::PI,
        })
    }

    /// Per-surface, per-quantity default z extent.  Sphere sharpness and
    /// Korn-constant sweeps default to l = 0.35 where the pinned thickness
    /// grid reaches the asymptotic regime; the property checks keep the short
    /// patch l = 0.2.
    pub fn resolved_l(&self) -> f64 {
        if let Some(l) = self.l {
            return l;
        }
        match (self.surface.as_str(), self.quantity) {
            ("sphere", SweepQuantity::AnsatzQuotientPos | SweepQuantity::KornConstant) => 0.35,
            ("sphere", _) => 0.2,
            ("catenoid", _) => 0.5,
            _ => 0.3,
        }
    }

    pub fn build_surface(&self) -> Result<Arc<SurfacePatch>> {
        let s =
            SurfacePatch::from_name(&self.surface, self.resolved_omega(), self.resolved_l(), self.radius)?;
        Ok(Arc::new(s))
    }

    pub fn resolved_h_grid(&self) -> Vec<f64> {
        self.h_grid.clone().unwrap_or_else(|| self.quantity.default_h_grid())
    }

    pub fn resolution_policy(&self) -> ResolutionPolicy {
        let base = match self.resolution_policy {
            PolicyChoice::Fixed => ResolutionPolicy::Fixed(Resolution::fixed_default()),
            PolicyChoice::HAdaptive => ResolutionPolicy::HAdaptive,
        };
        // Explicit mode overrides force a fixed resolution.
        if self.theta_modes.is_some()
            || self.z_modes.is_some()
            || self.z_poly_degree.is_some()
            || self.t_degree.is_some()
        {
            let d = Resolution::fixed_default();
            ResolutionPolicy::Fixed(Resolution {
                theta_modes: self.theta_modes.unwrap_or(d.theta_modes),
                z_modes: self.z_modes.unwrap_or(d.z_modes),
                z_poly_degree: self.z_poly_degree.unwrap_or(d.z_poly_degree),
                t_degree: self.t_degree.unwrap_or(d.t_degree),
            })
        } else {
            base
        }
    }
}

/// `1e-1:1e-3:7` (geometric, inclusive) or a comma-separated list.
fn parse_h_grid(value: &str) -> std::result::Result<Vec<f64>, String> {
    if value.contains(':') {
        let parts: Vec<&str> = value.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("h_grid range needs `max:min:count`, got `{value}`"));
        }
        let h_max: f64 =
            parts[0].trim().parse().map_err(|_| format!("bad h_grid bound `{}`", parts[0]))?;
        let h_min: f64 =
            parts[1].trim().parse().map_err(|_| format!("bad h_grid bound `{}`", parts[1]))?;
        let n: usize =
            parts[2].trim().parse().map_err(|_| format!("bad h_grid count `{}`", parts[2]))?;
        if !(h_max > h_min && h_min > 0.0 && n >= 2) {
            return Err(format!("h_grid range `{value}` must satisfy max > min > 0, count >= 2"));
        }
        Ok(geometric_h_grid(h_max, h_min, n))
    } else {
        let mut out = Vec::new();
        for item in value.split(',') {
            out.push(item.trim().parse::<f64>().map_err(|_| format!("bad h value `{item}`"))?);
        }
        if out.len() < 2 {
            return Err("h_grid list needs at least two values".into());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::parse("surface = catenoid\nquantity = ansatz-quotient-neg\n").unwrap();
        assert_eq!(cfg.surface, "catenoid");
        assert_eq!(cfg.quantity, SweepQuantity::AnsatzQuotientNeg);
        assert_eq!(cfg.resolved_l(), 0.5);
        assert_eq!(cfg.resolved_h_grid().len(), 7);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.drop_first, 1);
    }

    #[test]
    fn unknown_key_reports_line_number() {
        let err = RunConfig::parse("surface = sphere\nbogus = 1\n").unwrap_err();
        match err {
            Error::Config { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("bogus"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn double_equals_is_a_value_error_with_line() {
        let err = RunConfig::parse("surface = sphere\nquantity = korn-constant\nl == 0.1\n")
            .unwrap_err();
        match err {
            Error::Config { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg = RunConfig::parse(
            "# experiment\nsurface = sphere # patch\n\nquantity = korn-constant\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(cfg.surface, "sphere");
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.resolved_l(), 0.35);
    }

    #[test]
    fn h_grid_forms() {
        let cfg = RunConfig::parse(
            "surface = sphere\nquantity = korn-constant\nh_grid = 0.1, 0.05, 0.025\n",
        )
        .unwrap();
        assert_eq!(cfg.resolved_h_grid(), vec![0.1, 0.05, 0.025]);
        let cfg =
            RunConfig::parse("surface = sphere\nquantity = korn-constant\nh_grid = 1e-1:1e-2:3\n")
                .unwrap();
        let g = cfg.resolved_h_grid();
        assert_eq!(g.len(), 3);
        assert!((g[1] - 10f64.powf(-1.5)).abs() < 1e-12);
    }

    #[test]
    fn missing_required_keys() {
        assert!(RunConfig::parse("quantity = korn-constant\n").is_err());
        assert!(RunConfig::parse("surface = sphere\n").is_err());
    }
}
