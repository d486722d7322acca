use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::config::RunConfig;
use super::csv::{fit_summary, fmt_f64, read_sweep_csv, write_sweep_csv, write_text};
use super::plot::{write_loglog_svg, Series};
use crate::calculus::GradientKind;
use crate::geometry::{bounds_certificate, codazzi_gauss_residual};
use crate::scaling::{fit_exponent, run_sweep, ScalingFit, SweepPlan, SweepQuantity};
use crate::spectral::{assemble, build_space, write_coordinate_triplets};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const CODAZZI_THRESHOLD: f64 = 1e-7;

fn ensure_out_dir(cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    Ok(())
}

fn csv_name(quantity: SweepQuantity, surface: &str) -> String {
    format!("{}_{}.csv", quantity.name().replace('-', "_"), surface)
}

/// Prints the Codazzi-Gauss residuals and the bounds certificate; exit 0 iff
/// the surface is admissible and the residuals are below threshold.
pub fn cmd_geom_check(cfg: &RunConfig) -> Result<i32> {
    let surface = cfg.build_surface()?;
    surface.validate(16)?;
    let res = codazzi_gauss_residual(&surface, cfg.grid_resolution.max(8))?;
    let cert = bounds_certificate(&surface, cfg.grid_resolution.max(8))?;
    println!(
        "surface: {} (omega = {:.6}, l = {:.6})",
        surface.name(),
        surface.omega(),
        surface.length()
    );
    println!(
        "codazzi-gauss residuals ({0}x{0}): r1 = {1}, r2 = {2}, r3 = {3}",
        cfg.grid_resolution.max(8),
        fmt_f64(res.r1),
        fmt_f64(res.r2),
        fmt_f64(res.r3)
    );
    println!(
        "bounds: a = {:.6}, A = {:.6}, B = {:.6}, k = {:.6}, K = {:.6}, K1 = {:.6}",
        cert.a, cert.a_sup, cert.b, cert.k, cert.k_sup, cert.k1
    );
    println!("gaussian sign: {}", cert.gaussian_sign);
    println!("admissible: {}", cert.admissible);
    if !cert.admissible {
        println!("inadmissible: curvature vanishes");
        return Ok(EXIT_CHECK_FAILED);
    }
    if res.max() > CODAZZI_THRESHOLD {
        println!("codazzi-gauss residual {} above threshold {CODAZZI_THRESHOLD}", fmt_f64(res.max()));
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(EXIT_OK)
}

fn plan_from_config(cfg: &RunConfig) -> Result<SweepPlan> {
    let surface = cfg.build_surface()?;
    let mut plan = SweepPlan::new(Arc::clone(&surface), cfg.quantity);
    plan.h_grid = cfg.resolved_h_grid();
    plan.policy = cfg.resolution_policy();
    plan.transport_branch = cfg.transport_branch;
    plan.phase_scale = cfg.phase_scale;
    plan.exact_volume_element = cfg.exact_volume_element;
    plan.seed = cfg.seed;
    Ok(plan)
}

/// Drops pre-asymptotic points only when at least three samples survive.
fn effective_drop(n_records: usize, drop_first: usize) -> usize {
    if n_records >= drop_first + 3 {
        drop_first
    } else {
        0
    }
}

fn fit_records(
    records: &[(f64, f64)],
    drop_first: usize,
) -> Result<(ScalingFit, usize)> {
    let drop = effective_drop(records.len(), drop_first);
    fit_exponent(records, drop).map(|f| (f, drop))
}

/// Runs the sharpness sweep for the config's test-field quantity, writes the
/// CSV and the fit summary.
pub fn cmd_ansatz_quotient(cfg: &RunConfig) -> Result<i32> {
    if !matches!(cfg.quantity, SweepQuantity::AnsatzQuotientNeg | SweepQuantity::AnsatzQuotientPos) {
        return Err(Error::InvalidParameter(format!(
            "ansatz-quotient expects quantity ansatz-quotient-neg or ansatz-quotient-pos, got {}",
            cfg.quantity.name()
        )));
    }
    ensure_out_dir(cfg)?;
    let plan = plan_from_config(cfg)?;
    let records = run_sweep(&plan)?;
    let csv_path = cfg.out_dir.join(csv_name(cfg.quantity, &cfg.surface));
    write_sweep_csv(&csv_path, &records, cfg.serial)?;
    let samples: Vec<(f64, f64)> = records.iter().map(|r| (r.h, r.value)).collect();
    let (fit, drop) = fit_records(&samples, cfg.drop_first)?;
    let summary = fit_summary(cfg.quantity.name(), &cfg.surface, &fit, drop, cfg.seed);
    let fit_path = csv_path.with_extension("fit.txt");
    write_text(&fit_path, &summary)?;
    print!("{summary}");
    println!("wrote {} and {}", csv_path.display(), fit_path.display());
    Ok(EXIT_OK)
}

/// Runs the eigenvalue sweep (discrete Korn constant or the uniform
/// Korn-Poincare minimum), writes the CSV with eigen diagnostics per row.
pub fn cmd_korn_constant(cfg: &RunConfig) -> Result<i32> {
    if !matches!(cfg.quantity, SweepQuantity::KornConstant | SweepQuantity::UniformKp) {
        return Err(Error::InvalidParameter(format!(
            "korn-constant expects quantity korn-constant or uniform-kp, got {}",
            cfg.quantity.name()
        )));
    }
    ensure_out_dir(cfg)?;
    let plan = plan_from_config(cfg)?;
    let records = run_sweep(&plan)?;
    let csv_path = cfg.out_dir.join(csv_name(cfg.quantity, &cfg.surface));
    write_sweep_csv(&csv_path, &records, cfg.serial)?;
    for r in &records {
        match &r.error {
            None => println!(
                "h = {:.6e}: value = {}, dim = {}, residual = {}",
                r.h,
                fmt_f64(r.value),
                r.basis_dim,
                fmt_f64(r.residual)
            ),
            Some(e) => println!("h = {:.6e}: FAILED ({e})", r.h),
        }
    }
    if cfg.export_matrices && cfg.quantity == SweepQuantity::KornConstant {
        export_matrices(cfg, &plan)?;
    }
    let samples: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.error.is_none())
        .map(|r| (r.h, r.value))
        .collect();
    if samples.len() >= 3 {
        let (fit, drop) = fit_records(&samples, cfg.drop_first)?;
        let summary = fit_summary(cfg.quantity.name(), &cfg.surface, &fit, drop, cfg.seed);
        write_text(&csv_path.with_extension("fit.txt"), &summary)?;
        print!("{summary}");
    }
    println!("wrote {}", csv_path.display());
    Ok(EXIT_OK)
}

fn export_matrices(cfg: &RunConfig, plan: &SweepPlan) -> Result<()> {
    for &h in &plan.h_grid {
        let domain = crate::geometry::ShellDomain::new(Arc::clone(&plan.surface), h)?;
        let space = build_space(&domain, plan.policy.resolution(h))?;
        let rule = space.assembly_rule();
        let pair = assemble(&space, &rule, GradientKind::Full)?;
        for (tag, m) in [("E", &pair.e), ("G", &pair.g)] {
            let path = cfg.out_dir.join(format!(
                "{}_{}_{tag}_h{h:.3e}.txt",
                cfg.quantity.name().replace('-', "_"),
                cfg.surface
            ));
            let file = std::fs::File::create(&path)?;
            write_coordinate_triplets(m, std::io::BufWriter::new(file))?;
        }
    }
    Ok(())
}

struct ReportRow {
    surface: String,
    quantity: String,
    alpha: f64,
    r_squared: f64,
    target: Option<(f64, f64)>,
    pass: Option<bool>,
}

fn infer_from_filename(path: &Path) -> (String, String) {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    for q in ["ansatz_quotient_neg", "ansatz_quotient_pos", "korn_constant", "uniform_kp"] {
        if let Some(rest) = stem.strip_prefix(q) {
            let surface = rest.trim_start_matches('_').to_string();
            return (q.replace('_', "-"), surface);
        }
    }
    ("unknown".to_string(), stem.to_string())
}

fn target_for(quantity: &str, surface: &str) -> Option<(f64, f64)> {
    match quantity {
        "ansatz-quotient-neg" => Some((4.0 / 3.0, 0.1)),
        "ansatz-quotient-pos" => Some((1.0, 0.1)),
        "korn-constant" => match surface {
            "sphere" => Some((1.0, 0.2)),
            "catenoid" => Some((4.0 / 3.0, 0.2)),
            _ => None,
        },
        // Boundedness: a factor-2 band over the default grid span.
        "uniform-kp" => Some((0.0, 0.5)),
        _ => None,
    }
}

/// Merges sweep CSVs into a comparison table and a log-log plot.
pub fn cmd_report(cfg: &RunConfig, csv_paths: &[PathBuf]) -> Result<i32> {
    if csv_paths.is_empty() {
        return Err(Error::InvalidParameter("report needs at least one CSV path".into()));
    }
    ensure_out_dir(cfg)?;
    let mut rows = Vec::new();
    let mut all_points = Vec::new();
    for path in csv_paths {
        let points = read_sweep_csv(path)?;
        if points.is_empty() {
            eprintln!("{}: empty CSV", path.display());
            return Ok(EXIT_CHECK_FAILED);
        }
        let (quantity, surface) = infer_from_filename(path);
        let (fit, _) = fit_records(&points, cfg.drop_first)?;
        let target = target_for(&quantity, &surface);
        let pass = target.map(|(t, tol)| (fit.exponent - t).abs() <= tol);
        rows.push(ReportRow {
            surface,
            quantity,
            alpha: fit.exponent,
            r_squared: fit.r_squared,
            target,
            pass,
        });
        all_points.push((path.clone(), points));
    }

    let mut table = String::new();
    table.push_str(&format!(
        "{:<10} {:<22} {:>9} {:>9} {:>7} {:>6}\n",
        "surface", "quantity", "alpha", "target", "R2", "pass"
    ));
    for r in &rows {
        let target = r
            .target
            .map(|(t, tol)| format!("{t:.3}±{tol:.1}"))
            .unwrap_or_else(|| "-".to_string());
        let pass = match r.pass {
            Some(true) => "yes",
            Some(false) => "NO",
            None => "-",
        };
        table.push_str(&format!(
            "{:<10} {:<22} {:>9.4} {:>9} {:>7.4} {:>6}\n",
            r.surface, r.quantity, r.alpha, target, r.r_squared, pass
        ));
    }
    print!("{table}");
    write_text(&cfg.out_dir.join("report.txt"), &table)?;

    let series: Vec<Series<'_>> = all_points
        .iter()
        .map(|(path, pts)| Series {
            label: path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep").to_string(),
            points: pts.as_slice(),
        })
        .collect();
    let svg_path = cfg.out_dir.join("report.svg");
    write_loglog_svg(&svg_path, "thickness scaling", &series)?;
    println!("wrote {} and {}", cfg.out_dir.join("report.txt").display(), svg_path.display());

    if rows.iter().any(|r| r.pass == Some(false)) {
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(EXIT_OK)
}
