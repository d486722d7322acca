//! The two sharp test displacements.
//!
//! For negative Gaussian curvature, the oscillatory field of Tovstik-Smirnov
//! type: `u_t = n phi sin(n f)` with tangential amplitudes chosen so that the
//! `tt`, `t-theta` and `t-z` strain components of the t-independent part
//! cancel, phased by a solution `f` of the transport equation.  With
//! `n = ceil(h^(-1/3))` its Korn quotient realizes the `h^(4/3)` scaling.
//!
//! For positive Gaussian curvature, a Kirchhoff-like bending field
//! `u_t = W(theta / sqrt(h), z)`, `u_theta = -t W_1 / (A_theta sqrt(h))`,
//! `u_z = -t W_2 / A_z`, realizing the `h` scaling.
//!
//! Both fields are exactly linear in the normal coordinate and compactly
//! supported inside the open mid-surface, which puts them in the admissible
//! subspace for free.

mod phase;
mod profiles;

use std::sync::Arc;

pub use phase::{solve_transport, AnalyticPhase, PhaseFunction, PhaseGradientRange, PhaseJet};
pub use profiles::{AmplitudeJet, BumpProfile, Window};

use crate::calculus::{Axis, BcTag, Comp, Field, QuadratureRule, SupportBox};
use crate::geometry::{bounds_certificate, GaussianSign, ShellDomain, SurfacePatch};
use crate::{Error, Result};

/// Which sharpness construction a field realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzKind {
    NegativeCurvature,
    PositiveCurvature,
}

/// `n(h) = ceil(h^(-1/3))`, snapping to the integer when `h^(-1/3)` is one up
/// to roundoff (so `h = 1e-3` gives exactly 10).
pub fn oscillation_index(h: f64, exponent: f64) -> u32 {
    let x = h.powf(-exponent);
    let snapped = if (x - x.round()).abs() < 1e-9 { x.round() } else { x.ceil() };
    snapped as u32
}

/// Values and `(theta, z)` partials of the two t-linear layers `u0 + t u1`.
#[derive(Debug, Clone, Copy, Default)]
struct LayerPoint {
    u0: [f64; 3],
    u1: [f64; 3],
    /// `(d/dtheta, d/dz)` of each `u0` component.
    du0: [[f64; 2]; 3],
    du1: [[f64; 2]; 3],
}

trait TLinearField: Send + Sync {
    fn layers(&self, theta: f64, z: f64) -> LayerPoint;
}

/// A sharp test displacement, linear in `t`, with analytic partials assembled
/// by the chain rule from the amplitude, the phase, and the metric partials.
pub struct AnsatzField {
    kind: AnsatzKind,
    oscillation_count: u32,
    h: f64,
    support: SupportBox,
    quadrature_nodes: (usize, usize, usize),
    inner: Arc<dyn TLinearField>,
}

impl AnsatzField {
    pub fn kind(&self) -> AnsatzKind {
        self.kind
    }

    /// Reported oscillation count `n(h)`: `ceil(h^(-1/3))` for the
    /// negative-curvature field, `ceil(h^(-1/2))` for the positive one.
    pub fn oscillation_count(&self) -> u32 {
        self.oscillation_count
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Node counts `(t, theta, z)` resolving this field's oscillations.
    pub fn quadrature_nodes(&self) -> (usize, usize, usize) {
        self.quadrature_nodes
    }

    /// Quadrature rule over the shell sized for this field.
    pub fn quadrature_rule(&self, domain: &ShellDomain) -> QuadratureRule {
        let (nt, nth, nz) = self.quadrature_nodes;
        QuadratureRule::for_domain(domain, nt, nth, nz)
    }
}

impl Field for AnsatzField {
    fn eval(&self, comp: Comp, t: f64, theta: f64, z: f64) -> f64 {
        let p = self.inner.layers(theta, z);
        p.u0[comp as usize] + t * p.u1[comp as usize]
    }

    fn partial(&self, comp: Comp, axis: Axis, t: f64, theta: f64, z: f64) -> f64 {
        let p = self.inner.layers(theta, z);
        let c = comp as usize;
        match axis {
            Axis::T => p.u1[c],
            Axis::Theta => p.du0[c][0] + t * p.du1[c][0],
            Axis::Z => p.du0[c][1] + t * p.du1[c][1],
        }
    }

    fn eval_parts(&self, t: f64, theta: f64, z: f64) -> ([f64; 3], [[f64; 3]; 3]) {
        let p = self.inner.layers(theta, z);
        let mut u = [0.0; 3];
        let mut du = [[0.0; 3]; 3];
        for c in 0..3 {
            u[c] = p.u0[c] + t * p.u1[c];
            du[c][0] = p.u1[c];
            du[c][1] = p.du0[c][0] + t * p.du1[c][0];
            du[c][2] = p.du0[c][1] + t * p.du1[c][1];
        }
        (u, du)
    }

    fn support(&self) -> Option<SupportBox> {
        Some(self.support)
    }

    fn bc_tag(&self) -> BcTag {
        BcTag::V
    }
}

struct TovstikSmirnov {
    surface: Arc<SurfacePatch>,
    phase: Arc<PhaseFunction>,
    amplitude: BumpProfile,
    n: f64,
}

impl TLinearField for TovstikSmirnov {
    fn layers(&self, theta: f64, z: f64) -> LayerPoint {
        if !self.amplitude.contains(theta, z) {
            return LayerPoint::default();
        }
        let m = match self.surface.metric_core(theta, z) {
            Ok(m) => m,
            Err(_) => return LayerPoint::default(),
        };
        let mg = match self.surface.metric_gradients(theta, z) {
            Ok(g) => g,
            Err(_) => return LayerPoint::default(),
        };
        let amp = self.amplitude.eval(theta, z);
        let ph = self.phase.jet(theta, z);
        let n = self.n;
        let (sin, cos) = (n * ph.f).sin_cos();

        // Normal layer: w = n phi sin(n f).
        let w = n * amp.value * sin;
        let w_th = n * amp.d_theta * sin + n * n * amp.value * ph.d_theta * cos;
        let w_z = n * amp.d_z * sin + n * n * amp.value * ph.d_z * cos;
        let w_thth = n * amp.dd_theta_theta * sin
            + n * n * (2.0 * amp.d_theta * ph.d_theta + amp.value * ph.dd_theta_theta) * cos
            - n * n * n * amp.value * ph.d_theta * ph.d_theta * sin;
        let w_thz = n * amp.dd_theta_z * sin
            + n * n * (amp.d_theta * ph.d_z + amp.d_z * ph.d_theta + amp.value * ph.dd_theta_z) * cos
            - n * n * n * amp.value * ph.d_theta * ph.d_z * sin;
        let w_zz = n * amp.dd_zz * sin
            + n * n * (2.0 * amp.d_z * ph.d_z + amp.value * ph.dd_zz) * cos
            - n * n * n * amp.value * ph.d_z * ph.d_z * sin;

        // Tangential layers: v = A_th k_th (phi / f_th) cos(n f) and the
        // z-analogue; their theta/z rates cancel the O(n) parts of the
        // diagonal strain entries.
        let cv = m.a_theta * m.kappa_theta;
        let cv_th = mg.a_theta.0 * m.kappa_theta + m.a_theta * mg.kappa_theta.0;
        let cv_z = mg.a_theta.1 * m.kappa_theta + m.a_theta * mg.kappa_theta.1;
        let q_v = amp.value / ph.d_theta;
        let q_v_th = (amp.d_theta * ph.d_theta - amp.value * ph.dd_theta_theta)
            / (ph.d_theta * ph.d_theta);
        let q_v_z =
            (amp.d_z * ph.d_theta - amp.value * ph.dd_theta_z) / (ph.d_theta * ph.d_theta);
        let pv = cv * q_v;
        let pv_th = cv_th * q_v + cv * q_v_th;
        let pv_z = cv_z * q_v + cv * q_v_z;
        let v = pv * cos;
        let v_th = pv_th * cos - n * pv * ph.d_theta * sin;
        let v_z = pv_z * cos - n * pv * ph.d_z * sin;

        let cs = m.a_z * m.kappa_z;
        let cs_th = mg.a_z.0 * m.kappa_z + m.a_z * mg.kappa_z.0;
        let cs_z = mg.a_z.1 * m.kappa_z + m.a_z * mg.kappa_z.1;
        let q_s = amp.value / ph.d_z;
        let q_s_th = (amp.d_theta * ph.d_z - amp.value * ph.dd_theta_z) / (ph.d_z * ph.d_z);
        let q_s_z = (amp.d_z * ph.d_z - amp.value * ph.dd_zz) / (ph.d_z * ph.d_z);
        let ps = cs * q_s;
        let ps_th = cs_th * q_s + cs * q_s_th;
        let ps_z = cs_z * q_s + cs * q_s_z;
        let s = ps * cos;
        let s_th = ps_th * cos - n * ps * ph.d_theta * sin;
        let s_z = ps_z * cos - n * ps * ph.d_z * sin;

        // t-linear corrections: u_theta = v - t (w_th / A_th - k_th v), etc.
        let g_th = w_th / m.a_theta - m.kappa_theta * v;
        let g_th_dth = w_thth / m.a_theta - w_th * mg.a_theta.0 / (m.a_theta * m.a_theta)
            - mg.kappa_theta.0 * v
            - m.kappa_theta * v_th;
        let g_th_dz = w_thz / m.a_theta - w_th * mg.a_theta.1 / (m.a_theta * m.a_theta)
            - mg.kappa_theta.1 * v
            - m.kappa_theta * v_z;
        let g_z = w_z / m.a_z - m.kappa_z * s;
        let g_z_dth = w_thz / m.a_z - w_z * mg.a_z.0 / (m.a_z * m.a_z)
            - mg.kappa_z.0 * s
            - m.kappa_z * s_th;
        let g_z_dz = w_zz / m.a_z - w_z * mg.a_z.1 / (m.a_z * m.a_z)
            - mg.kappa_z.1 * s
            - m.kappa_z * s_z;

        LayerPoint {
            u0: [w, v, s],
            u1: [0.0, -g_th, -g_z],
            du0: [[w_th, w_z], [v_th, v_z], [s_th, s_z]],
            du1: [[0.0, 0.0], [-g_th_dth, -g_th_dz], [-g_z_dth, -g_z_dz]],
        }
    }
}

struct KirchhoffLike {
    surface: Arc<SurfacePatch>,
    amplitude: BumpProfile,
    sqrt_h: f64,
}

impl TLinearField for KirchhoffLike {
    fn layers(&self, theta: f64, z: f64) -> LayerPoint {
        let xi = theta / self.sqrt_h;
        if !self.amplitude.contains(xi, z) {
            return LayerPoint::default();
        }
        let m = match self.surface.metric_core(theta, z) {
            Ok(m) => m,
            Err(_) => return LayerPoint::default(),
        };
        let mg = match self.surface.metric_gradients(theta, z) {
            Ok(g) => g,
            Err(_) => return LayerPoint::default(),
        };
        let w = self.amplitude.eval(xi, z);
        let rh = 1.0 / self.sqrt_h;
        let (at, az) = (m.a_theta, m.a_z);
        // u_t = W(theta/sqrt(h), z); the tangential layers rotate the normal
        // fiber so the transverse shear strains vanish identically.
        let u1_theta = -w.d_theta * rh / at;
        let u1_z = -w.d_z / az;
        let u1_theta_dth =
            -w.dd_theta_theta * rh * rh / at + w.d_theta * rh * mg.a_theta.0 / (at * at);
        let u1_theta_dz = -w.dd_theta_z * rh / at + w.d_theta * rh * mg.a_theta.1 / (at * at);
        let u1_z_dth = -w.dd_theta_z * rh / az + w.d_z * mg.a_z.0 / (az * az);
        let u1_z_dz = -w.dd_zz / az + w.d_z * mg.a_z.1 / (az * az);
        LayerPoint {
            u0: [w.value, 0.0, 0.0],
            u1: [0.0, u1_theta, u1_z],
            du0: [[w.d_theta * rh, w.d_z], [0.0, 0.0], [0.0, 0.0]],
            du1: [[0.0, 0.0], [u1_theta_dth, u1_theta_dz], [u1_z_dth, u1_z_dz]],
        }
    }
}

fn node_count_for(periods: f64) -> usize {
    (24.0f64).max(12.0 * periods.ceil()) as usize
}

/// Builds the negative-curvature test field for thickness `h`: oscillation
/// count `n(h) = ceil(h^(-1/3))`, amplitudes per the transport phase `f`.
///
/// Errors if the surface is not of negative Gaussian curvature or if a phase
/// gradient vanishes on the amplitude support (the construction divides by
/// `f_theta` and `f_z`).
pub fn tovstik_smirnov(
    surface: &Arc<SurfacePatch>,
    h: f64,
    amplitude: BumpProfile,
    phase: &Arc<PhaseFunction>,
) -> Result<AnsatzField> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidParameter(format!("thickness h={h} must lie in (0, 1)")));
    }
    let cert = bounds_certificate(surface, 32)?;
    if cert.gaussian_sign != GaussianSign::Negative {
        return Err(Error::SignMismatch(format!(
            "negative-curvature construction on a {} surface",
            cert.gaussian_sign
        )));
    }
    let supp = amplitude.support();
    let grad = phase.gradient_range(supp.theta, supp.z, 64);
    if grad.min_abs_theta < 1e-8 {
        return Err(Error::VanishingPhaseGradient { axis: "theta", min: grad.min_abs_theta });
    }
    if grad.min_abs_z < 1e-8 {
        return Err(Error::VanishingPhaseGradient { axis: "z", min: grad.min_abs_z });
    }
    let n = oscillation_index(h, 1.0 / 3.0);
    let tau = std::f64::consts::TAU;
    let periods_theta = n as f64 * grad.max_abs_theta * (supp.theta.1 - supp.theta.0) / tau;
    let periods_z = n as f64 * grad.max_abs_z * (supp.z.1 - supp.z.0) / tau;
    let quadrature_nodes = (
        4,
        node_count_for(periods_theta).max(6 * n as usize),
        node_count_for(periods_z),
    );
    Ok(AnsatzField {
        kind: AnsatzKind::NegativeCurvature,
        oscillation_count: n,
        h,
        support: supp,
        quadrature_nodes,
        inner: Arc::new(TovstikSmirnov {
            surface: Arc::clone(surface),
            phase: Arc::clone(phase),
            amplitude,
            n: n as f64,
        }),
    })
}

/// Builds the positive-curvature Kirchhoff-like test field for thickness `h`.
///
/// The amplitude `W` is given on the unscaled parameter box and evaluated at
/// `(theta / sqrt(h), z)`, which shrinks its support in `theta`; errors if the
/// scaled support would leave the theta range.
pub fn kirchhoff_like(
    surface: &Arc<SurfacePatch>,
    h: f64,
    amplitude: BumpProfile,
) -> Result<AnsatzField> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidParameter(format!("thickness h={h} must lie in (0, 1)")));
    }
    let cert = bounds_certificate(surface, 32)?;
    if cert.gaussian_sign != GaussianSign::Positive {
        return Err(Error::SignMismatch(format!(
            "positive-curvature construction on a {} surface",
            cert.gaussian_sign
        )));
    }
    let sqrt_h = h.sqrt();
    let (t0, t1) = surface.theta_range();
    let scaled = (sqrt_h * amplitude.theta.lo, sqrt_h * amplitude.theta.hi);
    if scaled.0 < t0 - 1e-12 || scaled.1 > t1 + 1e-12 {
        return Err(Error::SupportViolation { lo: scaled.0, hi: scaled.1 });
    }
    let support = SupportBox { theta: scaled, z: (amplitude.z.lo, amplitude.z.hi) };
    Ok(AnsatzField {
        kind: AnsatzKind::PositiveCurvature,
        oscillation_count: oscillation_index(h, 0.5),
        h,
        support,
        // The support-restricted rule sees a single smooth bump.
        quadrature_nodes: (4, 48, 32),
        inner: Arc::new(KirchhoffLike { surface: Arc::clone(surface), amplitude, sqrt_h }),
    })
}

/// One verified admissibility condition.
#[derive(Debug, Clone)]
pub struct MembershipCondition {
    pub name: &'static str,
    pub max_violation: f64,
    pub pass: bool,
}

/// Trace report for membership in the admissible subspace: tangential
/// components vanish on both end faces and are periodic across the theta seam.
#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub conditions: Vec<MembershipCondition>,
}

impl MembershipReport {
    pub fn pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn violated(&self) -> Vec<&'static str> {
        self.conditions.iter().filter(|c| !c.pass).map(|c| c.name).collect()
    }
}

const TRACE_TOL: f64 = 1e-9;

/// Checks the subspace traces of a field on boundary grids (tolerance 1e-9).
pub fn membership_check(field: &dyn Field, domain: &ShellDomain) -> MembershipReport {
    let (t0, t1) = domain.surface().theta_range();
    let (z0, z1) = domain.surface().z_range();
    let (tl, tu) = domain.t_range();
    let nt = 8;
    let ng = 64;
    let mut conditions = Vec::new();

    for (name, z_face) in [("u_theta = u_z = 0 at z = 1", z0), ("u_theta = u_z = 0 at z = 1 + l", z1)]
    {
        let mut worst: f64 = 0.0;
        for i in 0..=nt {
            let t = tl + (tu - tl) * i as f64 / nt as f64;
            for j in 0..=ng {
                let th = t0 + (t1 - t0) * j as f64 / ng as f64;
                worst = worst
                    .max(field.eval(Comp::Theta, t, th, z_face).abs())
                    .max(field.eval(Comp::Z, t, th, z_face).abs());
            }
        }
        conditions.push(MembershipCondition { name, max_violation: worst, pass: worst <= TRACE_TOL });
    }

    let mut worst: f64 = 0.0;
    for i in 0..=nt {
        let t = tl + (tu - tl) * i as f64 / nt as f64;
        for j in 0..=ng {
            let z = z0 + (z1 - z0) * j as f64 / ng as f64;
            for c in [Comp::Theta, Comp::Z] {
                worst = worst.max((field.eval(c, t, t0, z) - field.eval(c, t, t1, z)).abs());
            }
        }
    }
    conditions.push(MembershipCondition {
        name: "u_theta, u_z periodic in theta",
        max_violation: worst,
        pass: worst <= TRACE_TOL,
    });

    MembershipReport { conditions }
}
