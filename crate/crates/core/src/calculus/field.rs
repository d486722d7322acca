use std::sync::Arc;

use nalgebra::Vector3;

use crate::geometry::{ShellDomain, SurfacePatch};

/// Component index of a displacement in the shell frame `(t, theta, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comp {
    T = 0,
    Theta = 1,
    Z = 2,
}

impl Comp {
    pub const ALL: [Comp; 3] = [Comp::T, Comp::Theta, Comp::Z];
}

/// Differentiation direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    T = 0,
    Theta = 1,
    Z = 2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::T, Axis::Theta, Axis::Z];
}

/// Rectangular `(theta, z)` support of a compactly supported field; the field
/// vanishes identically outside, so quadrature may be restricted to the box.
#[derive(Debug, Clone, Copy)]
pub struct SupportBox {
    pub theta: (f64, f64),
    pub z: (f64, f64),
}

/// Declared membership of a field relative to the admissible subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BcTag {
    /// In the subspace: tangential components vanish on the end faces and are
    /// periodic in `theta`.
    V,
    /// Tangential on one of the thin faces (`u_t = 0` at `t = +h/2`).
    TangentialFace,
    #[default]
    None,
}

/// A displacement field on the shell, evaluable component-wise together with
/// all nine first partial derivatives.
pub trait Field: Sync {
    fn eval(&self, comp: Comp, t: f64, theta: f64, z: f64) -> f64;
    fn partial(&self, comp: Comp, axis: Axis, t: f64, theta: f64, z: f64) -> f64;

    /// All components and all nine partials at one point.  Overridden by
    /// fields whose components share expensive ingredients.
    fn eval_parts(&self, t: f64, theta: f64, z: f64) -> ([f64; 3], [[f64; 3]; 3]) {
        let mut u = [0.0; 3];
        let mut du = [[0.0; 3]; 3];
        for c in Comp::ALL {
            u[c as usize] = self.eval(c, t, theta, z);
            for a in Axis::ALL {
                du[c as usize][a as usize] = self.partial(c, a, t, theta, z);
            }
        }
        (u, du)
    }

    /// Support box, when the field is known to be compactly supported.
    fn support(&self) -> Option<SupportBox> {
        None
    }

    fn bc_tag(&self) -> BcTag {
        BcTag::None
    }
}

type ScalarFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Displacement field given by component evaluators, with analytic partials
/// when supplied and centered finite differences (step `1e-6` of the axis
/// extent) otherwise.
#[derive(Clone)]
pub struct DisplacementField {
    comps: [ScalarFn; 3],
    partials: Option<[[ScalarFn; 3]; 3]>,
    steps: [f64; 3],
    support: Option<SupportBox>,
    bc_tag: BcTag,
}

impl DisplacementField {
    /// Field from component closures `(t, theta, z) -> f64`; partials by
    /// centered finite differences scaled to the domain extents.
    pub fn from_components(
        domain: &ShellDomain,
        u_t: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        u_theta: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        u_z: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let ex = domain.extents();
        DisplacementField {
            comps: [Arc::new(u_t), Arc::new(u_theta), Arc::new(u_z)],
            partials: None,
            steps: [1e-6 * ex[0], 1e-6 * ex[1], 1e-6 * ex[2]],
            support: None,
            bc_tag: BcTag::None,
        }
    }

    pub fn with_bc_tag(mut self, tag: BcTag) -> Self {
        self.bc_tag = tag;
        self
    }

    pub fn with_support(mut self, support: SupportBox) -> Self {
        self.support = Some(support);
        self
    }

    /// Pulls a Cartesian vector field back to shell-frame components:
    /// `u_t = U(R) . n`, `u_theta = U(R) . e_theta`, `u_z = U(R) . e_z`,
    /// where `R = r + t n` and the frame is taken on the mid-surface.
    pub fn pullback(
        domain: &ShellDomain,
        cartesian: impl Fn(Vector3<f64>) -> Vector3<f64> + Send + Sync + Clone + 'static,
    ) -> Self {
        let surface = Arc::clone(domain.surface());
        let component = |idx: usize| -> ScalarFn {
            let surface = Arc::clone(&surface);
            let cartesian = cartesian.clone();
            Arc::new(move |t: f64, th: f64, z: f64| {
                let frame = surface.frame(th, z);
                let point = surface.position(th, z) + t * frame[0];
                cartesian(point).dot(&frame[idx])
            })
        };
        let ex = domain.extents();
        DisplacementField {
            comps: [component(0), component(1), component(2)],
            partials: None,
            steps: [1e-6 * ex[0], 1e-6 * ex[1], 1e-6 * ex[2]],
            support: None,
            bc_tag: BcTag::None,
        }
    }

    /// Pullback of the constant field `x -> b`.
    pub fn translation(domain: &ShellDomain, b: Vector3<f64>) -> Self {
        Self::pullback(domain, move |_| b)
    }

    /// Pullback of the linear rotation field `x -> A x` with `A` antisymmetric,
    /// specified by its axial vector: `A x = axis x x`.
    pub fn rotation(domain: &ShellDomain, axis: Vector3<f64>) -> Self {
        Self::pullback(domain, move |x| axis.cross(&x))
    }
}

impl Field for DisplacementField {
    fn eval(&self, comp: Comp, t: f64, theta: f64, z: f64) -> f64 {
        (self.comps[comp as usize])(t, theta, z)
    }

    fn partial(&self, comp: Comp, axis: Axis, t: f64, theta: f64, z: f64) -> f64 {
        if let Some(parts) = &self.partials {
            return (parts[comp as usize][axis as usize])(t, theta, z);
        }
        let f = &self.comps[comp as usize];
        let h = self.steps[axis as usize];
        match axis {
            Axis::T => (f(t + h, theta, z) - f(t - h, theta, z)) / (2.0 * h),
            Axis::Theta => (f(t, theta + h, z) - f(t, theta - h, z)) / (2.0 * h),
            Axis::Z => (f(t, theta, z + h) - f(t, theta, z - h)) / (2.0 * h),
        }
    }

    fn support(&self) -> Option<SupportBox> {
        self.support
    }

    fn bc_tag(&self) -> BcTag {
        self.bc_tag
    }
}

/// Builder for fields with fully analytic partials, used by closures that know
/// their derivatives in closed form.
pub struct AnalyticField {
    pub comps: [ScalarFn; 3],
    pub partials: [[ScalarFn; 3]; 3],
}

impl AnalyticField {
    pub fn into_displacement(self, support: Option<SupportBox>, bc_tag: BcTag) -> DisplacementField {
        DisplacementField {
            comps: self.comps,
            partials: Some(self.partials),
            steps: [0.0; 3],
            support,
            bc_tag,
        }
    }
}

/// Cartesian Jacobian of a vector field by central differences, rotated into
/// the shell frame at `(theta, z)`.  This is the independent oracle the
/// frame-gradient formula is tested against: for components obtained by
/// pulling `U` back, the shell gradient equals `Q^T (grad U) Q` with
/// `Q = [n, e_theta, e_z]`.
pub fn cartesian_gradient_oracle(
    surface: &SurfacePatch,
    cartesian: &dyn Fn(Vector3<f64>) -> Vector3<f64>,
    t: f64,
    theta: f64,
    z: f64,
    step: f64,
) -> nalgebra::Matrix3<f64> {
    let frame = surface.frame(theta, z);
    let point = surface.position(theta, z) + t * frame[0];
    let mut jac = nalgebra::Matrix3::<f64>::zeros();
    for j in 0..3 {
        let mut dp = Vector3::zeros();
        dp[j] = step;
        let diff = (cartesian(point + dp) - cartesian(point - dp)) / (2.0 * step);
        jac.set_column(j, &diff);
    }
    let q = nalgebra::Matrix3::from_columns(&frame);
    q.transpose() * jac * q
}
