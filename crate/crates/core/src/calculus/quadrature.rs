use crate::geometry::ShellDomain;
use crate::{Error, Result};

/// Nodes and weights of a 1-D quadrature rule on an interval.
#[derive(Debug, Clone)]
pub struct Axis1 {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Axis1 {
    /// Gauss-Legendre rule with `n` nodes mapped affinely onto `[a, b]`.
    pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Self {
        let (xs, ws) = gauss_legendre_reference(n);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        Axis1 {
            nodes: xs.iter().map(|x| mid + half * x).collect(),
            weights: ws.iter().map(|w| half * w).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn span(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Tensor-product Gauss-Legendre rule over the shell coordinate box
/// `[-h/2, h/2] x [theta_lo, theta_hi] x [z_lo, z_hi]`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub t: Axis1,
    pub theta: Axis1,
    pub z: Axis1,
    bounds: [(f64, f64); 3],
}

impl QuadratureRule {
    /// Default node counts: 4 in `t`, 24 in `theta`, 24 in `z`.
    pub const DEFAULT_NODES: (usize, usize, usize) = (4, 24, 24);

    pub fn for_domain(domain: &ShellDomain, n_t: usize, n_theta: usize, n_z: usize) -> Self {
        let (t0, t1) = domain.t_range();
        let (th0, th1) = domain.surface().theta_range();
        let (z0, z1) = domain.surface().z_range();
        Self::for_box(n_t, n_theta, n_z, (t0, t1), (th0, th1), (z0, z1))
    }

    pub fn default_for(domain: &ShellDomain) -> Self {
        let (nt, nth, nz) = Self::DEFAULT_NODES;
        Self::for_domain(domain, nt, nth, nz)
    }

    pub fn for_box(
        n_t: usize,
        n_theta: usize,
        n_z: usize,
        t: (f64, f64),
        theta: (f64, f64),
        z: (f64, f64),
    ) -> Self {
        QuadratureRule {
            t: Axis1::gauss_legendre(n_t, t.0, t.1),
            theta: Axis1::gauss_legendre(n_theta, theta.0, theta.1),
            z: Axis1::gauss_legendre(n_z, z.0, z.1),
            bounds: [t, theta, z],
        }
    }

    /// Same node counts restricted to a sub-box in `(theta, z)`; used to
    /// integrate compactly supported fields exactly over their support.
    pub fn restricted(&self, theta: (f64, f64), z: (f64, f64)) -> Self {
        Self::for_box(self.t.len(), self.theta.len(), self.z.len(), self.bounds[0], theta, z)
    }

    /// Doubles every node count, keeping the box.
    pub fn refined(&self) -> Self {
        Self::for_box(
            2 * self.t.len(),
            2 * self.theta.len(),
            2 * self.z.len(),
            self.bounds[0],
            self.bounds[1],
            self.bounds[2],
        )
    }

    pub fn bounds(&self) -> [(f64, f64); 3] {
        self.bounds
    }

    pub fn node_count(&self) -> usize {
        self.t.len() * self.theta.len() * self.z.len()
    }

    /// Checks the rule covers the domain box (within roundoff slack).
    pub fn check_covers(&self, domain: &ShellDomain) -> Result<()> {
        let want = [
            domain.t_range(),
            domain.surface().theta_range(),
            domain.surface().z_range(),
        ];
        for (axis, (have, want)) in self.bounds.iter().zip(want.iter()).enumerate() {
            let tol = 1e-10 * (1.0 + want.1.abs() + want.0.abs());
            if (have.0 - want.0).abs() > tol || (have.1 - want.1).abs() > tol {
                return Err(Error::RuleMismatch(format!(
                    "axis {axis}: rule covers [{:.6}, {:.6}], domain needs [{:.6}, {:.6}]",
                    have.0, have.1, want.0, want.1
                )));
            }
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre polynomial, seeded with the Chebyshev-angle estimate.
pub fn gauss_legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_with_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial `P_n` by the three-term
/// recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 5, 24, 63] {
            let ax = Axis1::gauss_legendre(n, 1.0, 1.2);
            assert_relative_eq!(ax.span(), 0.2, epsilon = 1e-14);
            assert!(ax.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn rule_is_exact_for_polynomials() {
        // n nodes integrate degree 2n-1 exactly.
        let ax = Axis1::gauss_legendre(5, -1.0, 1.0);
        let integral: f64 = ax
            .nodes
            .iter()
            .zip(&ax.weights)
            .map(|(x, w)| w * (x.powi(9) + 3.0 * x.powi(4) - x))
            .sum();
        assert_relative_eq!(integral, 3.0 * 2.0 / 5.0, epsilon = 1e-14);
    }

    #[test]
    fn high_order_nodes_stay_sorted_and_symmetric() {
        let (xs, ws) = gauss_legendre_reference(40);
        for i in 1..xs.len() {
            assert!(xs[i] > xs[i - 1]);
        }
        for i in 0..xs.len() {
            assert_relative_eq!(xs[i], -xs[xs.len() - 1 - i], epsilon = 1e-14);
            assert_relative_eq!(ws[i], ws[ws.len() - 1 - i], epsilon = 1e-14);
        }
    }
}
