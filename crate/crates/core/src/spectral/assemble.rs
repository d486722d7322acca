use nalgebra::{DMatrix, DMatrixViewMut, DVector};
use rayon::prelude::*;

use super::basis::{DiscreteSpace, Resolution};
use crate::calculus::{Comp, Field, GradientKind, QuadratureRule};
use crate::geometry::MetricSample;
use crate::{Error, Result};

/// The two quadratic-form matrices of the discrete Korn problem:
/// `E[i][j] = (e(u_i), e(u_j))` and `G[i][j] = (grad u_i, grad u_j)`.
pub struct GramPair {
    pub e: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub h: f64,
    pub resolution: Resolution,
    pub kind: GradientKind,
}

const NODE_BLOCK: usize = 128;
const COLUMN_CHUNK: usize = 256;

struct NodeTables {
    /// Flattened nodes in fixed (theta, z, t) order.
    nodes: Vec<(usize, usize, usize)>,
    theta_nodes: Vec<f64>,
    z_nodes: Vec<f64>,
    t_nodes: Vec<f64>,
    /// Quadrature weight including the integration weight, per node.
    weights: Vec<f64>,
    metrics: Vec<MetricSample>,
}

fn node_tables(space: &DiscreteSpace, rule: &QuadratureRule) -> Result<NodeTables> {
    let domain = space.domain();
    let surface = domain.surface();
    let exact = domain.exact_volume_element;
    let metrics: Result<Vec<MetricSample>> = rule
        .theta
        .nodes
        .par_iter()
        .flat_map_iter(|&th| rule.z.nodes.iter().map(move |&z| (th, z)))
        .map(|(th, z)| crate::calculus::metric_unchecked(surface, th, z))
        .collect();
    let metrics_grid = metrics?;
    let mut nodes = Vec::with_capacity(rule.node_count());
    let mut weights = Vec::with_capacity(rule.node_count());
    let mut metric_per_node = Vec::with_capacity(rule.node_count());
    for (i_th, (&_th, &w_th)) in rule.theta.nodes.iter().zip(&rule.theta.weights).enumerate() {
        for (i_z, (&_z, &w_z)) in rule.z.nodes.iter().zip(&rule.z.weights).enumerate() {
            let m = metrics_grid[i_th * rule.z.len() + i_z];
            for (i_t, (&t, &w_t)) in rule.t.nodes.iter().zip(&rule.t.weights).enumerate() {
                let mut w = w_th * w_z * w_t * m.a_theta * m.a_z;
                if exact {
                    w *= (1.0 + t * m.kappa_theta) * (1.0 + t * m.kappa_z);
                }
                nodes.push((i_th, i_z, i_t));
                weights.push(w);
                metric_per_node.push(m);
            }
        }
    }
    Ok(NodeTables {
        nodes,
        theta_nodes: rule.theta.nodes.clone(),
        z_nodes: rule.z.nodes.clone(),
        t_nodes: rule.t.nodes.clone(),
        weights,
        metrics: metric_per_node,
    })
}

/// Accumulates `out += X^T X` with a fixed column chunking, so the float
/// operation order is independent of the worker count.
fn accumulate_symmetric_product(out: &mut [f64], x: &DMatrix<f64>, xt: &DMatrix<f64>, dim: usize) {
    out.par_chunks_mut(dim * COLUMN_CHUNK).enumerate().for_each(|(ci, slice)| {
        let c0 = ci * COLUMN_CHUNK;
        let w = slice.len() / dim;
        let mut view = DMatrixViewMut::from_slice(slice, dim, w);
        view.gemm(1.0, xt, &x.columns(c0, w), 1.0);
    });
}

/// Fills the weighted entry rows of one node block.
///
/// `rows_per_node` is 9 for gradient entries and 6 for strain entries in
/// Voigt order with sqrt(2) off-diagonal weights, so that the Euclidean inner
/// product of two rows equals the Frobenius product of the tensors.
fn fill_block(
    space: &DiscreteSpace,
    tables: &NodeTables,
    block: std::ops::Range<usize>,
    kind: GradientKind,
    strain: bool,
    x: &mut DMatrix<f64>,
) -> Result<()> {
    let rows_per_node = if strain { 6 } else { 9 };
    let n_block = block.len();
    let x_data: &mut [f64] = x.as_mut_slice();
    // Columns are fields; parallelize over disjoint column ranges.
    let cols: Vec<(usize, &mut [f64])> =
        x_data.chunks_mut(rows_per_node * n_block).enumerate().collect();
    let errors: Vec<Option<Error>> = cols
        .into_par_iter()
        .map(|(j, col)| {
            for (local, q) in block.clone().enumerate() {
                let (i_th, i_z, i_t) = tables.nodes[q];
                let theta = tables.theta_nodes[i_th];
                let z = tables.z_nodes[i_z];
                let t = tables.t_nodes[i_t];
                let m = &tables.metrics[q];
                let sqrt_w = tables.weights[q].sqrt();
                let (u, du) = space.basis_parts(j, t, theta, z);
                let g = match crate::calculus::gradient_from_parts(kind, m, t, &u, &du) {
                    Ok(g) => g,
                    Err(e) => return Some(e),
                };
                let base = local * rows_per_node;
                if strain {
                    let e = g.symmetrize().0;
                    let r = std::f64::consts::SQRT_2;
                    col[base] = sqrt_w * e[(0, 0)];
                    col[base + 1] = sqrt_w * e[(1, 1)];
                    col[base + 2] = sqrt_w * e[(2, 2)];
                    col[base + 3] = sqrt_w * r * e[(0, 1)];
                    col[base + 4] = sqrt_w * r * e[(0, 2)];
                    col[base + 5] = sqrt_w * r * e[(1, 2)];
                } else {
                    for (k, v) in g.0.iter().enumerate() {
                        col[base + k] = sqrt_w * v;
                    }
                }
            }
            None
        })
        .collect();
    if let Some(e) = errors.into_iter().flatten().next() {
        return Err(e);
    }
    Ok(())
}

fn assemble_form(space: &DiscreteSpace, tables: &NodeTables, kind: GradientKind, strain: bool) -> Result<DMatrix<f64>> {
    let dim = space.dim();
    let rows_per_node = if strain { 6 } else { 9 };
    let mut data = vec![0.0; dim * dim];
    let mut x = DMatrix::<f64>::zeros(rows_per_node * NODE_BLOCK, dim);
    let n_nodes = tables.nodes.len();
    let mut start = 0;
    while start < n_nodes {
        let end = (start + NODE_BLOCK).min(n_nodes);
        let rows = rows_per_node * (end - start);
        if rows != x.nrows() {
            x = DMatrix::<f64>::zeros(rows, dim);
        }
        fill_block(space, tables, start..end, kind, strain, &mut x)?;
        let xt = x.transpose();
        accumulate_symmetric_product(&mut data, &x, &xt, dim);
        start = end;
    }
    let mut m = DMatrix::from_vec(dim, dim, data);
    // Enforce exact symmetry.
    let mt = m.transpose();
    m = 0.5 * (m + mt);
    Ok(m)
}

/// Assembles the strain and gradient Gram matrices of the space by
/// tensor-product quadrature.
///
/// The rule must resolve the highest basis frequency (at least 4 nodes per
/// oscillation); under-resolution is detected by recomputing a sample of
/// entries with a doubled rule and failing on drift above 1e-6.
pub fn assemble(space: &DiscreteSpace, rule: &QuadratureRule, kind: GradientKind) -> Result<GramPair> {
    let min_theta = 4 * space.resolution().max_theta_frequency();
    if rule.theta.len() < min_theta {
        return Err(Error::RuleMismatch(format!(
            "theta rule has {} nodes; highest basis frequency needs at least {min_theta}",
            rule.theta.len()
        )));
    }
    let tables = node_tables(space, rule)?;
    let e = assemble_form(space, &tables, kind, true)?;
    let g = assemble_form(space, &tables, kind, false)?;

    // Refinement drift probe on a deterministic sample of entries.
    let refined = rule.refined();
    let dim = space.dim();
    let sample: Vec<(usize, usize)> = (0..8)
        .map(|k| {
            let i = (k * dim) / 8;
            let j = ((k + 3) * dim) / 8;
            (i.min(dim - 1), j.min(dim - 1))
        })
        .collect();
    let mut drift: f64 = 0.0;
    for &(i, j) in &sample {
        let (e_ref, g_ref) = entry_quadrature(space, i, j, &refined, kind)?;
        let scale_e = 1.0f64.max(e[(i, j)].abs());
        let scale_g = 1.0f64.max(g[(i, j)].abs());
        drift = drift
            .max((e[(i, j)] - e_ref).abs() / scale_e)
            .max((g[(i, j)] - g_ref).abs() / scale_g);
    }
    if drift > 1e-6 {
        return Err(Error::UnderResolvedRule { drift });
    }

    Ok(GramPair {
        e,
        g,
        h: space.domain().h(),
        resolution: space.resolution(),
        kind,
    })
}

/// Single Gram entry pair `(E_ij, G_ij)` by direct quadrature of the two
/// fields' gradients; the independent slow path used for cross-checks.
pub fn entry_quadrature(
    space: &DiscreteSpace,
    i: usize,
    j: usize,
    rule: &QuadratureRule,
    kind: GradientKind,
) -> Result<(f64, f64)> {
    let surface = space.domain().surface();
    let exact = space.domain().exact_volume_element;
    let mut e_acc = 0.0;
    let mut g_acc = 0.0;
    for (&theta, &w_th) in rule.theta.nodes.iter().zip(&rule.theta.weights) {
        for (&z, &w_z) in rule.z.nodes.iter().zip(&rule.z.weights) {
            let m = crate::calculus::metric_unchecked(surface, theta, z)?;
            for (&t, &w_t) in rule.t.nodes.iter().zip(&rule.t.weights) {
                let mut w = w_th * w_z * w_t * m.a_theta * m.a_z;
                if exact {
                    w *= (1.0 + t * m.kappa_theta) * (1.0 + t * m.kappa_z);
                }
                let (ui, dui) = space.basis_parts(i, t, theta, z);
                let (uj, duj) = space.basis_parts(j, t, theta, z);
                let gi = crate::calculus::gradient_from_parts(kind, &m, t, &ui, &dui)?;
                let gj = crate::calculus::gradient_from_parts(kind, &m, t, &uj, &duj)?;
                let ei = gi.symmetrize().0;
                let ej = gj.symmetrize().0;
                e_acc += w * ei.iter().zip(ej.iter()).map(|(a, b)| a * b).sum::<f64>();
                g_acc += w * gi.0.iter().zip(gj.0.iter()).map(|(a, b)| a * b).sum::<f64>();
            }
        }
    }
    Ok((e_acc, g_acc))
}

/// `L2` mass matrix of the space (block diagonal over components, since each
/// basis field carries a single component).
pub fn assemble_mass(space: &DiscreteSpace, rule: &QuadratureRule) -> Result<DMatrix<f64>> {
    let tables = node_tables(space, rule)?;
    let dim = space.dim();
    let mut mass = DMatrix::<f64>::zeros(dim, dim);
    for comp in Comp::ALL {
        let range = space.component_range(comp);
        if range.is_empty() {
            continue;
        }
        let width = range.len();
        let n_nodes = tables.nodes.len();
        let mut x = DMatrix::<f64>::zeros(n_nodes.min(8 * NODE_BLOCK), width);
        let mut start = 0;
        let mut block_data = vec![0.0; width * width];
        while start < n_nodes {
            let end = (start + 8 * NODE_BLOCK).min(n_nodes);
            if end - start != x.nrows() {
                x = DMatrix::<f64>::zeros(end - start, width);
            }
            {
                let x_slice = x.as_mut_slice();
                x_slice.par_chunks_mut(end - start).enumerate().for_each(|(jj, col)| {
                    let field = range.start + jj;
                    for (local, q) in (start..end).enumerate() {
                        let (i_th, i_z, i_t) = tables.nodes[q];
                        let (u, _) = space.basis_parts(
                            field,
                            tables.t_nodes[i_t],
                            tables.theta_nodes[i_th],
                            tables.z_nodes[i_z],
                        );
                        col[local] = tables.weights[q].sqrt() * u[comp as usize];
                    }
                });
            }
            let xt = x.transpose();
            accumulate_symmetric_product(&mut block_data, &x, &xt, width);
            start = end;
        }
        let block = DMatrix::from_vec(width, width, block_data);
        mass.view_mut((range.start, range.start), (width, width)).copy_from(&block);
    }
    let mt = mass.transpose();
    Ok(0.5 * (mass + mt))
}

/// Estimated condition number of the `L2` Gram matrix, blockwise by
/// component; errors above 1e10.
pub(crate) fn check_mass_conditioning(space: &DiscreteSpace) -> Result<()> {
    let rule = space.assembly_rule();
    let mass = assemble_mass(space, &rule)?;
    let mut lambda_max: f64 = 0.0;
    let mut lambda_min = f64::INFINITY;
    for comp in Comp::ALL {
        let range = space.component_range(comp);
        if range.is_empty() {
            continue;
        }
        let block = mass.view((range.start, range.start), (range.len(), range.len())).into_owned();
        let chol = block.clone().cholesky().ok_or(Error::IllConditionedBasis {
            cond: f64::INFINITY,
            dim: space.dim(),
        })?;
        // Power iteration for the extremes; loose tolerance is fine for a guard.
        let n = block.nrows();
        let mut v = DVector::from_fn(n, |i, _| if i % 2 == 0 { 1.0 } else { -0.7 });
        v /= v.norm();
        let mut top = 0.0;
        for _ in 0..40 {
            let w = &block * &v;
            top = v.dot(&w);
            let nrm = w.norm();
            if nrm == 0.0 {
                break;
            }
            v = w / nrm;
        }
        let mut u = DVector::from_fn(n, |i, _| 1.0 / (1.0 + i as f64));
        u /= u.norm();
        let mut bottom = 0.0;
        for _ in 0..40 {
            let w = chol.solve(&u);
            let nrm = w.norm();
            if nrm == 0.0 {
                break;
            }
            u = w / nrm;
            bottom = u.dot(&(&block * &u));
        }
        lambda_max = lambda_max.max(top);
        lambda_min = lambda_min.min(bottom);
    }
    let cond = lambda_max / lambda_min.max(f64::MIN_POSITIVE);
    if !(cond.is_finite() && cond < 1e10) {
        return Err(Error::IllConditionedBasis { cond, dim: space.dim() });
    }
    Ok(())
}

/// `L2` projection of an arbitrary field onto the space: solves
/// `M c = b` with `b_i = (u_i, field)`.
pub fn project(space: &DiscreteSpace, field: &dyn Field, rule: &QuadratureRule) -> Result<DVector<f64>> {
    let tables = node_tables(space, rule)?;
    let dim = space.dim();
    let mut b = DVector::<f64>::zeros(dim);
    for (q, &(i_th, i_z, i_t)) in tables.nodes.iter().enumerate() {
        let theta = tables.theta_nodes[i_th];
        let z = tables.z_nodes[i_z];
        let t = tables.t_nodes[i_t];
        let w = tables.weights[q];
        let (fu, _) = field.eval_parts(t, theta, z);
        for j in 0..dim {
            let (u, _) = space.basis_parts(j, t, theta, z);
            let dot = u[0] * fu[0] + u[1] * fu[1] + u[2] * fu[2];
            if dot != 0.0 {
                b[j] += w * dot;
            }
        }
    }
    let mass = assemble_mass(space, rule)?;
    mass.cholesky().ok_or(Error::SingularGram).map(|ch| ch.solve(&b))
}

/// Quadratic form value `c^T A c`.
pub fn form_value(a: &DMatrix<f64>, c: &DVector<f64>) -> f64 {
    c.dot(&(a * c))
}

/// Norm of a coefficient vector restricted to one component block.
pub fn component_norm_sq(
    mass: &DMatrix<f64>,
    space: &DiscreteSpace,
    comp: Comp,
    c: &DVector<f64>,
) -> f64 {
    let range = space.component_range(comp);
    if range.is_empty() {
        return 0.0;
    }
    let block = mass.view((range.start, range.start), (range.len(), range.len()));
    let sub = c.rows(range.start, range.len());
    sub.dot(&(block * sub))
}

/// Writes a matrix as plain-text coordinate triplets `row col value`.
pub fn write_coordinate_triplets(m: &DMatrix<f64>, mut out: impl std::io::Write) -> std::io::Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            writeln!(out, "{} {} {:.16e}", i, j, m[(i, j)])?;
        }
    }
    Ok(())
}
