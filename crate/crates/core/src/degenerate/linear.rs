use crate::error::{Error, Result};

use super::banded::BandMatrix;
use super::grid::{stencil3, GridField, TensorGrid};

/// Sparse rows `(column, value)` of a grid operator.
pub(crate) type Rows = Vec<Vec<(usize, f64)>>;

/// Factors the rows as a band matrix and solves, with one step of iterative
/// refinement; returns the solution and the final residual sup-norm.
pub(crate) fn solve_rows(rows: &Rows, band: usize, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = rows.len();
    let mut a = BandMatrix::new(n, band, band);
    for (i, r) in rows.iter().enumerate() {
        for &(j, v) in r {
            a.add(i, j, v);
        }
    }
    a.factor()?;
    let residual = |x: &[f64]| -> Vec<f64> {
        rows.iter().zip(b).map(|(r, bi)| bi - r.iter().map(|&(j, v)| v * x[j]).sum::<f64>()).collect()
    };
    let mut x = a.solve(b);
    let r = residual(&x);
    let dx = a.solve(&r);
    x.iter_mut().zip(&dx).for_each(|(xi, d)| *xi += d);
    let res = residual(&x).iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    Ok((x, res))
}

/// Nodes of axis `a` for all axes.
pub(crate) fn axis_nodes(grid: &TensorGrid) -> Vec<Vec<f64>> {
    grid.axes.iter().map(|a| a.nodes()).collect()
}

#[derive(Clone, Debug)]
pub struct DegLinearSolution {
    pub u: GridField,
    /// sup-norm residual of the discrete system
    pub residual: f64,
}

/// Finite-difference solution of `y_n Δu + γ ∂_n u = f` on a box whose last
/// axis starts at `y_n = 0`. Dirichlet data `bc` are imposed on every side
/// except `y_n = 0`, where the equation itself reduces to `γ ∂_n u = f` and is
/// discretized with a one-sided three-point stencil.
pub fn solve_deg_linear_nd(
    gamma: f64,
    f: &GridField,
    bc: impl Fn(&[f64]) -> f64,
) -> Result<DegLinearSolution> {
    let grid = &f.grid;
    let n = grid.dim();
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    if grid.axes[n - 1].lo != 0.0 {
        return Err(Error::InvalidArgument("the last axis must start at y_n = 0".into()));
    }
    let nodes = axis_nodes(grid);
    let len = grid.len();
    let mut rows: Rows = Vec::with_capacity(len);
    let mut rhs = vec![0.0; len];
    for k in 0..len {
        let idx = grid.unflat(k);
        let x = grid.point(&idx);
        let tangential_edge = (0..n - 1).any(|a| idx[a] == 0 || idx[a] + 1 == grid.axes[a].count);
        let top = idx[n - 1] + 1 == grid.axes[n - 1].count;
        let mut row = Vec::new();
        if tangential_edge || top {
            row.push((k, 1.0));
            rhs[k] = bc(&x);
        } else {
            let yn = x[n - 1];
            for a in 0..n {
                let (ia, d1, d2) = stencil3(&nodes[a], idx[a]);
                for t in 0..3 {
                    let mut p = idx.clone();
                    p[a] = ia[t];
                    let mut c = yn * d2[t];
                    if a == n - 1 {
                        c += gamma * d1[t];
                    }
                    if c != 0.0 {
                        row.push((grid.flat(&p), c));
                    }
                }
            }
            rhs[k] = f.get(k, 0);
        }
        rows.push(row);
    }
    let (x, residual) = solve_rows(&rows, grid.stride(0), &rhs)?;
    let scale = rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if residual > 1e-10 * scale {
        return Err(Error::NoConvergence { iterations: 2, change: residual });
    }
    Ok(DegLinearSolution { u: GridField { grid: grid.clone(), m: 1, values: x }, residual })
}

/// Trapezoid weights of a nonuniform axis.
pub(crate) fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let k = nodes.len();
    (0..k)
        .map(|i| {
            let left = if i > 0 { nodes[i] - nodes[i - 1] } else { 0.0 };
            let right = if i + 1 < k { nodes[i + 1] - nodes[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// Trapezoid `L^p` norm of the first component.
pub fn lp_norm(u: &GridField, p: f64) -> f64 {
    let grid = &u.grid;
    let w: Vec<Vec<f64>> = axis_nodes(grid).iter().map(|v| trapezoid_weights(v)).collect();
    let s: f64 = (0..grid.len())
        .map(|k| {
            let idx = grid.unflat(k);
            let wt: f64 = idx.iter().enumerate().map(|(a, &i)| w[a][i]).product();
            wt * u.get(k, 0).abs().powf(p)
        })
        .sum();
    s.powf(1.0 / p)
}

/// `‖∇u‖_{L^p} + ‖y_n D^2 u‖_{L^p}` for the first component, by the trapezoid
/// rule with finite-difference derivatives.
pub fn estimate_wkp_norm(u: &GridField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p must be at least 1, got {p}")));
    }
    let grid = &u.grid;
    let n = grid.dim();
    let w: Vec<Vec<f64>> = axis_nodes(grid).iter().map(|v| trapezoid_weights(v)).collect();
    let (mut g, mut h) = (0.0, 0.0);
    for k in 0..grid.len() {
        let idx = grid.unflat(k);
        let wt: f64 = idx.iter().enumerate().map(|(a, &i)| w[a][i]).product();
        let jet = u.nodal_jet(&idx);
        let yn = grid.point(&idx)[n - 1];
        let gn = jet.grad[0].iter().map(|v| v * v).sum::<f64>().sqrt();
        let hn = jet.hess[0].iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        g += wt * gn.powf(p);
        h += wt * (yn.abs() * hn).powf(p);
    }
    Ok(g.powf(1.0 / p) + h.powf(1.0 / p))
}
