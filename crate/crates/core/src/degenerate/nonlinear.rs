use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ModelConstants;

use super::grid::{stencil3, GridField, TensorGrid};
use super::banded::BandMatrix;
use super::linear::{axis_nodes, Rows};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DirectOptions {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// regularization level; `None` uses the square of the finest spacing
    pub delta: Option<f64>,
    /// `c` in the splitting `(Δ - c) w = N_δ(u) - c u`; `None` uses the
    /// Lipschitz constant `δ^{q-1}` of the regularized source
    pub shift: Option<f64>,
}

impl Default for DirectOptions {
    fn default() -> Self {
        DirectOptions { damping: 0.5, tol: 1e-9, max_iter: 5000, delta: None, shift: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectSolution {
    #[serde(skip)]
    pub u: GridField,
    pub iterations: usize,
    pub change: f64,
    pub delta: f64,
    pub shift: f64,
}

/// `u / max(|u|, δ)^{1-q}`: equal to `|u|^{q-1} u` where `|u| >= δ` and
/// linear below, so it stays Lipschitz with constant `δ^{q-1}`.
pub fn regularized_source(u: &[f64], q: f64, delta: f64) -> Vec<f64> {
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    let s = norm.max(delta).powf(q - 1.0);
    u.iter().map(|v| s * v).collect()
}

/// Damped fixed point for `Δu = N_δ(u)` with Dirichlet data `bc` on the box
/// boundary: `(Δ - c) w = N_δ(u^k) - c u^k`, `u^{k+1} = u^k + ω (w - u^k)`,
/// until the sup-norm change falls below `tol`.
pub fn solve_direct_nonlinear(
    cn: &ModelConstants,
    grid: TensorGrid,
    bc: impl Fn(&[f64]) -> Vec<f64>,
    opts: &DirectOptions,
) -> Result<DirectSolution> {
    let (n, m) = (grid.dim(), cn.m);
    let nodes = axis_nodes(&grid);
    let h = grid.axes.iter().map(|a| a.spacing()).fold(f64::INFINITY, f64::min);
    let delta = opts.delta.unwrap_or(h * h);
    let shift = opts.shift.unwrap_or(delta.powf(cn.q - 1.0));
    let len = grid.len();
    let mut rows: Rows = Vec::with_capacity(len);
    let mut boundary = vec![false; len];
    for k in 0..len {
        let idx = grid.unflat(k);
        if grid.is_boundary(&idx) {
            boundary[k] = true;
            rows.push(vec![(k, 1.0)]);
            continue;
        }
        let mut row = vec![(k, -shift)];
        for a in 0..n {
            let (ia, _, d2) = stencil3(&nodes[a], idx[a]);
            for t in 0..3 {
                let mut p = idx.clone();
                p[a] = ia[t];
                row.push((grid.flat(&p), d2[t]));
            }
        }
        rows.push(row);
    }
    let mut u = GridField::zeros(grid.clone(), m);
    for k in 0..len {
        if boundary[k] {
            let v = bc(&grid.point(&grid.unflat(k)));
            u.values[k * m..(k + 1) * m].copy_from_slice(&v[..m]);
        }
    }
    // factor once, reuse for every component and iteration
    let mut band = BandMatrix::new(len, grid.stride(0), grid.stride(0));
    for (i, r) in rows.iter().enumerate() {
        for &(j, v) in r {
            band.add(i, j, v);
        }
    }
    band.factor()?;
    let mut change = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let mut rhs = vec![vec![0.0; len]; m];
        for k in 0..len {
            let uk = &u.values[k * m..(k + 1) * m];
            if boundary[k] {
                for c in 0..m {
                    rhs[c][k] = uk[c];
                }
            } else {
                let s = regularized_source(uk, cn.q, delta);
                for c in 0..m {
                    rhs[c][k] = s[c] - shift * uk[c];
                }
            }
        }
        change = 0.0;
        for (c, b) in rhs.iter().enumerate() {
            let w = band.solve(b);
            for k in 0..len {
                let old = u.values[k * m + c];
                let new = old + opts.damping * (w[k] - old);
                change = change.max((new - old).abs());
                u.values[k * m + c] = new;
            }
        }
        if !change.is_finite() {
            break;
        }
        if change < opts.tol {
            return Ok(DirectSolution { u, iterations: it, change, delta, shift });
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degenerate::Axis;

    #[test]
    fn zero_boundary_data() {
        let c = ModelConstants::new(0.5, 2, 1).unwrap();
        let grid = TensorGrid::new(vec![Axis::uniform(-1.0, 1.0, 9); 2]).unwrap();
        let s = solve_direct_nonlinear(&c, grid, |_| vec![0.0], &DirectOptions::default()).unwrap();
        assert!(s.u.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn source_regularization() {
        assert!((regularized_source(&[1e-6], 0.5, 1e-4)[0] - 1e-4).abs() < 1e-15);
        assert!((regularized_source(&[4.0], 0.5, 1e-4)[0] - 2.0).abs() < 1e-15);
        let r = regularized_source(&[1e-6, 0.0], 0.0, 1e-4);
        assert!((r[0] - 1e-2).abs() < 1e-15 && r[1] == 0.0);
    }
}
