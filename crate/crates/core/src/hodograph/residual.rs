use crate::degenerate::GridField;
use crate::error::{Error, Result};
use crate::exact::{pde_residual, Field, FieldJet, ModelConstants};
use crate::series::{Scalar, TruncatedSeries};

use super::coefficients::{coefficient_series, coefficients_at};
use super::state::{LegendreRepr, LegendreState};

/// Residuals of the transformed system at one point `y` from the jet of `v`:
///
/// - `y_n (Δv^1 + Σ a_l ∂_{ln} v^1) + 2(κ-1) ∂_n v^1 - b`
/// - `y_n (Δv^j + Σ a_l ∂_{ln} v^j) + 2κ ∂_n v^j + κ Σ a_l ∂_l v^j + c ∂_n v^j`
pub fn residual_at(jet: &FieldJet, y: &[f64], cn: &ModelConstants) -> Result<Vec<f64>> {
    let n = cn.n;
    let k = cn.kappa;
    let co = coefficients_at(jet, cn)?;
    let yn = y[n - 1];
    let mut out = Vec::with_capacity(cn.m);
    for j in 0..cn.m {
        let h = &jet.hess[j];
        let g = &jet.grad[j];
        let lap: f64 = (0..n).map(|i| h[i][i]).sum();
        let mixed: f64 = (0..n).map(|l| co.a[l] * h[l][n - 1]).sum();
        let principal = yn * (lap + mixed);
        let r = if j == 0 {
            principal + 2.0 * (k - 1.0) * g[n - 1] - co.b
        } else {
            let drift: f64 = (0..n).map(|l| co.a[l] * g[l]).sum();
            principal + 2.0 * k * g[n - 1] + k * drift + co.c * g[n - 1]
        };
        out.push(r);
    }
    Ok(out)
}

/// The transformed system applied to series `v` of order `s >= 2`; the
/// result has order `s - 2` and is exact through that order.
pub fn residual_series<T: Scalar>(v: &[TruncatedSeries<T>], cn: &ModelConstants) -> Result<Vec<TruncatedSeries<T>>> {
    let n = cn.n;
    let s = v[0].order();
    if s < 2 {
        return Err(Error::InvalidArgument(format!("residual needs order >= 2, got {s}")));
    }
    let o = s - 2;
    let kappa: T = cn.kappa_as()?;
    let two = T::from_i64(2);
    let grads: Vec<Vec<TruncatedSeries<T>>> =
        v.iter().map(|vj| (0..n).map(|l| vj.differentiate(l).with_order(o)).collect()).collect();
    let co = coefficient_series(&grads[0], &v[1..].iter().map(|x| x.with_order(o)).collect::<Vec<_>>(), cn)?;
    let mut out = Vec::with_capacity(v.len());
    for (j, vj) in v.iter().enumerate() {
        let mut inner = TruncatedSeries::zero(n, o);
        for l in 0..n {
            let dl = vj.differentiate(l);
            inner = &inner + &dl.differentiate(l).with_order(o);
            inner = &inner + &(&co.a[l] * &dl.differentiate(n - 1).with_order(o));
        }
        let principal = inner.times_variable(n - 1);
        let dn = &grads[j][n - 1];
        let r = if j == 0 {
            &(&principal + &dn.scale(&(two.clone() * (kappa.clone() - T::one())))) - &co.b
        } else {
            let mut drift = TruncatedSeries::zero(n, o);
            for l in 0..n {
                drift = &drift + &(&co.a[l] * &grads[j][l]);
            }
            &(&(&principal + &dn.scale(&(two.clone() * kappa.clone()))) + &drift.scale(&kappa)) + &(&co.c * dn)
        };
        out.push(r);
    }
    Ok(out)
}

/// Residual of the transformed system for a state in either representation.
#[derive(Clone, Debug)]
pub enum SystemResidual {
    Series(Vec<TruncatedSeries<f64>>),
    Grid(GridField),
}

impl SystemResidual {
    pub fn max_abs(&self) -> f64 {
        match self {
            SystemResidual::Series(v) => v.iter().map(|s| s.max_abs_in_orders(0, s.order())).fold(0.0, f64::max),
            SystemResidual::Grid(g) => g.values.iter().fold(0.0, |a, v| a.max(v.abs())),
        }
    }
}

/// Grid mode evaluates the residual at interior nodes with three-point finite
/// differences; boundary nodes are left at zero.
pub fn residual_system(state: &LegendreState) -> Result<SystemResidual> {
    let cn = &state.constants;
    match &state.repr {
        LegendreRepr::Series(v) => Ok(SystemResidual::Series(residual_series(v, cn)?)),
        LegendreRepr::Grid(g) => {
            let mut out = GridField::zeros(g.grid.clone(), cn.m);
            for k in 0..g.grid.len() {
                let idx = g.grid.unflat(k);
                if g.grid.is_boundary(&idx) {
                    continue;
                }
                let y = g.grid.point(&idx);
                let r = residual_at(&g.nodal_jet(&idx), &y, cn)?;
                out.values[k * cn.m..(k + 1) * cn.m].copy_from_slice(&r);
            }
            Ok(SystemResidual::Grid(out))
        }
    }
}

/// Residual of the original system at the given points.
pub fn residual_original<F: Field>(u: &F, q: f64, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points.iter().map(|x| pde_residual(u, q, x)).collect()
}
