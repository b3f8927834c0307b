use crate::error::{Error, Result};
use crate::exact::{pde_residual, Field, ModelConstants};
use crate::hodograph::{inverse_reconstruct, reciprocal_series, rescale_series, LegendreState, Reconstructed};
use crate::series::TruncatedSeries;

use super::data::{rescale_data, CauchyData, DEFAULT_SMALLNESS};
use super::diagnostics::log_slope;
use super::expand::{ck_expand, CkSolution};
use super::system::{instantiate_model, system_residual};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub order: usize,
    /// accepted `ε_0` for the scaled data
    pub threshold: f64,
    pub max_halvings: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { order: 8, threshold: DEFAULT_SMALLNESS, max_halvings: 30 }
    }
}

#[derive(Clone, Debug)]
pub struct Theorem12Solution {
    /// data in original coordinates
    pub data: CauchyData<f64>,
    /// scale at which the recursion ran
    pub scale: f64,
    /// Legendre series in original coordinates
    pub solution: CkSolution<f64>,
    pub field: Reconstructed<LegendreState>,
    /// largest coefficient of the transformed residual through order `s - 2`
    pub system_residual: f64,
}

/// Cauchy data for a free boundary `x_n = φ(x')` and boundary direction
/// `V_+`: `v_0^1 = φ`, `v_0^j = α V_+^j / V_+^1`.
pub fn free_boundary_data(
    phi: &TruncatedSeries<f64>,
    vplus: &[TruncatedSeries<f64>],
    cn: &ModelConstants,
) -> Result<Vec<TruncatedSeries<f64>>> {
    if vplus.len() != cn.m {
        return Err(Error::InvalidArgument(format!("V+ has {} components, expected {}", vplus.len(), cn.m)));
    }
    let order = phi.order();
    let inv = reciprocal_series(&vplus[0].with_order(order))?;
    let mut v0 = vec![phi.clone()];
    for vj in &vplus[1..] {
        v0.push((&vj.with_order(order) * &inv).scale(&cn.alpha));
    }
    Ok(v0)
}

/// Local solution on the positive side of the free boundary `x_n = φ(x')`:
/// builds the data, shrinks it with the invariant scaling until `ε_0` is below
/// the threshold, runs the recursion, scales back, and reconstructs `u`.
pub fn theorem12_solve(
    phi: &TruncatedSeries<f64>,
    vplus: &[TruncatedSeries<f64>],
    cn: ModelConstants,
    opts: &SolveOptions,
) -> Result<Theorem12Solution> {
    let v0 = free_boundary_data(&phi.with_order(opts.order), vplus, &cn)?;
    let data = CauchyData::unchecked(v0)?;
    let mut r = 1.0;
    let mut scaled = data.clone();
    let mut k = 0;
    while scaled.epsilon0 > opts.threshold {
        if k == opts.max_halvings {
            return Err(Error::SmallnessViolated { epsilon0: data.epsilon0, threshold: opts.threshold });
        }
        r *= 0.5;
        k += 1;
        scaled = rescale_data(&data, &r)?;
    }
    let sys = instantiate_model(cn);
    let w = ck_expand(&sys, &scaled, opts.order)?;
    let v = rescale_series(&w.v, &(1.0 / r));
    let system_residual = if opts.order >= 2 {
        system_residual(&sys, &v)?.iter().map(|s| s.max_abs_in_orders(0, s.order())).fold(0.0, f64::max)
    } else {
        0.0
    };
    let p = v.iter().map(|s| s.coeff(&crate::series::MultiIndex::unit(cn.n, cn.n - 1))).collect();
    let solution = CkSolution { v: v.clone(), p, order: opts.order };
    let field = inverse_reconstruct(LegendreState::from_series(cn, v)?);
    Ok(Theorem12Solution { data, scale: r, solution, field, system_residual })
}

/// Points spread over the sphere `|x - c| = radius` (`count` of them).
pub fn shell_points(n: usize, center: &[f64], radius: f64, count: usize) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let dir: Vec<f64> = if n == 2 {
                let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / count as f64;
                vec![t.cos(), t.sin()]
            } else {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                let s = (1.0 - z * z).sqrt();
                let t = golden * i as f64;
                vec![s * t.cos(), s * t.sin(), z]
            };
            dir.iter().zip(center).map(|(d, c)| c + radius * d).collect()
        })
        .collect()
}

/// Largest `|Δu - |u|^{q-1}u|` on each shell; NaN samples propagate as errors.
pub fn shell_residuals<F: Field>(u: &F, q: f64, radii: &[f64], count: usize) -> Result<Vec<(f64, f64)>> {
    let n = u.dim();
    let center = vec![0.0; n];
    radii
        .iter()
        .map(|&rad| {
            let mut worst = 0.0f64;
            for x in shell_points(n, &center, rad, count) {
                let r = pde_residual(u, q, &x);
                if r.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NewtonFailure(format!("reconstruction failed at {x:?}")));
                }
                worst = r.iter().fold(worst, |a, v| a.max(v.abs()));
            }
            Ok((rad, worst))
        })
        .collect()
}

/// Slope of `log residual` against `log radius`.
pub fn decay_slope(shells: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = shells.iter().map(|&(r, e)| (r.ln(), e)).collect();
    log_slope(&pts)
}
