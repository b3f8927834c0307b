use serde::Serialize;

use crate::series::{weighted_norm_by_order, NormParams, TruncatedSeries};

/// Weighted coefficient norms of `∂_k v^j` and a geometric fit of their decay.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    /// cumulative norm of `∂_k v^j` through each weighted order, `[j][k][order]`
    pub partial_sums: Vec<Vec<Vec<f64>>>,
    /// contribution of each weighted order to the norms of `v^j`, summed over `j`
    pub order_norms: Vec<f64>,
    /// sum of the full norms of all `∂_k v^j`
    pub total: f64,
    /// fitted ratio between consecutive orders
    pub theta: f64,
    /// `R / θ`, infinite when the series is (numerically) a polynomial
    pub radius: f64,
    pub bound: Option<f64>,
    pub within_bound: Option<bool>,
}

/// Least-squares slope of `log y` against `x` over positive `y`.
pub fn log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(_, y)| *y > 0.0 && y.is_finite()).map(|&(x, y)| (x, y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `bound = C_0 ε_0` when both are given.
pub fn convergence_diagnostics(v: &[TruncatedSeries<f64>], params: &NormParams, bound: Option<f64>) -> ConvergenceReport {
    let n = v[0].dim();
    let mut partial_sums = Vec::new();
    let mut order_norms = vec![0.0; params.order + 1];
    for s in v {
        let mut rows = Vec::new();
        for k in 0..n {
            let by = weighted_norm_by_order(&s.differentiate(k), params);
            let mut acc = 0.0;
            let mut cum = Vec::with_capacity(by.len());
            for x in &by {
                acc += x;
                cum.push(acc);
            }
            rows.push(cum);
        }
        partial_sums.push(rows);
        for (o, x) in weighted_norm_by_order(s, params).iter().enumerate() {
            order_norms[o] += x;
        }
    }
    let total: f64 = partial_sums.iter().flatten().map(|c| c.last().copied().unwrap_or(0.0)).sum();
    let tail: Vec<(f64, f64)> =
        order_norms.iter().enumerate().skip(1).map(|(o, &x)| (o as f64, if x > 1e-300 { x } else { 0.0 })).collect();
    let theta = log_slope(&tail).map(f64::exp).unwrap_or(0.0);
    let radius = if theta > 0.0 { params.big_r / theta } else { f64::INFINITY };
    let within_bound = bound.map(|b| partial_sums.iter().flatten().flatten().all(|&x| x <= b));
    ConvergenceReport { partial_sums, order_norms, total, theta, radius, bound, within_bound }
}
