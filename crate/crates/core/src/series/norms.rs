use serde::{Deserialize, Serialize};

use super::multi_index::{factorial, MultiIndex};
use super::scalar::Scalar;
use super::truncated::TruncatedSeries;
use crate::error::{Error, Result};

/// Weights of the coefficient norm `||.||_{s,R,r}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    /// tangential radius weight
    pub big_r: f64,
    /// vertical radius weight
    pub small_r: f64,
    /// order cap
    pub order: usize,
}

impl NormParams {
    pub fn new(big_r: f64, small_r: f64, order: usize) -> Result<Self> {
        if !(big_r > 0.0) || !(small_r > 0.0 && small_r < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "norm params need R > 0 and 0 < r < 1, got R = {big_r}, r = {small_r}"
            )));
        }
        Ok(NormParams { big_r, small_r, order })
    }

    /// Weight multiplying `|V_mu|`.
    pub fn weight(&self, mu: &MultiIndex) -> f64 {
        let (t, v) = (mu.total(), mu.vertical());
        self.big_r.powi(t as i32) * self.small_r.powi(v as i32) / (factorial(t) * factorial(v))
    }
}

/// `sum_{|mu|+mu_n <= s} |V_mu| / (|mu|! mu_n!) R^|mu| r^mu_n`
pub fn weighted_norm<T: Scalar>(a: &TruncatedSeries<T>, p: &NormParams) -> f64 {
    a.terms()
        .filter(|(mu, _)| mu.weighted_order() as usize <= p.order)
        .map(|(mu, v)| v.to_f64().abs() * p.weight(mu))
        .sum()
}

/// Contribution of each weighted order `0..=s` to the norm.
pub fn weighted_norm_by_order<T: Scalar>(a: &TruncatedSeries<T>, p: &NormParams) -> Vec<f64> {
    let mut out = vec![0.0; p.order + 1];
    for (mu, v) in a.terms() {
        let w = mu.weighted_order() as usize;
        if w <= p.order {
            out[w] += v.to_f64().abs() * p.weight(mu);
        }
    }
    out
}

/// The geometric majorant `M R* / (R* - sum_i y_i)` truncated to the shape of
/// a `dim`/`order` series. Its derivative values are `M |mu|! / R*^|mu|`.
pub fn geometric_majorant(dim: usize, order: usize, m: f64, r_star: f64) -> TruncatedSeries<f64> {
    TruncatedSeries::from_derivatives(
        dim,
        order,
        MultiIndex::enumerate(dim, order)
            .into_iter()
            .map(|mu| {
                let t = mu.total();
                let v = m * factorial(t) / r_star.powi(t as i32);
                (mu, v)
            }),
    )
}

/// True iff every monomial coefficient of `a` is dominated by the geometric majorant.
pub fn majorant_check<T: Scalar>(a: &TruncatedSeries<T>, m: f64, r_star: f64) -> bool {
    a.terms().all(|(mu, v)| {
        let t = mu.total();
        let bound = m * factorial(t) / r_star.powi(t as i32);
        v.to_f64().abs() <= bound * (1.0 + 1e-12)
    })
}
