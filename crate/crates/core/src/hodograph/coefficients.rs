use crate::error::{Error, Result};
use crate::exact::{FieldJet, ModelConstants};
use crate::series::{outer, Scalar, TruncatedSeries};

/// `1 + ∂_n v^1` must stay above this for the transform to be used.
pub const DENOMINATOR_GUARD: f64 = 0.1;

/// Coefficients `a_1..a_n`, `b`, `c` of the transformed system and
/// `|v'|_* = (1 + Σ_{j≥2} (v^j/α)^2)^{1/2}` at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemCoefficients {
    pub a: Vec<f64>,
    pub b: f64,
    pub c: f64,
    pub vstar: f64,
}

pub fn coefficients_at(jet: &FieldJet, cn: &ModelConstants) -> Result<SystemCoefficients> {
    let n = cn.n;
    let (k, q, alpha) = (cn.kappa, cn.q, cn.alpha);
    let g = &jet.grad[0];
    let d = 1.0 + g[n - 1];
    if d < DENOMINATOR_GUARD {
        return Err(Error::DenominatorGuard(d));
    }
    let grad_sq: f64 = g.iter().map(|x| x * x).sum();
    let mut a: Vec<f64> = g[..n - 1].iter().map(|gl| -2.0 * gl / d).collect();
    let a_n = -2.0 * g[n - 1] / d + grad_sq / (d * d);
    a.push(a_n);
    let s: f64 = jet.value[1..].iter().map(|v| (v / alpha).powi(2)).sum();
    let vstar = (1.0 + s).sqrt();
    let b = (k - 1.0) * (grad_sq + (1.0 - vstar.powf(q - 1.0)) * d * d) / d;
    let c = k * a_n - (b - 2.0 * (k - 1.0) * g[n - 1]) / d;
    Ok(SystemCoefficients { a, b, c, vstar })
}

/// The same coefficients as truncated series, built by composition.
#[derive(Clone, Debug)]
pub struct SeriesCoefficients<T: Scalar> {
    pub a: Vec<TruncatedSeries<T>>,
    pub b: TruncatedSeries<T>,
    pub c: TruncatedSeries<T>,
    /// `|v'|_*^{q-1}`
    pub vstar_pow: TruncatedSeries<T>,
}

/// `base^(num/den)` for a series with positive constant term.
pub fn power_series<T: Scalar>(base: &TruncatedSeries<T>, num: i64, den: i64) -> Result<TruncatedSeries<T>> {
    let b0 = base.constant_term();
    if b0.to_f64() <= 0.0 {
        return Err(Error::InvalidArgument(format!("power of a series with constant term {}", b0.to_f64())));
    }
    let lead = b0
        .pow_ratio(num, den)
        .ok_or_else(|| Error::NotRepresentable(format!("{:?}^({num}/{den})", b0)))?;
    let inner = base.add_constant(-b0.clone()).scale(&(T::one() / b0));
    let tail = TruncatedSeries::compose(&outer::binomial_power(num, den, base.order() + 1), &inner)?;
    Ok(tail.scale(&lead))
}

/// `1 / base` for a series with nonzero constant term.
pub fn reciprocal_series<T: Scalar>(base: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
    let b0 = base.constant_term();
    if b0.is_zero() {
        return Err(Error::InvalidArgument("reciprocal of a series vanishing at 0".into()));
    }
    let inv0 = T::one() / b0.clone();
    let inner = base.add_constant(-b0).scale(&inv0);
    let tail = TruncatedSeries::compose(&outer::reciprocal_one_plus(base.order() + 1), &inner)?;
    Ok(tail.scale(&inv0))
}

/// Coefficient series from `∇v^1` (`n` series) and `v' = (v^2..v^m)`.
pub fn coefficient_series<T: Scalar>(
    grad1: &[TruncatedSeries<T>],
    vprime: &[TruncatedSeries<T>],
    cn: &ModelConstants,
) -> Result<SeriesCoefficients<T>> {
    let n = grad1.len();
    let kappa: T = cn.kappa_as()?;
    let km1 = kappa.clone() - T::one();
    let two = T::from_i64(2);
    let d = grad1[n - 1].add_constant(T::one());
    let d0 = d.constant_term().to_f64();
    if d0 < DENOMINATOR_GUARD {
        return Err(Error::DenominatorGuard(d0));
    }
    let inv_d = reciprocal_series(&d)?;
    let mut grad_sq = TruncatedSeries::zero(d.dim(), d.order());
    for g in grad1 {
        grad_sq = &grad_sq + &(g * g);
    }
    let mut a: Vec<TruncatedSeries<T>> = grad1[..n - 1].iter().map(|g| (g * &inv_d).scale(&-two.clone())).collect();
    let a_n = &(&grad1[n - 1] * &inv_d).scale(&-two.clone()) + &(&grad_sq * &(&inv_d * &inv_d));
    a.push(a_n.clone());

    let vstar_pow = if vprime.is_empty() {
        TruncatedSeries::constant(d.dim(), d.order(), T::one())
    } else {
        let inv_alpha = T::one() / cn.alpha_as::<T>()?;
        let mut s = TruncatedSeries::constant(d.dim(), d.order(), T::one());
        for v in vprime {
            let w = v.scale(&inv_alpha);
            s = &s + &(&w * &w);
        }
        let (num, den) = cn.half_q_minus_one();
        power_series(&s, num, den)?
    };
    let one_minus_p = (-&vstar_pow).add_constant(T::one());
    let b = (&(&grad_sq * &inv_d) + &(&one_minus_p * &d)).scale(&km1);
    let c = &a_n.scale(&kappa) - &(&(&b - &grad1[n - 1].scale(&(two * km1))) * &inv_d);
    Ok(SeriesCoefficients { a, b, c, vstar_pow })
}
