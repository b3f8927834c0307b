use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Scalar;

/// `kappa = 2 / (1 - q)` and `alpha = (kappa (kappa - 1))^{-kappa/2}`.
pub fn kappa_alpha(q: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&q) || q.is_nan() {
        return Err(Error::InvalidExponent(q));
    }
    let kappa = 2.0 / (1.0 - q);
    let alpha = (kappa * (kappa - 1.0)).powf(-kappa / 2.0);
    if !kappa.is_finite() || kappa > 1e6 || !alpha.is_normal() {
        return Err(Error::KappaOverflow(q));
    }
    Ok((kappa, alpha))
}

/// Model constants `(q, kappa, alpha, n, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    pub q: f64,
    pub kappa: f64,
    pub alpha: f64,
    /// spatial dimension
    pub n: usize,
    /// number of components
    pub m: usize,
    /// `q` as an exact fraction when it is one with a small denominator
    pub q_ratio: Option<(i64, i64)>,
}

impl ModelConstants {
    pub fn new(q: f64, n: usize, m: usize) -> Result<Self> {
        let (kappa, alpha) = kappa_alpha(q)?;
        if n < 2 || m < 1 {
            return Err(Error::InvalidArgument(format!("need n >= 2 and m >= 1, got n = {n}, m = {m}")));
        }
        Ok(ModelConstants { q, kappa, alpha, n, m, q_ratio: detect_ratio(q) })
    }

    pub fn from_ratio(num: i64, den: i64, n: usize, m: usize) -> Result<Self> {
        let mut c = Self::new(num as f64 / den as f64, n, m)?;
        c.q_ratio = Some((num, den));
        Ok(c)
    }

    /// `(1 + q) / 2`
    pub fn half_one_plus_q(&self) -> f64 {
        0.5 * (1.0 + self.q)
    }

    fn ratio(&self) -> Result<(i64, i64)> {
        self.q_ratio
            .ok_or_else(|| Error::NotRepresentable(format!("q = {} has no exact fraction", self.q)))
    }

    pub fn q_as<T: Scalar>(&self) -> Result<T> {
        if !T::EXACT {
            return Ok(T::from_f64(self.q));
        }
        let (a, b) = self.ratio()?;
        Ok(T::from_ratio(a, b))
    }

    pub fn kappa_as<T: Scalar>(&self) -> Result<T> {
        if !T::EXACT {
            return Ok(T::from_f64(self.kappa));
        }
        let (a, b) = self.ratio()?;
        Ok(T::from_ratio(2 * b, b - a))
    }

    pub fn alpha_as<T: Scalar>(&self) -> Result<T> {
        if !T::EXACT {
            return Ok(T::from_f64(self.alpha));
        }
        let (a, b) = self.ratio()?;
        // kappa = P / Q
        let (p, q) = (2 * b, b - a);
        let k = T::from_ratio(p, q);
        let base = k.clone() * (k - T::one());
        base.pow_ratio(-p, 2 * q)
            .ok_or_else(|| Error::NotRepresentable(format!("alpha for q = {a}/{b}")))
    }

    /// Exponent `(q - 1) / 2` as a fraction.
    pub fn half_q_minus_one(&self) -> (i64, i64) {
        match self.q_ratio {
            Some((a, b)) => (a - b, 2 * b),
            None => {
                // binary64 mode only: fold q into a large-denominator fraction
                let den = 1i64 << 40;
                (((self.q - 1.0) * den as f64).round() as i64, 2 * den)
            }
        }
    }
}

fn detect_ratio(q: f64) -> Option<(i64, i64)> {
    (1..=1000i64).find_map(|den| {
        let num = (q * den as f64).round();
        ((num / den as f64 - q).abs() < 1e-14).then_some((num as i64, den))
    })
}
