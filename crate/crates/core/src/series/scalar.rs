//! Scalar field used by the series machinery: binary64 by default, exact
//! rationals for low-order cross checks.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar: Num + std::ops::Neg<Output = Self> + Clone + Debug + Send + Sync + 'static {
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_u64(v: u64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Nearest representable value. Exact for rationals (every finite double is dyadic).
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    fn abs_val(&self) -> Self;

    /// `self^(num/den)` when the result is representable.
    fn pow_ratio(&self, num: i64, den: i64) -> Option<Self>;

    /// Simple rationals close to `x`, used to snap Newton iterates in exact mode.
    fn snap_candidates(_x: f64) -> Vec<Self> {
        Vec::new()
    }

    fn powi(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn pow_ratio(&self, num: i64, den: i64) -> Option<Self> {
        let v = self.powf(num as f64 / den as f64);
        v.is_finite().then_some(v)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).unwrap_or_else(BigRational::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn pow_ratio(&self, num: i64, den: i64) -> Option<Self> {
        if den <= 0 {
            return None;
        }
        let g = num_integer::gcd(num, den);
        let (num, den) = (num / g, den / g);
        if self.is_zero() {
            return (num > 0).then(BigRational::zero);
        }
        let root = if den == 1 {
            self.clone()
        } else {
            if self.is_negative() {
                return None;
            }
            let d = den as u32;
            let (n, m) = (self.numer(), self.denom());
            let (rn, rm) = (n.nth_root(d), m.nth_root(d));
            if num_traits::pow(rn.clone(), den as usize) != *n
                || num_traits::pow(rm.clone(), den as usize) != *m
            {
                return None;
            }
            BigRational::new(rn, rm)
        };
        let p = root.powi(num.unsigned_abs() as u32);
        Some(if num < 0 { p.recip() } else { p })
    }

    fn snap_candidates(x: f64) -> Vec<Self> {
        // continued-fraction convergents with bounded denominators
        let mut out = Vec::new();
        if !x.is_finite() {
            return out;
        }
        let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
        let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
        let mut r = x;
        for _ in 0..40 {
            let a = r.floor();
            let ai = BigInt::from_f64(a).unwrap_or_default();
            let h2 = &ai * &h1 + &h0;
            let k2 = &ai * &k1 + &k0;
            if k2 > BigInt::from(1_000_000_000_000i64) {
                break;
            }
            out.push(BigRational::new(h2.clone(), k2.clone()));
            h0 = std::mem::replace(&mut h1, h2);
            k0 = std::mem::replace(&mut k1, k2);
            let frac = r - a;
            if frac.abs() < 1e-300 {
                break;
            }
            r = 1.0 / frac;
        }
        out
    }
}
