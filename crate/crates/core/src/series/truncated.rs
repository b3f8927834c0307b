use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;


use super::multi_index::{IndexTable, MultiIndex};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Multivariate power series truncated by weighted order `|mu| + mu_n <= order`.
///
/// Coefficients are stored as derivative values `V_mu = d^mu f(0)`; the
/// monomial coefficient of `y^mu` is `V_mu / mu!`.
#[derive(Clone)]
pub struct TruncatedSeries<T: Scalar = f64> {
    table: Arc<IndexTable>,
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    pub fn zero(dim: usize, order: usize) -> Self {
        let table = IndexTable::get(dim, order);
        let coeffs = vec![T::zero(); table.len()];
        TruncatedSeries { table, coeffs }
    }

    pub fn constant(dim: usize, order: usize, c: T) -> Self {
        let mut s = Self::zero(dim, order);
        s.coeffs[0] = c;
        s
    }

    /// The coordinate function `y_axis`.
    pub fn variable(dim: usize, order: usize, axis: usize) -> Self {
        let mut s = Self::zero(dim, order);
        s.set(&MultiIndex::unit(dim, axis), T::one());
        s
    }

    /// Builds a series from derivative values; entries above `order` are dropped.
    pub fn from_derivatives<I>(dim: usize, order: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, T)>,
    {
        let mut s = Self::zero(dim, order);
        for (mu, v) in entries {
            if let Some(p) = s.table.position(&mu) {
                s.coeffs[p] = s.coeffs[p].clone() + v;
            }
        }
        s
    }

    /// Builds a series from monomial coefficients `c_mu` of `y^mu`.
    pub fn from_monomials<I>(dim: usize, order: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, T)>,
    {
        Self::from_derivatives(
            dim,
            order,
            entries.into_iter().map(|(mu, c)| {
                let f = T::from_u64(mu.factorial_u64());
                (mu, c * f)
            }),
        )
    }

    pub fn dim(&self) -> usize {
        self.table.dim
    }

    pub fn order(&self) -> usize {
        self.table.order
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.table.indices
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// `V_mu`, zero when `mu` is above the truncation.
    pub fn coeff(&self, mu: &MultiIndex) -> T {
        self.table.position(mu).map_or_else(T::zero, |p| self.coeffs[p].clone())
    }

    /// Monomial coefficient `V_mu / mu!`.
    pub fn monomial_coeff(&self, mu: &MultiIndex) -> T {
        self.coeff(mu) / T::from_u64(mu.factorial_u64())
    }

    pub fn set(&mut self, mu: &MultiIndex, v: T) {
        let p = self
            .table
            .position(mu)
            .unwrap_or_else(|| panic!("index {mu} above order {}", self.order()));
        self.coeffs[p] = v;
    }

    /// Nonzero `(mu, V_mu)` pairs in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.table.indices.iter().zip(&self.coeffs).filter(|(_, v)| !v.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn constant_term(&self) -> T {
        self.coeffs[0].clone()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() || self.order() != other.order() {
            return Err(Error::ShapeMismatch(self.dim(), self.order(), other.dim(), other.order()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() + b.clone()))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() - b.clone()))
    }

    /// Truncated Cauchy product: `(fg)_mu = sum_sigma binomial(mu, sigma) F_sigma G_{mu - sigma}`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = vec![T::zero(); self.coeffs.len()];
        let nz_a: Vec<bool> = self.coeffs.iter().map(|c| !c.is_zero()).collect();
        let nz_b: Vec<bool> = other.coeffs.iter().map(|c| !c.is_zero()).collect();
        for &(i, j, k, w) in self.table.products() {
            let (i, j, k) = (i as usize, j as usize, k as usize);
            if !nz_a[i] || !nz_b[j] {
                continue;
            }
            let term = self.coeffs[i].clone() * other.coeffs[j].clone();
            out[k] = out[k].clone() + if w == 1 { term } else { term * T::from_u64(w) };
        }
        Ok(TruncatedSeries { table: self.table.clone(), coeffs: out })
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        TruncatedSeries {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        TruncatedSeries {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn add_constant(&self, c: T) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].clone() + c;
        out
    }

    /// `outer(inner)` for an outer function given by its ordinary Taylor
    /// coefficients `outer[k] = f^(k)(0) / k!`. The inner series must vanish at 0.
    pub fn compose(outer: &[T], inner: &Self) -> Result<Self> {
        if !inner.constant_term().is_zero() {
            return Err(Error::NonzeroConstant);
        }
        let (dim, order) = (inner.dim(), inner.order());
        // inner has weighted order >= 1, so powers beyond `order` vanish
        let top = outer.len().min(order + 1);
        if top == 0 {
            return Ok(Self::zero(dim, order));
        }
        let mut acc = Self::constant(dim, order, outer[top - 1].clone());
        for k in (0..top - 1).rev() {
            acc = acc.checked_mul(inner)?.add_constant(outer[k].clone());
        }
        Ok(acc)
    }

    /// `d/dy_axis`: `V'_mu = V_{mu + e_axis}`. The order drops by the weight of the axis.
    pub fn differentiate(&self, axis: usize) -> Self {
        let weight = if axis + 1 == self.dim() { 2 } else { 1 };
        let order = self.order().saturating_sub(weight);
        let mut out = Self::zero(self.dim(), order);
        for (p, mu) in out.table.clone().indices.iter().enumerate() {
            out.coeffs[p] = self.coeff(&mu.bump(axis));
        }
        out
    }

    /// `y_axis * f`: `V'_mu = mu_axis V_{mu - e_axis}`, same order.
    pub fn times_variable(&self, axis: usize) -> Self {
        let mut out = Self::zero(self.dim(), self.order());
        for (p, mu) in self.table.indices.iter().enumerate() {
            if let Some(prev) = mu.drop_axis(axis) {
                let k = mu.entries()[axis] as u64;
                out.coeffs[p] = self.coeff(&prev) * T::from_u64(k);
            }
        }
        out
    }

    /// Re-truncates (or zero-extends) to a new order.
    pub fn with_order(&self, order: usize) -> Self {
        if order == self.order() {
            return self.clone();
        }
        let mut out = Self::zero(self.dim(), order);
        for (p, mu) in out.table.clone().indices.iter().enumerate() {
            out.coeffs[p] = self.coeff(mu);
        }
        out
    }

    /// `f(c_1 y_1, ..., c_n y_n)`: `V_mu -> V_mu prod c_i^{mu_i}`.
    pub fn rescale_axes(&self, factors: &[T]) -> Self {
        let mut out = self.clone();
        for (p, mu) in self.table.indices.iter().enumerate() {
            let mut f = T::one();
            for (c, &k) in factors.iter().zip(mu.entries()) {
                f = f * c.powi(k);
            }
            out.coeffs[p] = out.coeffs[p].clone() * f;
        }
        out
    }

    /// Restriction to `y_n = 0`, kept in the same variables: only the
    /// `mu_n = 0` coefficients survive.
    pub fn trace(&self) -> Self {
        let mut out = self.clone();
        for (p, mu) in self.table.indices.iter().enumerate() {
            if mu.vertical() > 0 {
                out.coeffs[p] = T::zero();
            }
        }
        out
    }

    /// True when no coefficient involves the vertical variable.
    pub fn is_tangential(&self) -> bool {
        self.terms().all(|(mu, _)| mu.vertical() == 0)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> TruncatedSeries<U> {
        TruncatedSeries { table: self.table.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> TruncatedSeries<f64> {
        self.map(|c| c.to_f64())
    }

    /// Evaluates the truncated polynomial at `y`.
    pub fn evaluate(&self, y: &[f64]) -> f64 {
        self.table
            .indices
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(mu, c)| c.to_f64() / mu.factorial() * mu.monomial(y))
            .sum()
    }

    /// Largest absolute coefficient with weighted order in `lo..=hi`.
    pub fn max_abs_in_orders(&self, lo: usize, hi: usize) -> f64 {
        self.table
            .indices
            .iter()
            .zip(&self.coeffs)
            .filter(|(mu, _)| (lo..=hi).contains(&(mu.weighted_order() as usize)))
            .map(|(_, c)| c.to_f64().abs())
            .fold(0.0, f64::max)
    }
}

impl<T: Scalar> PartialEq for TruncatedSeries<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.order() == other.order() && self.coeffs == other.coeffs
    }
}

impl<T: Scalar> fmt::Debug for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries(dim {}, order {}) {{", self.dim(), self.order())?;
        for (mu, v) in self.terms() {
            write!(f, " {mu}: {v:?};")?;
        }
        write!(f, " }}")
    }
}

// Operator forms panic on shape mismatch; use the `checked_*` methods for
// fallible arithmetic.
impl<T: Scalar> Add for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn add(self, rhs: Self) -> TruncatedSeries<T> {
        self.checked_add(rhs).expect("series add")
    }
}

impl<T: Scalar> Sub for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn sub(self, rhs: Self) -> TruncatedSeries<T> {
        self.checked_sub(rhs).expect("series sub")
    }
}

impl<T: Scalar> Mul for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn mul(self, rhs: Self) -> TruncatedSeries<T> {
        self.checked_mul(rhs).expect("series mul")
    }
}

impl<T: Scalar> Neg for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn neg(self) -> TruncatedSeries<T> {
        self.scale(&-T::one())
    }
}

/// Ordinary Taylor coefficients of common outer functions.
pub mod outer {
    use super::Scalar;

    /// `1 / (1 - t)`
    pub fn geometric<T: Scalar>(len: usize) -> Vec<T> {
        vec![T::one(); len]
    }

    /// `1 / (1 + t)`
    pub fn reciprocal_one_plus<T: Scalar>(len: usize) -> Vec<T> {
        (0..len).map(|k| if k % 2 == 0 { T::one() } else { -T::one() }).collect()
    }

    /// `(1 + t)^a` with `a = num / den`.
    pub fn binomial_power<T: Scalar>(num: i64, den: i64, len: usize) -> Vec<T> {
        let a = T::from_ratio(num, den);
        let mut out = Vec::with_capacity(len);
        let mut c = T::one();
        for k in 0..len {
            out.push(c.clone());
            c = c * (a.clone() - T::from_u64(k as u64)) / T::from_u64(k as u64 + 1);
        }
        out
    }
}
