use crate::error::{Error, Result};
use crate::series::{MultiIndex, Scalar, TruncatedSeries};

/// Default bound on `ε_0` accepted by [`CauchyData::new`].
pub const DEFAULT_SMALLNESS: f64 = 0.1;

/// Boundary values `v_0 = v(·, 0)` as series in all `n` variables that do not
/// involve `y_n`, together with `ε_0 = max(|v_0(0)|, |∇' v_0(0)|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyData<T: Scalar = f64> {
    pub v0: Vec<TruncatedSeries<T>>,
    pub epsilon0: f64,
}

impl<T: Scalar> CauchyData<T> {
    pub fn new(v0: Vec<TruncatedSeries<T>>, threshold: f64) -> Result<Self> {
        let d = Self::unchecked(v0)?;
        if d.epsilon0 > threshold {
            return Err(Error::SmallnessViolated { epsilon0: d.epsilon0, threshold });
        }
        Ok(d)
    }

    /// Skips the smallness bound (toy systems, large-data experiments).
    pub fn unchecked(v0: Vec<TruncatedSeries<T>>) -> Result<Self> {
        let Some(first) = v0.first() else {
            return Err(Error::InvalidArgument("no data components".into()));
        };
        let (dim, order) = (first.dim(), first.order());
        if v0.iter().any(|s| s.dim() != dim || s.order() != order) {
            return Err(Error::InvalidArgument("data components differ in shape".into()));
        }
        if let Some(s) = v0.iter().find(|s| !s.is_tangential()) {
            return Err(Error::InvalidArgument(format!("data depends on the vertical variable: {s:?}")));
        }
        let epsilon0 = smallness_of(&v0);
        Ok(CauchyData { v0, epsilon0 })
    }

    pub fn components(&self) -> usize {
        self.v0.len()
    }

    pub fn dim(&self) -> usize {
        self.v0[0].dim()
    }
}

/// `max(|v_0(0)|, |∇' v_0(0)|)` over components and tangential axes.
pub fn smallness_of<T: Scalar>(v0: &[TruncatedSeries<T>]) -> f64 {
    let n = v0[0].dim();
    let mut e = 0.0f64;
    for s in v0 {
        e = e.max(s.constant_term().to_f64().abs());
        for k in 0..n - 1 {
            e = e.max(s.coeff(&MultiIndex::unit(n, k)).to_f64().abs());
        }
    }
    e
}

/// Data of the scaled problem: `(v_0^1(r y')/r, v_0^j(r y'))`.
pub fn rescale_data<T: Scalar>(d: &CauchyData<T>, r: &T) -> Result<CauchyData<T>> {
    CauchyData::unchecked(crate::hodograph::rescale_series(&d.v0, r))
}
