//! Truncated multivariate power series in derivative-value form, with the
//! weighted order `|mu| + mu_n` as truncation measure.

mod multi_index;
mod norms;
mod scalar;
pub mod text;
mod truncated;

pub use multi_index::{binomial, factorial, IndexTable, MultiIndex};
pub use norms::{geometric_majorant, majorant_check, weighted_norm, weighted_norm_by_order, NormParams};
pub use scalar::Scalar;
pub use truncated::{outer, TruncatedSeries};

pub type Rational = num_rational::BigRational;
