//! Partial hodograph-Legendre transform `y = (x', (u^1/α)^{1/κ})` with
//! Legendre functions `v^1 = x_n - y_n`, `v^j = α u^j / u^1`, the inverse
//! map, and the degenerate system satisfied by `v`.

mod coefficients;
mod residual;
mod state;
mod transform;

pub use coefficients::{
    coefficient_series, coefficients_at, power_series, reciprocal_series, SeriesCoefficients, SystemCoefficients,
    DENOMINATOR_GUARD,
};
pub use residual::{residual_at, residual_original, residual_series, residual_system, SystemResidual};
pub use state::{rescale_series, series_jet, LegendreRepr, LegendreState};
pub use transform::{
    forward_transform, inverse_reconstruct, legendre_at, legendre_from_solution, rescale_legendre, Reconstructed,
};
