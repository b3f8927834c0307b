//! Solvers for the degenerate operator `y_n Δ + γ ∂_n` and the original
//! nonlinear system, plus metric and interface utilities.

mod banded;
mod grid;
mod interface;
mod linear;
mod metric;
mod nonlinear;
mod ode;

pub use banded::BandMatrix;
pub use grid::{stencil3, Axis, AxisKind, GridField, TensorGrid};
pub use interface::{classify_regular, extract_free_boundary, Interface, Verdict, OMEGA_TOL};
pub use linear::{estimate_wkp_norm, lp_norm, solve_deg_linear_nd, DegLinearSolution};
pub use metric::{ball_measure, intrinsic_distance};
pub use nonlinear::{regularized_source, solve_direct_nonlinear, DirectOptions, DirectSolution};
pub use ode::{green_1d, green_convolution, ode_derivative, solve_ode_1d, OdeSolution};
