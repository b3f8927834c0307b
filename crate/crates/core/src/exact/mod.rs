//! Model constants, exact half-space solutions, the Weiss energy and the
//! blow-up rescaling.

mod constants;
mod field;
mod halfspace;
mod weiss;

pub use constants::{kappa_alpha, ModelConstants};
pub use field::{rescale_blowup, Field, FieldJet, FnField, Rescaled};
pub use halfspace::{boundary_limit_deficit, pde_residual, pde_residual_jet, HalfSpaceSolution};
pub use weiss::{integrate_ball, integrate_sphere, omega, weiss_energy, weiss_profile, QuadratureSpec};
