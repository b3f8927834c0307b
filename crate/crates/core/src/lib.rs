//! Constructive tools for the sublinear system `Δu = |u|^{q-1} u χ_{|u|>0}`:
//! exact half-space solutions and the Weiss energy, the partial
//! hodograph-Legendre transform, a Cauchy-Kowalevski series constructor for
//! the transformed degenerate system, and finite-difference solvers used as
//! independent checks.

pub mod ck;
pub mod degenerate;
pub mod error;
pub mod exact;
pub mod harness;
pub mod hodograph;
pub mod quad;
pub mod series;

pub use error::{Error, Result};
