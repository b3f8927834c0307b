//! Cauchy-Kowalevski construction of analytic solutions of degenerate systems
//! `y_n ∂_n^2 v + γ ∂_n v = y_n A(∇v) : D^2 v + g(v, ∇v)` from data on `y_n = 0`.

mod data;
mod diagnostics;
mod expand;
mod system;
mod theorem;

pub use data::{rescale_data, smallness_of, CauchyData, DEFAULT_SMALLNESS};
pub use diagnostics::{convergence_diagnostics, log_slope, ConvergenceReport};
pub use expand::{ck_expand, first_order_root, newton_first_order, solve_first_order, CkSolution, FirstOrder};
pub use system::{
    instantiate_model, source_jacobian_at, structural_defect, system_residual, vertical_principal_at, DegenerateSystem,
    ModelSystem, PolynomialSystem, PrincipalTerm, SourceTerm,
};
pub use theorem::{
    decay_slope, free_boundary_data, shell_points, shell_residuals, theorem12_solve, SolveOptions,
    Theorem12Solution,
};
