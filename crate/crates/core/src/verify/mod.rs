//! Verification of solved tables: residuals, decay bounds, combinatorial
//! identities, an independent time-stepping oracle and the conjugation symmetry.

pub mod bounds;
pub mod conjugate;
pub mod identities;
pub mod oracle;
pub mod residual;

pub use bounds::{check_decay_bounds, decay_rhs, tail_bound, BoundReport};
pub use conjugate::{conjugate_check, ConjugateReport};
pub use identities::{abel_identity, corollary_bound, AbelRow, CorollaryReport};
pub use oracle::{compare_with_oracle, galerkin_oracle, OracleComparison, OracleTrajectory};
pub use residual::{mode_residual, pointwise_residual, residual, symbolic_residual_vanishes, ResidualReport};
