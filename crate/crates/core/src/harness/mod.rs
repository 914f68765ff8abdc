//! Exact solutions, error norms, named test problems, reference solutions
//! and convergence studies.

pub mod erf;
pub mod exact;
pub mod norms;
pub mod problems;
pub mod study;

pub use erf::erf;
pub use norms::{error_norms, observed_order};
pub use problems::ProblemId;
pub use study::{convergence_study, ConvergenceRow, DtRule};
