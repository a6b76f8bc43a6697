//! An interior-point solver for sparse nonlinear programs, built on a
//! pluggable sparse symmetric indefinite LDLᵀ factorization, together with
//! scalable PDE-constrained problem generators and a benchmarking harness.

pub mod bench;
pub mod ip;
pub mod ldl;
pub mod problems;
pub mod sparse;

pub use ip::{NlpProblem, SolveResult, SolveStatus, SolverOptions};
pub use ldl::{Inertia, KktBackend, LdlError, PivotOptions};
pub use sparse::{SparseError, SymCsc, SymTriplet};
