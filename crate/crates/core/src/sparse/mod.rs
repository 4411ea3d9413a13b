//! Sparse and dense linear-algebra substrate.

mod csr;
mod dense;
mod krylov;
mod lu;
pub mod mm;

pub use csr::CsrMatrix;
pub use dense::DenseMatrix;
pub use krylov::{
    gmres, FnOperator, FnPreconditioner, KrylovConfig, LinearOperator, NoPreconditioner,
    Preconditioner, SolveReport, StopReason,
};
pub use lu::{lu_factor, lu_solve, LuFactors};
