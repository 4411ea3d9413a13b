//! Discrete-ordinates (S_N) transport on structured 2D meshes with
//! diffusion synthetic acceleration, including heterogeneous DSA that
//! preconditions only the optically thick part of the domain.

pub mod amg;
pub mod bench;
pub mod dg;
pub mod error;
pub mod problem;
pub mod quadrature;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
