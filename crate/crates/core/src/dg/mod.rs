//! Upwind DG transport, sweeps, the scalar-flux Schur operator and the
//! interior-penalty diffusion operators used for acceleration.

mod basis;
mod dsa;
mod forms;
mod space;
mod transport;

pub use basis::Basis1d;
pub use dsa::{
    assemble_dsa, mnip_penalty_constant, penalty_matrix, penalty_matrix_by_ordinate, DsaKind,
    DsaMatrix, DsaScope, MNIP_PENALTY_SCALE,
};
pub use space::DgSpace;
pub use transport::{assemble_transport, TransportSystem};

use crate::error::Result;
use crate::problem::ProblemSpec;
use crate::quadrature::AngularQuadrature;

/// Transport system for a problem at DG order `order` and S_N order `sn_order`.
pub fn build_system(spec: &ProblemSpec, order: usize, sn_order: usize) -> Result<TransportSystem> {
    let space = DgSpace::new(spec.mesh.clone(), order)?;
    let quad = AngularQuadrature::build(sn_order)?;
    assemble_transport(space, quad, spec.field.clone(), spec.source.clone())
}
