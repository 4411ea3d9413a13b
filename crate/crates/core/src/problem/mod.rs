//! Meshes, material maps, coefficient fields and benchmark presets.

mod field;
mod material;
mod mesh;
mod partition;
mod presets;
mod pseudo;

pub use field::{BoundarySource, CoefficientField};
pub use material::{
    crooked_pipe_map, load_material_map, parse_material_map, Legend, LegendEntry, MaterialMap,
    CROOKED_PIPE_LEGEND, CROOKED_PIPE_MAP,
};
pub use mesh::{Face, Side, StructuredMesh};
pub use partition::{partition_thick, ThickPartition};
pub use presets::{
    cdt_serde, five_region_problem, make_crooked_pipe, two_region_sigma, PipeVariant,
    ProblemConfig, ProblemSpec, DEFAULT_AMBIENT_FLUX, DEFAULT_INLET_FLUX, FIVE_REGION_SIGMA_S,
};
pub use pseudo::{pseudo_scattering, HOHLRAUM_MATERIALS, RADIATION_CONSTANT, SPEED_OF_LIGHT};
