//! Iterated function systems on a single interval domain.

mod ifs;
mod map;

pub use ifs::{
    compose_system, normalize_endpoints, validate, IfsSpec, MirrorLaw, NormalizedPair, StageOneGap,
    SystemTable, ValidationReport,
};
pub use map::{MapKind, MapSpec};
