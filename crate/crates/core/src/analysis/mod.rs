//! Relative-position spectra, separation bounds, dimension estimates and the
//! periodicity discriminator.

mod bounds;
mod dimension;
mod discriminate;
mod positions;

pub use bounds::{compatibility_bounds, min_gap_offsets, CompatibilityBounds, MinGapOffsets};
pub use dimension::{box_dimension, box_dimension_with, DimensionReport, ScaleRow};
pub use discriminate::{
    default_delta_schedule, discriminate_periodicity, discriminate_periodicity_with, DeltaRow,
    DiscriminationReport, Witness,
};
pub use positions::{
    cluster, cluster_positions, position_spectrum, position_spectrum_with, Cluster, PositionEntry,
    PositionSpectrum,
};
