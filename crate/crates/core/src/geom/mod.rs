//! Fractal sets as finite point clouds.
//!
//! A [`FractalSpec`] describes a construction; [`build`] expands it to a
//! chosen depth with one representative per cylinder. The estimators in this
//! module only see the resulting [`PointCloud`].

mod build;
mod cloud;
pub mod constructions;
mod cover;
mod dimension;
pub(crate) mod index;
mod spec;
mod volume;

pub(crate) use build::generate;
pub use build::{atom_count, build, build_with, BuildOptions, DEFAULT_MAX_ATOMS};
pub(crate) use cloud::{header_field, parse_header, parse_row};
pub use cloud::{PointCloud, Provenance};
pub use cover::{covering_number, packing_number, packing_premeasure, CoverCount};
pub use dimension::{
    box_dimension_fit, coherence_diagnostic, similarity_dimension, CoherenceSeries,
};
pub use spec::{
    cnm_beta, AnchorChoice, CantorParams, ExplicitSpec, FractalSpec, IfsSpec, ProductSpec,
    SalemParams, Similitude, SymmetricPerfectParams,
};
pub use volume::{
    distance_set_volume, distance_set_volume_voxel, interval_union_length,
    minkowski_content_sequence, VoxelOptions,
};
