//! Weighted atomic measures on point clouds.
//!
//! Measures are normalised to total mass 1. Restricted Hausdorff and packing
//! measures are therefore represented only up to a global constant.

mod atomic;
mod expr;
mod stats;

pub use atomic::{
    natural_measure, weight_with, weight_with_expr, weight_with_factors, AtomicMeasure,
};
pub use expr::Expr;
pub use stats::{
    ball_mass, density_profile, energy, local_uniformity_constant, quadrant_mass, DensityProfile,
};
