//! Fourier transforms of atomic measures with `μ̂(ξ) = Σ w_j e^{-i<x_j,ξ>}`
//! and their radial, spherical and Gaussian averages.
//!
//! All radii are checked against `π / resolution`, the largest frequency
//! at which the atoms still stand in for the underlying measure.

mod average;
mod decay;
pub(crate) mod transform;

pub use average::{
    alias_limit, ball_average, ball_averages, gaussian_average, gaussian_averages, plot_script,
    AverageKind, AverageSeries, FrequencyGrid, GridKind, QuadratureInfo, QuadraturePolicy,
};
pub use decay::{fourier_decay_exponent, scaling_exponent, DecayFit, DecayOptions};
pub use transform::{spherical_average, spherical_power_average, transform, transform_many};
