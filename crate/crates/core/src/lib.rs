//! Numerical laboratory for fractal geometry and the harmonic analysis of
//! fractal measures.
//!
//! The crate is organised in four layers:
//!
//! * [`geom`] builds self-similar and Cantor-type sets as point clouds and
//!   estimates covering numbers, packing numbers, distance-set volumes and
//!   box dimensions.
//! * [`measure`] turns clouds into weighted atomic measures and computes
//!   ball densities, quadrant masses and Riesz energies.
//! * [`fourier`] evaluates Fourier transforms of atomic measures with the
//!   convention `μ̂(ξ) = ∫ e^{-i<x,ξ>} dμ(x)` and integrates their powers
//!   over balls, spheres and Gaussian windows.
//! * [`ineq`] assembles both sides of the Hardy/Strichartz-type inequalities
//!   and classifies the ratio series as bounded, diverging or inconclusive.
//!
//! Everything is deterministic: results depend only on the inputs and on the
//! seeds recorded in a [`geom::FractalSpec`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fit;
pub mod fourier;
pub mod geom;
pub mod ineq;
pub mod measure;
pub mod numeric;

pub use error::{Error, Result};
pub use fit::ScalingFit;
