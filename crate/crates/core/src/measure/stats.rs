use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geom::index::dist2;
use crate::numeric::{compensated_sum, pairwise_sum, CompensatedSum};

use super::atomic::AtomicMeasure;

/// `μ(E_x)` with `E_x = {y : y_i ≤ x_i for all i}`.
pub fn quadrant_mass(mu: &AtomicMeasure, x: &[f64]) -> f64 {
    compensated_sum(
        mu.atoms()
            .filter(|(p, _)| p.iter().zip(x).all(|(a, b)| a <= b))
            .map(|(_, w)| w),
    )
}

/// Mass of the closed ball `B_r(x)`.
pub fn ball_mass(mu: &AtomicMeasure, x: &[f64], r: f64) -> f64 {
    let r2 = r * r;
    compensated_sum(
        mu.atoms()
            .filter(|(p, _)| dist2(p, x) <= r2)
            .map(|(_, w)| w),
    )
}

/// Ball densities `(2r)^{-α} μ(B_r(x))` over a decreasing list of radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub x: Vec<f64>,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest value over the three smallest radii.
    pub upper_est: f64,
    /// Smallest value over the three smallest radii.
    pub lower_est: f64,
    /// Radii at or below the measure's resolution, where the atoms no
    /// longer stand in for a continuous measure.
    pub below_resolution: Vec<bool>,
}

pub fn density_profile(
    mu: &AtomicMeasure,
    x: &[f64],
    alpha: f64,
    radii: &[f64],
) -> Result<DensityProfile> {
    if x.len() != mu.dim() {
        invalid!(
            "centre has {} coordinates, the measure is {}-dimensional",
            x.len(),
            mu.dim()
        );
    }
    if radii.is_empty() {
        invalid!("density profile needs at least one radius");
    }
    if radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        invalid!("radii must be positive and finite");
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        invalid!("radii must be strictly decreasing");
    }
    let values: Vec<f64> = radii
        .iter()
        .map(|&r| (2.0 * r).powf(-alpha) * ball_mass(mu, x, r))
        .collect();
    let tail = &values[values.len().saturating_sub(3)..];
    Ok(DensityProfile {
        x: x.to_vec(),
        radii: radii.to_vec(),
        upper_est: tail.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        lower_est: tail.iter().copied().fold(f64::INFINITY, f64::min),
        below_resolution: radii.iter().map(|&r| r <= mu.resolution()).collect(),
        values,
    })
}

/// Empirical `λ = max μ(B_δ(x)) δ^{-α}` over probes and radii.
pub fn local_uniformity_constant(
    mu: &AtomicMeasure,
    alpha: f64,
    deltas: &[f64],
    probes: &[Vec<f64>],
) -> Result<f64> {
    if deltas.is_empty() || probes.is_empty() {
        invalid!("local uniformity needs nonempty radius and probe lists");
    }
    if let Some(d) = deltas.iter().find(|&&d| !(d > mu.resolution() && d <= 1.0)) {
        invalid!(
            "radius {d} must lie in (resolution, 1] = ({}, 1]",
            mu.resolution()
        );
    }
    if let Some(p) = probes.iter().find(|p| p.len() != mu.dim()) {
        invalid!("probe {p:?} does not have {} coordinates", mu.dim());
    }
    let mut lambda: f64 = 0.0;
    for p in probes {
        for &d in deltas {
            lambda = lambda.max(ball_mass(mu, p, d) * d.powf(-alpha));
        }
    }
    Ok(lambda)
}

/// Riesz energy `Σ_{i≠j} w_i w_j |x_i - x_j|^{-α}` with self-pairs left out.
///
/// Row sums are computed in parallel and combined by a pairwise reduction
/// whose shape depends only on the atom count.
pub fn energy(mu: &AtomicMeasure, alpha: f64) -> Result<f64> {
    let n = mu.dim() as f64;
    if !(alpha > 0.0 && alpha < n) {
        invalid!("energy exponent must lie in (0, {n}), got {alpha}");
    }
    let half = -alpha / 2.0;
    let weights = mu.weights();
    let rows: Vec<f64> = (0..mu.len())
        .into_par_iter()
        .map(|i| {
            let p = mu.point(i);
            let mut row = CompensatedSum::new();
            for (j, w) in weights.iter().enumerate().skip(i + 1) {
                row.add(w * dist2(p, mu.point(j)).powf(half));
            }
            weights[i] * row.value()
        })
        .collect();
    Ok(2.0 * pairwise_sum(&rows))
}
