use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fit::{log_log_fit, Abscissa, ScalingFit};
use crate::measure::AtomicMeasure;
use crate::numeric::{decades, SPAN_SLACK};

use super::average::alias_limit;
use super::transform::ray;

fn scale_checks(ls: &[f64], min_points: usize, min_decades: f64) -> Result<()> {
    if ls.len() < min_points {
        invalid!(
            "a scaling fit needs at least {min_points} points, got {}",
            ls.len()
        );
    }
    let span = decades(ls);
    if span < min_decades - SPAN_SLACK {
        invalid!("points span {span:.3} decades; at least {min_decades} are required");
    }
    Ok(())
}

/// Slope of `ln value` against `ln L`.
pub fn scaling_exponent(series: &[(f64, f64)]) -> Result<ScalingFit> {
    let ls: Vec<f64> = series.iter().map(|&(l, _)| l).collect();
    scale_checks(&ls, 4, 1.5)?;
    log_log_fit(series, Abscissa::Log)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayOptions {
    /// Samples per unit of `|ξ|`, multiplied by `max(1, diameter)`.
    pub samples_per_unit: f64,
    /// Floor on the samples in each octave.
    pub min_samples: usize,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self {
            samples_per_unit: 8.0,
            min_samples: 256,
        }
    }
}

/// Envelope fit of `|μ̂|` on `R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `(octave centre, max |μ̂| over the octave)` and the fitted slope.
    pub fit: ScalingFit,
    /// `β = -2 · slope`, the empirical exponent in `|μ̂(r)| ≲ r^{-β/2}`.
    pub beta: f64,
}

/// Fits `ln max_{octave} |μ̂|` against the log of the octave centre over
/// the dyadic octaves of `[r_min, r_max]`.
pub fn fourier_decay_exponent(
    mu: &AtomicMeasure,
    r_min: f64,
    r_max: f64,
    options: &DecayOptions,
) -> Result<DecayFit> {
    if mu.dim() != 1 {
        invalid!(
            "the decay envelope is defined for measures on R, got dimension {}",
            mu.dim()
        );
    }
    if !(r_min > 0.0 && r_max > r_min) {
        invalid!("need 0 < r_min < r_max, got [{r_min}, {r_max}]");
    }
    scale_checks(&[r_min, r_max], 2, 2.0)?;
    let limit = alias_limit(mu);
    if r_max > limit * (1.0 + SPAN_SLACK) {
        invalid!("r_max = {r_max} exceeds the alias guard π/resolution = {limit}");
    }
    let per_unit = options.samples_per_unit * mu.support().diameter_bound().max(1.0);
    let octaves = ((r_max / r_min).log2() - SPAN_SLACK).ceil() as i32;
    let pairs = (0..octaves)
        .map(|j| {
            let a = r_min * 2f64.powi(j);
            let b = (2.0 * a).min(r_max);
            let count = (((b - a) * per_unit).ceil() as usize).max(options.min_samples);
            let step = (b - a) / count as f64;
            let peak = ray(mu, &[1.0], a, step, count + 1)
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            ((a * b).sqrt(), peak)
        })
        .collect::<Vec<_>>();
    scale_checks(&pairs.iter().map(|p| p.0).collect::<Vec<_>>(), 4, 0.0)?;
    let fit = log_log_fit(&pairs, Abscissa::Log)?;
    Ok(DecayFit {
        beta: -2.0 * fit.exponent,
        fit,
    })
}
