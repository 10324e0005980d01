//! Log-log regression used for every dimension and growth-exponent estimate.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Result of an ordinary least-squares fit in log-log coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// Fitted exponent. For box dimensions this is the slope of `ln N`
    /// against `-ln ε`; for growth series it is the slope of `ln value`
    /// against `ln L`.
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// The `(scale, value)` pairs that entered the fit, in input order.
    pub scales: Vec<(f64, f64)>,
    /// Slopes between consecutive scale points, with the same sign
    /// convention as `exponent`.
    pub local_slopes: Vec<f64>,
}

/// Straight-line least-squares fit `y ≈ slope·x + intercept`.
///
/// Returns `(slope, intercept, r_squared)`.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (slope, intercept, r_squared)
}

/// Direction of the abscissa in a log-log fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Abscissa {
    /// Fit against `ln scale`.
    Log,
    /// Fit against `-ln scale` (covering numbers grow as the scale shrinks).
    NegLog,
}

/// Log-log fit over `(scale, value)` pairs. Scales must be strictly
/// monotone and values strictly positive.
pub(crate) fn log_log_fit(pairs: &[(f64, f64)], abscissa: Abscissa) -> Result<ScalingFit> {
    if pairs.len() < 3 {
        invalid!(
            "a scaling fit needs at least 3 scale points, got {}",
            pairs.len()
        );
    }
    let increasing = pairs.windows(2).all(|w| w[1].0 > w[0].0);
    let decreasing = pairs.windows(2).all(|w| w[1].0 < w[0].0);
    if !(increasing || decreasing) {
        invalid!("scales must be strictly monotone");
    }
    if let Some(&(s, v)) = pairs.iter().find(|(s, v)| !(*s > 0.0 && *v > 0.0)) {
        invalid!("log-log fit needs positive scales and values, got ({s}, {v})");
    }
    let sign = match abscissa {
        Abscissa::Log => 1.0,
        Abscissa::NegLog => -1.0,
    };
    let xs: Vec<f64> = pairs.iter().map(|(s, _)| sign * s.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|(_, v)| v.ln()).collect();
    let (exponent, intercept, r_squared) = least_squares(&xs, &ys);
    let local_slopes = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    Ok(ScalingFit {
        exponent,
        intercept,
        r_squared,
        scales: pairs.to_vec(),
        local_slopes,
    })
}
