//! Dimension estimates: similarity dimension of an IFS, box-counting fits
//! and the quadrant coherence diagnostic.

use crate::error::{invalid, Result};
use crate::fit::{log_log_fit, Abscissa, ScalingFit};
use crate::numeric::{decades, SPAN_SLACK};

use super::cloud::PointCloud;
use super::cover::covering_number;
use super::volume::distance_set_volume;

/// The `α` with `Σ s_j^α = 1`, by bisection on `[0, 64]`.
///
/// The ratios are sorted before summing so the result does not depend on
/// their order.
pub fn similarity_dimension(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() {
        invalid!("similarity dimension needs at least one ratio");
    }
    if let Some(r) = ratios.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
        invalid!("contraction ratios must lie in (0, 1), got {r}");
    }
    let mut sorted = ratios.to_vec();
    sorted.sort_by(f64::total_cmp);
    let f = |a: f64| sorted.iter().map(|s| s.powf(a)).sum::<f64>() - 1.0;
    if f(0.0) <= 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 64.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Least-squares slope of `ln N(ε)` against `-ln ε`.
///
/// The returned fit carries the per-scale counts and the local slopes
/// between neighbouring scales.
pub fn box_dimension_fit(cloud: &PointCloud, scales: &[f64]) -> Result<ScalingFit> {
    if scales.len() < 3 {
        invalid!(
            "box dimension fit needs at least 3 scales, got {}",
            scales.len()
        );
    }
    if let Some(&s) = scales.iter().find(|&&s| !(s > cloud.resolution())) {
        invalid!(
            "scale {s} is not above the cloud resolution {}",
            cloud.resolution()
        );
    }
    let span = decades(scales);
    if span < 1.5 - SPAN_SLACK {
        invalid!("scales span {span:.3} decades; at least 1.5 are required");
    }
    let pairs = scales
        .iter()
        .map(|&eps| Ok((eps, covering_number(cloud, eps)?.count as f64)))
        .collect::<Result<Vec<_>>>()?;
    log_log_fit(&pairs, Abscissa::NegLog)
}

/// Output of [`coherence_diagnostic`].
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceSeries {
    /// `(ε, |E_x(ε)| ε^{α-n} / H)` per scale.
    pub ratios: Vec<(f64, f64)>,
    /// Estimated `α`-mass `H` of the quadrant part `E_x`.
    pub quadrant_mass: f64,
    /// Set when no atom lies in the quadrant; `ratios` is then empty.
    pub empty: bool,
}

/// Compares the distance-set volume of `E_x = E ∩ {y ≤ x}` (coordinatewise)
/// with its estimated mass across scales.
///
/// The mass estimate is the weight fraction of atoms in the quadrant times
/// `total_measure`. Without explicit weights every atom counts equally.
pub fn coherence_diagnostic(
    cloud: &PointCloud,
    weights: Option<&[f64]>,
    x: &[f64],
    alpha: f64,
    scales: &[f64],
    total_measure: f64,
) -> Result<CoherenceSeries> {
    let n = cloud.dim();
    if x.len() != n {
        invalid!(
            "corner has {} coordinates, the cloud is {n}-dimensional",
            x.len()
        );
    }
    if let Some(w) = weights {
        if w.len() != cloud.len() {
            invalid!("{} weights for {} atoms", w.len(), cloud.len());
        }
    }
    if !(total_measure > 0.0 && total_measure.is_finite()) {
        invalid!("total measure must be positive, got {total_measure}");
    }
    let reach = scales.iter().copied().fold(0.0, f64::max);
    for (a, (lo, hi)) in cloud.bounding_box().into_iter().enumerate() {
        if x[a] < lo - reach || x[a] > hi + reach {
            invalid!(
                "corner coordinate {} lies outside the inflated bounding box [{}, {}]",
                x[a],
                lo - reach,
                hi + reach
            );
        }
    }
    let inside = |p: &[f64]| p.iter().zip(x).all(|(a, b)| a <= b);
    let (mut part, mut total) = (0.0, 0.0);
    for (i, p) in cloud.points().enumerate() {
        let w = weights.map_or(1.0, |w| w[i]);
        total += w;
        if inside(p) {
            part += w;
        }
    }
    let Some(sub) = cloud.filter(inside) else {
        return Ok(CoherenceSeries {
            ratios: Vec::new(),
            quadrant_mass: 0.0,
            empty: true,
        });
    };
    let mass = part / total * total_measure;
    let ratios = scales
        .iter()
        .map(|&eps| {
            Ok((
                eps,
                distance_set_volume(&sub, eps)? * eps.powf(alpha - n as f64) / mass,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherenceSeries {
        ratios,
        quadrant_mass: mass,
        empty: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{build, constructions};

    #[test]
    fn similarity_dimension_closed_forms() {
        let cantor = similarity_dimension(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((cantor - 2f64.ln() / 3f64.ln()).abs() < 1e-10);
        let golden = similarity_dimension(&[0.5, 0.25]).unwrap();
        assert!((golden - ((1.0 + 5f64.sqrt()) / 2.0).log2()).abs() < 1e-10);
        assert_eq!(similarity_dimension(&[0.5]).unwrap(), 0.0);
        assert!(similarity_dimension(&[1.0, 0.5]).is_err());
        assert!(similarity_dimension(&[]).is_err());
        assert_eq!(
            similarity_dimension(&[0.1, 0.5, 0.3]).unwrap().to_bits(),
            similarity_dimension(&[0.3, 0.1, 0.5]).unwrap().to_bits()
        );
    }

    #[test]
    fn interval_dimension_is_one() {
        let cloud = build(&constructions::uniform_grid(1001), 0).unwrap();
        let scales: Vec<f64> = (3..=8).map(|k| 2f64.powi(-k)).collect();
        let fit = box_dimension_fit(&cloud, &scales).unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.05, "{}", fit.exponent);
        assert_eq!(fit.local_slopes.len(), 5);
    }

    #[test]
    fn fit_preconditions() {
        let cloud = build(&constructions::middle_thirds(), 6).unwrap();
        assert!(box_dimension_fit(&cloud, &[0.1, 0.01]).is_err());
        assert!(box_dimension_fit(&cloud, &[0.1, 0.05, 0.02]).is_err());
        assert!(box_dimension_fit(&cloud, &[0.1, 0.01, 1e-4]).is_err());
    }

    #[test]
    fn coherence_on_cantor_is_bounded() {
        let cloud = build(&constructions::middle_thirds(), 10).unwrap();
        let alpha = 2f64.ln() / 3f64.ln();
        let scales: Vec<f64> = (3..=8).map(|k| 3f64.powi(-k)).collect();
        let series = coherence_diagnostic(&cloud, None, &[1.0], alpha, &scales, 1.0).unwrap();
        assert!(!series.empty);
        for (eps, r) in &series.ratios {
            assert!((0.1..=10.0).contains(r), "{eps}: {r}");
        }
        let left = coherence_diagnostic(&cloud, None, &[-0.01], alpha, &scales, 1.0).unwrap();
        assert!(left.empty && left.ratios.is_empty());
        assert!(coherence_diagnostic(&cloud, None, &[5.0], alpha, &scales, 1.0).is_err());
    }
}
