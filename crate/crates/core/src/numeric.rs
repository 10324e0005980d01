//! Small numerical helpers shared by the estimators.

use crate::error::{invalid, Result};

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.extend(values);
    acc.value()
}

/// Pairwise (tree) summation. The reduction tree depends only on the slice
/// length, so the result does not depend on how the terms were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        return compensated_sum(values.iter().copied());
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `count` points from `min` to `max` (inclusive) with constant ratio.
pub fn geometric_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > 0.0 && min.is_finite() && max.is_finite()) {
        invalid!("geometric grid needs finite positive endpoints, got [{min}, {max}]");
    }
    if count < 2 {
        invalid!("geometric grid needs at least 2 points, got {count}");
    }
    let ratio = (max / min).ln() / (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count).map(|i| min * (ratio * i as f64).exp()).collect();
    // pin the endpoints exactly
    grid[0] = min;
    grid[count - 1] = max;
    Ok(grid)
}

/// Number of decades spanned by a set of positive values.
pub fn decades(values: &[f64]) -> f64 {
    let (lo, hi) = min_max(values);
    (hi / lo).log10()
}

pub fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Median of a nonempty slice (mean of the two middle values for even length).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Tolerance used when comparing decade spans that are pinned to "at least
/// 1.5 decades" by construction (e.g. a factor of 32).
pub(crate) const SPAN_SLACK: f64 = 1e-9;

/// Volume of the closed unit ball in dimension `n` (n = 1, 2, 3).
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => {
            // Γ-free recurrence V_n = 2π/n V_{n-2}
            2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2)
        }
    }
}
