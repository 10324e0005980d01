//! Greedy covering and packing counts.
//!
//! Both scans visit the points in lexicographic order, so the counts are a
//! deterministic function of the cloud. Balls are closed: a point at
//! distance exactly `ε` from a cover centre is covered, and two packing
//! centres at distance exactly `2ε` are compatible.

use crate::error::{invalid, Result};

use super::cloud::PointCloud;
use super::index::{dist2, GridIndex};

/// Greedy covering count with a flag raised when `ε` is at or below the
/// cloud resolution (where the cloud no longer represents the set).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverCount {
    pub count: usize,
    pub below_resolution: bool,
}

fn check_radius(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        invalid!("radius must be positive and finite, got {eps}");
    }
    Ok(())
}

/// Greedy upper bound on `N(E, ε)`: take the first uncovered point, cover
/// its closed `ε`-ball, repeat.
pub fn covering_number(cloud: &PointCloud, eps: f64) -> Result<CoverCount> {
    check_radius(eps)?;
    let order = cloud.lexicographic_order();
    let r2 = eps * eps;
    let count = match cloud.dim() {
        1 => {
            let xs: Vec<f64> = order.iter().map(|&i| cloud.coords()[i]).collect();
            let mut count = 0;
            let mut i = 0;
            while i < xs.len() {
                let centre = xs[i];
                count += 1;
                while i < xs.len() && (xs[i] - centre) * (xs[i] - centre) <= r2 {
                    i += 1;
                }
            }
            count
        }
        _ => {
            let index = GridIndex::from_points(cloud.coords(), eps);
            let mut covered = vec![false; cloud.len()];
            let mut count = 0;
            for &i in &order {
                if covered[i] {
                    continue;
                }
                count += 1;
                let centre = cloud.point(i);
                index.for_each_near(centre, eps, |j| {
                    if !covered[j] && dist2(centre, cloud.point(j)) <= r2 {
                        covered[j] = true;
                    }
                });
            }
            count
        }
    };
    Ok(CoverCount {
        count,
        below_resolution: eps <= cloud.resolution(),
    })
}

/// Greedy maximal packing: a point becomes a centre iff it is at distance
/// at least `2ε` from every centre accepted so far.
pub fn packing_number(cloud: &PointCloud, eps: f64) -> Result<usize> {
    check_radius(eps)?;
    let order = cloud.lexicographic_order();
    let sep = 2.0 * eps;
    let sep2 = sep * sep;
    Ok(match cloud.dim() {
        1 => {
            let mut count = 0;
            let mut last: Option<f64> = None;
            for &i in &order {
                let x = cloud.coords()[i];
                let accept = last.is_none_or(|c| (x - c) * (x - c) >= sep2);
                if accept {
                    count += 1;
                    last = Some(x);
                }
            }
            count
        }
        _ => {
            let mut centres = GridIndex::new(sep);
            let mut count = 0;
            for &i in &order {
                let p = cloud.point(i);
                let mut clash = false;
                centres.for_each_near(p, sep, |j| {
                    if !clash && dist2(p, cloud.point(j)) < sep2 {
                        clash = true;
                    }
                });
                if !clash {
                    centres.insert(i, p);
                    count += 1;
                }
            }
            count
        }
    })
}

/// Lower bound `P(E, ε/2) ε^s` on the packing premeasure `P_ε^s(E)`.
pub fn packing_premeasure(cloud: &PointCloud, s: f64, eps: f64) -> Result<f64> {
    if !(s >= 0.0 && s <= cloud.dim() as f64) {
        invalid!(
            "packing exponent s must lie in [0, {}], got {s}",
            cloud.dim()
        );
    }
    let count = packing_number(cloud, eps / 2.0)?;
    Ok(count as f64 * eps.powf(s))
}
