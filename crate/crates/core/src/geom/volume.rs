//! Lebesgue measure of `ε`-distance sets `E(ε) = {y : dist(y, E) ≤ ε}`.
//!
//! The default route is exact on the atoms: a merged interval union in 1-D
//! and the boundary-arc (Green's theorem) area of a union of equal disks in
//! 2-D. A voxel route is kept for cross-checking and for callers that want
//! the grid estimator.

use std::f64::consts::{PI, TAU};

use crate::error::{invalid, Error, Result};
use crate::numeric::CompensatedSum;

use super::cloud::PointCloud;
use super::index::{dist2, GridIndex};

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        invalid!("distance-set radius must be positive and finite, got {eps}");
    }
    Ok(())
}

/// `|E(ε)|` computed exactly for the cloud's atoms.
pub fn distance_set_volume(cloud: &PointCloud, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(match cloud.dim() {
        1 => interval_union_length(cloud.coords(), eps),
        _ => disk_union_area(cloud.coords(), eps),
    })
}

/// Total length of `∪ [x - ε, x + ε]`.
pub fn interval_union_length(xs: &[f64], eps: f64) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut total = CompensatedSum::new();
    let mut lo = sorted[0] - eps;
    let mut hi = sorted[0] + eps;
    for &x in &sorted[1..] {
        if x - eps > hi {
            total.add(hi - lo);
            lo = x - eps;
        }
        hi = x + eps;
    }
    total.add(hi - lo);
    total.value()
}

/// Area of the union of closed disks of radius `eps` centred at the points.
fn disk_union_area(coords: &[f64], eps: f64) -> f64 {
    // Work relative to the bounding-box centre to limit cancellation.
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in coords.chunks_exact(2) {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let origin = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let mut centred: Vec<[f64; 2]> = coords
        .chunks_exact(2)
        .map(|p| [p[0] - origin[0], p[1] - origin[1]])
        .collect();
    centred.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    centred.dedup();
    let flat: Vec<f64> = centred.iter().flatten().copied().collect();

    let diam = 2.0 * eps;
    let index = GridIndex::from_points(&flat, diam);
    let mut area = CompensatedSum::new();
    let mut covered: Vec<(f64, f64)> = Vec::new();
    for (i, c) in centred.iter().enumerate() {
        covered.clear();
        index.for_each_near(c, diam, |j| {
            if j == i {
                return;
            }
            let q = &centred[j];
            let d2 = dist2(c, q);
            if d2 >= diam * diam {
                return;
            }
            let d = d2.sqrt();
            let half = (d / diam).acos();
            let mid = (q[1] - c[1]).atan2(q[0] - c[0]);
            push_wrapped(&mut covered, mid - half, mid + half);
        });
        if covered.is_empty() {
            area.add(PI * eps * eps);
            continue;
        }
        covered.sort_by(|a, b| a.0.total_cmp(&b.0));
        // sweep the complement of the covered arcs on [0, 2π)
        let mut cursor = 0.0;
        for &(a, b) in covered.iter() {
            if a > cursor {
                area.add(arc_term(c, eps, cursor, a));
            }
            cursor = f64::max(cursor, b);
        }
        if cursor < TAU {
            area.add(arc_term(c, eps, cursor, TAU));
        }
    }
    area.value()
}

/// Adds the angular interval `[a, b]` (width < π) folded into `[0, 2π)`.
fn push_wrapped(out: &mut Vec<(f64, f64)>, a: f64, b: f64) {
    let shift = (a / TAU).floor() * TAU;
    let (a, b) = (a - shift, b - shift);
    if b <= TAU {
        out.push((a, b));
    } else {
        out.push((a, TAU));
        out.push((0.0, b - TAU));
    }
}

/// `½∮(x dy − y dx)` along the counter-clockwise arc `θ ∈ [t0, t1]` of the
/// circle of radius `r` about `c`.
fn arc_term(c: &[f64; 2], r: f64, t0: f64, t1: f64) -> f64 {
    let (s0, c0) = t0.sin_cos();
    let (s1, c1) = t1.sin_cos();
    0.5 * (r * r * (t1 - t0) + c[0] * r * (s1 - s0) - c[1] * r * (c1 - c0))
}

/// Parameters of the voxel estimator.
#[derive(Clone, Copy, Debug)]
pub struct VoxelOptions {
    /// Grid pitch; defaults to `ε/8` and must not exceed it.
    pub pitch: Option<f64>,
    pub max_voxels: u64,
}

impl Default for VoxelOptions {
    fn default() -> Self {
        Self {
            pitch: None,
            max_voxels: 100_000_000,
        }
    }
}

/// Voxel estimate of `|E(ε)|`: the bounding box inflated by `ε` is cut into
/// cells of pitch `h`; cells whose centre lies within `ε` of an atom count.
pub fn distance_set_volume_voxel(
    cloud: &PointCloud,
    eps: f64,
    options: &VoxelOptions,
) -> Result<f64> {
    check_eps(eps)?;
    let h = options.pitch.unwrap_or(eps / 8.0);
    if !(h > 0.0 && h <= eps / 8.0) {
        invalid!("voxel pitch {h} must lie in (0, ε/8] = (0, {}]", eps / 8.0);
    }
    let dim = cloud.dim();
    let bbox = cloud.bounding_box();
    let counts: Vec<u64> = bbox
        .iter()
        .map(|(lo, hi)| ((hi - lo + 2.0 * eps) / h).ceil() as u64 + 1)
        .collect();
    let total: u64 = counts
        .iter()
        .try_fold(1u64, |a, &b| a.checked_mul(b))
        .unwrap_or(u64::MAX);
    if total > options.max_voxels {
        let extent: f64 = bbox.iter().map(|(lo, hi)| hi - lo + 2.0 * eps).product();
        let needed = (extent / options.max_voxels as f64).powf(1.0 / dim as f64);
        return Err(Error::Size(format!(
            "voxel grid needs {total} cells (budget {}); a pitch of at least {needed:.3e} is required",
            options.max_voxels
        )));
    }
    let origin: Vec<f64> = bbox.iter().map(|(lo, _)| lo - eps).collect();
    let mut marked = vec![false; total as usize];
    let eps2 = eps * eps;
    let reach = (eps / h).ceil() as i64 + 1;
    for p in cloud.points() {
        let base: Vec<i64> = (0..dim)
            .map(|a| ((p[a] - origin[a]) / h).floor() as i64)
            .collect();
        let centre_at = |a: usize, k: i64| origin[a] + (k as f64 + 0.5) * h;
        if dim == 1 {
            for k in (base[0] - reach)..=(base[0] + reach) {
                if k < 0 || k as u64 >= counts[0] {
                    continue;
                }
                let dx = centre_at(0, k) - p[0];
                if dx * dx <= eps2 {
                    marked[k as usize] = true;
                }
            }
        } else {
            for kx in (base[0] - reach)..=(base[0] + reach) {
                if kx < 0 || kx as u64 >= counts[0] {
                    continue;
                }
                let dx = centre_at(0, kx) - p[0];
                for ky in (base[1] - reach)..=(base[1] + reach) {
                    if ky < 0 || ky as u64 >= counts[1] {
                        continue;
                    }
                    let dy = centre_at(1, ky) - p[1];
                    if dx * dx + dy * dy <= eps2 {
                        marked[(kx as u64 * counts[1] + ky as u64) as usize] = true;
                    }
                }
            }
        }
    }
    let hits = marked.iter().filter(|&&m| m).count();
    Ok(hits as f64 * h.powi(dim as i32))
}

/// The raw sequence `(ε, (2ε)^{α-n} |E(ε)|)` whose limsup and liminf are the
/// upper and lower Minkowski contents.
pub fn minkowski_content_sequence(
    cloud: &PointCloud,
    alpha: f64,
    scales: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let n = cloud.dim() as f64;
    scales
        .iter()
        .map(|&eps| {
            let vol = distance_set_volume(cloud, eps)?;
            Ok((eps, (2.0 * eps).powf(alpha - n) * vol))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{build, constructions};

    #[test]
    fn single_point_and_two_points() {
        let one = PointCloud::new(1, vec![0.0], 1e-6).unwrap();
        assert!((distance_set_volume(&one, 0.5).unwrap() - 1.0).abs() < 1e-15);
        let two = PointCloud::new(1, vec![0.0, 10.0], 1e-6).unwrap();
        assert!((distance_set_volume(&two, 1.0).unwrap() - 4.0).abs() < 1e-15);

        let h = 0.5 / 8.0;
        let v = distance_set_volume_voxel(&one, 0.5, &VoxelOptions::default()).unwrap();
        assert!((v - 1.0).abs() <= h, "{v}");
        let v = distance_set_volume_voxel(&two, 1.0, &VoxelOptions::default()).unwrap();
        assert!((v - 4.0).abs() <= 2.0 * 1.0 / 8.0, "{v}");
    }

    #[test]
    fn cantor_union_matches_interval_oracle() {
        // depth-8 cloud at ε = 3^-6: each depth-6 cylinder [c, c + 3^-6]
        // carries 4 atoms; the ε-neighbourhood of the true set is the union
        // of [c - ε, c + 2ε] over depth-6 cylinders (gaps ≥ 3^-6 = ε merge).
        let cloud = build(&constructions::middle_thirds(), 8).unwrap();
        let eps = 3f64.powi(-6);
        let coarse = build(&constructions::middle_thirds(), 6).unwrap();
        let mut ivs: Vec<(f64, f64)> = coarse
            .coords()
            .iter()
            .map(|&c| (c - eps, c + 2.0 * eps))
            .collect();
        ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut exact = 0.0;
        let (mut lo, mut hi) = ivs[0];
        for &(a, b) in &ivs[1..] {
            if a > hi {
                exact += hi - lo;
                lo = a;
            }
            hi = hi.max(b);
        }
        exact += hi - lo;
        let got = distance_set_volume(&cloud, eps).unwrap();
        assert!((got - exact).abs() / exact < 0.10, "{got} vs {exact}");
    }

    #[test]
    fn disk_union_simple_configurations() {
        let eps = 0.3;
        let one = PointCloud::new(2, vec![0.2, -0.1], 1e-6).unwrap();
        assert!((distance_set_volume(&one, eps).unwrap() - PI * eps * eps).abs() < 1e-15);

        // two disks at distance d: 2πr² minus the lens
        let d: f64 = 0.4;
        let two = PointCloud::new(2, vec![0.0, 0.0, d, 0.0], 1e-6).unwrap();
        let lens =
            2.0 * eps * eps * (d / (2.0 * eps)).acos() - 0.5 * d * (4.0 * eps * eps - d * d).sqrt();
        let want = 2.0 * PI * eps * eps - lens;
        assert!((distance_set_volume(&two, eps).unwrap() - want).abs() < 1e-13);

        // duplicates do not count twice
        let dup = PointCloud::new(2, vec![0.0, 0.0, 0.0, 0.0], 1e-6).unwrap();
        assert!((distance_set_volume(&dup, eps).unwrap() - PI * eps * eps).abs() < 1e-15);
    }

    #[test]
    fn disk_union_with_hole_matches_voxels() {
        // ring of disks enclosing an uncovered hole
        let n = 12;
        let coords: Vec<f64> = (0..n)
            .flat_map(|i| {
                let t = TAU * i as f64 / n as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        let cloud = PointCloud::new(2, coords, 1e-6).unwrap();
        let eps = 0.3;
        let exact = distance_set_volume(&cloud, eps).unwrap();
        let fine = VoxelOptions {
            pitch: Some(eps / 200.0),
            ..Default::default()
        };
        let vox = distance_set_volume_voxel(&cloud, eps, &fine).unwrap();
        assert!((exact - vox).abs() / exact < 2e-3, "{exact} vs {vox}");
        assert!(exact < 12.0 * PI * eps * eps);
    }

    #[test]
    fn voxel_budget_reports_pitch() {
        let cloud = PointCloud::new(2, vec![0.0, 0.0, 100.0, 100.0], 1e-6).unwrap();
        let err = distance_set_volume_voxel(&cloud, 1e-3, &VoxelOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Size(ref m) if m.contains("pitch")));
        let bad = VoxelOptions {
            pitch: Some(0.5),
            ..Default::default()
        };
        assert!(distance_set_volume_voxel(&cloud, 1.0, &bad).is_err());
    }

    #[test]
    fn interval_content_is_about_one() {
        let cloud = build(&constructions::unit_interval(), 10).unwrap();
        for (eps, v) in minkowski_content_sequence(&cloud, 1.0, &[0.1, 0.05, 0.01]).unwrap() {
            assert!((v - (1.0 + 2.0 * eps)).abs() < 2e-3, "{eps} {v}");
        }
    }
}
