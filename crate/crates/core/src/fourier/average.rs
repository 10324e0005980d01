use std::f64::consts::{PI, TAU};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::measure::AtomicMeasure;
use crate::numeric::{decades, SPAN_SLACK};

use super::transform::{directions, ray};

/// Quadrature settings shared by the ball and Gaussian averages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadraturePolicy {
    /// Floor on radial trapezoid nodes per unit of `|ξ|`.
    pub radial_per_unit: f64,
    /// Nodes per unit are at least `diameter_factor · diam / π`, enough to
    /// follow the oscillation of `|μ̂|` coming from the support diameter.
    pub diameter_factor: f64,
    /// Multiplier on the radial node density (refinement studies).
    pub refine: f64,
    /// Starting number of angular nodes in the plane.
    pub angular_count: usize,
    /// The angular count is doubled while the doubled rule changes the
    /// probe sums by more than `angular_tolerance`, up to this cap.
    pub angular_max: usize,
    pub angular_tolerance: f64,
    /// Truncation radius of the Gaussian average, in units of `L`.
    pub gaussian_cutoff: f64,
    /// Skip the `L ≤ π/resolution` alias guard.
    pub allow_alias: bool,
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        Self {
            radial_per_unit: 16.0,
            diameter_factor: 64.0,
            refine: 1.0,
            angular_count: 256,
            angular_max: 4096,
            angular_tolerance: 0.02,
            gaussian_cutoff: 6.0,
            allow_alias: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Radial1D,
    Polar2D,
    /// Product measures in the plane: the radial nodes are sampled on each
    /// coordinate axis and the averages are assembled from the factor
    /// transforms, with no angular rule.
    Tensor,
}

/// Frequency nodes used to evaluate an average.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub dim: usize,
    pub kind: GridKind,
    pub radial_nodes: Vec<f64>,
    pub angular_count: usize,
    pub max_radius: f64,
    #[serde(skip)]
    segments: Vec<Segment>,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
struct Segment {
    r0: f64,
    step: f64,
    /// Number of trapezoid intervals; the segment has `intervals + 1` nodes.
    intervals: usize,
}

impl FrequencyGrid {
    fn new(mu: &AtomicMeasure, segments: Vec<Segment>, angular_count: usize) -> Self {
        let kind = match (mu.dim(), mu.tensor_factors().is_some()) {
            (1, _) => GridKind::Radial1D,
            (_, true) => GridKind::Tensor,
            _ => GridKind::Polar2D,
        };
        let mut radial_nodes = Vec::new();
        for s in &segments {
            let skip = usize::from(!radial_nodes.is_empty());
            radial_nodes.extend((skip..=s.intervals).map(|i| s.r0 + i as f64 * s.step));
        }
        let max_radius = radial_nodes.last().copied().unwrap_or(0.0);
        Self {
            dim: mu.dim(),
            kind,
            radial_nodes,
            angular_count: if kind == GridKind::Polar2D {
                angular_count
            } else {
                0
            },
            max_radius,
            segments,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AverageKind {
    Ball,
    Gaussian,
}

/// Quadrature actually used for a series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureInfo {
    pub radial_nodes_per_unit: f64,
    pub radial_node_count: usize,
    pub angular_count: usize,
    /// False when the angular doubling hit its cap before the probe sums
    /// settled.
    pub angular_converged: bool,
    pub gaussian_cutoff: Option<f64>,
}

/// `L^{-k} ∫ |μ̂|^p` over balls `|ξ| ≤ L` or against `e^{-|ξ|²/2L²}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageSeries {
    pub kind: AverageKind,
    pub p: f64,
    pub k: f64,
    pub l_values: Vec<f64>,
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
    pub quadrature: QuadratureInfo,
}

impl AverageSeries {
    pub fn raw_pairs(&self) -> Vec<(f64, f64)> {
        self.l_values
            .iter()
            .copied()
            .zip(self.raw.iter().copied())
            .collect()
    }

    pub fn normalized_pairs(&self) -> Vec<(f64, f64)> {
        self.l_values
            .iter()
            .copied()
            .zip(self.normalized.iter().copied())
            .collect()
    }

    /// `d ln(raw) / d ln L` between neighbouring `L` values; the first entry
    /// repeats the first difference.
    pub fn local_slopes(&self) -> Vec<f64> {
        let diffs: Vec<f64> = (1..self.l_values.len())
            .map(|i| {
                (self.raw[i] / self.raw[i - 1]).ln()
                    / (self.l_values[i] / self.l_values[i - 1]).ln()
            })
            .collect();
        match diffs.first() {
            Some(&d) => std::iter::once(d).chain(diffs).collect(),
            None => vec![f64::NAN; self.l_values.len()],
        }
    }

    /// CSV with columns `L,raw,normalized,local_slope` behind a commented
    /// header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let kind = match self.kind {
            AverageKind::Ball => "ball",
            AverageKind::Gaussian => "gaussian",
        };
        let q = &self.quadrature;
        writeln!(
            out,
            "# fraclab series v1, kind={kind}, p={:.16e}, k={:.16e}",
            self.p, self.k
        )?;
        writeln!(out, "# convention: mu_hat(xi) = sum_j w_j e^{{-i<x,xi>}}")?;
        writeln!(
            out,
            "# quadrature: radial_nodes_per_unit={:.6e} radial_node_count={} angular_count={} angular_converged={} gaussian_cutoff={}",
            q.radial_nodes_per_unit,
            q.radial_node_count,
            q.angular_count,
            q.angular_converged,
            q.gaussian_cutoff.map_or("none".to_string(), |c| format!("{c}"))
        )?;
        writeln!(out, "# local_slope = dln(raw)/dln(L)")?;
        writeln!(out, "L,raw,normalized,local_slope")?;
        for (i, s) in self.local_slopes().iter().enumerate() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.l_values[i], self.raw[i], self.normalized[i], s
            )?;
        }
        Ok(())
    }
}

/// Gnuplot script drawing the normalised column of each `(csv path, title)`
/// on log-log axes.
pub fn plot_script(series: &[(&str, &str)]) -> String {
    let mut s = String::from(
        "set datafile separator \",\"\nset logscale xy\nset xlabel \"L\"\nset ylabel \"normalized\"\nset key left top\n",
    );
    let curves: Vec<String> = series
        .iter()
        .map(|(path, title)| format!("'{path}' using 1:3 with linespoints title '{title}'"))
        .collect();
    s.push_str("plot ");
    s.push_str(&curves.join(", \\\n     "));
    s.push('\n');
    s
}

/// Largest radius that the alias guard admits for `mu`.
pub fn alias_limit(mu: &AtomicMeasure) -> f64 {
    PI / mu.resolution()
}

fn check_alias(
    mu: &AtomicMeasure,
    radius: f64,
    what: &str,
    policy: &QuadraturePolicy,
) -> Result<()> {
    let limit = alias_limit(mu);
    if !policy.allow_alias && radius > limit * (1.0 + SPAN_SLACK) {
        invalid!(
            "{what} {radius} exceeds the alias guard: the largest admissible radius for resolution {} is π/resolution = {limit}",
            mu.resolution()
        );
    }
    Ok(())
}

fn validate(ps: &[(f64, f64)], l_values: &[f64]) -> Result<()> {
    if ps.is_empty() {
        invalid!("no (p, k) pairs requested");
    }
    if let Some((p, _)) = ps.iter().find(|(p, _)| !(*p >= 1.0 && p.is_finite())) {
        invalid!("the power p must be at least 1, got {p}");
    }
    if l_values.len() < 6 {
        invalid!("an L grid needs at least 6 values, got {}", l_values.len());
    }
    if l_values[0] <= 0.0 || l_values.windows(2).any(|w| w[1] <= w[0]) {
        invalid!("L values must be positive and strictly increasing");
    }
    let span = decades(l_values);
    if span < 1.5 - SPAN_SLACK {
        invalid!("L values span {span:.3} decades; at least 1.5 are required");
    }
    Ok(())
}

fn radial_density(mu: &AtomicMeasure, policy: &QuadraturePolicy) -> f64 {
    let diam = mu.support().diameter_bound();
    policy.refine
        * policy
            .radial_per_unit
            .max(policy.diameter_factor * diam / PI)
}

fn segment(r0: f64, r1: f64, density: f64) -> Segment {
    let intervals = (((r1 - r0) * density).ceil() as usize).max(16);
    Segment {
        r0,
        step: (r1 - r0) / intervals as f64,
        intervals,
    }
}

/// `σ_p(r) = ∫_{S^{n-1}} |μ̂(rω)|^p dω` at every grid node, per requested `p`.
///
/// Atom weights are real, so `|μ̂(-ξ)| = |μ̂(ξ)|` and only half of the
/// directions are evaluated.
fn sample_sigma(mu: &AtomicMeasure, grid: &FrequencyGrid, ps: &[f64]) -> Vec<Vec<f64>> {
    let dirs: Vec<[f64; 2]> = match mu.dim() {
        1 => vec![[1.0, 0.0]],
        _ => directions(grid.angular_count)[..grid.angular_count / 2].to_vec(),
    };
    let weight = match mu.dim() {
        1 => 2.0,
        _ => 2.0 * TAU / grid.angular_count as f64,
    };
    let moduli: Vec<Vec<f64>> = dirs
        .par_iter()
        .map(|w| {
            let omega = &w[..mu.dim()];
            let mut out = Vec::with_capacity(grid.radial_nodes.len());
            for (i, s) in grid.segments.iter().enumerate() {
                let vals = ray(mu, omega, s.r0, s.step, s.intervals + 1);
                let skip = usize::from(i > 0);
                out.extend(vals[skip..].iter().map(|v| v.norm()));
            }
            out
        })
        .collect();
    ps.iter()
        .map(|&p| {
            let mut sigma = vec![0.0; grid.radial_nodes.len()];
            for m in &moduli {
                for (s, v) in sigma.iter_mut().zip(m) {
                    *s += v.powf(p);
                }
            }
            sigma.iter_mut().for_each(|s| *s *= weight);
            sigma
        })
        .collect()
}

/// Doubles the angular count until the probe sums settle.
fn choose_angular(
    mu: &AtomicMeasure,
    ps: &[f64],
    probes: &[f64],
    policy: &QuadraturePolicy,
) -> Result<(usize, bool)> {
    if mu.dim() == 1 || mu.tensor_factors().is_some() {
        return Ok((0, true));
    }
    if policy.angular_count < 8 || !policy.angular_count.is_multiple_of(2) {
        invalid!(
            "angular count must be even and at least 8, got {}",
            policy.angular_count
        );
    }
    let probe_sums = |count: usize| -> Vec<f64> {
        let dirs = directions(count);
        let half = &dirs[..count / 2];
        let mut sums = vec![0.0; ps.len()];
        for &r in probes {
            let vals: Vec<f64> = half
                .par_iter()
                .map(|w| ray(mu, w, r, 0.0, 1)[0].norm())
                .collect();
            for (s, &p) in sums.iter_mut().zip(ps) {
                *s += vals.iter().map(|v| v.powf(p)).sum::<f64>() * 2.0 * TAU / count as f64;
            }
        }
        sums
    };
    let mut count = policy.angular_count;
    let mut current = probe_sums(count);
    while 2 * count <= policy.angular_max {
        let doubled = probe_sums(2 * count);
        let settled = current
            .iter()
            .zip(&doubled)
            .all(|(a, b)| (a - b).abs() <= policy.angular_tolerance * b.abs());
        if settled {
            return Ok((count, true));
        }
        count *= 2;
        current = doubled;
    }
    Ok((count, false))
}

fn trapezoid(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    step * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1]))
}

/// `|â(t)|` and `|b̂(t)|` of the two factors of a planar product measure at
/// the grid nodes.
fn factor_moduli(mu: &AtomicMeasure, grid: &FrequencyGrid) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = mu
        .tensor_factors()
        .expect("tensor grid on a product measure");
    let along = |m: &AtomicMeasure| {
        let mut out = Vec::with_capacity(grid.radial_nodes.len());
        for (i, s) in grid.segments.iter().enumerate() {
            let vals = ray(m, &[1.0], s.r0, s.step, s.intervals + 1);
            out.extend(vals[usize::from(i > 0)..].iter().map(|v| v.norm()));
        }
        out
    };
    (along(a), along(b))
}

/// Linear interpolation of nodal values at `s`, together with the running
/// trapezoid integral `∫_0^s`.
fn interpolate(t: &[f64], v: &[f64], cumulative: &[f64], s: f64) -> (f64, f64) {
    let j = t
        .partition_point(|&x| x <= s)
        .saturating_sub(1)
        .min(t.len() - 2);
    let h = t[j + 1] - t[j];
    let u = ((s - t[j]) / h).clamp(0.0, 1.0);
    let vs = v[j] + u * (v[j + 1] - v[j]);
    (vs, cumulative[j] + 0.5 * u * h * (v[j] + vs))
}

/// `∫_{|ξ|≤L} a(ξ_1) b(ξ_2) dξ` for even `a`, `b` sampled at the
/// nonnegative nodes `0 = t_0 < … < t_last = L`.
///
/// The quarter disk is split along `ξ_1 = L/√2` and `ξ_2 = L/√2`, so both
/// pieces are integrals of smooth functions over `[0, L/√2]`.
fn disk_integral(t: &[f64], a: &[f64], b: &[f64], ca: &[f64], cb: &[f64]) -> f64 {
    let l = *t.last().unwrap();
    let m = l * std::f64::consts::FRAC_1_SQRT_2;
    let strip = |f: &[f64], cf: &[f64], other: &[f64], co: &[f64]| -> f64 {
        let g = |x: f64, fx: f64| fx * interpolate(t, other, co, (l * l - x * x).max(0.0).sqrt()).1;
        let j = t.partition_point(|&x| x <= m);
        let mut sum = 0.0;
        let mut prev = g(t[0], f[0]);
        for i in 1..j {
            let next = g(t[i], f[i]);
            sum += 0.5 * (t[i] - t[i - 1]) * (prev + next);
            prev = next;
        }
        let (fm, _) = interpolate(t, f, cf, m);
        sum + 0.5 * (m - t[j - 1]) * (prev + g(m, fm))
    };
    let (_, am) = interpolate(t, a, ca, m);
    let (_, bm) = interpolate(t, b, cb, m);
    4.0 * (strip(a, ca, b, cb) + strip(b, cb, a, ca) - am * bm)
}

fn running_integral(t: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut total = 0.0;
    out.push(0.0);
    for i in 1..t.len() {
        total += 0.5 * (t[i] - t[i - 1]) * (b[i] + b[i - 1]);
        out.push(total);
    }
    out
}

/// Ball averages `L^{-k} ∫_{|ξ|≤L} |μ̂|^p dξ` for several `(p, k)` pairs
/// sharing one set of transform evaluations.
pub fn ball_averages(
    mu: &AtomicMeasure,
    pk: &[(f64, f64)],
    l_values: &[f64],
    policy: &QuadraturePolicy,
) -> Result<Vec<AverageSeries>> {
    validate(pk, l_values)?;
    let l_max = *l_values.last().unwrap();
    check_alias(mu, l_max, "L", policy)?;
    let density = radial_density(mu, policy);
    let ps: Vec<f64> = pk.iter().map(|&(p, _)| p).collect();
    let (angular, converged) = choose_angular(mu, &ps, l_values, policy)?;
    let mut segments = Vec::with_capacity(l_values.len());
    let mut start = 0.0;
    for &l in l_values {
        segments.push(segment(start, l, density));
        start = l;
    }
    let grid = FrequencyGrid::new(mu, segments, angular);
    let n = mu.dim() as i32;
    let raws: Vec<Vec<f64>> = if grid.kind == GridKind::Tensor {
        let (ma, mb) = factor_moduli(mu, &grid);
        let t = &grid.radial_nodes;
        ps.iter()
            .map(|&p| {
                let a: Vec<f64> = ma.iter().map(|v| v.powf(p)).collect();
                let b: Vec<f64> = mb.iter().map(|v| v.powf(p)).collect();
                let (ca, cb) = (running_integral(t, &a), running_integral(t, &b));
                let mut end = 0;
                grid.segments
                    .iter()
                    .map(|s| {
                        end += s.intervals;
                        let r = ..=end;
                        disk_integral(&t[r], &a[r], &b[r], &ca[r], &cb[r])
                    })
                    .collect()
            })
            .collect()
    } else {
        sample_sigma(mu, &grid, &ps)
            .iter()
            .map(|sig| {
                let mut raw = Vec::with_capacity(l_values.len());
                let mut total = 0.0;
                let mut offset = 0;
                for s in &grid.segments {
                    let values: Vec<f64> = (0..=s.intervals)
                        .map(|i| sig[offset + i] * (s.r0 + i as f64 * s.step).powi(n - 1))
                        .collect();
                    total += trapezoid(&values, s.step);
                    raw.push(total);
                    offset += s.intervals;
                }
                raw
            })
            .collect()
    };

    Ok(pk
        .iter()
        .zip(raws)
        .map(|(&(p, k), raw)| {
            let normalized = raw
                .iter()
                .zip(l_values)
                .map(|(r, l)| r * l.powf(-k))
                .collect();
            AverageSeries {
                kind: AverageKind::Ball,
                p,
                k,
                l_values: l_values.to_vec(),
                raw,
                normalized,
                quadrature: QuadratureInfo {
                    radial_nodes_per_unit: density,
                    radial_node_count: grid.radial_nodes.len(),
                    angular_count: angular,
                    angular_converged: converged,
                    gaussian_cutoff: None,
                },
            }
        })
        .collect())
}

pub fn ball_average(
    mu: &AtomicMeasure,
    p: f64,
    k: f64,
    l_values: &[f64],
    policy: &QuadraturePolicy,
) -> Result<AverageSeries> {
    Ok(ball_averages(mu, &[(p, k)], l_values, policy)?.remove(0))
}

/// Gaussian averages `L^{-k} ∫ e^{-|ξ|²/2L²} |μ̂|^p dξ`, truncated at
/// `|ξ| = cutoff · L` (at `|ξ_i| = cutoff · L` in each coordinate for
/// product measures).
pub fn gaussian_averages(
    mu: &AtomicMeasure,
    pk: &[(f64, f64)],
    l_values: &[f64],
    policy: &QuadraturePolicy,
) -> Result<Vec<AverageSeries>> {
    validate(pk, l_values)?;
    let cutoff = policy.gaussian_cutoff;
    if !(cutoff > 0.0) {
        invalid!("Gaussian cutoff must be positive, got {cutoff}");
    }
    let l_max = *l_values.last().unwrap();
    check_alias(mu, cutoff * l_max, "Gaussian truncation radius", policy)?;
    let density = radial_density(mu, policy);
    let ps: Vec<f64> = pk.iter().map(|&(p, _)| p).collect();
    let (angular, converged) = choose_angular(mu, &ps, l_values, policy)?;
    let grid = FrequencyGrid::new(mu, vec![segment(0.0, cutoff * l_max, density)], angular);
    let n = mu.dim() as i32;
    let step = grid.segments[0].step;
    let windowed = |l: f64, values: &[f64], power: i32| -> f64 {
        let end = cutoff * l;
        let terms: Vec<f64> = grid
            .radial_nodes
            .iter()
            .zip(values)
            .take_while(|(r, _)| **r <= end * (1.0 + 1e-12))
            .map(|(&r, &s)| s * (-r * r / (2.0 * l * l)).exp() * r.powi(power))
            .collect();
        trapezoid(&terms, step)
    };
    let raws: Vec<Vec<f64>> = if grid.kind == GridKind::Tensor {
        // The window factorises, so the plane integral is a product of two
        // line integrals, each over |ξ_i| ≤ cutoff · L.
        let (ma, mb) = factor_moduli(mu, &grid);
        ps.iter()
            .map(|&p| {
                let a: Vec<f64> = ma.iter().map(|v| v.powf(p)).collect();
                let b: Vec<f64> = mb.iter().map(|v| v.powf(p)).collect();
                l_values
                    .iter()
                    .map(|&l| 4.0 * windowed(l, &a, 0) * windowed(l, &b, 0))
                    .collect()
            })
            .collect()
    } else {
        sample_sigma(mu, &grid, &ps)
            .iter()
            .map(|sig| l_values.iter().map(|&l| windowed(l, sig, n - 1)).collect())
            .collect()
    };

    Ok(pk
        .iter()
        .zip(raws)
        .map(|(&(p, k), raw)| {
            let normalized = raw
                .iter()
                .zip(l_values)
                .map(|(r, l)| r * l.powf(-k))
                .collect();
            AverageSeries {
                kind: AverageKind::Gaussian,
                p,
                k,
                l_values: l_values.to_vec(),
                raw,
                normalized,
                quadrature: QuadratureInfo {
                    radial_nodes_per_unit: density,
                    radial_node_count: grid.radial_nodes.len(),
                    angular_count: angular,
                    angular_converged: converged,
                    gaussian_cutoff: Some(cutoff),
                },
            }
        })
        .collect())
}

pub fn gaussian_average(
    mu: &AtomicMeasure,
    p: f64,
    k: f64,
    l_values: &[f64],
    policy: &QuadraturePolicy,
) -> Result<AverageSeries> {
    Ok(gaussian_averages(mu, &[(p, k)], l_values, policy)?.remove(0))
}
