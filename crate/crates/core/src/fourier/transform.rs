use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::measure::AtomicMeasure;

/// `μ̂(ξ) = Σ_j w_j e^{-i<x_j, ξ>}`. Product measures are evaluated as the
/// product of their factor transforms.
pub fn transform(mu: &AtomicMeasure, xi: &[f64]) -> Complex64 {
    if let Some((a, b)) = mu.tensor_factors() {
        return transform(a, &xi[..1]) * transform(b, &xi[1..2]);
    }
    let mut re = 0.0;
    let mut im = 0.0;
    for (p, w) in mu.atoms() {
        let phase: f64 = p.iter().zip(xi).map(|(a, b)| a * b).sum();
        let (s, c) = phase.sin_cos();
        re += w * c;
        im -= w * s;
    }
    Complex64::new(re, im)
}

/// [`transform`] at many frequencies, each given as a `dim`-vector.
pub fn transform_many(mu: &AtomicMeasure, xis: &[Vec<f64>]) -> Vec<Complex64> {
    xis.par_iter().map(|xi| transform(mu, xi)).collect()
}

const ANCHOR_EVERY: usize = 256;

/// `Σ_j w_j e^{-i t_j r_k}` on the uniform grid `r_k = r0 + k·step`,
/// `k = 0..count`.
///
/// Each atom's phase is advanced by a fixed rotation and recomputed from
/// scratch every few hundred steps.
pub(crate) fn ray_sum(
    t: &[f64],
    w: &[Complex64],
    r0: f64,
    step: f64,
    count: usize,
) -> Vec<Complex64> {
    let blocks = count.div_ceil(ANCHOR_EVERY);
    let rot: Vec<Complex64> = t
        .iter()
        .map(|&x| Complex64::from_polar(1.0, -x * step))
        .collect();
    let out: Vec<Vec<Complex64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * ANCHOR_EVERY;
            let len = ANCHOR_EVERY.min(count - start);
            let r_start = r0 + start as f64 * step;
            let mut z: Vec<Complex64> = t
                .iter()
                .zip(w)
                .map(|(&x, &wj)| wj * Complex64::from_polar(1.0, -x * r_start))
                .collect();
            let mut block = Vec::with_capacity(len);
            for _ in 0..len {
                let mut acc = Complex64::new(0.0, 0.0);
                for zj in z.iter() {
                    acc += *zj;
                }
                block.push(acc);
                for (zj, rj) in z.iter_mut().zip(&rot) {
                    *zj *= *rj;
                }
            }
            block
        })
        .collect();
    out.into_iter().flatten().collect()
}

/// `μ̂(r_k ω)` for `r_k = r0 + k·step` along the direction `ω`.
pub(crate) fn ray(
    mu: &AtomicMeasure,
    omega: &[f64],
    r0: f64,
    step: f64,
    count: usize,
) -> Vec<Complex64> {
    if let Some((a, b)) = mu.tensor_factors() {
        let fa = ray(a, &omega[..1], r0, step, count);
        let fb = ray(b, &omega[1..2], r0, step, count);
        return fa.into_iter().zip(fb).map(|(x, y)| x * y).collect();
    }
    let t: Vec<f64> = mu
        .points()
        .map(|p| p.iter().zip(omega).map(|(a, b)| a * b).sum())
        .collect();
    let w: Vec<Complex64> = mu
        .weights()
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    ray_sum(&t, &w, r0, step, count)
}

/// Unit vectors at angles `2π m / count`.
pub(crate) fn directions(count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|m| {
            let (s, c) = (TAU * m as f64 / count as f64).sin_cos();
            [c, s]
        })
        .collect()
}

/// `∫_{S^{n-1}} |μ̂(rω)|^2 dω`; see [`spherical_power_average`].
pub fn spherical_average(mu: &AtomicMeasure, r: f64, angular_count: usize) -> Result<f64> {
    spherical_power_average(mu, r, 2.0, angular_count)
}

/// `∫_{S^{n-1}} |μ̂(rω)|^p dω`: the two-point sum `|μ̂(r)|^p + |μ̂(-r)|^p`
/// on `R`, and the equispaced trapezoid rule with `angular_count` nodes on
/// the circle.
pub fn spherical_power_average(
    mu: &AtomicMeasure,
    r: f64,
    p: f64,
    angular_count: usize,
) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        invalid!("radius must be positive, got {r}");
    }
    match mu.dim() {
        1 => Ok(transform(mu, &[r]).norm().powf(p) + transform(mu, &[-r]).norm().powf(p)),
        _ => {
            if angular_count < 8 {
                invalid!("angular quadrature needs at least 8 nodes, got {angular_count}");
            }
            let sum: f64 = directions(angular_count)
                .par_iter()
                .map(|w| transform(mu, &[r * w[0], r * w[1]]).norm().powf(p))
                .collect::<Vec<_>>()
                .iter()
                .sum();
            Ok(sum * TAU / angular_count as f64)
        }
    }
}
