use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fourier::transform::ray_sum;
use crate::geom::coherence_diagnostic;
use crate::measure::AtomicMeasure;
use crate::numeric::compensated_sum;

use super::report::{InequalityReport, Orientation, PlateauGate, TheoremId};

/// Descending copy of `values`; equal entries keep their relative order.
pub fn nonincreasing_rearrangement(values: &[f64]) -> Result<Vec<f64>> {
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        invalid!("rearrangement needs finite nonnegative values, got {v}");
    }
    let mut out = values.to_vec();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// `u(x) = Σ_k c_k e^{i a_k x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentialSum {
    coefficients: Vec<Complex64>,
    frequencies: Vec<f64>,
}

impl ExponentialSum {
    pub fn new(coefficients: Vec<Complex64>, frequencies: Vec<f64>) -> Result<Self> {
        if coefficients.len() != frequencies.len() {
            invalid!(
                "{} coefficients for {} frequencies",
                coefficients.len(),
                frequencies.len()
            );
        }
        if !frequencies.iter().all(|a| a.is_finite()) || !coefficients.iter().all(|c| c.is_finite())
        {
            invalid!("exponential sum terms must be finite");
        }
        Ok(Self {
            coefficients,
            frequencies,
        })
    }

    pub fn real(coefficients: &[f64], frequencies: &[f64]) -> Result<Self> {
        Self::new(
            coefficients
                .iter()
                .map(|&c| Complex64::new(c, 0.0))
                .collect(),
            frequencies.to_vec(),
        )
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.coefficients
            .iter()
            .zip(&self.frequencies)
            .map(|(c, a)| c * Complex64::from_polar(1.0, a * x))
            .sum()
    }
}

/// `L^{-1} ∫_{-L}^{L} |u(x)|^p dx` by the trapezoid rule, the `p`-th power
/// of the Besicovitch seminorm at scale `L`.
///
/// The step is `min(1, 2π / max|a_k|) / node_density`.
pub fn besicovitch_norm(u: &ExponentialSum, p: f64, l: f64, node_density: usize) -> Result<f64> {
    if !(p > 1.0 && p <= 2.0) {
        invalid!("the Besicovitch norm is taken for 1 < p ≤ 2, got {p}");
    }
    if !(l > 0.0 && l.is_finite()) {
        invalid!("L must be positive, got {l}");
    }
    if node_density < 32 {
        invalid!("node density must be at least 32, got {node_density}");
    }
    if u.is_empty() {
        return Ok(0.0);
    }
    let top = u.frequencies.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let h_max = (std::f64::consts::TAU / top).min(1.0) / node_density as f64;
    let intervals = (2.0 * l / h_max).ceil() as usize;
    let h = 2.0 * l / intervals as f64;
    let t: Vec<f64> = u.frequencies.iter().map(|a| -a).collect();
    let values = ray_sum(&t, &u.coefficients, -l, h, intervals + 1);
    let powered: Vec<f64> = values.iter().map(|v| v.norm().powf(p)).collect();
    let inner = compensated_sum(powered[1..intervals].iter().copied());
    Ok(h * (inner + 0.5 * (powered[0] + powered[intervals])) / l)
}

/// Both sides of the rearrangement inequality
/// `Σ c_k^p k^{p-2} ≤ Σ (c_k^*)^p k^{p-2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dominance {
    pub original: f64,
    pub rearranged: f64,
    /// The comparison made on the exact rational values of the
    /// floating-point terms.
    pub holds: bool,
}

/// Evaluates both sums for `|c_k|`, `k = 1, 2, ...`.
///
/// Each term is the product of `a_k = |c_k|^p` and `b_k = k^{p-2}`, both
/// taken as exact rationals, and the rearranged sum pairs the descending
/// order of the `a_k` with the same `b_k`.
pub fn rearrangement_dominance(magnitudes: &[f64], p: f64) -> Result<Dominance> {
    if !(p > 1.0 && p <= 2.0) {
        invalid!("the discrete Hardy inequality is stated for 1 < p ≤ 2, got {p}");
    }
    let a: Vec<f64> = nonincreasing_rearrangement(magnitudes)
        .map(|_| magnitudes.iter().map(|c| c.powf(p)).collect())?;
    let star = nonincreasing_rearrangement(&a)?;
    let b: Vec<f64> = (1..=a.len()).map(|k| (k as f64).powf(p - 2.0)).collect();
    let exact = |xs: &[f64]| -> BigRational {
        xs.iter()
            .zip(&b)
            .map(|(x, y)| {
                BigRational::from_float(*x).expect("finite")
                    * BigRational::from_float(*y).expect("finite")
            })
            .fold(BigRational::from_integer(0.into()), |acc, t| acc + t)
    };
    let float = |xs: &[f64]| compensated_sum(xs.iter().zip(&b).map(|(x, y)| x * y));
    Ok(Dominance {
        original: float(&a),
        rearranged: float(&star),
        holds: exact(&a) <= exact(&star),
    })
}

/// Envelope `|c_k| ≤ c · k^{-s}` used to bound the truncated tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerEnvelope {
    pub c: f64,
    pub s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HudsonOptions {
    pub gate: PlateauGate,
    pub node_density: usize,
    pub envelope: Option<PowerEnvelope>,
}

impl Default for HudsonOptions {
    fn default() -> Self {
        Self {
            gate: PlateauGate::default(),
            node_density: 32,
            envelope: None,
        }
    }
}

/// `Σ (c_k^*)^p k^{p-2} ≤ C ‖u‖^p_{B^p}` over a grid of `L`, with the exact
/// rearrangement comparison recorded in the metadata.
pub fn check_hudson_discrete(
    u: &ExponentialSum,
    p: f64,
    l_values: &[f64],
    options: &HudsonOptions,
) -> Result<InequalityReport> {
    let mags: Vec<f64> = u.coefficients.iter().map(|c| c.norm()).collect();
    let dom = rearrangement_dominance(&mags, p)?;
    if !dom.holds {
        invalid!(
            "rearrangement dominance failed: {} > {}",
            dom.original,
            dom.rearranged
        );
    }
    let rhs = l_values
        .iter()
        .map(|&l| Ok((l, besicovitch_norm(u, p, l, options.node_density)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut metadata = vec![
        ("p".to_string(), format!("{p}")),
        (
            "terms".to_string(),
            format!("{} (truncation length)", u.len()),
        ),
        ("original".to_string(), format!("{:.16e}", dom.original)),
        ("rearranged".to_string(), format!("{:.16e}", dom.rearranged)),
        (
            "dominance".to_string(),
            "holds (exact rational comparison)".to_string(),
        ),
        (
            "node_density".to_string(),
            format!("{}", options.node_density),
        ),
    ];
    if let Some(env) = options.envelope {
        let e = env.s * p - p + 2.0;
        let tail = if e > 1.0 {
            format!(
                "{:.6e}",
                env.c.powf(p) * (u.len() as f64).powf(1.0 - e) / (e - 1.0)
            )
        } else {
            "unbounded (envelope too slow)".to_string()
        };
        metadata.push(("tail_bound".to_string(), tail));
    }
    Ok(InequalityReport::new(
        TheoremId::HudsonDiscrete,
        dom.rearranged,
        rhs,
        Orientation::FixedOverSeries,
        options.gate,
        metadata,
    ))
}

/// Coherence ratios `|E_x(ε)| ε^{α-n} / μ(E_x)` reported against
/// `L = 1/ε`, the surrogate for the coherent-set form of the Hardy
/// inequality.
pub fn check_hudson_coherent(
    mu: &AtomicMeasure,
    x: &[f64],
    alpha: f64,
    scales: &[f64],
    gate: &PlateauGate,
) -> Result<InequalityReport> {
    let series = coherence_diagnostic(
        &mu.support(),
        Some(mu.weights()),
        x,
        alpha,
        scales,
        mu.total_mass(),
    )?;
    let mut rhs: Vec<(f64, f64)> = series
        .ratios
        .iter()
        .map(|&(eps, r)| (1.0 / eps, r))
        .collect();
    rhs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut metadata = vec![
        ("x".to_string(), format!("{x:?}")),
        ("alpha".to_string(), format!("{alpha}")),
        (
            "quadrant_mass".to_string(),
            format!("{:.16e}", series.quadrant_mass),
        ),
        (
            "set".to_string(),
            "E_x used directly; the density-filtered refinement E_x^0 is not applied".to_string(),
        ),
    ];
    if series.empty {
        metadata.push((
            "empty".to_string(),
            "no atom lies in the quadrant".to_string(),
        ));
    }
    Ok(InequalityReport::new(
        TheoremId::HudsonCoherent,
        1.0,
        rhs,
        Orientation::SeriesOverFixed,
        *gate,
        metadata,
    ))
}
