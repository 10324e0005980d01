//! Declarative descriptions of the fractal constructions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::dimension::similarity_dimension;

/// A contracting similitude `x ↦ ratio · R · x + translation`.
///
/// In one dimension `R` is the identity or, when `reflect` is set, `x ↦ -x`.
/// In two dimensions `R` is a rotation by `rotation` radians, preceded by the
/// reflection `(x, y) ↦ (x, -y)` when `reflect` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Similitude {
    pub ratio: f64,
    #[serde(default)]
    pub rotation: f64,
    #[serde(default)]
    pub reflect: bool,
    pub translation: Vec<f64>,
}

impl Similitude {
    pub fn scaling(ratio: f64, translation: Vec<f64>) -> Self {
        Self {
            ratio,
            rotation: 0.0,
            reflect: false,
            translation,
        }
    }

    /// Linear part as a row-major 2x2 matrix (only the top-left entry is
    /// used in 1-D).
    fn linear(&self, dim: usize) -> [f64; 4] {
        if dim == 1 {
            let s = if self.reflect { -1.0 } else { 1.0 };
            return [self.ratio * s, 0.0, 0.0, 0.0];
        }
        let (sin, cos) = self.rotation.sin_cos();
        let f = if self.reflect { -1.0 } else { 1.0 };
        // R(θ) · diag(1, f)
        [
            self.ratio * cos,
            -self.ratio * sin * f,
            self.ratio * sin,
            self.ratio * cos * f,
        ]
    }

    pub fn apply(&self, dim: usize, p: &[f64], out: &mut [f64]) {
        let m = self.linear(dim);
        if dim == 1 {
            out[0] = m[0] * p[0] + self.translation[0];
        } else {
            out[0] = m[0] * p[0] + m[1] * p[1] + self.translation[0];
            out[1] = m[2] * p[0] + m[3] * p[1] + self.translation[1];
        }
    }

    /// The unique fixed point of the map.
    pub fn fixed_point(&self, dim: usize) -> Vec<f64> {
        let m = self.linear(dim);
        if dim == 1 {
            return vec![self.translation[0] / (1.0 - m[0])];
        }
        // (I - M) x = t
        let (a, b, c, d) = (1.0 - m[0], -m[1], -m[2], 1.0 - m[3]);
        let det = a * d - b * c;
        let (t0, t1) = (self.translation[0], self.translation[1]);
        vec![(d * t0 - b * t1) / det, (a * t1 - c * t0) / det]
    }
}

/// Iterated function system of similitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IfsSpec {
    pub dim: usize,
    pub maps: Vec<Similitude>,
    /// Caller's assertion that the open set condition holds. It is not
    /// verified; the dimension formula and the natural weights rely on it.
    pub open_set_condition: bool,
}

/// Parameters of `C(N^k, η^{-k})`: `[0, 1]` minus `N^k - 1` equal gaps,
/// leaving `N^k` subintervals of length `η^k`, iterated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorParams {
    pub n: u32,
    pub eta: f64,
    #[serde(default = "one")]
    pub k: u32,
}

fn one() -> u32 {
    1
}

/// Symmetric perfect set: `E_j` is a union of `2^j` intervals of length
/// `lengths[j]`, each holding two intervals of `E_{j+1}` flush with its ends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricPerfectParams {
    pub lengths: Vec<f64>,
}

/// How the Salem anchors are chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AnchorChoice {
    Fixed {
        values: Vec<f64>,
    },
    /// Anchors drawn from the seed: sorted uniform offsets plus a forced
    /// spacing of `1.001 η`, so every gap exceeds `η`.
    Random {
        seed: u64,
    },
}

/// Salem's random Cantor set `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SalemParams {
    pub n: u32,
    pub eta: f64,
    pub anchors: AnchorChoice,
    /// Per-level ratios `η_j`. When absent, `η_j = η (1 - 1/(j+1)^2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_seq: Option<Vec<f64>>,
}

const ANCHOR_SPACING: f64 = 1.001;

impl SalemParams {
    pub fn random(n: u32, eta: f64, seed: u64) -> Self {
        Self {
            n,
            eta,
            anchors: AnchorChoice::Random { seed },
            eta_seq: None,
        }
    }

    pub fn resolve_anchors(&self) -> Result<Vec<f64>> {
        let n = self.n as usize;
        match &self.anchors {
            AnchorChoice::Fixed { values } => Ok(values.clone()),
            AnchorChoice::Random { seed } => {
                let gap = self.eta * ANCHOR_SPACING;
                let slack = 1.0 - self.eta - (n as f64 - 1.0) * gap;
                if slack < 0.0 {
                    invalid!(
                        "SalemK: {} anchors with spacing {} do not fit in [0, 1 - η]",
                        n,
                        gap
                    );
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut offsets: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * slack).collect();
                offsets.sort_by(f64::total_cmp);
                Ok(offsets
                    .iter()
                    .enumerate()
                    .map(|(i, u)| u + i as f64 * gap)
                    .collect())
            }
        }
    }

    /// The first `depth` ratios `η_1, …, η_depth`.
    pub fn eta_sequence(&self, depth: usize) -> Result<Vec<f64>> {
        match &self.eta_seq {
            Some(seq) => {
                if seq.len() < depth {
                    invalid!(
                        "SalemK: eta_seq has {} entries, depth {} needs more",
                        seq.len(),
                        depth
                    );
                }
                Ok(seq[..depth].to_vec())
            }
            None => Ok((1..=depth)
                .map(|j| {
                    let j1 = (j + 1) as f64;
                    self.eta * (1.0 - 1.0 / (j1 * j1))
                })
                .collect()),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n as usize;
        if n < 2 {
            invalid!("SalemK: N must be at least 2, got {n}");
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            invalid!("SalemK: η must lie in (0,1), got {}", self.eta);
        }
        if n as f64 * self.eta >= 1.0 {
            invalid!("SalemK: requires Nη < 1, got N={n}, η={}", self.eta);
        }
        let anchors = self.resolve_anchors()?;
        if anchors.len() != n {
            invalid!("SalemK: expected {n} anchors, got {}", anchors.len());
        }
        for (i, &a) in anchors.iter().enumerate() {
            if !(a >= 0.0 && a <= 1.0 - self.eta) {
                invalid!("SalemK: anchor a_{} = {a} outside [0, 1-η]", i + 1);
            }
        }
        for w in anchors.windows(2) {
            if !(w[1] - w[0] > self.eta) {
                invalid!(
                    "SalemK: anchor gap condition violated, {} - {} is not larger than η = {}",
                    w[1],
                    w[0],
                    self.eta
                );
            }
        }
        if let Some(seq) = &self.eta_seq {
            for (idx, &e) in seq.iter().enumerate() {
                let j1 = (idx + 2) as f64;
                let lower = self.eta * (1.0 - 1.0 / (j1 * j1));
                if !(e >= lower && e <= self.eta) {
                    invalid!(
                        "SalemK: η_{} = {e} violates η(1-1/(j+1)²) ≤ η_j ≤ η",
                        idx + 1
                    );
                }
            }
            if seq.windows(2).any(|w| w[1] < w[0]) {
                invalid!("SalemK: eta_seq must be increasing");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductSpec {
    /// Exactly two one-dimensional factors.
    pub factors: Vec<FractalSpec>,
}

/// A finite point set given directly, optionally with weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitSpec {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub resolution: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_hint: Option<f64>,
}

/// Declarative description of a set (and its natural measure).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FractalSpec {
    Ifs(IfsSpec),
    CantorCnm(CantorParams),
    SymmetricPerfect(SymmetricPerfectParams),
    SalemK(SalemParams),
    Product(ProductSpec),
    Explicit(ExplicitSpec),
}

impl CantorParams {
    /// The equivalent IFS: `N^k` maps of ratio `η^k` with equal gaps.
    pub fn to_ifs(&self) -> Result<IfsSpec> {
        let pieces = (self.n as u64)
            .checked_pow(self.k)
            .filter(|&p| p <= 1 << 20)
            .ok_or_else(|| {
                Error::Size(format!(
                    "CantorCNM: N^k = {}^{} is too large",
                    self.n, self.k
                ))
            })? as usize;
        let len = self.eta.powi(self.k as i32);
        let step = if pieces > 1 {
            (1.0 - len) / (pieces as f64 - 1.0)
        } else {
            0.0
        };
        let maps = (0..pieces)
            .map(|i| Similitude::scaling(len, vec![i as f64 * step]))
            .collect();
        Ok(IfsSpec {
            dim: 1,
            maps,
            open_set_condition: true,
        })
    }
}

impl FractalSpec {
    pub fn dim(&self) -> usize {
        match self {
            FractalSpec::Ifs(s) => s.dim,
            FractalSpec::CantorCnm(_)
            | FractalSpec::SymmetricPerfect(_)
            | FractalSpec::SalemK(_) => 1,
            FractalSpec::Product(p) => p.factors.iter().map(FractalSpec::dim).sum(),
            FractalSpec::Explicit(e) => e.dim,
        }
    }

    /// Checks the invariants of the construction. Errors name the violated
    /// invariant.
    pub fn validate(&self) -> Result<()> {
        match self {
            FractalSpec::Ifs(s) => {
                if !(s.dim == 1 || s.dim == 2) {
                    invalid!("IFS: dimension must be 1 or 2, got {}", s.dim);
                }
                if s.maps.is_empty() {
                    invalid!("IFS: needs at least one map");
                }
                if !s.open_set_condition {
                    invalid!("IFS: the open set condition must be asserted by the caller");
                }
                for (i, m) in s.maps.iter().enumerate() {
                    if !(m.ratio > 0.0 && m.ratio < 1.0) {
                        invalid!("IFS: map {i} has ratio {} outside (0,1)", m.ratio);
                    }
                    if m.translation.len() != s.dim {
                        invalid!(
                            "IFS: map {i} translation has {} coordinates, expected {}",
                            m.translation.len(),
                            s.dim
                        );
                    }
                    if !m.translation.iter().all(|t| t.is_finite()) || !m.rotation.is_finite() {
                        invalid!("IFS: map {i} has non-finite parameters");
                    }
                }
                Ok(())
            }
            FractalSpec::CantorCnm(c) => {
                if c.n == 0 || c.k == 0 {
                    invalid!("CantorCNM: N and k must be positive");
                }
                if !(c.eta > 0.0 && c.eta < 1.0) {
                    invalid!("CantorCNM: η must lie in (0,1), got {}", c.eta);
                }
                if c.n as f64 * c.eta > 1.0 {
                    invalid!("CantorCNM: requires Nη ≤ 1, got N={}, η={}", c.n, c.eta);
                }
                Ok(())
            }
            FractalSpec::SymmetricPerfect(s) => {
                if s.lengths.first() != Some(&1.0) {
                    invalid!("SymmetricPerfect: lengths must start with a_0 = 1");
                }
                for (j, w) in s.lengths.windows(2).enumerate() {
                    if !(w[1] > 0.0 && 2.0 * w[1] < w[0]) {
                        invalid!(
                            "SymmetricPerfect: 2a_{} < a_{} violated ({} vs {})",
                            j + 1,
                            j,
                            w[1],
                            w[0]
                        );
                    }
                }
                Ok(())
            }
            FractalSpec::SalemK(s) => s.validate(),
            FractalSpec::Product(p) => {
                if p.factors.len() != 2 {
                    invalid!(
                        "Product: exactly two factors are supported, got {}",
                        p.factors.len()
                    );
                }
                for f in &p.factors {
                    if f.dim() != 1 {
                        invalid!("Product: factors must be one-dimensional");
                    }
                    f.validate()?;
                }
                Ok(())
            }
            FractalSpec::Explicit(e) => {
                if !(e.dim == 1 || e.dim == 2) {
                    invalid!("Explicit: dimension must be 1 or 2, got {}", e.dim);
                }
                if e.points.is_empty() {
                    invalid!("Explicit: point list is empty");
                }
                if let Some(p) = e
                    .points
                    .iter()
                    .find(|p| p.len() != e.dim || !p.iter().all(|c| c.is_finite()))
                {
                    invalid!("Explicit: malformed point {p:?}");
                }
                if !(e.resolution > 0.0 && e.resolution.is_finite()) {
                    invalid!(
                        "Explicit: resolution must be positive, got {}",
                        e.resolution
                    );
                }
                if let Some(w) = &e.weights {
                    if w.len() != e.points.len() {
                        invalid!(
                            "Explicit: {} weights for {} points",
                            w.len(),
                            e.points.len()
                        );
                    }
                    if w.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                        invalid!("Explicit: weights must be finite and nonnegative");
                    }
                }
                Ok(())
            }
        }
    }

    /// Nominal dimension of the construction (similarity dimension, `β` with
    /// `Nη^β = 1`, sums over product factors).
    pub fn alpha_hint(&self, depth: usize) -> Result<f64> {
        Ok(match self {
            FractalSpec::Ifs(s) => {
                similarity_dimension(&s.maps.iter().map(|m| m.ratio).collect::<Vec<_>>())?
            }
            FractalSpec::CantorCnm(c) => cnm_beta(c.n, c.eta),
            FractalSpec::SymmetricPerfect(s) => {
                let d = depth.min(s.lengths.len() - 1).max(1);
                d as f64 * std::f64::consts::LN_2 / -s.lengths[d].ln()
            }
            FractalSpec::SalemK(s) => cnm_beta(s.n, s.eta),
            FractalSpec::Product(p) => {
                let mut total = 0.0;
                for f in &p.factors {
                    total += f.alpha_hint(depth)?;
                }
                total
            }
            FractalSpec::Explicit(e) => e.alpha_hint.unwrap_or(0.0),
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Validation(format!("cannot serialise spec: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Validation(format!("cannot parse spec: {e}")))
    }
}

/// `β` solving `N η^β = 1`.
pub fn cnm_beta(n: u32, eta: f64) -> f64 {
    (n as f64).ln() / (1.0 / eta).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::constructions;

    #[test]
    fn fixed_points() {
        let m = Similitude::scaling(1.0 / 3.0, vec![2.0 / 3.0]);
        assert!((m.fixed_point(1)[0] - 1.0).abs() < 1e-15);
        let r = Similitude {
            ratio: 0.5,
            rotation: std::f64::consts::FRAC_PI_2,
            reflect: false,
            translation: vec![1.0, 0.0],
        };
        let p = r.fixed_point(2);
        let mut out = [0.0; 2];
        r.apply(2, &p, &mut out);
        assert!((out[0] - p[0]).abs() < 1e-14 && (out[1] - p[1]).abs() < 1e-14);
    }

    #[test]
    fn cnm_matches_middle_thirds_maps() {
        let ifs = CantorParams {
            n: 2,
            eta: 1.0 / 3.0,
            k: 1,
        }
        .to_ifs()
        .unwrap();
        assert_eq!(ifs.maps.len(), 2);
        assert_eq!(ifs.maps[0].translation[0], 0.0);
        assert!((ifs.maps[1].translation[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn validation_names_the_invariant() {
        let bad = FractalSpec::CantorCnm(CantorParams {
            n: 4,
            eta: 0.3,
            k: 1,
        });
        let msg = bad.validate().unwrap_err().to_string();
        assert!(msg.contains("Nη ≤ 1"), "{msg}");

        let bad = FractalSpec::SymmetricPerfect(SymmetricPerfectParams {
            lengths: vec![1.0, 0.6],
        });
        assert!(bad
            .validate()
            .unwrap_err()
            .to_string()
            .contains("2a_1 < a_0"));

        let bad = FractalSpec::SalemK(SalemParams {
            n: 3,
            eta: 0.25,
            anchors: AnchorChoice::Fixed {
                values: vec![0.0, 0.2, 0.75],
            },
            eta_seq: None,
        });
        assert!(bad
            .validate()
            .unwrap_err()
            .to_string()
            .contains("gap condition"));

        let mut ifs = constructions::middle_thirds();
        if let FractalSpec::Ifs(s) = &mut ifs {
            s.maps[0].ratio = 1.5;
        }
        assert!(ifs
            .validate()
            .unwrap_err()
            .to_string()
            .contains("outside (0,1)"));
    }

    #[test]
    fn random_anchors_satisfy_gap_condition() {
        for seed in 0..50 {
            let s = SalemParams::random(12, 1.0 / 16.0, seed);
            s.validate().unwrap();
            assert_eq!(s.resolve_anchors().unwrap(), s.resolve_anchors().unwrap());
        }
    }

    #[test]
    fn toml_round_trip_is_exact() {
        let specs = vec![
            constructions::middle_thirds(),
            constructions::cantor_product(),
            FractalSpec::SalemK(SalemParams {
                n: 3,
                eta: 0.25,
                anchors: AnchorChoice::Fixed {
                    values: vec![0.0, 0.35, 0.75],
                },
                eta_seq: Some(vec![0.1875, 0.2222222222222222, 0.234375]),
            }),
            FractalSpec::SalemK(SalemParams::random(12, 1.0 / 16.0, 7)),
            constructions::tricot(&[(0.125, 2), (0.3, 3)]),
            constructions::circle(16),
        ];
        for spec in specs {
            let text = spec.to_toml().unwrap();
            let back = FractalSpec::from_toml(&text).unwrap();
            assert_eq!(back, spec, "{text}");
        }
    }
}
