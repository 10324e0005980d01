//! Run configuration: one TOML file describes one run.
//!
//! Every optional key has a default, and [`RunConfig::load`] returns the
//! configuration with all of them filled in and every `"auto"` replaced by
//! its value, so that serialising the result gives a file that reproduces
//! the run on its own.

use std::path::{Path, PathBuf};

use fraclab::fourier::{AverageKind, QuadraturePolicy};
use fraclab::geom::{self, FractalSpec, DEFAULT_MAX_ATOMS};
use fraclab::ineq::{PlateauGate, TheoremId, Weighting};
use fraclab::measure::Expr;
use fraclab::numeric::geometric_grid;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::failure::{Failure, Outcome};

const MIN_L_POINTS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Feeds every random choice of the run. At present that is only the
    /// anchor draw of a Salem spec whose anchors omit their own seed.
    #[serde(default)]
    pub seed: u64,
    pub depth: usize,
    #[serde(default = "default_max_atoms")]
    pub max_atoms: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub measure: MeasureOptions,
    #[serde(default)]
    pub dim: DimOptions,
    #[serde(default)]
    pub fourier: FourierOptions,
    #[serde(default)]
    pub checks: CheckSettings,
    #[serde(default)]
    pub quadrature: QuadraturePolicy,
    pub spec: FractalSpec,
}

fn default_max_atoms() -> usize {
    DEFAULT_MAX_ATOMS
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("fraclab-out")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `f dμ` as it is.
    #[default]
    None,
    /// `f dμ` divided by its total mass.
    UnitMass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureOptions {
    /// Density `f` in `f dμ`, in the expression language of
    /// [`fraclab::measure::Expr`].
    pub f: String,
    /// Applies to the written measure and to the `fourier` series. The
    /// checks always pair the natural measure with `f` directly.
    pub normalization: Normalization,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self {
            f: "1".into(),
            normalization: Normalization::None,
        }
    }
}

impl MeasureOptions {
    pub fn weighting(&self) -> Outcome<Weighting> {
        if self.f.trim() == "1" {
            return Ok(Weighting::One);
        }
        Ok(Weighting::Expr(self.f.parse::<Expr>()?))
    }
}

/// A geometric grid `min, …, max` with `points` entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default = "geometric")]
    pub spacing: String,
}

fn geometric() -> String {
    "geometric".into()
}

impl Grid {
    pub fn values(&self) -> Outcome<Vec<f64>> {
        if self.spacing != "geometric" {
            return Err(Failure::Validation(format!(
                "grid spacing {:?} is not supported; only \"geometric\" is",
                self.spacing
            )));
        }
        Ok(geometric_grid(self.min, self.max, self.points)?)
    }
}

/// Either the literal string `"auto"` or a concrete value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Auto<T> {
    Value(T),
    Keyword(String),
}

impl<T> Default for Auto<T> {
    fn default() -> Self {
        Auto::Keyword("auto".into())
    }
}

impl<T: Clone> Auto<T> {
    fn resolve(&self, key: &str, auto: impl FnOnce() -> Outcome<T>) -> Outcome<T> {
        match self {
            Auto::Value(v) => Ok(v.clone()),
            Auto::Keyword(k) if k == "auto" => auto(),
            Auto::Keyword(k) => Err(Failure::Validation(format!(
                "{key}: expected \"auto\" or a value, got {k:?}"
            ))),
        }
    }

    fn value(&self) -> &T {
        match self {
            Auto::Value(v) => v,
            Auto::Keyword(_) => unreachable!("resolved configs hold values only"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DimOptions {
    /// Covering scales; see [`auto_scales`] for `"auto"`.
    pub scales: Auto<Grid>,
}

impl DimOptions {
    pub fn grid(&self) -> &Grid {
        self.scales.value()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FourierOptions {
    pub p: f64,
    /// Normalising exponent of the `fourier` series. `"auto"` is
    /// `n - αp/2`. The checks use their own exponents.
    pub k: Auto<f64>,
    pub average: AverageKind,
    pub l_grid: Grid,
}

impl Default for FourierOptions {
    fn default() -> Self {
        Self {
            p: 2.0,
            k: Auto::default(),
            average: AverageKind::Ball,
            l_grid: Grid {
                min: 9.0,
                max: 729.0,
                points: 9,
                spacing: geometric(),
            },
        }
    }
}

impl FourierOptions {
    pub fn k(&self) -> f64 {
        *self.k.value()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckSettings {
    pub theorems: Vec<TheoremId>,
    pub gate: PlateauGate,
    pub exponent_offset: f64,
    pub hudson: HudsonSettings,
    pub coherent: CoherentSettings,
}

impl Default for CheckSettings {
    fn default() -> Self {
        Self {
            theorems: vec![TheoremId::ThmBBall],
            gate: PlateauGate::default(),
            exponent_offset: 0.0,
            hudson: HudsonSettings::default(),
            coherent: CoherentSettings::default(),
        }
    }
}

/// The exponential sum `Σ c_k e^{i a_k x}` of the discrete check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HudsonSettings {
    /// `"auto"` is `c_k = 1/k` for `k = 1..=64`.
    pub coefficients: Auto<Vec<f64>>,
    /// `"auto"` is `a_k = 2πk` for as many terms as there are coefficients.
    pub frequencies: Auto<Vec<f64>>,
    pub node_density: usize,
}

impl Default for HudsonSettings {
    fn default() -> Self {
        Self {
            coefficients: Auto::default(),
            frequencies: Auto::default(),
            node_density: 32,
        }
    }
}

impl HudsonSettings {
    pub fn coefficients(&self) -> &[f64] {
        self.coefficients.value()
    }

    pub fn frequencies(&self) -> &[f64] {
        self.frequencies.value()
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoherentSettings {
    /// Corner `x` of the quadrant `E_x`; `"auto"` is the all-ones vector.
    /// The scales are `ε = 1/L` over the `L` grid.
    pub corner: Auto<Vec<f64>>,
}

impl CoherentSettings {
    pub fn corner(&self) -> &[f64] {
        self.corner.value()
    }
}

impl RunConfig {
    /// Reads, patches and resolves a config file. `seed` and `out` are the
    /// command-line overrides.
    pub fn load(path: &Path, seed: Option<u64>, out: Option<&Path>) -> Outcome<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text, seed, out)
    }

    pub fn from_toml(text: &str, seed: Option<u64>, out: Option<&Path>) -> Outcome<Self> {
        let mut table: Table = toml::from_str(text)
            .map_err(|e| Failure::Validation(format!("cannot parse config: {e}")))?;
        if let Some(s) = seed {
            table.insert("seed".into(), Value::Integer(to_toml_int(s)?));
        }
        if let Some(dir) = out {
            table.insert(
                "output_dir".into(),
                Value::String(dir.to_string_lossy().into_owned()),
            );
        }
        let run_seed = match table.get("seed") {
            None => 0,
            Some(Value::Integer(i)) if *i >= 0 => *i as u64,
            Some(v) => {
                return Err(Failure::Validation(format!(
                    "seed must be a nonnegative integer, got {v}"
                )))
            }
        };
        if let Some(Value::Table(spec)) = table.get_mut("spec") {
            seed_salem_anchors(spec, run_seed)?;
        }
        let config: RunConfig = Value::Table(table)
            .try_into()
            .map_err(|e| Failure::Validation(format!("invalid config: {e}")))?;
        config.resolve()
    }

    fn resolve(mut self) -> Outcome<Self> {
        self.spec.validate()?;
        if self.depth == 0 {
            return Err(Failure::Validation("depth must be at least 1".into()));
        }
        let n = self.spec.dim();
        let weighting = self.measure.weighting()?;
        if let Weighting::Expr(e) = &weighting {
            if e.arity() > n {
                return Err(Failure::Validation(format!(
                    "f uses {} coordinates but the set lives in R^{n}",
                    e.arity()
                )));
            }
        }

        let fo = &mut self.fourier;
        if !(fo.p > 0.0 && fo.p.is_finite()) {
            return Err(Failure::Validation(format!(
                "fourier.p must be positive, got {}",
                fo.p
            )));
        }
        if fo.l_grid.points < MIN_L_POINTS {
            return Err(Failure::Validation(format!(
                "fourier.l_grid needs at least {MIN_L_POINTS} points, got {}",
                fo.l_grid.points
            )));
        }
        fo.l_grid.values()?;
        let alpha = self.spec.alpha_hint(self.depth)?;
        let p = fo.p;
        fo.k = Auto::Value(fo.k.resolve("fourier.k", || Ok(n as f64 - alpha * p / 2.0))?);

        let scales = match &self.dim.scales {
            Auto::Keyword(k) if k == "auto" => auto_scales(&self.spec, self.depth, self.max_atoms)?,
            other => other.resolve("dim.scales", || unreachable!())?,
        };
        scales.values()?;
        self.dim.scales = Auto::Value(scales);

        let h = &mut self.checks.hudson;
        let coefficients = h.coefficients.resolve("checks.hudson.coefficients", || {
            Ok((1..=64).map(|k| 1.0 / k as f64).collect())
        })?;
        let terms = coefficients.len();
        let frequencies = h.frequencies.resolve("checks.hudson.frequencies", || {
            Ok((1..=terms)
                .map(|k| std::f64::consts::TAU * k as f64)
                .collect())
        })?;
        if frequencies.len() != terms {
            return Err(Failure::Validation(format!(
                "checks.hudson has {terms} coefficients but {} frequencies",
                frequencies.len()
            )));
        }
        h.coefficients = Auto::Value(coefficients);
        h.frequencies = Auto::Value(frequencies);

        let c = &mut self.checks.coherent;
        let corner = c
            .corner
            .resolve("checks.coherent.corner", || Ok(vec![1.0; n]))?;
        if corner.len() != n {
            return Err(Failure::Validation(format!(
                "checks.coherent.corner has {} coordinates, the set lives in R^{n}",
                corner.len()
            )));
        }
        c.corner = Auto::Value(corner);
        Ok(self)
    }

    pub fn to_toml(&self) -> Outcome<String> {
        toml::to_string(self)
            .map_err(|e| Failure::Validation(format!("cannot serialise the resolved config: {e}")))
    }

    pub fn l_values(&self) -> Vec<f64> {
        self.fourier
            .l_grid
            .values()
            .expect("validated during resolution")
    }

    pub fn scales(&self) -> Vec<f64> {
        self.dim
            .grid()
            .values()
            .expect("validated during resolution")
    }
}

fn to_toml_int(s: u64) -> Outcome<i64> {
    i64::try_from(s)
        .map_err(|_| Failure::Validation(format!("seed {s} does not fit in a TOML integer")))
}

/// Gives random Salem anchors without a seed of their own the run seed,
/// so the resolved spec names the seed it was built from.
fn seed_salem_anchors(spec: &mut Table, seed: u64) -> Outcome<()> {
    if spec.get("kind").and_then(Value::as_str) == Some("salem_k") {
        let anchors = spec.entry("anchors").or_insert_with(|| {
            Value::Table(Table::from_iter([(
                "mode".to_string(),
                Value::from("random"),
            )]))
        });
        if let Value::Table(a) = anchors {
            if a.get("mode").and_then(Value::as_str) == Some("random") && !a.contains_key("seed") {
                a.insert("seed".into(), Value::Integer(to_toml_int(seed)?));
            }
        }
    }
    if let Some(Value::Array(factors)) = spec.get_mut("factors") {
        for f in factors.iter_mut() {
            if let Value::Table(t) = f {
                seed_salem_anchors(t, seed)?;
            }
        }
    }
    Ok(())
}

/// Scales `resolution · q^{-j}` for `j = 4..=G-2`, where `q` is the mean
/// per-generation ratio and `G` the number of generations. Explicit point
/// sets use `q = 1/2` and as many generations as fit between the resolution
/// and the diameter. Shallow builds with fewer generations get six
/// geometric scales from `9 · resolution` to a third of the diameter.
fn auto_scales(spec: &FractalSpec, depth: usize, max_atoms: usize) -> Outcome<Grid> {
    const FIRST: usize = 4;
    let cloud = geom::build_with(spec, depth, &geom::BuildOptions { max_atoms })?;
    let resolution = cloud.resolution();
    let diameter = cloud.diameter_bound();
    let (q, generations) = match spec {
        FractalSpec::Explicit(_) => (
            0.5,
            (diameter / resolution).log2().max(0.0).floor() as usize,
        ),
        _ => (resolution.powf(1.0 / depth as f64), depth),
    };
    let last = generations.saturating_sub(2);
    if !(q > 0.0 && q < 1.0) || last < FIRST + 2 {
        return Ok(Grid {
            min: 9.0 * resolution,
            max: (diameter / 3.0).max(18.0 * resolution),
            points: 6,
            spacing: geometric(),
        });
    }
    Ok(Grid {
        min: resolution * q.powi(-(FIRST as i32)),
        max: resolution * q.powi(-(last as i32)),
        points: last - FIRST + 1,
        spacing: geometric(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANTOR: &str = r#"
depth = 8

[spec]
kind = "cantor_cnm"
n = 2
eta = 0.3333333333333333
"#;

    #[test]
    fn defaults_are_echoed_and_reload_unchanged() {
        let c = RunConfig::from_toml(CANTOR, None, None).unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.max_atoms, 1_000_000);
        let k = 1.0 - (2f64.ln() / 3f64.ln());
        assert!((c.fourier.k() - k).abs() < 1e-12);
        assert_eq!(c.checks.hudson.coefficients().len(), 64);
        assert_eq!(c.checks.coherent.corner(), &[1.0]);
        let text = c.to_toml().unwrap();
        assert!(!text.contains("auto"));
        assert_eq!(RunConfig::from_toml(&text, None, None).unwrap(), c);
    }

    #[test]
    fn salem_anchors_take_the_run_seed() {
        let text = "depth = 2\nseed = 7\n[spec]\nkind = \"salem_k\"\nn = 4\neta = 0.0625\n";
        let c = RunConfig::from_toml(text, Some(42), None).unwrap();
        match &c.spec {
            FractalSpec::SalemK(s) => {
                assert_eq!(s.anchors, geom::AnchorChoice::Random { seed: 42 })
            }
            other => panic!("unexpected spec {other:?}"),
        }
        assert_eq!(c.seed, 42);
    }

    #[test]
    fn bad_settings_are_validation_errors() {
        let short = format!("{CANTOR}\n[fourier.l_grid]\nmin = 9.0\nmax = 81.0\npoints = 5\n");
        let linear = format!(
            "{CANTOR}\n[fourier.l_grid]\nmin = 9.0\nmax = 81.0\npoints = 6\nspacing = \"linear\"\n"
        );
        let k = CANTOR.replace("depth = 8", "depth = 8\n[fourier]\nk = \"soon\"");
        let arity = format!("{CANTOR}\n[measure]\nf = \"1 + y\"\n");
        for text in [short, linear, k, arity, "depth = 3".to_string()] {
            let e = RunConfig::from_toml(&text, None, None).unwrap_err();
            assert_eq!(e.exit_code(), 1, "{e}");
        }
    }
}
