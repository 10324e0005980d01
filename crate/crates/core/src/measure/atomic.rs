use std::io::{BufRead, Write};

use crate::error::{invalid, Error, Result};
use crate::geom::{
    generate, header_field, parse_header, parse_row, BuildOptions, FractalSpec, PointCloud,
};
use crate::numeric::compensated_sum;

use super::expr::Expr;

/// Finite weighted sum of Dirac masses in `R^1` or `R^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
    total_mass: f64,
    resolution: f64,
    alpha_hint: f64,
    tensor: Option<Box<(AtomicMeasure, AtomicMeasure)>>,
}

impl AtomicMeasure {
    /// Checks the atoms and caches the total mass.
    pub fn new(
        dim: usize,
        coords: Vec<f64>,
        weights: Vec<f64>,
        resolution: f64,
        alpha_hint: f64,
    ) -> Result<Self> {
        // reuse the cloud's checks on dimension, coordinates and resolution
        let cloud = PointCloud::new(dim, coords, resolution)?;
        if weights.len() != cloud.len() {
            invalid!("{} weights for {} atoms", weights.len(), cloud.len());
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            invalid!("atom weights must be finite and nonnegative, got {w}");
        }
        if !(alpha_hint >= 0.0 && alpha_hint <= dim as f64) {
            invalid!("alpha hint {alpha_hint} must lie in [0, {dim}]");
        }
        Ok(Self {
            dim,
            total_mass: compensated_sum(weights.iter().copied()),
            coords: cloud.coords().to_vec(),
            weights,
            resolution,
            alpha_hint,
            tensor: None,
        })
    }

    /// Unit mass at `point`.
    pub fn dirac(point: &[f64], resolution: f64) -> Result<Self> {
        Self::new(point.len(), point.to_vec(), vec![1.0], resolution, 0.0)
    }

    /// Equal weights `1/len` on the cloud's points.
    pub fn uniform(cloud: &PointCloud, alpha_hint: f64) -> Result<Self> {
        let w = 1.0 / cloud.len() as f64;
        Self::new(
            cloud.dim(),
            cloud.coords().to_vec(),
            vec![w; cloud.len()],
            cloud.resolution(),
            alpha_hint,
        )
    }

    /// Product measure `a ⊗ b` on `R^2`, with atoms ordered `a`-major.
    pub fn product(a: &AtomicMeasure, b: &AtomicMeasure) -> Result<Self> {
        if a.dim != 1 || b.dim != 1 {
            invalid!("product measures are formed from two measures on R");
        }
        let mut coords = Vec::with_capacity(2 * a.len() * b.len());
        let mut weights = Vec::with_capacity(a.len() * b.len());
        for (x, wx) in a.coords.iter().zip(&a.weights) {
            for (y, wy) in b.coords.iter().zip(&b.weights) {
                coords.extend([*x, *y]);
                weights.push(wx * wy);
            }
        }
        let mut m = Self::new(
            2,
            coords,
            weights,
            a.resolution.hypot(b.resolution),
            a.alpha_hint + b.alpha_hint,
        )?;
        m.tensor = Some(Box::new((a.clone(), b.clone())));
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.points().zip(self.weights.iter().copied())
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn alpha_hint(&self) -> f64 {
        self.alpha_hint
    }

    /// The two factor measures when this is a product measure.
    pub fn tensor_factors(&self) -> Option<(&AtomicMeasure, &AtomicMeasure)> {
        self.tensor.as_deref().map(|(a, b)| (a, b))
    }

    pub fn support(&self) -> PointCloud {
        PointCloud::new(self.dim, self.coords.clone(), self.resolution)
            .expect("atoms were validated")
    }

    /// Same atoms with every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            invalid!("mass scale must be positive, got {c}");
        }
        let mut m = Self::new(
            self.dim,
            self.coords.clone(),
            self.weights.iter().map(|w| w * c).collect(),
            self.resolution,
            self.alpha_hint,
        )?;
        m.tensor = self
            .tensor
            .as_ref()
            .map(|t| Ok::<_, Error>(Box::new((t.0.scaled(c)?, t.1.clone()))))
            .transpose()?;
        Ok(m)
    }

    /// Restriction to the atoms selected by `keep`; `None` when nothing is
    /// left.
    pub fn restrict<F: Fn(&[f64]) -> bool>(&self, keep: F) -> Option<Self> {
        let mut coords = Vec::new();
        let mut weights = Vec::new();
        for (p, w) in self.atoms() {
            if keep(p) {
                coords.extend_from_slice(p);
                weights.push(w);
            }
        }
        if weights.is_empty() {
            return None;
        }
        Self::new(self.dim, coords, weights, self.resolution, self.alpha_hint).ok()
    }

    /// Writes the `fraclab measure v1` CSV format. The header also records
    /// the resolution so that the file reads back losslessly.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# fraclab measure v1, dim={}, alpha={:.16e}, mass={:.16e}, resolution={:.16e}",
            self.dim, self.alpha_hint, self.total_mass, self.resolution
        )?;
        for (p, w) in self.atoms() {
            let mut row: Vec<String> = p.iter().map(|c| format!("{c:.16e}")).collect();
            row.push(format!("{w:.16e}"));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Reads the CSV format. A header without `resolution=` falls back to
    /// the smallest positive gap between sorted first coordinates.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Validation("empty measure file".into()))??;
        let fields = parse_header(&header, "# fraclab measure v1")?;
        let dim: usize = header_field(&fields, "dim")?;
        let alpha: f64 = header_field(&fields, "alpha")?;
        let mass: f64 = header_field(&fields, "mass")?;
        let mut coords = Vec::new();
        let mut weights = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row = parse_row(&line)?;
            if row.len() != dim + 1 {
                invalid!(
                    "measure row has {} columns, expected {}",
                    row.len(),
                    dim + 1
                );
            }
            coords.extend_from_slice(&row[..dim]);
            weights.push(row[dim]);
        }
        let resolution = match header_field::<f64>(&fields, "resolution") {
            Ok(r) => r,
            Err(_) => smallest_gap(&coords, dim),
        };
        let m = Self::new(dim, coords, weights, resolution, alpha)?;
        if (m.total_mass - mass).abs() > 1e-12 * mass.abs().max(1.0) {
            invalid!(
                "header mass {mass} disagrees with the atom weights ({})",
                m.total_mass
            );
        }
        Ok(m)
    }
}

fn smallest_gap(coords: &[f64], dim: usize) -> f64 {
    let mut first: Vec<f64> = coords.iter().step_by(dim.max(1)).copied().collect();
    first.sort_by(f64::total_cmp);
    first
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > 0.0)
        .fold(f64::INFINITY, f64::min)
        .min(1.0)
}

/// The normalised natural measure of a built cloud.
///
/// Equal-ratio constructions get weight `1/len` per atom; unequal-ratio
/// IFS cylinders get `Π s_{j_i}^α`. Product specs keep their factors.
pub fn natural_measure(cloud: &PointCloud) -> Result<AtomicMeasure> {
    let Some(prov) = cloud.provenance() else {
        invalid!("natural measure needs a cloud produced by build (no provenance recorded)");
    };
    from_spec(&prov.spec, prov.depth, cloud)
}

fn from_spec(spec: &FractalSpec, depth: usize, cloud: &PointCloud) -> Result<AtomicMeasure> {
    let opts = BuildOptions {
        max_atoms: cloud.len(),
    };
    if let FractalSpec::Product(p) = spec {
        let factor = |f: &FractalSpec| {
            let cells = generate(f, depth, &opts)?;
            AtomicMeasure::new(
                cells.dim,
                cells.coords,
                cells.weights,
                cells.resolution,
                cells.alpha,
            )
        };
        let m = AtomicMeasure::product(&factor(&p.factors[0])?, &factor(&p.factors[1])?)?;
        if m.coords != cloud.coords() {
            invalid!("cloud does not match its recorded provenance");
        }
        return Ok(m);
    }
    let cells = generate(spec, depth, &opts)?;
    if cells.coords != cloud.coords() {
        invalid!("cloud does not match its recorded provenance");
    }
    let alpha = cells.alpha.clamp(0.0, cells.dim as f64);
    AtomicMeasure::new(
        cells.dim,
        cells.coords,
        cells.weights,
        cloud.resolution(),
        alpha,
    )
}

fn check_weight(value: f64, p: &[f64]) -> Result<f64> {
    if !value.is_finite() {
        invalid!("weight function is not finite at {p:?}");
    }
    if value < 0.0 {
        invalid!("weight function takes the negative value {value} at {p:?}; the inequalities assume f ≥ 0");
    }
    Ok(value)
}

/// `f dμ`: atom weights multiplied by `f`. The result carries no tensor
/// factors.
pub fn weight_with<F: Fn(&[f64]) -> f64>(mu: &AtomicMeasure, f: F) -> Result<AtomicMeasure> {
    let weights = mu
        .atoms()
        .map(|(p, w)| Ok(w * check_weight(f(p), p)?))
        .collect::<Result<Vec<_>>>()?;
    AtomicMeasure::new(
        mu.dim,
        mu.coords.clone(),
        weights,
        mu.resolution,
        mu.alpha_hint,
    )
}

/// [`weight_with`] for a parsed weight expression.
pub fn weight_with_expr(mu: &AtomicMeasure, f: &Expr) -> Result<AtomicMeasure> {
    if f.arity() > mu.dim {
        invalid!(
            "weight expression uses coordinate {} of a {}-dimensional measure",
            f.arity(),
            mu.dim
        );
    }
    weight_with(mu, |p| f.eval(p))
}

/// `f(x) g(y) dμ` for a product measure, keeping the factorisation.
pub fn weight_with_factors<F, G>(mu: &AtomicMeasure, f: F, g: G) -> Result<AtomicMeasure>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
{
    let Some((a, b)) = mu.tensor_factors() else {
        invalid!("factorised weighting needs a product measure");
    };
    AtomicMeasure::product(&weight_with(a, f)?, &weight_with(b, g)?)
}
