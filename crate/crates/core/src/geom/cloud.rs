use std::cmp::Ordering;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::spec::FractalSpec;

/// Where a cloud came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec: FractalSpec,
    pub depth: usize,
}

/// Finite point set approximating a fractal at a stated resolution.
///
/// Coordinates are stored flat, `dim` values per point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    resolution: f64,
    provenance: Option<Provenance>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>, resolution: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            invalid!("point clouds live in R^1 or R^2, got dimension {dim}");
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            invalid!("point cloud needs a nonempty list of {dim}-vectors");
        }
        if !coords.iter().all(|c| c.is_finite()) {
            invalid!("point cloud coordinates must be finite");
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            invalid!("point cloud resolution must be positive, got {resolution}");
        }
        Ok(Self {
            dim,
            coords,
            resolution,
            provenance: None,
        })
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>], resolution: f64) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                invalid!("point {p:?} does not have {dim} coordinates");
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords, resolution)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
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

    /// Indices of the points in lexicographic coordinate order (stable).
    pub fn lexicographic_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| lex_cmp(self.point(a), self.point(b)));
        idx
    }

    /// Per-axis `(min, max)`.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        (0..self.dim)
            .map(|axis| {
                self.points()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                        (lo.min(p[axis]), hi.max(p[axis]))
                    })
            })
            .collect()
    }

    /// Upper bound on the diameter: the bounding-box diagonal.
    pub fn diameter_bound(&self) -> f64 {
        self.bounding_box()
            .iter()
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    /// Sub-cloud of the points selected by `keep`, same resolution.
    pub fn filter<F: Fn(&[f64]) -> bool>(&self, keep: F) -> Option<PointCloud> {
        let coords: Vec<f64> = self
            .points()
            .filter(|p| keep(p))
            .flat_map(|p| p.iter().copied())
            .collect();
        if coords.is_empty() {
            return None;
        }
        Some(PointCloud {
            dim: self.dim,
            coords,
            resolution: self.resolution,
            provenance: None,
        })
    }

    /// Writes the `fraclab cloud v1` CSV format.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# fraclab cloud v1, dim={}, resolution={:.16e}",
            self.dim, self.resolution
        )?;
        for p in self.points() {
            let row: Vec<String> = p.iter().map(|c| format!("{c:.16e}")).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Validation("empty cloud file".into()))??;
        let fields = parse_header(&header, "# fraclab cloud v1")?;
        let dim: usize = header_field(&fields, "dim")?;
        let resolution: f64 = header_field(&fields, "resolution")?;
        let mut coords = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row = parse_row(&line)?;
            if row.len() != dim {
                invalid!("cloud row has {} columns, expected {dim}", row.len());
            }
            coords.extend(row);
        }
        Self::new(dim, coords, resolution)
    }
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Splits `# magic, key=value, key=value` into its key/value pairs.
pub(crate) fn parse_header(line: &str, magic: &str) -> Result<Vec<(String, String)>> {
    let rest = match line.strip_prefix(magic) {
        Some(r) => r,
        None => invalid!("unexpected header {line:?}, expected it to start with {magic:?}"),
    };
    Ok(rest
        .split(',')
        .filter_map(|kv| {
            let (k, v) = kv.split_once('=')?;
            Some((k.trim().to_string(), v.trim().to_string()))
        })
        .collect())
}

pub(crate) fn header_field<T: std::str::FromStr>(
    fields: &[(String, String)],
    key: &str,
) -> Result<T> {
    let value = fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::Validation(format!("header is missing {key}=")))?;
    value
        .parse()
        .map_err(|_| Error::Validation(format!("header field {key}={value} is malformed")))
}

pub(crate) fn parse_row(line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| Error::Validation(format!("malformed number {c:?}")))
        })
        .collect()
}
