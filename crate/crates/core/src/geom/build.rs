//! Expansion of a [`FractalSpec`] into one representative point per
//! depth-level cylinder.

use crate::error::{invalid, Error, Result};

use super::cloud::{PointCloud, Provenance};
use super::dimension::similarity_dimension;
use super::spec::{FractalSpec, IfsSpec};

/// Default cap on the number of atoms a construction may produce.
pub const DEFAULT_MAX_ATOMS: usize = 1_000_000;

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub max_atoms: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            max_atoms: DEFAULT_MAX_ATOMS,
        }
    }
}

/// Cylinder representatives together with their natural weights.
#[derive(Clone, Debug)]
pub(crate) struct Cells {
    pub dim: usize,
    pub coords: Vec<f64>,
    pub weights: Vec<f64>,
    pub resolution: f64,
    pub alpha: f64,
}

/// Builds the depth-`depth` cloud of `spec` with the default atom cap.
pub fn build(spec: &FractalSpec, depth: usize) -> Result<PointCloud> {
    build_with(spec, depth, &BuildOptions::default())
}

pub fn build_with(spec: &FractalSpec, depth: usize, options: &BuildOptions) -> Result<PointCloud> {
    let cells = generate(spec, depth, options)?;
    Ok(
        PointCloud::new(cells.dim, cells.coords, cells.resolution)?.with_provenance(Provenance {
            spec: spec.clone(),
            depth,
        }),
    )
}

/// Number of atoms `build` would produce, saturating at `u128::MAX`.
pub fn atom_count(spec: &FractalSpec, depth: usize) -> u128 {
    let pow = |base: u128, exp: usize| -> u128 {
        u32::try_from(exp)
            .ok()
            .and_then(|e| base.checked_pow(e))
            .unwrap_or(u128::MAX)
    };
    match spec {
        FractalSpec::Ifs(s) => pow(s.maps.len() as u128, depth),
        FractalSpec::CantorCnm(c) => pow(pow(c.n as u128, c.k as usize), depth),
        FractalSpec::SymmetricPerfect(_) => pow(2, depth),
        FractalSpec::SalemK(s) => pow(s.n as u128, depth),
        FractalSpec::Product(p) => p
            .factors
            .iter()
            .map(|f| atom_count(f, depth))
            .fold(1u128, |a, b| a.saturating_mul(b)),
        FractalSpec::Explicit(e) => e.points.len() as u128,
    }
}

pub(crate) fn generate(spec: &FractalSpec, depth: usize, options: &BuildOptions) -> Result<Cells> {
    spec.validate()?;
    if depth == 0 && !matches!(spec, FractalSpec::Explicit(_)) {
        invalid!("depth must be at least 1");
    }
    let count = atom_count(spec, depth);
    if count > options.max_atoms as u128 {
        return Err(Error::Size(format!(
            "depth {depth} would produce {count} atoms, above the cap of {}",
            options.max_atoms
        )));
    }
    match spec {
        FractalSpec::Ifs(s) => ifs_cells(s, depth),
        FractalSpec::CantorCnm(c) => {
            let mut cells = ifs_cells(&c.to_ifs()?, depth)?;
            cells.alpha = spec.alpha_hint(depth)?;
            Ok(cells)
        }
        FractalSpec::SymmetricPerfect(s) => {
            if depth >= s.lengths.len() {
                invalid!(
                    "SymmetricPerfect: depth {depth} needs lengths a_0..a_{depth}, only {} given",
                    s.lengths.len()
                );
            }
            let mut left = vec![0.0];
            for level in 0..depth {
                let shift = s.lengths[level] - s.lengths[level + 1];
                left = left.iter().flat_map(|&l| [l, l + shift]).collect();
            }
            let weight = 1.0 / left.len() as f64;
            Ok(Cells {
                dim: 1,
                weights: vec![weight; left.len()],
                coords: left,
                resolution: s.lengths[depth],
                alpha: spec.alpha_hint(depth)?,
            })
        }
        FractalSpec::SalemK(s) => {
            let anchors = s.resolve_anchors()?;
            let etas = s.eta_sequence(depth)?;
            let mut points = anchors.clone();
            let mut scale = 1.0;
            for eta in &etas[..depth - 1] {
                scale *= eta;
                points = points
                    .iter()
                    .flat_map(|&x| anchors.iter().map(move |&a| x + scale * a))
                    .collect();
            }
            let resolution = etas.iter().product();
            let weight = 1.0 / points.len() as f64;
            Ok(Cells {
                dim: 1,
                weights: vec![weight; points.len()],
                coords: points,
                resolution,
                alpha: spec.alpha_hint(depth)?,
            })
        }
        FractalSpec::Product(p) => {
            let a = generate(&p.factors[0], depth, options)?;
            let b = generate(&p.factors[1], depth, options)?;
            let mut coords = Vec::with_capacity(2 * a.coords.len() * b.coords.len());
            let mut weights = Vec::with_capacity(a.coords.len() * b.coords.len());
            for (x, wx) in a.coords.iter().zip(&a.weights) {
                for (y, wy) in b.coords.iter().zip(&b.weights) {
                    coords.push(*x);
                    coords.push(*y);
                    weights.push(wx * wy);
                }
            }
            Ok(Cells {
                dim: 2,
                coords,
                weights,
                resolution: a.resolution.hypot(b.resolution),
                alpha: a.alpha + b.alpha,
            })
        }
        FractalSpec::Explicit(e) => {
            let coords: Vec<f64> = e.points.iter().flatten().copied().collect();
            let weights = match &e.weights {
                Some(w) => w.clone(),
                None => vec![1.0 / e.points.len() as f64; e.points.len()],
            };
            Ok(Cells {
                dim: e.dim,
                coords,
                weights,
                resolution: e.resolution,
                alpha: e.alpha_hint.unwrap_or(0.0),
            })
        }
    }
}

fn ifs_cells(spec: &IfsSpec, depth: usize) -> Result<Cells> {
    let dim = spec.dim;
    let ratios: Vec<f64> = spec.maps.iter().map(|m| m.ratio).collect();
    let alpha = similarity_dimension(&ratios)?;
    let equal = ratios.iter().all(|&r| r == ratios[0]);
    let map_weights: Vec<f64> = if equal {
        vec![1.0 / ratios.len() as f64; ratios.len()]
    } else {
        // α is only known to the bisection tolerance
        let raw: Vec<f64> = ratios.iter().map(|r| r.powf(alpha)).collect();
        let total: f64 = raw.iter().sum();
        raw.iter().map(|w| w / total).collect()
    };

    // Words are expanded innermost-first so the outermost letter varies
    // slowest: the output is in lexicographic word order.
    let mut coords = spec.maps[0].fixed_point(dim);
    let mut weights = vec![1.0];
    let mut image = vec![0.0; dim];
    for _ in 0..depth {
        let mut next_coords = Vec::with_capacity(coords.len() * spec.maps.len());
        let mut next_weights = Vec::with_capacity(weights.len() * spec.maps.len());
        for (map, mw) in spec.maps.iter().zip(&map_weights) {
            for (p, w) in coords.chunks_exact(dim).zip(&weights) {
                map.apply(dim, p, &mut image);
                next_coords.extend_from_slice(&image);
                next_weights.push(mw * w);
            }
        }
        coords = next_coords;
        weights = next_weights;
    }
    if equal {
        // exact 1/count, independent of rounding in the products
        let w = 1.0 / weights.len() as f64;
        weights.iter_mut().for_each(|x| *x = w);
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(Cells {
        dim,
        coords,
        weights,
        resolution: max_ratio.powi(depth as i32),
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::constructions;
    use crate::geom::spec::{AnchorChoice, CantorParams, SalemParams};

    #[test]
    fn middle_thirds_depth_two() {
        let cloud = build(&constructions::middle_thirds(), 2).unwrap();
        let expected = [0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0];
        assert_eq!(cloud.len(), 4);
        for (got, want) in cloud.coords().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
        assert!((cloud.resolution() - 1.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn c23_is_the_cantor_set() {
        let cnm = FractalSpec::CantorCnm(CantorParams {
            n: 2,
            eta: 1.0 / 3.0,
            k: 1,
        });
        for depth in 1..=6 {
            let a = build(&cnm, depth).unwrap();
            let b = build(&constructions::middle_thirds(), depth).unwrap();
            assert_eq!(a.len(), b.len());
            for (x, y) in a.coords().iter().zip(b.coords()) {
                assert!((x - y).abs() < 1e-15);
            }
            assert_eq!(a.resolution(), b.resolution());
        }
    }

    #[test]
    fn salem_cylinders_are_disjoint() {
        let spec = FractalSpec::SalemK(SalemParams {
            n: 3,
            eta: 0.25,
            anchors: AnchorChoice::Fixed {
                values: vec![0.0, 0.35, 0.75],
            },
            eta_seq: None,
        });
        let cloud = build(&spec, 3).unwrap();
        assert_eq!(cloud.len(), 27);
        let len = cloud.resolution();
        // brute-force interval arithmetic on the 27 depth-3 cylinders
        let xs = cloud.coords();
        for i in 0..27 {
            assert!(xs[i] >= 0.0 && xs[i] + len <= 1.0);
            for j in 0..27 {
                if i != j {
                    let disjoint = xs[i] + len < xs[j] || xs[j] + len < xs[i];
                    assert!(disjoint, "cylinders {i} and {j} overlap");
                }
            }
        }
        // expected resolution: η_1 η_2 η_3 with η_j = η(1 - 1/(j+1)^2)
        let expected = 0.25f64.powi(3) * (3.0 / 4.0) * (8.0 / 9.0) * (15.0 / 16.0);
        assert!((len - expected).abs() < 1e-15);
    }

    #[test]
    fn size_cap_is_enforced() {
        let err = build(&constructions::middle_thirds(), 21).unwrap_err();
        assert!(matches!(err, Error::Size(_)));
        let small = BuildOptions { max_atoms: 10 };
        assert!(matches!(
            build_with(&constructions::middle_thirds(), 4, &small),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn product_cloud_is_tensor() {
        let cloud = build(&constructions::cantor_product(), 2).unwrap();
        assert_eq!(cloud.dim(), 2);
        assert_eq!(cloud.len(), 16);
        assert_eq!(cloud.point(1), &[0.0, 2.0 / 9.0]);
    }

    #[test]
    fn unequal_ratios_use_similarity_weights() {
        let cells = generate(
            &constructions::ifs_1d(&[(0.5, 0.0), (0.25, 0.75)]),
            1,
            &BuildOptions::default(),
        )
        .unwrap();
        let total: f64 = cells.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(cells.resolution, 0.5);
    }
}
