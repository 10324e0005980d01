//! Ready-made specs for the sets used throughout the crate.

use super::spec::{
    ExplicitSpec, FractalSpec, IfsSpec, ProductSpec, Similitude, SymmetricPerfectParams,
};

/// One-dimensional IFS from `(ratio, translation)` pairs.
pub fn ifs_1d(maps: &[(f64, f64)]) -> FractalSpec {
    FractalSpec::Ifs(IfsSpec {
        dim: 1,
        maps: maps
            .iter()
            .map(|&(r, t)| Similitude::scaling(r, vec![t]))
            .collect(),
        open_set_condition: true,
    })
}

/// The middle-thirds Cantor set.
pub fn middle_thirds() -> FractalSpec {
    ifs_1d(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)])
}

/// `[0, 1]` as the attractor of the two halving maps; depth `d` gives the
/// dyadic grid `k 2^{-d}`.
pub fn unit_interval() -> FractalSpec {
    ifs_1d(&[(0.5, 0.0), (0.5, 0.5)])
}

/// `C × C` in the plane.
pub fn cantor_product() -> FractalSpec {
    FractalSpec::Product(ProductSpec {
        factors: vec![middle_thirds(), middle_thirds()],
    })
}

/// `count` equally spaced points on the unit circle; the resolution is the
/// arc spacing.
pub fn circle(count: usize) -> FractalSpec {
    let step = std::f64::consts::TAU / count as f64;
    FractalSpec::Explicit(ExplicitSpec {
        dim: 2,
        points: (0..count)
            .map(|i| {
                let (s, c) = (step * i as f64).sin_cos();
                vec![c, s]
            })
            .collect(),
        weights: None,
        resolution: step,
        alpha_hint: Some(1.0),
    })
}

/// `count` equally spaced points on `[0, 1]` including both ends.
pub fn uniform_grid(count: usize) -> FractalSpec {
    let h = 1.0 / (count - 1) as f64;
    FractalSpec::Explicit(ExplicitSpec {
        dim: 1,
        points: (0..count).map(|i| vec![i as f64 * h]).collect(),
        weights: None,
        resolution: h,
        alpha_hint: Some(1.0),
    })
}

/// `count` equal atoms at the cell midpoints of `[0, 1]`, a discretisation
/// of Lebesgue measure.
pub fn lebesgue_midpoints(count: usize) -> FractalSpec {
    let h = 1.0 / count as f64;
    FractalSpec::Explicit(ExplicitSpec {
        dim: 1,
        points: (0..count).map(|i| vec![(i as f64 + 0.5) * h]).collect(),
        weights: None,
        resolution: h,
        alpha_hint: Some(1.0),
    })
}

/// Symmetric perfect set whose length ratios `a_{j+1}/a_j` run through the
/// given `(ratio, repeat)` blocks in order.
pub fn tricot(blocks: &[(f64, usize)]) -> FractalSpec {
    let mut lengths = vec![1.0];
    for &(ratio, repeat) in blocks {
        for _ in 0..repeat {
            let last = *lengths.last().unwrap();
            lengths.push(last * ratio);
        }
    }
    FractalSpec::SymmetricPerfect(SymmetricPerfectParams { lengths })
}

/// The set `Ẽ = ∪_j Ẽ_j` that has finite packing measure but is not
/// quasi-regular, truncated at `j_max`.
///
/// `Ẽ_j` is `C(2^j, 3^j)` dilated by `s_j = 3^{-j(j-1)/2}`, moved flush
/// against 1, with its last first-stage interval `[1 - s_{j+1}, 1]` removed.
/// Each piece is expanded until its cells are no longer than `3^{-depth}`.
/// Cell weights are `s_j^β 2^{-j l}` (the `H_β`-mass of a stage-`l` cell with
/// `H_β(C(2^j,3^j)) = 1`), renormalised to total mass 1.
pub fn non_quasi_regular(j_max: usize, depth: usize) -> FractalSpec {
    let beta = std::f64::consts::LN_2 / 3f64.ln();
    let target = 3f64.powi(-(depth as i32));
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut resolution: f64 = 0.0;
    for j in 1..=j_max {
        let scale = 3f64.powi(-((j * (j - 1) / 2) as i32));
        let maps = 1usize << j;
        let ratio = 3f64.powi(-(j as i32));
        let gap = (1.0 - maps as f64 * ratio) / (maps as f64 - 1.0);
        let mut stages = 1;
        while scale * ratio.powi(stages) > target {
            stages += 1;
        }
        let cell = scale * ratio.powi(stages);
        resolution = resolution.max(cell);
        let cell_mass = scale.powf(beta) * (maps as f64).powi(-stages);
        // left endpoints of the stage-`stages` cells of C(2^j, 3^j)
        let mut left = vec![0.0];
        let mut len = 1.0;
        for stage in 0..stages {
            len *= ratio;
            let step = len + gap * len / ratio;
            let keep = if stage == 0 { maps - 1 } else { maps };
            left = (0..keep)
                .flat_map(|i| left.iter().map(move |&x| i as f64 * step + x))
                .collect();
        }
        left.sort_by(f64::total_cmp);
        for x in left {
            points.push(vec![1.0 - scale + scale * x]);
            weights.push(cell_mass);
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    FractalSpec::Explicit(ExplicitSpec {
        dim: 1,
        points,
        weights: Some(weights),
        resolution,
        alpha_hint: Some(beta),
    })
}
