use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::fourier::{ball_averages, gaussian_averages, AverageSeries, QuadraturePolicy};
use crate::measure::{
    local_uniformity_constant, quadrant_mass, weight_with, weight_with_expr, weight_with_factors,
    AtomicMeasure, Expr,
};
use crate::numeric::{geometric_grid, CompensatedSum};

use super::report::{InequalityReport, Orientation, PlateauGate, TheoremId};

pub type DensityFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// The positive density `f` in `f dμ`.
#[derive(Clone, Default)]
pub enum Weighting {
    /// `f ≡ 1`; product measures keep their factorisation.
    #[default]
    One,
    Expr(Expr),
    /// `f(x, y) = g(x) h(y)` on a product measure.
    Factors(Expr, Expr),
    Func(DensityFn),
}

impl fmt::Debug for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl Weighting {
    pub fn value(&self, p: &[f64]) -> f64 {
        match self {
            Weighting::One => 1.0,
            Weighting::Expr(e) => e.eval(p),
            Weighting::Factors(g, h) => g.eval(&p[..1]) * h.eval(&p[1..]),
            Weighting::Func(f) => f(p),
        }
    }

    /// `f dμ`.
    pub fn apply(&self, mu: &AtomicMeasure) -> Result<AtomicMeasure> {
        match self {
            Weighting::One => Ok(mu.clone()),
            Weighting::Expr(e) => weight_with_expr(mu, e),
            Weighting::Factors(g, h) => weight_with_factors(mu, |p| g.eval(p), |p| h.eval(p)),
            Weighting::Func(f) => weight_with(mu, |p| f(p)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Weighting::One => "1".into(),
            Weighting::Expr(e) => e.source().into(),
            Weighting::Factors(g, h) => format!("({g}) * ({h})[y]"),
            Weighting::Func(_) => "<function>".into(),
        }
    }
}

/// Inputs shared by the Fourier-side checks.
#[derive(Clone, Debug, Default)]
pub struct CheckOptions {
    pub policy: QuadraturePolicy,
    pub gate: PlateauGate,
    /// Added to the normalisation exponent `k`; zero except in tests that
    /// deliberately break the normalisation.
    pub exponent_offset: f64,
}

/// `Σ_j w_j f(x_j)^p μ(E_{x_j})^{-(2-p)}`, where the quadrant factor is
/// left out entirely when `2 - p = 0`.
fn hardy_sum(mu: &AtomicMeasure, f: &Weighting, p: f64) -> Result<f64> {
    let gap = 2.0 - p;
    let quadrants = if gap != 0.0 {
        Some(quadrant_masses(mu))
    } else {
        None
    };
    let mut acc = CompensatedSum::new();
    for (i, (x, w)) in mu.atoms().enumerate() {
        let fx = f.value(x);
        if !(fx >= 0.0 && fx.is_finite()) {
            invalid!("f takes the value {fx} at {x:?}; the inequalities assume f ≥ 0");
        }
        let mut term = w * fx.powf(p);
        if let Some(q) = &quadrants {
            term *= q[i].powf(-gap);
        }
        acc.add(term);
    }
    Ok(acc.value())
}

/// `μ(E_{x_j})` for every atom.
fn quadrant_masses(mu: &AtomicMeasure) -> Vec<f64> {
    if mu.dim() != 1 {
        return mu.points().map(|x| quadrant_mass(mu, x)).collect();
    }
    let xs = mu.coords();
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut acc = CompensatedSum::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            acc.add(mu.weights()[order[j]]);
            j += 1;
        }
        for &k in &order[i..j] {
            out[k] = acc.value();
        }
        i = j;
    }
    out
}

fn averages(
    fmu: &AtomicMeasure,
    p: f64,
    k: f64,
    l_values: &[f64],
    gaussian: bool,
    policy: &QuadraturePolicy,
) -> Result<AverageSeries> {
    let mut v = if gaussian {
        gaussian_averages(fmu, &[(p, k)], l_values, policy)?
    } else {
        ball_averages(fmu, &[(p, k)], l_values, policy)?
    };
    Ok(v.remove(0))
}

fn check_sobolev_range(theorem: &str, p: f64, n: usize, alpha: f64) -> Result<()> {
    let upper = if alpha > 0.0 {
        2.0 * n as f64 / alpha
    } else {
        f64::INFINITY
    };
    if !(p >= 2.0 && p < upper) {
        invalid!("{theorem} requires 2 ≤ p < 2n/α = {upper}, got p = {p}");
    }
    Ok(())
}

fn base_metadata(
    mu: &AtomicMeasure,
    f: &Weighting,
    p: f64,
    k: f64,
    series: &AverageSeries,
) -> Vec<(String, String)> {
    let q = &series.quadrature;
    vec![
        ("p".into(), format!("{p}")),
        ("k".into(), format!("{k}")),
        ("alpha".into(), format!("{}", mu.alpha_hint())),
        ("f".into(), f.describe()),
        ("atoms".into(), format!("{}", mu.len())),
        (
            "quadrature".into(),
            format!(
                "radial_nodes_per_unit={:.4} angular_count={} angular_converged={}",
                q.radial_nodes_per_unit, q.angular_count, q.angular_converged
            ),
        ),
        (
            "normalization".into(),
            "measures have total mass 1; constants C are not estimated".into(),
        ),
    ]
}

/// `∫ f² dμ ≤ C liminf (L^{-(n-αp/2)} ∫ |f̂dμ|^p)^{2/p}`, over balls or
/// against the Gaussian window.
pub fn check_theorem_b(
    mu: &AtomicMeasure,
    f: &Weighting,
    p: f64,
    l_values: &[f64],
    gaussian: bool,
    options: &CheckOptions,
) -> Result<InequalityReport> {
    let n = mu.dim();
    let alpha = mu.alpha_hint();
    check_sobolev_range("the weighted lower bound", p, n, alpha)?;
    let k = n as f64 - alpha * p / 2.0 + options.exponent_offset;
    let lhs = hardy_sum(mu, f, 2.0)?;
    let series = averages(&f.apply(mu)?, p, k, l_values, gaussian, &options.policy)?;
    let rhs = series
        .normalized_pairs()
        .into_iter()
        .map(|(l, v)| (l, v.powf(2.0 / p)))
        .collect();
    let id = if gaussian {
        TheoremId::ThmBGauss
    } else {
        TheoremId::ThmBBall
    };
    Ok(InequalityReport::new(
        id,
        lhs,
        rhs,
        Orientation::FixedOverSeries,
        options.gate,
        base_metadata(mu, f, p, k, &series),
    ))
}

/// `(∫ f² dμ)^{p/2} ≤ C limsup L^{-(n-αp/2)} ∫ |f̂dμ|^p`.
pub fn check_theorem_c_density(
    mu: &AtomicMeasure,
    f: &Weighting,
    p: f64,
    l_values: &[f64],
    options: &CheckOptions,
) -> Result<InequalityReport> {
    let n = mu.dim();
    let alpha = mu.alpha_hint();
    check_sobolev_range("the density bound", p, n, alpha)?;
    let k = n as f64 - alpha * p / 2.0 + options.exponent_offset;
    let lhs = hardy_sum(mu, f, 2.0)?.powf(p / 2.0);
    let series = averages(&f.apply(mu)?, p, k, l_values, false, &options.policy)?;
    Ok(InequalityReport::new(
        TheoremId::ThmCDensity,
        lhs,
        series.normalized_pairs(),
        Orientation::FixedOverSeries,
        options.gate,
        base_metadata(mu, f, p, k, &series),
    ))
}

/// `∫ f^p / μ(E_x)^{2-p} dμ ≤ C liminf L^{-(n-α)} ∫ |f̂dμ|^p` for
/// `1 ≤ p ≤ 2`.
pub fn check_theorem_d(
    mu: &AtomicMeasure,
    f: &Weighting,
    p: f64,
    l_values: &[f64],
    options: &CheckOptions,
) -> Result<InequalityReport> {
    if !(1.0..=2.0).contains(&p) {
        invalid!("the Hardy-type bound requires 1 ≤ p ≤ 2, got p = {p}");
    }
    let n = mu.dim();
    let k = n as f64 - mu.alpha_hint() + options.exponent_offset;
    let lhs = hardy_sum(mu, f, p)?;
    let series = averages(&f.apply(mu)?, p, k, l_values, false, &options.policy)?;
    Ok(InequalityReport::new(
        TheoremId::ThmDHardy,
        lhs,
        series.normalized_pairs(),
        Orientation::FixedOverSeries,
        options.gate,
        base_metadata(mu, f, p, k, &series),
    ))
}

/// `limsup L^{-(n-α)} ∫_{|ξ|≤L} |f̂dμ|² ≤ c ∫ f² dμ`. The empirical local
/// uniformity constant `λ` of `μ` is recorded in the metadata.
pub fn check_strichartz_upper(
    mu: &AtomicMeasure,
    f: &Weighting,
    l_values: &[f64],
    options: &CheckOptions,
) -> Result<InequalityReport> {
    let n = mu.dim();
    let alpha = mu.alpha_hint();
    let k = n as f64 - alpha + options.exponent_offset;
    let lhs = hardy_sum(mu, f, 2.0)?;
    let series = averages(&f.apply(mu)?, 2.0, k, l_values, false, &options.policy)?;
    let mut metadata = base_metadata(mu, f, 2.0, k, &series);
    metadata.push(("lambda".into(), lambda_diagnostic(mu, alpha)));
    Ok(InequalityReport::new(
        TheoremId::StrichartzUpper,
        lhs,
        series.normalized_pairs(),
        Orientation::SeriesOverFixed,
        options.gate,
        metadata,
    ))
}

/// `max μ(B_δ(x)) δ^{-α}` over up to 16 atoms and 8 radii between
/// `4·resolution` and `1/2`.
fn lambda_diagnostic(mu: &AtomicMeasure, alpha: f64) -> String {
    let lo = 4.0 * mu.resolution();
    if lo >= 0.5 {
        return "not computed (resolution too coarse)".into();
    }
    let deltas = match geometric_grid(lo, 0.5, 8) {
        Ok(d) => d,
        Err(e) => return format!("not computed ({e})"),
    };
    let stride = mu.len().div_ceil(16).max(1);
    let probes: Vec<Vec<f64>> = mu.points().step_by(stride).map(|p| p.to_vec()).collect();
    match local_uniformity_constant(mu, alpha, &deltas, &probes) {
        Ok(l) => format!(
            "{l:.6e} over {} probes, delta in [{lo:.3e}, 0.5]",
            probes.len()
        ),
        Err(e) => format!("not computed ({e})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{build, constructions};
    use crate::ineq::Verdict;
    use crate::measure::natural_measure;

    #[test]
    fn two_atom_hardy_lhs() {
        let mu = AtomicMeasure::new(1, vec![0.0, 1.0], vec![0.5, 0.5], 1e-3, 0.0).unwrap();
        assert_eq!(hardy_sum(&mu, &Weighting::One, 1.0).unwrap(), 1.5);
        assert_eq!(quadrant_masses(&mu), vec![0.5, 1.0]);
    }

    #[test]
    fn quadrant_masses_handle_ties_and_planes() {
        let mu =
            AtomicMeasure::new(1, vec![1.0, 0.0, 1.0], vec![0.25, 0.5, 0.25], 1e-3, 0.0).unwrap();
        assert_eq!(quadrant_masses(&mu), vec![1.0, 0.5, 1.0]);
        let prod = natural_measure(&build(&constructions::cantor_product(), 2).unwrap()).unwrap();
        let q = quadrant_masses(&prod);
        assert_eq!(q[0], 1.0 / 16.0);
        assert_eq!(q[15], 1.0);
    }

    #[test]
    fn dirac_ratio_is_constant() {
        let d = AtomicMeasure::dirac(&[0.0], 1e-3).unwrap();
        let ls = geometric_grid(1.0, 100.0, 6).unwrap();
        let r = check_theorem_b(
            &d,
            &Weighting::One,
            2.0,
            &ls,
            false,
            &CheckOptions::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Bounded);
        for (_, q) in &r.ratio_series {
            assert!((q - 0.5).abs() < 1e-9);
        }
        let s = check_strichartz_upper(&d, &Weighting::One, &ls, &CheckOptions::default()).unwrap();
        assert_eq!(s.verdict, Verdict::Bounded);
    }

    #[test]
    fn hypotheses_are_enforced() {
        let mu = natural_measure(&build(&constructions::middle_thirds(), 6).unwrap()).unwrap();
        let ls = geometric_grid(3.0, 243.0, 6).unwrap();
        let o = CheckOptions::default();
        assert!(check_theorem_b(&mu, &Weighting::One, 1.5, &ls, false, &o).is_err());
        assert!(check_theorem_b(&mu, &Weighting::One, 3.2, &ls, false, &o).is_err());
        assert!(check_theorem_d(&mu, &Weighting::One, 2.5, &ls, &o).is_err());
        let neg = Weighting::Expr("x - 0.5".parse().unwrap());
        assert!(check_theorem_d(&mu, &neg, 1.0, &ls, &o).is_err());
    }

    #[test]
    fn factor_weighting_keeps_the_product() {
        let prod = natural_measure(&build(&constructions::cantor_product(), 3).unwrap()).unwrap();
        let w = Weighting::Factors("1 + x".parse().unwrap(), "2".parse().unwrap());
        let fm = w.apply(&prod).unwrap();
        assert!(fm.tensor_factors().is_some());
        let direct = Weighting::Expr("2 * (1 + x)".parse().unwrap())
            .apply(&prod)
            .unwrap();
        for (a, b) in fm.weights().iter().zip(direct.weights()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
