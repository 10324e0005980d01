use std::fmt::Write as _;

use fraclab::fourier::{
    ball_average, gaussian_average, plot_script, scaling_exponent, AverageKind,
};
use fraclab::geom::{box_dimension_fit, build_with, packing_number, BuildOptions, PointCloud};
use fraclab::ineq::{
    check_hudson_coherent, check_hudson_discrete, check_strichartz_upper, check_theorem_b,
    check_theorem_c_density, check_theorem_d, CheckOptions, ExponentialSum, HudsonOptions,
    InequalityReport, TheoremId, Verdict, Weighting,
};
use fraclab::measure::{natural_measure, AtomicMeasure};
use fraclab::ScalingFit;
use serde::Serialize;

use crate::artifacts::Artifacts;
use crate::config::{Normalization, RunConfig};
use crate::failure::{Failure, Outcome};

fn build(config: &RunConfig) -> Outcome<(PointCloud, AtomicMeasure)> {
    let options = BuildOptions {
        max_atoms: config.max_atoms,
    };
    let cloud = build_with(&config.spec, config.depth, &options)?;
    let mu = natural_measure(&cloud)?;
    Ok((cloud, mu))
}

/// `f dμ` with the configured normalisation.
fn weighted(config: &RunConfig, mu: &AtomicMeasure) -> Outcome<AtomicMeasure> {
    let nu = config.measure.weighting()?.apply(mu)?;
    Ok(match config.measure.normalization {
        Normalization::None => nu,
        Normalization::UnitMass => {
            let mass = nu.total_mass();
            nu.scaled(1.0 / mass)?
        }
    })
}

pub fn construct(config: &RunConfig, out: &mut Artifacts) -> Outcome<()> {
    let (cloud, mu) = build(config)?;
    let nu = weighted(config, &mu)?;
    out.write_with("cloud.csv", |w| cloud.write_csv(w))?;
    out.write_with("measure.csv", |w| nu.write_csv(w))?;
    println!(
        "construct: {} points in R^{}, resolution {:.6e}, measure mass {:.12}",
        cloud.len(),
        cloud.dim(),
        cloud.resolution(),
        nu.total_mass()
    );
    Ok(())
}

#[derive(Serialize)]
struct DimReport {
    /// Box-counting exponent from the covering numbers.
    exponent: f64,
    alpha_hint: f64,
    covering: ScalingFit,
    /// Packing counts fitted against `1/ε`.
    packing: ScalingFit,
}

pub fn dim(config: &RunConfig, out: &mut Artifacts) -> Outcome<()> {
    let (cloud, _) = build(config)?;
    let scales = config.scales();
    let covering = box_dimension_fit(&cloud, &scales)?;
    let packings = scales
        .iter()
        .map(|&eps| Ok((1.0 / eps, packing_number(&cloud, eps)? as f64)))
        .collect::<Outcome<Vec<_>>>()?;
    let packing = scaling_exponent(&packings)?;

    let mut csv = String::from("eps,covering,packing,local_slope\n");
    for (i, (&(eps, n), &(_, p))) in covering.scales.iter().zip(&packings).enumerate() {
        let slope = match i {
            0 => String::new(),
            _ => format!("{:.16e}", covering.local_slopes[i - 1]),
        };
        writeln!(csv, "{eps:.16e},{n},{p},{slope}").expect("writing to a String");
    }
    out.write("dim.csv", csv.as_bytes())?;
    let report = DimReport {
        exponent: covering.exponent,
        alpha_hint: config.spec.alpha_hint(config.depth)?,
        covering,
        packing,
    };
    println!(
        "dim: covering exponent {:.6} (r^2 {:.6}), packing exponent {:.6}, alpha hint {:.6}",
        report.exponent, report.covering.r_squared, report.packing.exponent, report.alpha_hint
    );
    out.write_json("dim.json", &report)
}

pub fn fourier(config: &RunConfig, out: &mut Artifacts) -> Outcome<()> {
    let (_, mu) = build(config)?;
    let nu = weighted(config, &mu)?;
    let fo = &config.fourier;
    let ls = config.l_values();
    let (series, kind) = match fo.average {
        AverageKind::Ball => (
            ball_average(&nu, fo.p, fo.k(), &ls, &config.quadrature)?,
            "ball",
        ),
        AverageKind::Gaussian => (
            gaussian_average(&nu, fo.p, fo.k(), &ls, &config.quadrature)?,
            "gaussian",
        ),
    };
    let csv = format!("series_{kind}.csv");
    out.write_with(&csv, |w| series.write_csv(w))?;
    let title = format!("{kind} p={} k={:.4}", fo.p, fo.k());
    out.write(
        &format!("series_{kind}.gp"),
        plot_script(&[(&csv, &title)]).as_bytes(),
    )?;
    match scaling_exponent(&series.raw_pairs()) {
        Ok(fit) => println!(
            "fourier: {kind} average, raw growth exponent {:.6}",
            fit.exponent
        ),
        Err(_) => println!("fourier: {kind} average over {} radii", ls.len()),
    }
    Ok(())
}

fn run_check(
    config: &RunConfig,
    id: TheoremId,
    mu: &AtomicMeasure,
    f: &Weighting,
) -> Outcome<InequalityReport> {
    let ls = config.l_values();
    let p = config.fourier.p;
    let cs = &config.checks;
    let options = CheckOptions {
        policy: config.quadrature.clone(),
        gate: cs.gate,
        exponent_offset: cs.exponent_offset,
    };
    Ok(match id {
        TheoremId::ThmBBall => check_theorem_b(mu, f, p, &ls, false, &options)?,
        TheoremId::ThmBGauss => check_theorem_b(mu, f, p, &ls, true, &options)?,
        TheoremId::ThmCDensity => check_theorem_c_density(mu, f, p, &ls, &options)?,
        TheoremId::ThmDHardy => check_theorem_d(mu, f, p, &ls, &options)?,
        TheoremId::StrichartzUpper => check_strichartz_upper(mu, f, &ls, &options)?,
        TheoremId::HudsonDiscrete => {
            let u = ExponentialSum::real(cs.hudson.coefficients(), cs.hudson.frequencies())?;
            let options = HudsonOptions {
                gate: cs.gate,
                node_density: cs.hudson.node_density,
                envelope: None,
            };
            check_hudson_discrete(&u, p, &ls, &options)?
        }
        TheoremId::HudsonCoherent => {
            let scales: Vec<f64> = ls.iter().map(|l| 1.0 / l).collect();
            check_hudson_coherent(mu, cs.coherent.corner(), mu.alpha_hint(), &scales, &cs.gate)?
        }
    })
}

pub fn check(config: &RunConfig, out: &mut Artifacts, allow_inconclusive: bool) -> Outcome<()> {
    let (_, mu) = build(config)?;
    let f = config.measure.weighting()?;
    let mut reports = Vec::new();
    for &id in &config.checks.theorems {
        let report = run_check(config, id, &mu, &f)?;
        out.write_with(&format!("report_{id}.csv"), |w| report.write_csv(w))?;
        out.write(&format!("report_{id}.txt"), report.to_text().as_bytes())?;
        println!("{}", report.verdict_line());
        reports.push(report);
    }
    let lines: String = reports.iter().map(|r| r.verdict_line() + "\n").collect();
    out.write("verdicts.txt", lines.as_bytes())?;
    out.write_json("reports.json", &reports)?;

    let rejected: Vec<String> = reports
        .iter()
        .filter(|r| match r.verdict {
            Verdict::Bounded => false,
            Verdict::Inconclusive => !allow_inconclusive,
            Verdict::Diverging => true,
        })
        .map(|r| format!("{}={}", r.theorem_id, r.verdict))
        .collect();
    if rejected.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verdict(format!(
            "{} of {} checks not accepted: {}",
            rejected.len(),
            reports.len(),
            rejected.join(", ")
        )))
    }
}
