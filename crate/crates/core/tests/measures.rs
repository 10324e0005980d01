use fraclab::geom::{build, constructions};
use fraclab::measure::{
    energy, local_uniformity_constant, natural_measure, quadrant_mass, weight_with, AtomicMeasure,
};

const CANTOR_DIM: f64 = std::f64::consts::LN_2 / 1.0986122886681098;

fn cantor(depth: usize) -> AtomicMeasure {
    natural_measure(&build(&constructions::middle_thirds(), depth).unwrap()).unwrap()
}

/// `∫∫ |x - y|^{-1/2} dx dy` over the unit square is `8/3`.
#[test]
fn lebesgue_energy_matches_closed_form() {
    let mu =
        natural_measure(&build(&constructions::lebesgue_midpoints(10_000), 0).unwrap()).unwrap();
    let e = energy(&mu, 0.5).unwrap();
    assert!((e / (8.0 / 3.0) - 1.0).abs() < 0.02, "{e}");
}

#[test]
fn cantor_energy_above_the_dimension_keeps_growing() {
    let values: Vec<f64> = (6..=10).map(|d| energy(&cantor(d), 0.9).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
    let below: Vec<f64> = (6..=10).map(|d| energy(&cantor(d), 0.4).unwrap()).collect();
    assert!(below[4] / below[3] < values[4] / values[3]);
}

#[test]
fn weighting_by_x_halves_the_cantor_mass() {
    let depth = 9;
    let mu = weight_with(&cantor(depth), |p| p[0]).unwrap();
    assert!(
        (mu.total_mass() - 0.5).abs() <= 3f64.powi(-(depth as i32)),
        "{}",
        mu.total_mass()
    );
}

#[test]
fn quadrant_masses_follow_the_first_cylinders() {
    let mu = cantor(8);
    assert!((quadrant_mass(&mu, &[1.0]) - 1.0).abs() < 1e-12);
    assert!((quadrant_mass(&mu, &[1.0 / 3.0]) - 0.5).abs() < 1e-12);
    let plane = natural_measure(&build(&constructions::cantor_product(), 5).unwrap()).unwrap();
    assert!((quadrant_mass(&plane, &[1.0 / 3.0, 1.0]) - 0.5).abs() < 1e-12);
    assert!((quadrant_mass(&plane, &[1.0 / 3.0, 1.0 / 3.0]) - 0.25).abs() < 1e-12);
}

#[test]
fn uniformity_constant_blows_up_for_the_wrong_exponent() {
    let mu = cantor(12);
    let probes: Vec<Vec<f64>> = build(&constructions::middle_thirds(), 4)
        .unwrap()
        .points()
        .map(|p| p.to_vec())
        .collect();
    let lambdas: Vec<f64> = (3..=10)
        .map(|m| local_uniformity_constant(&mu, 0.9, &[3f64.powi(-m)], &probes).unwrap())
        .collect();
    assert!(lambdas.windows(2).all(|w| w[1] > w[0]), "{lambdas:?}");
    // each ternary step multiplies the ratio by 3^0.9 / 2
    assert!(lambdas[7] > 5.0 * lambdas[0], "{lambdas:?}");
    let right = local_uniformity_constant(
        &mu,
        CANTOR_DIM,
        &(3..=10).map(|m| 3f64.powi(-m)).collect::<Vec<_>>(),
        &probes,
    )
    .unwrap();
    assert!((1.0 - 1e-12..=4.0).contains(&right), "{right}");
}
