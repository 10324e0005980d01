use proptest::prelude::*;

use fraclab::fourier::transform;
use fraclab::geom::{
    build, constructions, covering_number, distance_set_volume, packing_number,
    similarity_dimension, PointCloud,
};
use fraclab::ineq::{
    check_theorem_b, nonincreasing_rearrangement, rearrangement_dominance, CheckOptions, Weighting,
};
use fraclab::measure::{density_profile, energy, natural_measure, quadrant_mass, AtomicMeasure};
use fraclab::numeric::{geometric_grid, unit_ball_volume};

fn cloud_strategy() -> impl Strategy<Value = PointCloud> {
    (1usize..=2, 1usize..120).prop_flat_map(|(dim, n)| {
        proptest::collection::vec(-1.0f64..1.0, dim * n)
            .prop_map(move |coords| PointCloud::new(dim, coords, 1e-4).unwrap())
    })
}

fn measure_strategy() -> impl Strategy<Value = AtomicMeasure> {
    (1usize..=2, 1usize..40).prop_flat_map(|(dim, n)| {
        (
            proptest::collection::vec(-2.0f64..2.0, dim * n),
            proptest::collection::vec(0.0f64..1.0, n),
        )
            .prop_map(move |(coords, mut w)| {
                w[0] += 0.1;
                AtomicMeasure::new(dim, coords, w, 1e-3, 0.5).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covering_packing_chain(cloud in cloud_strategy(), eps in 0.01f64..0.5) {
        let p = packing_number(&cloud, eps).unwrap();
        prop_assert!(covering_number(&cloud, 2.0 * eps).unwrap().count <= p);
        prop_assert!(p <= covering_number(&cloud, eps / 2.0).unwrap().count);
    }

    #[test]
    fn volume_sandwich(cloud in cloud_strategy(), eps in 0.01f64..0.5) {
        let n = cloud.dim();
        let omega = unit_ball_volume(n);
        let v = distance_set_volume(&cloud, eps).unwrap();
        let low = omega * packing_number(&cloud, eps).unwrap() as f64 * eps.powi(n as i32);
        let high = omega * covering_number(&cloud, eps).unwrap().count as f64 * (2.0 * eps).powi(n as i32);
        prop_assert!(low <= v * (1.0 + 1e-12), "{} {}", low, v);
        prop_assert!(v <= high * (1.0 + 1e-12), "{} {}", v, high);
    }

    #[test]
    fn counts_and_volume_are_monotone(cloud in cloud_strategy(), eps in 0.01f64..0.4, grow in 1.0f64..3.0) {
        let big = eps * grow;
        prop_assert!(covering_number(&cloud, big).unwrap().count <= covering_number(&cloud, eps).unwrap().count);
        prop_assert!(packing_number(&cloud, big).unwrap() <= packing_number(&cloud, eps).unwrap());
        prop_assert!(distance_set_volume(&cloud, big).unwrap() >= distance_set_volume(&cloud, eps).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn similarity_dimension_ignores_order(mut ratios in proptest::collection::vec(0.01f64..0.99, 1..8), seed in any::<u64>()) {
        let a = similarity_dimension(&ratios).unwrap();
        let k = (seed as usize) % ratios.len();
        ratios.rotate_left(k);
        ratios.reverse();
        prop_assert_eq!(a.to_bits(), similarity_dimension(&ratios).unwrap().to_bits());
    }

    #[test]
    fn natural_measures_have_unit_mass(r1 in 0.05f64..0.45, r2 in 0.05f64..0.45, depth in 1usize..9) {
        let spec = constructions::ifs_1d(&[(r1, 0.0), (r2, 1.0 - r2)]);
        let mu = natural_measure(&build(&spec, depth).unwrap()).unwrap();
        prop_assert!((mu.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadrant_mass_is_monotone(mu in measure_strategy(), x in proptest::collection::vec(-2.5f64..2.5, 2), dx in proptest::collection::vec(0.0f64..1.0, 2)) {
        let n = mu.dim();
        let y: Vec<f64> = x[..n].iter().zip(&dx).map(|(a, b)| a + b).collect();
        prop_assert!(quadrant_mass(&mu, &x[..n]) <= quadrant_mass(&mu, &y));
    }

    #[test]
    fn energy_scales_and_ignores_labels(mu in measure_strategy(), c in 0.1f64..10.0) {
        let e = energy(&mu, 0.5).unwrap();
        let scaled = energy(&mu.scaled(c).unwrap(), 0.5).unwrap();
        prop_assert!((scaled - c * c * e).abs() <= 1e-10 * scaled.abs().max(1e-300));
        let order: Vec<usize> = (0..mu.len()).rev().collect();
        let coords: Vec<f64> = order.iter().flat_map(|&i| mu.point(i).to_vec()).collect();
        let weights: Vec<f64> = order.iter().map(|&i| mu.weights()[i]).collect();
        let relabelled = AtomicMeasure::new(mu.dim(), coords, weights, mu.resolution(), mu.alpha_hint()).unwrap();
        let r = energy(&relabelled, 0.5).unwrap();
        prop_assert!((r - e).abs() <= 1e-12 * e.abs().max(1e-300));
    }

    #[test]
    fn transform_symmetry_and_bound(mu in measure_strategy(), xi in proptest::collection::vec(-200.0f64..200.0, 2)) {
        let xi = &xi[..mu.dim()];
        let minus: Vec<f64> = xi.iter().map(|v| -v).collect();
        let a = transform(&mu, xi);
        let b = transform(&mu, &minus);
        prop_assert!((a - b.conj()).norm() <= 1e-12 * mu.total_mass());
        prop_assert!(a.norm() <= mu.total_mass() * (1.0 + 1e-12));
        let zero = transform(&mu, &vec![0.0; mu.dim()]);
        prop_assert!((zero.re - mu.total_mass()).abs() <= 1e-12 * mu.total_mass() && zero.im == 0.0);
    }

    #[test]
    fn rearranged_sum_dominates(values in proptest::collection::vec(0.0f64..10.0, 0..64), p in 1.01f64..=2.0) {
        let sorted = nonincreasing_rearrangement(&values).unwrap();
        prop_assert!(sorted.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(rearrangement_dominance(&values, p).unwrap().holds);
    }
}

#[test]
fn tensor_transform_matches_direct_sum() {
    let c = natural_measure(&build(&constructions::middle_thirds(), 4).unwrap()).unwrap();
    let g =
        natural_measure(&build(&constructions::ifs_1d(&[(0.5, 0.0), (0.25, 0.75)]), 3).unwrap())
            .unwrap();
    let product = AtomicMeasure::product(&c, &g).unwrap();
    let plain = AtomicMeasure::new(
        2,
        product.coords().to_vec(),
        product.weights().to_vec(),
        product.resolution(),
        1.0,
    )
    .unwrap();
    for i in 0..100 {
        let t = i as f64;
        let xi = [37.0 * (0.3 * t).cos(), 41.0 * (0.7 * t).sin()];
        assert!((transform(&product, &xi) - transform(&plain, &xi)).norm() < 1e-10);
    }
}

#[test]
fn quadrant_masses_survive_refinement() {
    let coarse = natural_measure(&build(&constructions::middle_thirds(), 6).unwrap()).unwrap();
    let fine = natural_measure(&build(&constructions::middle_thirds(), 7).unwrap()).unwrap();
    for j in 0..=27 {
        let x = j as f64 / 27.0 - 1e-15;
        let a = quadrant_mass(&coarse, &[x + 1.0 / 729.0 + 2e-15]);
        let b = quadrant_mass(&fine, &[x + 1.0 / 729.0 + 2e-15]);
        assert!((a - b).abs() < 1e-12, "{x}: {a} {b}");
    }
}

#[test]
fn cantor_density_at_atoms_obeys_the_density_bounds() {
    let mu = natural_measure(&build(&constructions::middle_thirds(), 12).unwrap()).unwrap();
    let alpha = std::f64::consts::LN_2 / 3f64.ln();
    let radii: Vec<f64> = (2..=7).map(|m| 3f64.powi(-m)).collect();
    for x in [0.0, 2.0 / 3.0, 2.0 / 9.0, 20.0 / 27.0] {
        let d = density_profile(&mu, &[x], alpha, &radii).unwrap();
        assert!(
            d.values
                .iter()
                .all(|&v| v >= 2f64.powf(-alpha) * 0.5 && v <= 2.0),
            "{x}: {:?}",
            d.values
        );
    }
}

/// `f ↦ c f` multiplies `∫ f² dμ` and `(L^{-k} ∫ |f̂dμ|^p)^{2/p}` by `c²`.
#[test]
fn theorem_b_ratio_is_invariant_under_scaling_f() {
    let mu = natural_measure(&build(&constructions::middle_thirds(), 8).unwrap()).unwrap();
    let ls = geometric_grid(9.0, 729.0, 7).unwrap();
    let options = CheckOptions::default();
    for p in [2.0, 2.5] {
        let a = check_theorem_b(
            &mu,
            &Weighting::Expr("1 + x".parse().unwrap()),
            p,
            &ls,
            false,
            &options,
        )
        .unwrap();
        let b = check_theorem_b(
            &mu,
            &Weighting::Expr("3.5 * (1 + x)".parse().unwrap()),
            p,
            &ls,
            false,
            &options,
        )
        .unwrap();
        assert!((b.lhs / a.lhs - 3.5 * 3.5).abs() < 1e-10);
        for (((_, x), (_, y)), ((_, u), (_, v))) in a
            .rhs_series
            .iter()
            .zip(&b.rhs_series)
            .zip(a.ratio_series.iter().zip(&b.ratio_series))
        {
            assert!((y / x - 3.5 * 3.5).abs() < 1e-10);
            assert!((u - v).abs() < 1e-10 * u);
        }
    }
}
