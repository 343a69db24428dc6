use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use sobolev_lab::bundle_metrics::{
    cheeger_gromoll_upper_bound, eval_lambda_metric, fiber_rotation_path, path_length, Lambda,
};
use sobolev_lab::hom_bundle::HomBundle;
use sobolev_lab::manifolds::ManifoldModel;
use sobolev_lab::sampling::{self, random_bundle_tangent, random_hom, random_point, random_tangent};
use sobolev_lab::sobolev::checks::random_smooth_map;
use sobolev_lab::sobolev::{sobolev_distance, sobolev_energy, DistanceKind, Grid, SampledMap};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn sphere_pair(seed: u64, nodes: usize) -> (SampledMap, SampledMap) {
    let grid = Grid::interval(-1.0, 1.0, nodes).unwrap();
    let target = ManifoldModel::sphere(2).unwrap();
    let mut rng = sampling::rng(seed);
    (random_smooth_map(&grid, target, &mut rng).unwrap(), random_smooth_map(&grid, target, &mut rng).unwrap())
}

fn rotation(seed: u64) -> DMatrix<f64> {
    let mut rng = sampling::rng(seed);
    sampling::normal_matrix(3, 3, &mut rng).qr().q()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn sphere_exp_inverts_log(seed in any::<u64>(), n in 1usize..5) {
        let m = ManifoldModel::sphere(n).unwrap();
        let mut rng = sampling::rng(seed);
        let x = random_point(&m, &mut rng);
        let y = random_point(&m, &mut rng);
        prop_assume!(m.geodesic_distance(&x, &y) < PI - 1e-3);
        let back = m.exp_map(&x, &m.log_map(&x, &y).unwrap()).unwrap();
        prop_assert!((back - &y).norm() < 1e-9);
        prop_assert!((m.log_map(&x, &y).unwrap().norm() - m.geodesic_distance(&x, &y)).abs() < 1e-12);
    }

    #[test]
    fn transport_is_an_isometry(seed in any::<u64>()) {
        let m = ManifoldModel::sphere(3).unwrap();
        let mut rng = sampling::rng(seed);
        let x = random_point(&m, &mut rng);
        let y = random_point(&m, &mut rng);
        prop_assume!(m.geodesic_distance(&x, &y) < PI - 1e-3);
        let v = random_tangent(&m, &x, 1.0, &mut rng);
        let w = random_tangent(&m, &x, 1.0, &mut rng);
        let (pv, pw) = (m.parallel_transport(&x, &y, &v).unwrap(), m.parallel_transport(&x, &y, &w).unwrap());
        prop_assert!((pv.dot(&pw) - v.dot(&w)).abs() < 1e-12);
        prop_assert!(m.tangent_residual(&y, &pv) < 1e-12);
    }

    #[test]
    fn lambda_metric_is_monotone_in_lambda(seed in any::<u64>(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let bundle = HomBundle::new(ManifoldModel::euclidean(2).unwrap(), ManifoldModel::sphere(2).unwrap());
        let nu = random_bundle_tangent(&bundle, &mut sampling::rng(seed));
        let (lo, hi) = (a.min(b), a.max(b));
        let g_lo = eval_lambda_metric(Lambda::new(lo).unwrap(), &nu).unwrap();
        let g_hi = eval_lambda_metric(Lambda::new(hi).unwrap(), &nu).unwrap();
        prop_assert!(g_lo >= 0.0);
        prop_assert!(g_lo <= g_hi * (1.0 + 1e-12));
    }

    #[test]
    fn lambda_metric_is_quadratic(seed in any::<u64>(), t in -10.0f64..10.0, lambda in 0.0f64..=1.0) {
        let bundle = HomBundle::new(ManifoldModel::euclidean(2).unwrap(), ManifoldModel::sphere(2).unwrap());
        let nu = random_bundle_tangent(&bundle, &mut sampling::rng(seed));
        let l = Lambda::new(lambda).unwrap();
        let g = eval_lambda_metric(l, &nu).unwrap();
        let gt = eval_lambda_metric(l, &nu.scaled(t)).unwrap();
        prop_assert!((gt - t * t * g).abs() <= 1e-10 * (1.0 + t * t * g));
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn distances_are_symmetric_and_vanish_on_the_diagonal(seed in any::<u64>(), p in 1.0f64..4.0) {
        let (u, v) = sphere_pair(seed, 129);
        for kind in DistanceKind::ALL {
            let uv = sobolev_distance(&u, &v, kind, p).unwrap().value;
            let vu = sobolev_distance(&v, &u, kind, p).unwrap().value;
            prop_assert!((uv - vu).abs() <= 1e-12 * (1.0 + uv), "{kind}: {uv} vs {vu}");
            prop_assert_eq!(sobolev_distance(&u, &u, kind, p).unwrap().value, 0.0);
        }
    }

    #[test]
    fn chiron_below_sqrt2_embedding(seed in any::<u64>(), p in 1.0f64..4.0) {
        let (u, v) = sphere_pair(seed, 129);
        let chiron = sobolev_distance(&u, &v, DistanceKind::Chiron, p).unwrap().value;
        let iota = sobolev_distance(&u, &v, DistanceKind::Iota, p).unwrap().value;
        prop_assert!(chiron <= std::f64::consts::SQRT_2 * iota * (1.0 + 1e-12));
    }

    #[test]
    fn cg_length_below_sasaki_length_on_one_path(seed in any::<u64>()) {
        let bundle = HomBundle::new(ManifoldModel::euclidean(2).unwrap(), ManifoldModel::sphere(2).unwrap());
        let mut rng = sampling::rng(seed);
        let (e1, e2) = (random_hom(&bundle, &mut rng), random_hom(&bundle, &mut rng));
        prop_assume!(bundle.target().geodesic_distance(e1.base_y(), e2.base_y()) < PI - 1e-3);
        let path = fiber_rotation_path(&bundle, &e1, &e2, 256).unwrap();
        let cg = path_length(&bundle, Lambda::CHEEGER_GROMOLL, &path).unwrap();
        let s = path_length(&bundle, Lambda::SASAKI, &path).unwrap();
        prop_assert!(cg <= s * (1.0 + 1e-12));
        let fast = cheeger_gromoll_upper_bound(&bundle, &e1, &e2, 256).unwrap();
        prop_assert!((fast - cg).abs() <= 1e-9 * (1.0 + cg));
    }

    #[test]
    fn isometries_of_the_target_preserve_distances(seed in any::<u64>(), p in 1.0f64..4.0) {
        let (u, v) = sphere_pair(seed, 129);
        let q = rotation(seed ^ 0xA5A5);
        let target = *u.target();
        let (qu, qv) = (u.compose(target, |y| &q * y).unwrap(), v.compose(target, |y| &q * y).unwrap());
        prop_assert!((sobolev_energy(&qu, p).unwrap() - sobolev_energy(&u, p).unwrap()).abs() < 1e-9);
        for kind in [DistanceKind::Iota, DistanceKind::Chiron, DistanceKind::Dot] {
            let d = sobolev_distance(&u, &v, kind, p).unwrap().value;
            let dq = sobolev_distance(&qu, &qv, kind, p).unwrap().value;
            prop_assert!((d - dq).abs() <= 1e-10 * (1.0 + d), "{kind}: {d} vs {dq}");
        }
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn flat_isometries_preserve_distances(seed in any::<u64>(), p in 1.0f64..4.0, shift in -3.0f64..3.0) {
        let grid = Grid::interval(0.0, 1.0, 257).unwrap();
        let target = ManifoldModel::euclidean(3).unwrap();
        let mut rng = sampling::rng(seed);
        let (u, v) = (random_smooth_map(&grid, target, &mut rng).unwrap(), random_smooth_map(&grid, target, &mut rng).unwrap());
        let q = rotation(seed ^ 0x5A5A);
        let moved = |w: &SampledMap| w.compose(target, |y| &q * y + DVector::from_element(3, shift)).unwrap();
        let (qu, qv) = (moved(&u), moved(&v));
        for kind in [DistanceKind::Sasaki, DistanceKind::Iota, DistanceKind::Chiron] {
            let d = sobolev_distance(&u, &v, kind, p).unwrap();
            let dq = sobolev_distance(&qu, &qv, kind, p).unwrap();
            prop_assert!(!d.is_upper_bound);
            prop_assert!((d.value - dq.value).abs() <= 1e-10 * (1.0 + d.value), "{kind}: {} vs {}", d.value, dq.value);
        }
    }
}

/// u(t) = (cos φ, sin φ) with φ = sin πt has E_2 = π²/2.
fn energy_error(nodes: usize) -> f64 {
    let grid = Grid::interval(0.0, 1.0, nodes).unwrap();
    let u = SampledMap::from_fn(grid, ManifoldModel::circle(), |x| {
        let phi = (PI * x[0]).sin();
        DVector::from_column_slice(&[phi.cos(), phi.sin()])
    })
    .unwrap();
    (sobolev_energy(&u, 2.0).unwrap() - PI * PI / 2.0).abs()
}

#[test]
fn difference_energy_converges_at_second_order() {
    let errors: Vec<f64> = [129, 257, 513, 1025].iter().map(|&n| energy_error(n)).collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.15, "order {order} from {errors:?}");
    }
}

#[test]
fn grid_refinement_changes_family_values_little() {
    use sobolev_lab::experiments::{family_cg_vs_sasaki, family_sasaki_vs_embedding};
    let lambdas = [1.0, 0.1, 0.01];
    let pairs = [
        (family_cg_vs_sasaki(2.0, 2, &lambdas, 2048).unwrap(), family_cg_vs_sasaki(2.0, 2, &lambdas, 4096).unwrap()),
        (
            family_sasaki_vs_embedding(2.0, 2, &lambdas, 2048).unwrap(),
            family_sasaki_vs_embedding(2.0, 2, &lambdas, 4096).unwrap(),
        ),
    ];
    for (coarse, fine) in &pairs {
        for (a, b) in coarse.iter().zip(fine) {
            let values = |r: &sobolev_lab::experiments::FamilyResult| {
                [r.sasaki.map(|d| d.value), r.cheeger_gromoll.map(|d| d.value), r.iota, r.chiron]
            };
            for (x, y) in values(a).into_iter().zip(values(b)) {
                if let (Some(x), Some(y)) = (x, y) {
                    assert!((x - y).abs() <= 0.005 * y.abs(), "{} lambda={}: {x} vs {y}", a.family, a.parameter);
                }
            }
        }
    }
}
