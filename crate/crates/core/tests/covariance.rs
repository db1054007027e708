use proptest::prelude::*;
use spdelab_core::gaussian_field::{ou_variance, OuSampler};
use spdelab_core::linalg::symmetric_eigenvalues;
use spdelab_core::slnd::{conditional_variance, ConditioningSet};
use spdelab_core::{BoundaryCondition, CovarianceOracle, EigenSystem, Grid, SpaceTimePoint, TailModel};

fn bc(k: usize) -> BoundaryCondition {
    match k {
        0 => BoundaryCondition::dirichlet(1.0),
        1 => BoundaryCondition::neumann(1.0),
        _ => BoundaryCondition::robin(1.0, 2.0, 1.0),
    }
}

fn point() -> impl Strategy<Value = SpaceTimePoint> {
    (0.05f64..1.0, 0.0f64..1.0).prop_map(|(t, x)| SpaceTimePoint::new(t, x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn covariance_matrices_are_psd(k in 0usize..3, pts in prop::collection::vec(point(), 2..8)) {
        let es = EigenSystem::build(bc(k), 64).unwrap();
        let oracle = CovarianceOracle::new(&es);
        let m = oracle.cov_matrix(&pts).unwrap();
        prop_assert!(m.max_asymmetry() == 0.0);
        let scale = (0..pts.len()).map(|i| m.get(i, i)).fold(0.0, f64::max);
        prop_assert!(symmetric_eigenvalues(&m).iter().all(|&v| v >= -1e-12 * scale));
    }

    #[test]
    fn increment_variance_is_consistent(k in 0usize..3, a in point(), b in point()) {
        let es = EigenSystem::build(bc(k), 64).unwrap();
        let oracle = CovarianceOracle::new(&es);
        let direct = oracle.var(a).unwrap() + oracle.var(b).unwrap() - 2.0 * oracle.cov(a, b).unwrap();
        let inc = oracle.var_increment(a, b).unwrap();
        prop_assert!(inc >= 0.0);
        prop_assert!((inc - direct).abs() < 1e-10);
    }

    #[test]
    fn conditioning_never_increases_variance(k in 0usize..3, target in point(), pts in prop::collection::vec(point(), 1..6)) {
        let es = EigenSystem::build(bc(k), 64).unwrap();
        let oracle = CovarianceOracle::new(&es);
        let mut last = oracle.var(target).unwrap();
        for m in 1..=pts.len() {
            let set = ConditioningSet::new(pts[..m].to_vec()).unwrap();
            let v = conditional_variance(&oracle, target, &set).unwrap().variance;
            prop_assert!(v <= last + 1e-10, "{v} > {last}");
            last = v;
        }
    }
}

#[test]
fn variance_is_the_mode_sum_of_ou_variances() {
    let es = EigenSystem::build(BoundaryCondition::robin(1.0, 2.0, 1.0), 32).unwrap();
    let oracle = CovarianceOracle::new(&es);
    let z = SpaceTimePoint::new(0.4, 0.3);
    let sum: f64 = es.modes().iter().map(|m| m.value(z.x).powi(2) * ou_variance(m.lambda, z.t)).sum();
    assert!((oracle.var(z).unwrap() - sum).abs() < 1e-12);
}

#[test]
fn asymptotic_tail_agrees_with_a_large_truncation() {
    // Interior points: N = 64 plus the tail should approach N = 4096.
    let small = EigenSystem::build(BoundaryCondition::neumann(1.0), 64).unwrap();
    let big = EigenSystem::build(BoundaryCondition::neumann(1.0), 4096).unwrap();
    let tail = CovarianceOracle::new(&small).with_tail(TailModel::Asymptotic).unwrap();
    let exact = CovarianceOracle::new(&big);
    let plain = CovarianceOracle::new(&small);
    let (a, b) = (SpaceTimePoint::new(0.5, 0.5), SpaceTimePoint::new(0.5 + 1e-4, 0.5 + 1e-3));
    let want = exact.var_increment(a, b).unwrap();
    let with_tail = (tail.var_increment(a, b).unwrap() - want).abs();
    let without = (plain.var_increment(a, b).unwrap() - want).abs();
    assert!(with_tail < 0.05 * without, "{with_tail} vs {without}");
}

#[test]
fn sampler_is_reproducible_and_stream_separated() {
    let es = EigenSystem::build(BoundaryCondition::dirichlet(1.0), 16).unwrap();
    let grid = Grid::new(vec![0.1, 0.2], vec![0.25, 0.5]).unwrap();
    let s = OuSampler::new(&es, 16, grid).unwrap();
    assert_eq!(s.sample(7, 3), s.sample(7, 3));
    assert_ne!(s.sample(7, 3).values, s.sample(7, 4).values);
    assert_ne!(s.sample(7, 3).values, s.sample(8, 3).values);
}
