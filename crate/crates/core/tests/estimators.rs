use std::sync::Arc;

use proptest::prelude::*;
use spdelab_core::estimators::{
    chung_statistic, fit_exponent, iqr, local_modulus, median, quantile, small_ball, wilson, FitRequirements, Ladder,
    Normalizer,
};
use spdelab_core::gaussian_field::NoiseRecord;
use spdelab_core::{FieldPath, Grid};

fn path(values: Vec<f64>, nt: usize, nx: usize) -> FieldPath {
    let grid = Grid::new((0..nt).map(|i| 0.1 + i as f64 * 1e-4).collect(), (0..nx).map(|j| j as f64 * 0.01).collect())
        .unwrap();
    FieldPath { grid: Arc::new(grid), values, seed: 0, stream: 0, noise: NoiseRecord::None }
}

proptest! {
    #[test]
    fn wilson_interval_brackets_the_estimate(n in 1usize..5000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as usize;
        let (lo, hi) = wilson(k, n, 1.96);
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }

    #[test]
    fn order_statistics_ignore_permutation(mut v in prop::collection::vec(-1e3f64..1e3, 1..50), seed in any::<u64>()) {
        let (m, q) = (median(&v), quantile(&v, 0.3));
        let i = (seed % v.len() as u64) as usize;
        v.rotate_left(i);
        v.reverse();
        prop_assert_eq!(median(&v), m);
        prop_assert_eq!(quantile(&v, 0.3), q);
        prop_assert!(iqr(&v) >= 0.0);
    }

    #[test]
    fn fits_recover_power_laws(slope in -3.0f64..6.0, c in 0.1f64..10.0) {
        let xs: Vec<f64> = (0..8).map(|k| 0.01 * 2f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| c * x.powf(slope)).collect();
        let f = fit_exponent(&xs, &ys).unwrap();
        prop_assert!((f.slope - slope).abs() < 1e-9);
        prop_assert!(f.r2 > 1.0 - 1e-9 || slope.abs() < 1e-9);
    }

    #[test]
    fn modulus_statistics_are_ordered_along_the_ladder(vals in prop::collection::vec(-1.0f64..1.0, 41 * 41)) {
        let p = path(vals, 41, 41);
        let ladder = Ladder::new(vec![0.3, 0.2, 0.15]).unwrap();
        let local = local_modulus(&p, (20, 20), &ladder, Normalizer::LogLog).unwrap();
        let chung = chung_statistic(&p, (20, 20), &ladder).unwrap();
        prop_assert!(local.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(chung.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(local.iter().chain(&chung).all(|v| v.is_finite() && *v >= 0.0));
    }
}

#[test]
fn constant_paths_have_zero_statistics() {
    let p = path(vec![3.0; 41 * 41], 41, 41);
    let ladder = Ladder::new(vec![0.3, 0.15]).unwrap();
    assert_eq!(local_modulus(&p, (20, 20), &ladder, Normalizer::Log).unwrap(), vec![0.0, 0.0]);
    assert_eq!(chung_statistic(&p, (20, 20), &ladder).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn ladders_below_grid_resolution_are_refused() {
    let p = path(vec![0.0; 41 * 41], 41, 41);
    let ladder = Ladder::new(vec![0.2, 0.05]).unwrap();
    assert!(local_modulus(&p, (20, 20), &ladder, Normalizer::LogLog).is_err());
}

#[test]
fn small_ball_probability_is_one_above_the_range() {
    let sups = vec![(0..1000).map(|k| k as f64 / 1000.0).collect::<Vec<_>>()];
    let est = small_ball(&sups, &[1.0], &[0.5, 2.0], FitRequirements { points: 2, span: 1.0 }).unwrap();
    assert_eq!(est.rows[0].p, 1.0);
    assert_eq!(est.excluded_one, 1);
    assert!(small_ball(&[vec![0.1; 999]], &[1.0], &[0.5], FitRequirements::default()).is_err());
}
