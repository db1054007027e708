use proptest::prelude::*;
use spdelab_core::spectral::robin_residual;
use spdelab_core::{BoundaryCondition, EigenSystem};

fn orthonormality_defect(es: &EigenSystem) -> f64 {
    let n = es.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((es.inner(i, j) - target).abs());
        }
    }
    worst
}

#[test]
fn dirichlet_closed_form() {
    let es = EigenSystem::build(BoundaryCondition::dirichlet(2.0), 12).unwrap();
    for (i, m) in es.modes().iter().enumerate() {
        let k = (i + 1) as f64 * std::f64::consts::PI / 2.0;
        assert!((m.lambda - 0.5 * k * k).abs() < 1e-10 * m.lambda);
        for x in [0.1, 0.7, 1.3] {
            assert!((m.value(x) - (k * x).sin()).abs() < 1e-12);
        }
    }
}

#[test]
fn neumann_has_a_constant_mode() {
    let es = EigenSystem::build(BoundaryCondition::neumann(1.0), 8).unwrap();
    assert!(es.lambdas()[0].abs() < 1e-12);
    assert!((es.evaluate(0, 0.3).unwrap() - 1.0).abs() < 1e-14);
    assert!(orthonormality_defect(&es) < 1e-10);
}

#[test]
fn robin_negative_regime_keeps_a_complete_basis() {
    // alpha > beta / (1 + beta L): one negative eigenvalue.
    let es = EigenSystem::build(BoundaryCondition::robin(1.0, 2.0, 1.0), 24).unwrap();
    assert!(es.lambdas()[0] < 0.0);
    assert!(es.lambdas()[1] > 0.0);
    assert!(orthonormality_defect(&es) < 1e-9);
    // Expanding a smooth function and reconstructing it converges.
    let f = |x: f64| (1.0 + x).ln();
    let c = es.expand(f);
    let err = (1..10).map(|k| k as f64 / 10.0).map(|x| (es.reconstruct(&c, x) - f(x)).abs()).fold(0.0, f64::max);
    assert!(err < 5e-2, "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn robin_modes_are_orthonormal_roots(alpha in 0.0f64..3.0, beta in 0.0f64..3.0, l in 0.5f64..2.0) {
        let es = EigenSystem::build(BoundaryCondition::robin(alpha, beta, l), 16).unwrap();
        prop_assert!(orthonormality_defect(&es) < 1e-9);
        let lambdas = es.lambdas();
        prop_assert!(lambdas.windows(2).all(|w| w[0] < w[1]));
        for m in es.modes().iter().filter(|m| m.lambda > 0.0) {
            prop_assert!(robin_residual(m.eta(), alpha, beta, l) < 1e-12);
        }
        // e'' = -2 lambda e inside, e' + alpha e = 0 at 0 and e' + beta e = 0 at L.
        for m in es.modes() {
            for x in [0.2 * l, 0.5 * l, 0.9 * l] {
                let r = m.second_derivative(x) + 2.0 * m.lambda * m.value(x);
                prop_assert!(r.abs() < 1e-8 * (1.0 + m.lambda.abs()));
            }
            let scale = 1.0 + m.derivative(0.0).abs() + m.derivative(l).abs();
            prop_assert!((m.derivative(0.0) + alpha * m.value(0.0)).abs() < 1e-9 * scale);
            prop_assert!((m.derivative(l) + beta * m.value(l)).abs() < 1e-9 * scale);
        }
    }
}
