use proptest::prelude::*;
use spdelab_core::quadrature::{composite, GaussLegendre};
use spdelab_core::{BoundaryCondition, EigenSystem, InitialData, KernelEvaluator, ScalarFn};

fn bcs() -> Vec<BoundaryCondition> {
    vec![BoundaryCondition::dirichlet(1.0), BoundaryCondition::neumann(1.0), BoundaryCondition::robin(0.5, 1.5, 1.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn chapman_kolmogorov(k in 0usize..3, t in 0.01f64..0.2, s in 0.01f64..0.2, x in 0.05f64..0.95, y in 0.05f64..0.95) {
        let es = EigenSystem::build(bcs()[k], 48).unwrap();
        let ke = KernelEvaluator::new(&es, 1e-12).unwrap();
        let n = 48;
        let rule = GaussLegendre::new(12);
        let rhs = ke.eval_fixed(t + s, x, y, n);
        let lhs = composite(|z| ke.eval_fixed(t, x, z, n) * ke.eval_fixed(s, z, y, n), 0.0, 1.0, 48, &rule);
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn kernel_is_symmetric(k in 0usize..3, t in 1e-3f64..1.0, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let es = EigenSystem::build(bcs()[k], 64).unwrap();
        let ke = KernelEvaluator::new(&es, 1e-10).unwrap();
        let (a, b) = (ke.eval(t, x, y).unwrap(), ke.eval(t, y, x).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
}

#[test]
fn flow_of_an_eigenfunction_decays_exactly() {
    let es = EigenSystem::build(BoundaryCondition::robin(0.5, 1.5, 1.0), 32).unwrap();
    let ke = KernelEvaluator::new(&es, 1e-12).unwrap();
    let m = *es.mode(2);
    let u0 = InitialData::new(&es, ScalarFn::custom(move |x| m.value(x)));
    for t in [0.01, 0.1, 0.5] {
        for x in [0.1, 0.4, 0.8] {
            let want = (-es.mode(2).lambda * t).exp() * es.mode(2).value(x);
            assert!((ke.flow(&u0, t, x).unwrap() - want).abs() < 1e-9);
        }
    }
}

#[test]
fn neumann_flow_preserves_mass() {
    let es = EigenSystem::build(BoundaryCondition::neumann(1.0), 64).unwrap();
    let ke = KernelEvaluator::new(&es, 1e-12).unwrap();
    let u0 = InitialData::new(&es, ScalarFn::Bump { center: 0.3, half_width: 0.2 });
    let rule = GaussLegendre::new(16);
    let mass = |t: f64| composite(|x| ke.flow(&u0, t, x).unwrap(), 0.0, 1.0, 32, &rule);
    let m0 = mass(0.01);
    // The bump's mass is 0.2 * 32 / 35.
    assert!((m0 - 0.2 * 32.0 / 35.0).abs() < 1e-6);
    for t in [0.1, 1.0, 5.0] {
        assert!((mass(t) - m0).abs() < 1e-12, "{} vs {m0}", mass(t));
    }
}

#[test]
fn dirichlet_kernel_matches_images() {
    // Method of images for the generator (1/2) d^2/dx^2.
    let es = EigenSystem::build(BoundaryCondition::dirichlet(1.0), 400).unwrap();
    let ke = KernelEvaluator::new(&es, 1e-13).unwrap();
    let p = |t: f64, d: f64| (-d * d / (2.0 * t)).exp() / (2.0 * std::f64::consts::PI * t).sqrt();
    for (t, x, y) in [(0.01, 0.3, 0.35), (0.002, 0.1, 0.12), (0.05, 0.5, 0.9)] {
        let images: f64 = (-10..=10).map(|k| p(t, x - y + 2.0 * k as f64) - p(t, x + y + 2.0 * k as f64)).sum();
        let g = ke.eval(t, x, y).unwrap();
        assert!((g - images).abs() < 1e-9 * (1.0 + images.abs()), "{g} vs {images}");
    }
}
