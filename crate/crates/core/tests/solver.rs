use spdelab_core::solver::{NoiseSource, ObservationPlan, SchemeConfig, Solver};
use spdelab_core::{BoundaryCondition, Coefficients, EigenSystem, InitialData, ScalarFn};

fn setup(es: &EigenSystem, coeffs: Coefficients) -> Solver<'_> {
    Solver::new(es, SchemeConfig::new(1e-3, 32, 16, 0.05).unwrap(), coeffs).unwrap()
}

#[test]
fn runs_are_reproducible_per_stream() {
    let es = EigenSystem::build(BoundaryCondition::dirichlet(1.0), 16).unwrap();
    let s = setup(&es, Coefficients::new(ScalarFn::Cos, ScalarFn::SinPlus(2.0)).unwrap());
    let cfg = *s.config();
    let run = s.prepare(&InitialData::zero(&es), &ObservationPlan::terminal(&cfg)).unwrap();
    let a = run.run(NoiseSource::white(1, 2)).unwrap();
    assert_eq!(a, run.run(NoiseSource::white(1, 2)).unwrap());
    assert_ne!(a.u.values, run.run(NoiseSource::white(1, 3)).unwrap().u.values);
}

#[test]
fn without_noise_the_solution_is_the_flow() {
    let es = EigenSystem::build(BoundaryCondition::neumann(1.0), 16).unwrap();
    let s = setup(&es, Coefficients::new(ScalarFn::Zero, ScalarFn::Constant(1.0)).unwrap());
    let cfg = *s.config();
    let u0 = InitialData::new(&es, ScalarFn::Bump { center: 0.5, half_width: 0.3 });
    let run = s.prepare(&u0, &ObservationPlan::terminal(&cfg)).unwrap();
    let p = run.run(NoiseSource::Off).unwrap();
    for j in 0..cfg.cells {
        assert!((p.u.value(0, j) - p.flow_value(0, j)).abs() < 1e-12);
        assert_eq!(p.w.value(0, j), 0.0);
    }
}

#[test]
fn coarse_runs_share_the_fine_noise() {
    // With additive noise the linear solution is a fixed linear map of the
    // masses, so a coarse run with refine (2, 2) tracks the fine run closely.
    let es = EigenSystem::build(BoundaryCondition::dirichlet(1.0), 64).unwrap();
    let coarse = Solver::new(&es, SchemeConfig::new(1e-3, 32, 32, 0.1).unwrap(), Coefficients::additive()).unwrap();
    let fine = Solver::new(&es, SchemeConfig::new(5e-4, 64, 64, 0.1).unwrap(), Coefficients::additive()).unwrap();
    let zero = InitialData::zero(&es);
    let rc = coarse.prepare(&zero, &ObservationPlan::new(vec![100], vec![16]).unwrap()).unwrap();
    let rf = fine.prepare(&zero, &ObservationPlan::new(vec![200], vec![32, 33]).unwrap()).unwrap();
    let (mut diff, mut size) = (0.0, 0.0);
    for k in 0..50 {
        let a = rc.run(NoiseSource::White { seed: 9, stream: k, refine_t: 2, refine_x: 2 }).unwrap().u.values[0];
        let b = rf.run(NoiseSource::White { seed: 9, stream: k, refine_t: 1, refine_x: 1 }).unwrap().u.values;
        let b = 0.5 * (b[0] + b[1]);
        diff += (a - b) * (a - b);
        size += b * b;
    }
    assert!(diff < 0.1 * size, "{diff} vs {size}");
}

#[test]
fn blow_up_is_reported() {
    let es = EigenSystem::build(BoundaryCondition::neumann(1.0), 8).unwrap();
    let coeffs = Coefficients::new(ScalarFn::Affine { slope: 1e6, intercept: 0.0 }, ScalarFn::Zero).unwrap();
    let s = Solver::new(&es, SchemeConfig::new(1e-2, 8, 8, 1.0).unwrap(), coeffs).unwrap();
    let cfg = *s.config();
    let run = s.prepare(&InitialData::new(&es, ScalarFn::Constant(10.0)), &ObservationPlan::terminal(&cfg)).unwrap();
    assert!(run.run(NoiseSource::Off).is_err());
}
