//! Open KPZ on `[0, 1]` through the Hopf-Cole map `h = log u`, where `u`
//! solves `du = 1/2 u'' dt + u xi` under the Robin condition induced by the
//! boundary slopes `h'(0) = mu`, `h'(1) = -nu`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::functions::{Coefficients, ScalarFn};
use crate::gaussian_field::FieldPath;
use crate::heatkernel::InitialData;
use crate::solver::{CoupledRun, NoiseSource, ObservationPlan, SchemeConfig, Solver};
use crate::spectral::{BoundaryCondition, EigenSystem};

/// Paths with `min u` at or below this are excluded, never clamped.
pub const POSITIVITY_FLOOR: f64 = 1e-12;
/// Largest excluded fraction an experiment tolerates.
pub const MAX_EXCLUDED: f64 = 0.2;

/// `alpha = 1/2 - mu`, `beta = nu - 1/2` on `[0, 1]`.
pub fn robin_from_kpz(mu: f64, nu: f64) -> BoundaryCondition {
    BoundaryCondition::robin(0.5 - mu, nu - 0.5, 1.0)
}

#[derive(Debug, Clone)]
pub struct KpzConfig {
    pub mu: f64,
    pub nu: f64,
    pub u0: ScalarFn,
    pub scheme: SchemeConfig,
}

impl KpzConfig {
    pub fn bc(&self) -> BoundaryCondition {
        robin_from_kpz(self.mu, self.nu)
    }
}

#[derive(Debug, Clone)]
pub struct KpzModel<'a> {
    solver: Solver<'a>,
    u0: InitialData,
}

/// One replicate: `h` is `None` when positivity failed.
#[derive(Debug, Clone, PartialEq)]
pub struct KpzPath {
    pub h: Option<FieldPath>,
    pub w: FieldPath,
    pub min_u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityReport {
    pub excluded: usize,
    pub total: usize,
}

impl PositivityReport {
    pub fn from_paths(paths: &[KpzPath]) -> Self {
        PositivityReport { excluded: paths.iter().filter(|p| p.h.is_none()).count(), total: paths.len() }
    }

    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.excluded as f64 / self.total as f64
        }
    }

    pub fn check(&self, limit: f64) -> Result<()> {
        if self.fraction() > limit {
            return Err(Error::ExclusionThreshold { excluded: self.excluded, total: self.total, limit });
        }
        Ok(())
    }
}

impl<'a> KpzModel<'a> {
    /// `es` must be built from `cfg.bc()`.
    pub fn new(es: &'a EigenSystem, cfg: &KpzConfig) -> Result<Self> {
        if *es.bc() != cfg.bc() {
            return Err(Error::Config("eigen-system does not match the KPZ boundary slopes".into()));
        }
        let coeffs = Coefficients::new(ScalarFn::Zero, ScalarFn::Identity)?;
        let solver = Solver::new(es, cfg.scheme, coeffs)?;
        let min0 = solver.xs().iter().map(|&x| cfg.u0.eval(x)).fold(f64::INFINITY, f64::min);
        if !(min0 > 0.0) {
            return Err(Error::invalid("u0", "KPZ initial data must be strictly positive on the grid"));
        }
        let u0 = InitialData::new(es, cfg.u0.clone());
        Ok(KpzModel { solver, u0 })
    }

    pub fn solver(&self) -> &Solver<'a> {
        &self.solver
    }

    pub fn prepare(&self, plan: &ObservationPlan) -> Result<KpzRun<'_, 'a>> {
        Ok(KpzRun { run: self.solver.prepare(&self.u0, plan)? })
    }
}

#[derive(Debug, Clone)]
pub struct KpzRun<'s, 'a> {
    run: CoupledRun<'s, 'a>,
}

impl KpzRun<'_, '_> {
    pub fn run(&self, noise: NoiseSource) -> Result<KpzPath> {
        let p = self.run.run(noise)?;
        let h = (p.min_u > POSITIVITY_FLOOR).then(|| p.u.map(|v| v.ln()));
        Ok(KpzPath { h, w: p.w, min_u: p.min_u })
    }

    /// `log` of the deterministic flow, the noise-free `h`.
    pub fn log_flow(&self) -> Vec<f64> {
        self.run.flow().iter().map(|v| v.ln()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn slopes_map_to_robin_parameters() {
        assert_eq!(robin_from_kpz(0.5, 0.5), BoundaryCondition::robin(0.0, 0.0, 1.0));
        assert_eq!(robin_from_kpz(0.0, 0.0), BoundaryCondition::robin(0.5, -0.5, 1.0));
    }

    #[test]
    fn noiseless_neumann_constant_stays_flat() {
        let cfg = KpzConfig {
            mu: 0.5,
            nu: 0.5,
            u0: ScalarFn::Constant(1.0),
            scheme: SchemeConfig::new(1e-3, 32, 16, 0.05).unwrap(),
        };
        let es = EigenSystem::build(cfg.bc(), 16).unwrap();
        let model = KpzModel::new(&es, &cfg).unwrap();
        let run = model.prepare(&ObservationPlan::new(vec![10, 50], vec![0, 16, 31]).unwrap()).unwrap();
        let p = run.run(NoiseSource::Off).unwrap();
        assert!(p.h.unwrap().values.iter().all(|h| h.abs() < 1e-12));
    }

    #[test]
    fn nonpositive_initial_data_is_rejected() {
        let cfg = KpzConfig {
            mu: 0.3,
            nu: 0.7,
            u0: ScalarFn::Constant(0.0),
            scheme: SchemeConfig::new(1e-3, 32, 16, 0.05).unwrap(),
        };
        let es = EigenSystem::build(cfg.bc(), 16).unwrap();
        assert!(KpzModel::new(&es, &cfg).is_err());
    }
}
