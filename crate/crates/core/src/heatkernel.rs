//! Spectral heat kernel `G_t(x, y) = sum_n exp(-lambda_n t) f_n(x) f_n(y)` and
//! the deterministic flow `G_t * u0`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::functions::ScalarFn;
use crate::spectral::EigenSystem;

/// Initial data together with its spectral coefficients.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub u0: ScalarFn,
    pub coefficients: Vec<f64>,
    pub bounded: bool,
    pub lipschitz: Option<f64>,
}

impl InitialData {
    pub fn new(es: &EigenSystem, u0: ScalarFn) -> Self {
        let coefficients = match u0 {
            ScalarFn::Zero => alloc::vec![0.0; es.len()],
            _ => es.expand(|x| u0.eval(x)),
        };
        InitialData { bounded: u0.is_bounded(), lipschitz: u0.lipschitz(), u0, coefficients }
    }

    pub fn zero(es: &EigenSystem) -> Self {
        Self::new(es, ScalarFn::Zero)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.u0, ScalarFn::Zero)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.u0.eval(x)
    }
}

#[derive(Debug, Clone)]
pub struct KernelEvaluator<'a> {
    es: &'a EigenSystem,
    tail_tolerance: f64,
}

impl<'a> KernelEvaluator<'a> {
    pub fn new(es: &'a EigenSystem, tail_tolerance: f64) -> Result<Self> {
        if !(tail_tolerance > 0.0) {
            return Err(Error::invalid("tail_tolerance", "must be positive"));
        }
        Ok(KernelEvaluator { es, tail_tolerance })
    }

    pub fn eigensystem(&self) -> &'a EigenSystem {
        self.es
    }

    /// Modes needed so that the tail `sum_{n > N} F^2 exp(-c n^2 t)` stays
    /// below the tolerance, with `c` the growth constant and `F` the sup bound.
    pub fn required_modes(&self, t: f64) -> usize {
        let n_max = self.es.len() as f64;
        let f = self.es.sup_bound();
        let c = self.es.growth_constant();
        let arg = (f * f * n_max / self.tail_tolerance).ln();
        let n = if arg > 0.0 { (arg / (c * t)).sqrt().ceil() as usize } else { 1 };
        n.max(3.min(self.es.len()))
    }

    pub fn truncation(&self, t: f64) -> Result<usize> {
        if !(t > 0.0) {
            return Err(Error::invalid("t", "heat kernel needs t > 0"));
        }
        let n = self.required_modes(t);
        if n > self.es.len() {
            return Err(Error::InsufficientModes { t, required: n, available: self.es.len() });
        }
        Ok(n)
    }

    pub fn eval(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        let n = self.truncation(t)?;
        self.check(t, x)?;
        self.check(t, y)?;
        Ok(self.eval_fixed(t, x, y, n))
    }

    /// Partial sum over the first `n` modes, no checks.
    pub fn eval_fixed(&self, t: f64, x: f64, y: f64, n: usize) -> f64 {
        self.es.modes()[..n].iter().map(|m| (-m.lambda * t).exp() * m.value(x) * m.value(y)).sum()
    }

    /// `(G_t * u0)(x)`; `t = 0` returns `u0(x)` directly. For very small `t`
    /// the sum runs over all built modes.
    pub fn flow(&self, u0: &InitialData, t: f64, x: f64) -> Result<f64> {
        self.check(t, x)?;
        if t == 0.0 {
            return Ok(u0.eval(x));
        }
        let n = self.required_modes(t).min(self.es.len());
        Ok(self.flow_fixed(u0, t, x, n))
    }

    pub fn flow_fixed(&self, u0: &InitialData, t: f64, x: f64, n: usize) -> f64 {
        self.es.modes()[..n]
            .iter()
            .zip(&u0.coefficients)
            .map(|(m, c)| (-m.lambda * t).exp() * c * m.value(x))
            .sum()
    }

    /// Largest ratio `|G_t(x, y)| / min(t^{-1/2}, t / |x - y|^3)` over the
    /// given times and points.
    pub fn bound_constant(&self, times: &[f64], points: &[f64]) -> Result<f64> {
        let mut c: f64 = 0.0;
        for &t in times {
            let n = self.truncation(t)?;
            for &x in points {
                for &y in points {
                    let d = (x - y).abs();
                    let mut bound = 1.0 / t.sqrt();
                    if d > 0.0 {
                        bound = bound.min(t / (d * d * d));
                    }
                    c = c.max(self.eval_fixed(t, x, y, n).abs() / bound);
                }
            }
        }
        Ok(c)
    }

    fn check(&self, t: f64, x: f64) -> Result<()> {
        if t < 0.0 || !self.es.contains(x) {
            return Err(Error::OutOfDomain { t, x });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::BoundaryCondition;

    #[test]
    fn dirichlet_vanishes_on_boundary() {
        let es = EigenSystem::build(BoundaryCondition::dirichlet(1.0), 64).unwrap();
        let ke = KernelEvaluator::new(&es, 1e-10).unwrap();
        for y in [0.1, 0.5, 0.77] {
            assert!(ke.eval(0.05, 0.0, y).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_nonpositive_time_and_reports_modes() {
        let es = EigenSystem::build(BoundaryCondition::neumann(1.0), 16).unwrap();
        let ke = KernelEvaluator::new(&es, 1e-10).unwrap();
        assert!(ke.eval(0.0, 0.5, 0.5).is_err());
        match ke.eval(1e-5, 0.5, 0.5) {
            Err(Error::InsufficientModes { required, available, .. }) => {
                assert!(required > available);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_flow_is_preserved_under_neumann() {
        let es = EigenSystem::build(BoundaryCondition::neumann(1.0), 32).unwrap();
        let ke = KernelEvaluator::new(&es, 1e-10).unwrap();
        let u0 = InitialData::new(&es, ScalarFn::Constant(2.5));
        for t in [0.0, 0.01, 0.3] {
            assert!((ke.flow(&u0, t, 0.4).unwrap() - 2.5).abs() < 1e-10);
        }
    }
}
