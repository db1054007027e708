//! The additive-noise solution `w(t, x) = int G_{t-s}(x, y) xi(ds dy)`:
//! its exact covariance, the parabolic metric, and an exact-in-law sampler.

mod path;
mod sampler;
mod tail;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::spectral::{EigenSystem, ModeShape};

pub use path::{FieldPath, Grid, NoiseRecord};
pub use sampler::OuSampler;

/// Variances below `-NEGATIVE_TOLERANCE` are reported, above it clipped to 0.
pub const NEGATIVE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimePoint {
    pub t: f64,
    pub x: f64,
}

impl SpaceTimePoint {
    pub fn new(t: f64, x: f64) -> Self {
        SpaceTimePoint { t, x }
    }
}

/// `max(|t - s|^{1/4}, |x - y|^{1/2})`.
pub fn rho(a: SpaceTimePoint, b: SpaceTimePoint) -> f64 {
    (a.t - b.t).abs().sqrt().sqrt().max((a.x - b.x).abs().sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicBall {
    pub center: SpaceTimePoint,
    pub radius: f64,
    pub punctured: bool,
}

impl ParabolicBall {
    pub fn new(center: SpaceTimePoint, radius: f64) -> Self {
        ParabolicBall { center, radius, punctured: false }
    }

    pub fn punctured(center: SpaceTimePoint, radius: f64) -> Self {
        ParabolicBall { center, radius, punctured: true }
    }

    /// Membership in the ball intersected with `[0, inf) x [0, L]`.
    pub fn contains(&self, z: SpaceTimePoint, length: f64) -> bool {
        if z.t < 0.0 || z.x < 0.0 || z.x > length {
            return false;
        }
        let d = rho(self.center, z);
        d <= self.radius && !(self.punctured && d == 0.0)
    }
}

/// How the modes beyond the built count are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailModel {
    /// Plain partial sums.
    #[default]
    Truncated,
    /// Adds the continuous-spectrum approximation `(1/L) cos(k (x - y))`
    /// with mode density `L / pi` for `k` above the last built frequency.
    /// Accurate for interior points away from the boundary.
    Asymptotic,
}

/// Exact covariance of `w` from the spectral series.
#[derive(Debug, Clone)]
pub struct CovarianceOracle<'a> {
    es: &'a EigenSystem,
    modes: usize,
    tail: TailModel,
    cutoff: f64,
}

impl<'a> CovarianceOracle<'a> {
    pub fn new(es: &'a EigenSystem) -> Self {
        Self::with_modes(es, es.len())
    }

    pub fn with_modes(es: &'a EigenSystem, modes: usize) -> Self {
        let modes = modes.min(es.len()).max(1);
        let last = es.mode(modes - 1);
        let cutoff = last.eta().abs() + core::f64::consts::PI / (2.0 * es.length());
        CovarianceOracle { es, modes, tail: TailModel::Truncated, cutoff }
    }

    /// Switches the tail model; the asymptotic tail needs an oscillatory top mode.
    pub fn with_tail(mut self, tail: TailModel) -> Result<Self> {
        if tail == TailModel::Asymptotic {
            let top = self.es.mode(self.modes - 1).shape;
            if !matches!(top, ModeShape::Sine { .. } | ModeShape::Trig { .. }) {
                return Err(Error::invalid("tail", "asymptotic tail needs an oscillatory top mode"));
            }
        }
        self.tail = tail;
        Ok(self)
    }

    pub fn eigensystem(&self) -> &'a EigenSystem {
        self.es
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// `E[w(z1) w(z2)]`.
    pub fn cov(&self, z1: SpaceTimePoint, z2: SpaceTimePoint) -> Result<f64> {
        self.check(z1)?;
        self.check(z2)?;
        if z1.t == 0.0 || z2.t == 0.0 {
            return Ok(0.0);
        }
        let tau = (z1.t - z2.t).abs();
        let m = z1.t.min(z2.t);
        let mut sum = 0.0;
        for mode in &self.es.modes()[..self.modes] {
            let j = (-mode.lambda * tau).exp() * ou_variance(mode.lambda, m);
            sum += mode.value(z1.x) * mode.value(z2.x) * j;
        }
        if self.tail == TailModel::Asymptotic {
            sum += tail::covariance(self.cutoff, z1.x - z2.x, z1.t, z2.t);
        }
        Ok(sum)
    }

    pub fn var(&self, z: SpaceTimePoint) -> Result<f64> {
        self.cov(z, z)
    }

    /// `E|w(z1) - w(z2)|^2`, summed per mode in a cancellation-free form.
    pub fn var_increment(&self, z1: SpaceTimePoint, z2: SpaceTimePoint) -> Result<f64> {
        self.check(z1)?;
        self.check(z2)?;
        let (t, s) = (z1.t, z2.t);
        let tau = (t - s).abs();
        let m = t.min(s);
        let mut sum = 0.0;
        for mode in &self.es.modes()[..self.modes] {
            let lam = mode.lambda;
            let fx = mode.value(z1.x);
            let fy = mode.value(z2.x);
            let d = fx - fy;
            sum += if lam.abs() * t.max(s) < 1e-2 {
                // Small-lambda form: same quantity without the 1/lambda factor.
                fx * fx * ou_variance(lam, t) + fy * fy * ou_variance(lam, s)
                    - 2.0 * fx * fy * (-lam * tau).exp() * ou_variance(lam, m)
            } else {
                let e = fx * (-lam * t).exp() - fy * (-lam * s).exp();
                (d * d - 2.0 * fx * fy * (-lam * tau).exp_m1() - e * e) / (2.0 * lam)
            };
        }
        if self.tail == TailModel::Asymptotic {
            sum += tail::increment(self.cutoff, z1.x - z2.x, t, s);
        }
        clip_variance(sum)
    }

    /// Covariance matrix of the field at `points`.
    pub fn cov_matrix(&self, points: &[SpaceTimePoint]) -> Result<SymMatrix> {
        for &p in points {
            self.check(p)?;
        }
        let values: Vec<Vec<f64>> = points.iter().map(|p| self.es.values_at(p.x, self.modes)).collect();
        let mut m = SymMatrix::zeros(points.len());
        for i in 0..points.len() {
            for j in 0..=i {
                let (a, b) = (points[i], points[j]);
                let mut c = 0.0;
                if a.t > 0.0 && b.t > 0.0 {
                    let tau = (a.t - b.t).abs();
                    let mm = a.t.min(b.t);
                    for (n, mode) in self.es.modes()[..self.modes].iter().enumerate() {
                        c += values[i][n] * values[j][n] * (-mode.lambda * tau).exp() * ou_variance(mode.lambda, mm);
                    }
                    if self.tail == TailModel::Asymptotic {
                        c += tail::covariance(self.cutoff, a.x - b.x, a.t, b.t);
                    }
                }
                m.set_sym(i, j, c);
            }
        }
        Ok(m)
    }

    fn check(&self, z: SpaceTimePoint) -> Result<()> {
        if !(z.t >= 0.0) || !self.es.contains(z.x) {
            return Err(Error::OutOfDomain { t: z.t, x: z.x });
        }
        Ok(())
    }
}

/// `(1 - exp(-2 lambda t)) / (2 lambda)`, equal to `t` at `lambda = 0`.
#[inline]
pub fn ou_variance(lambda: f64, t: f64) -> f64 {
    let a = 2.0 * lambda * t;
    if a.abs() < 1e-12 {
        t * (1.0 - 0.5 * a)
    } else {
        -(-a).exp_m1() / (2.0 * lambda)
    }
}

pub(crate) fn clip_variance(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v > -NEGATIVE_TOLERANCE {
        Ok(0.0)
    } else {
        Err(Error::NegativeVariance { value: v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::BoundaryCondition;

    #[test]
    fn metric_examples() {
        let o = SpaceTimePoint::new(0.0, 0.0);
        assert_eq!(rho(o, o), 0.0);
        assert!((rho(o, SpaceTimePoint::new(1e-4, 0.0)) - 0.1).abs() < 1e-15);
        assert!((rho(SpaceTimePoint::new(0.0, 0.04), SpaceTimePoint::new(1e-8, 0.0)) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn ball_membership() {
        let c = SpaceTimePoint::new(0.5, 0.5);
        let b = ParabolicBall::punctured(c, 0.1);
        assert!(!b.contains(c, 1.0));
        assert!(ParabolicBall::new(c, 0.1).contains(c, 1.0));
        assert!(b.contains(SpaceTimePoint::new(0.5 + 0.5e-4, 0.505), 1.0));
        assert!(!b.contains(SpaceTimePoint::new(0.5, 0.52), 1.0));
    }

    #[test]
    fn zero_time_and_brownian_mode() {
        let es = EigenSystem::build(BoundaryCondition::neumann(1.0), 1).unwrap();
        let o = CovarianceOracle::new(&es);
        assert_eq!(o.var(SpaceTimePoint::new(0.0, 0.3)).unwrap(), 0.0);
        let c = o.cov(SpaceTimePoint::new(0.4, 0.1), SpaceTimePoint::new(0.7, 0.9)).unwrap();
        assert!((c - 0.4).abs() < 1e-15);
    }

    #[test]
    fn increment_matches_direct_form() {
        let es = EigenSystem::build(BoundaryCondition::robin(1.0, 2.0, 1.0), 40).unwrap();
        let o = CovarianceOracle::new(&es);
        let a = SpaceTimePoint::new(0.3, 0.2);
        let b = SpaceTimePoint::new(0.45, 0.6);
        let direct = o.var(a).unwrap() + o.var(b).unwrap() - 2.0 * o.cov(a, b).unwrap();
        assert!((o.var_increment(a, b).unwrap() - direct).abs() < 1e-13);
        assert_eq!(o.var_increment(a, a).unwrap(), 0.0);
    }
}
