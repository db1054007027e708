//! Conditional variances of `w` and scans of the strong local
//! non-determinism ratio.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::gaussian_field::{rho, CovarianceOracle, SpaceTimePoint};
use crate::linalg::Cholesky;
use crate::rng::NoiseStream;
use crate::spectral::BoundaryKind;

/// Jitters tried in order when factoring the conditioning covariance.
pub const JITTERS: [f64; 4] = [0.0, 1e-12, 1e-10, 1e-8];
pub const MAX_CONDITIONING: usize = 1000;
/// Conditional variances down to this are roundoff and clipped to zero.
pub const CLIP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningSet {
    points: Vec<SpaceTimePoint>,
}

impl ConditioningSet {
    pub fn new(points: Vec<SpaceTimePoint>) -> Result<Self> {
        if points.len() > MAX_CONDITIONING {
            return Err(Error::invalid("conditioning", alloc::format!("at most {MAX_CONDITIONING} points")));
        }
        for (i, a) in points.iter().enumerate() {
            if points[..i].iter().any(|b| rho(*a, *b) <= 1e-12) {
                return Err(Error::invalid("conditioning", "points must be pairwise distinct"));
            }
        }
        Ok(ConditioningSet { points })
    }

    pub fn empty() -> Self {
        ConditioningSet { points: Vec::new() }
    }

    pub fn points(&self) -> &[SpaceTimePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalVariance {
    pub variance: f64,
    /// Jitter that made the factorization succeed.
    pub jitter: f64,
}

/// `Var(w(z) | w(z_1), ..., w(z_m))`.
pub fn conditional_variance(
    oracle: &CovarianceOracle<'_>,
    target: SpaceTimePoint,
    cond: &ConditioningSet,
) -> Result<ConditionalVariance> {
    let var = oracle.var(target)?;
    if cond.is_empty() {
        return Ok(ConditionalVariance { variance: var, jitter: 0.0 });
    }
    let sigma = oracle.cov_matrix(cond.points())?;
    let chol = Cholesky::factor_escalating(&sigma, &JITTERS)?;
    let c: Vec<f64> = cond.points().iter().map(|&p| oracle.cov(target, p)).collect::<Result<_>>()?;
    let y = chol.forward(&c);
    let v = var - y.iter().map(|a| a * a).sum::<f64>();
    let variance = if v >= 0.0 {
        v
    } else if v > -CLIP {
        0.0
    } else {
        return Err(Error::NegativeVariance { value: v });
    };
    Ok(ConditionalVariance { variance, jitter: chol.jitter })
}

/// Region and sizes for a random conditioning scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub t_range: (f64, f64),
    pub x_range: (f64, f64),
    pub max_m: usize,
    /// Draw targets from the whole of `[0, L]` rather than `x_range`.
    pub include_boundary: bool,
    /// Refuse boundary targets under Robin conditions, where the lower bound
    /// is only known in the interior.
    pub strict_interior: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { t_range: (0.1, 1.0), x_range: (0.2, 0.8), max_m: 20, include_boundary: false, strict_interior: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRow {
    pub trial: usize,
    pub m: usize,
    pub min_rho2: f64,
    pub cond_var: f64,
    /// `cond_var / min_rho2`.
    pub ratio_rho: f64,
    /// `cond_var / (min_rho2 ^ sqrt(t) ^ f_1-term)`, the boundary-aware form.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub rows: Vec<TrialRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub min_ratio_rho: f64,
    pub max_ratio_rho: f64,
}

/// Random targets and conditioning sets drawn from stream `(seed, trial)`.
pub fn trial_points(cfg: &ScanConfig, length: f64, seed: u64, trial: usize) -> (SpaceTimePoint, Vec<SpaceTimePoint>) {
    let mut rng = NoiseStream::new(seed, trial as u64);
    let (a, t_hi) = cfg.t_range;
    let (c, d) = cfg.x_range;
    let (tc, td) = if cfg.include_boundary { (0.0, length) } else { (c, d) };
    let target = SpaceTimePoint::new(a + (t_hi - a) * rng.uniform(), tc + (td - tc) * rng.uniform());
    let m = 1 + (rng.uniform() * cfg.max_m as f64) as usize;
    let m = m.min(cfg.max_m);
    let mut points = Vec::with_capacity(m);
    while points.len() < m {
        let p = SpaceTimePoint::new(a + (t_hi - a) * rng.uniform(), c + (d - c) * rng.uniform());
        if rho(p, target) > 1e-6 && points.iter().all(|q| rho(p, *q) > 1e-6) {
            points.push(p);
        }
    }
    (target, points)
}

pub fn slnd_ratio_scan(oracle: &CovarianceOracle<'_>, cfg: &ScanConfig, trials: usize, seed: u64) -> Result<ScanReport> {
    validate_scan(oracle, cfg, trials)?;
    let rows = (0..trials).map(|k| scan_trial(oracle, cfg, seed, k)).collect::<Result<Vec<_>>>()?;
    Ok(summarize(rows))
}

pub fn validate_scan(oracle: &CovarianceOracle<'_>, cfg: &ScanConfig, trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::invalid("trials", "need at least one trial"));
    }
    if cfg.max_m == 0 || cfg.max_m > MAX_CONDITIONING {
        return Err(Error::invalid("max_m", "must be in 1..=1000"));
    }
    let l = oracle.eigensystem().length();
    let (a, t) = cfg.t_range;
    let (c, d) = cfg.x_range;
    if !(0.0 < a && a < t && 0.0 <= c && c < d && d <= l) {
        return Err(Error::invalid("region", "need 0 < a < T and 0 <= c < d <= L"));
    }
    if cfg.include_boundary && cfg.strict_interior && oracle.eigensystem().bc().is_robin() {
        return Err(Error::invalid("include_boundary", "Robin lower bounds are interior-only; clear strict_interior to explore"));
    }
    Ok(())
}

/// One trial of the scan; trials are independent so callers may run them in
/// any order.
pub fn scan_trial(oracle: &CovarianceOracle<'_>, cfg: &ScanConfig, seed: u64, trial: usize) -> Result<TrialRow> {
    validate_scan(oracle, cfg, 1)?;
    let es = oracle.eigensystem();
    let (target, points) = trial_points(cfg, es.length(), seed, trial);
    let m = points.len();
    let min_rho2 = points.iter().map(|p| rho(target, *p).powi(2)).fold(f64::INFINITY, f64::min);
    let cond = ConditioningSet::new(points)?;
    let cond_var = conditional_variance(oracle, target, &cond)?.variance;
    let mut scale = min_rho2.min(target.t.sqrt());
    match es.bc().kind {
        BoundaryKind::Dirichlet | BoundaryKind::Neumann => scale = scale.min(es.mode(0).value(target.x).abs()),
        BoundaryKind::Robin { .. } => {}
    }
    Ok(TrialRow { trial, m, min_rho2, cond_var, ratio_rho: cond_var / min_rho2, ratio: cond_var / scale })
}

pub fn summarize(rows: Vec<TrialRow>) -> ScanReport {
    let fold = |f: fn(&TrialRow) -> f64| {
        rows.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (min_ratio, max_ratio) = fold(|r| r.ratio);
    let (min_ratio_rho, max_ratio_rho) = fold(|r| r.ratio_rho);
    ScanReport { rows, min_ratio, max_ratio, min_ratio_rho, max_ratio_rho }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{BoundaryCondition, EigenSystem};
    use alloc::vec;

    #[test]
    fn empty_and_perfect_information() {
        let es = EigenSystem::build(BoundaryCondition::neumann(1.0), 64).unwrap();
        let o = CovarianceOracle::new(&es);
        let z = SpaceTimePoint::new(0.4, 0.3);
        let v = conditional_variance(&o, z, &ConditioningSet::empty()).unwrap().variance;
        assert_eq!(v, o.var(z).unwrap());
        let v = conditional_variance(&o, z, &ConditioningSet::new(vec![z]).unwrap()).unwrap().variance;
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn duplicates_are_rejected() {
        let z = SpaceTimePoint::new(0.4, 0.3);
        assert!(ConditioningSet::new(vec![z, z]).is_err());
    }

    #[test]
    fn robin_boundary_needs_explicit_opt_in() {
        let es = EigenSystem::build(BoundaryCondition::robin(0.5, 1.0, 1.0), 32).unwrap();
        let o = CovarianceOracle::new(&es);
        let cfg = ScanConfig { include_boundary: true, ..ScanConfig::default() };
        assert!(slnd_ratio_scan(&o, &cfg, 2, 1).is_err());
        let cfg = ScanConfig { include_boundary: true, strict_interior: false, ..ScanConfig::default() };
        assert!(slnd_ratio_scan(&o, &cfg, 2, 1).is_ok());
    }
}
