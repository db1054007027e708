//! Path statistics: local and uniform moduli, Chung and small-ball
//! statistics, exceptional-point scans, moments and log-log fits.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::E;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::gaussian_field::{rho, FieldPath, Grid};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Relative slack in ball membership tests.
const REL_TOL: f64 = 1e-9;

/// Strictly decreasing sequence of radii.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder(Vec<f64>);

impl Ladder {
    pub fn new(eps: Vec<f64>) -> Result<Self> {
        if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0)) || eps.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::invalid("ladder", "must be positive and strictly decreasing"));
        }
        Ok(Ladder(eps))
    }

    /// `eps0 2^{-k}` for `k = 0..rungs`.
    pub fn dyadic(eps0: f64, rungs: usize) -> Result<Self> {
        Self::new((0..rungs).map(|k| eps0 / (1u64 << k) as f64).collect())
    }

    pub fn rungs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn smallest(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    /// Rejects rungs below `resolution`.
    pub fn check_resolution(&self, resolution: f64) -> Result<()> {
        if self.smallest() < resolution {
            return Err(Error::BelowResolution { epsilon: self.smallest(), resolution });
        }
        Ok(())
    }

    /// Index of the smallest rung that is still `>= r` (up to rounding), if any.
    fn bucket(&self, r: f64) -> Option<usize> {
        let k = self.0.partition_point(|&e| e >= r * (1.0 - REL_TOL));
        k.checked_sub(1)
    }
}

/// `max((2 dt)^{1/4}, (2 dx)^{1/2})` with the largest spacings of the grid:
/// the smallest radius whose ball reaches a neighbour in both directions.
pub fn resolution(grid: &Grid) -> f64 {
    let spacing = |v: &[f64]| v.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    (2.0 * spacing(&grid.times)).sqrt().sqrt().max((2.0 * spacing(&grid.xs)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalizer {
    /// `rho sqrt(log log(1/rho))` with the inner argument floored at `e^e`.
    LogLog,
    /// `rho sqrt(log(1/rho))` with the argument floored at `e`.
    Log,
}

impl Normalizer {
    #[inline]
    pub fn eval(self, r: f64) -> f64 {
        let inv = 1.0 / r;
        match self {
            Normalizer::LogLog => r * inv.max(E.powf(E)).ln().ln().sqrt(),
            Normalizer::Log => r * inv.max(E).ln().sqrt(),
        }
    }
}

/// `(log log(1/eps))^{1/6} / eps`, with the same floor as [`Normalizer::LogLog`].
pub fn chung_scale(eps: f64) -> f64 {
    (1.0 / eps).max(E.powf(E)).ln().ln().powf(1.0 / 6.0) / eps
}

/// Per-rung sup of `|f(z) - f(z0)| / normalizer(rho)` over the punctured
/// ball `B*(z0, eps)` for one path.
pub fn local_modulus(path: &FieldPath, center: (usize, usize), ladder: &Ladder, norm: Normalizer) -> Result<Vec<f64>> {
    ladder.check_resolution(resolution(&path.grid))?;
    let mut out = vec![0.0; ladder.len()];
    let v0 = path.value(center.0, center.1);
    for_ball(&path.grid, center, ladder.rungs()[0], |i, j, r| {
        if r > 0.0 {
            if let Some(k) = ladder.bucket(r) {
                let v = (path.value(i, j) - v0).abs() / norm.eval(r);
                out[k] = out[k].max(v);
            }
        }
    });
    Ok(suffix_max(out))
}

/// Per-rung sup of `|f(z) - f(z0)|` over `B(z0, eps)`, without normalizer.
pub fn ball_sups(path: &FieldPath, center: (usize, usize), radii: &Ladder) -> Vec<f64> {
    let mut out = vec![0.0; radii.len()];
    let v0 = path.value(center.0, center.1);
    for_ball(&path.grid, center, radii.rungs()[0], |i, j, r| {
        if let Some(k) = radii.bucket(r) {
            out[k] = out[k].max((path.value(i, j) - v0).abs());
        }
    });
    suffix_max(out)
}

/// Running minimum over the ladder of `chung_scale(eps) * sup_{B(z0, eps)} |f - f(z0)|`.
pub fn chung_statistic(path: &FieldPath, center: (usize, usize), ladder: &Ladder) -> Result<Vec<f64>> {
    ladder.check_resolution(resolution(&path.grid))?;
    let sups = ball_sups(path, center, ladder);
    let mut running = f64::INFINITY;
    Ok(ladder
        .rungs()
        .iter()
        .zip(sups)
        .map(|(&e, s)| {
            running = running.min(chung_scale(e) * s);
            running
        })
        .collect())
}

/// Index rectangle `[i0, i1) x [j0, j1)` of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub t: (usize, usize),
    pub x: (usize, usize),
}

impl Rect {
    pub fn check(&self, grid: &Grid) -> Result<()> {
        if self.t.0 >= self.t.1 || self.x.0 >= self.x.1 || self.t.1 > grid.nt() || self.x.1 > grid.nx() {
            return Err(Error::invalid("rectangle", "outside the stored grid"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        (self.t.1 - self.t.0) * (self.x.1 - self.x.0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Per-point local ratios on a rectangle: for every `z` in `rect`,
/// `sup |f(z') - f(z)| / (scale(f(z)) rho sqrt(log(1/rho)))` over `z'` in
/// `rect` with `0 < rho <= eps`, returned per ladder rung.
fn pointwise_uniform(path: &FieldPath, rect: Rect, ladder: &Ladder, scale: &dyn Fn(f64) -> f64) -> Vec<Vec<f64>> {
    let g = &path.grid;
    let emax = ladder.rungs()[0];
    let mut out = Vec::with_capacity(rect.len());
    for i in rect.t.0..rect.t.1 {
        for j in rect.x.0..rect.x.1 {
            let mut best = vec![0.0; ladder.len()];
            let v0 = path.value(i, j);
            let s = scale(v0).abs();
            let z = g.point(i, j);
            let (ilo, ihi) = window(&g.times, z.t, emax.powi(4), rect.t);
            let (jlo, jhi) = window(&g.xs, z.x, emax * emax, rect.x);
            for ii in ilo..ihi {
                for jj in jlo..jhi {
                    let r = rho(z, g.point(ii, jj));
                    if r > 0.0 {
                        if let Some(k) = ladder.bucket(r) {
                            let v = (path.value(ii, jj) - v0).abs() / (s * Normalizer::Log.eval(r));
                            best[k] = best[k].max(v);
                        }
                    }
                }
            }
            out.push(suffix_max(best));
        }
    }
    out
}

/// Per-rung sup over pairs in `rect` of the `sqrt(log)`-normalized increment,
/// divided by `scale(f(z))` at the base point (`|sigma(u(z))|`; pass
/// `|_| 1.0` for `w`).
pub fn uniform_modulus(path: &FieldPath, rect: Rect, ladder: &Ladder, scale: &dyn Fn(f64) -> f64) -> Result<Vec<f64>> {
    rect.check(&path.grid)?;
    ladder.check_resolution(resolution(&path.grid))?;
    let per_point = pointwise_uniform(path, rect, ladder, scale);
    let mut out = vec![0.0; ladder.len()];
    for p in &per_point {
        for (o, v) in out.iter_mut().zip(p) {
            *o = o.max(*v);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionalScan {
    pub thetas: Vec<f64>,
    /// Fraction of rectangle points whose local ratio exceeds each theta.
    pub fractions: Vec<f64>,
    /// Largest local ratio: the uniform constant at this radius.
    pub uniform_constant: f64,
}

/// Fraction of points in `rect` whose `sqrt(log)`-normalized local ratio at
/// radius `eps` exceeds `theta |sigma(u(z))|`.
pub fn exceptional_scan(
    path: &FieldPath,
    rect: Rect,
    eps: f64,
    thetas: &[f64],
    scale: &dyn Fn(f64) -> f64,
) -> Result<ExceptionalScan> {
    rect.check(&path.grid)?;
    let ladder = Ladder::new(vec![eps])?;
    let ratios: Vec<f64> = pointwise_uniform(path, rect, &ladder, scale).into_iter().map(|v| v[0]).collect();
    let n = ratios.len() as f64;
    let fractions = thetas.iter().map(|&th| ratios.iter().filter(|&&r| r > th).count() as f64 / n).collect();
    let uniform_constant = ratios.iter().copied().fold(0.0, f64::max);
    Ok(ExceptionalScan { thetas: thetas.to_vec(), fractions, uniform_constant })
}

/// Visits every grid point within parabolic distance `radius` of `center`,
/// passing indices and the distance.
fn for_ball(grid: &Grid, center: (usize, usize), radius: f64, mut f: impl FnMut(usize, usize, f64)) {
    let z0 = grid.point(center.0, center.1);
    let (ilo, ihi) = window(&grid.times, z0.t, radius.powi(4), (0, grid.nt()));
    let (jlo, jhi) = window(&grid.xs, z0.x, radius * radius, (0, grid.nx()));
    for i in ilo..ihi {
        for j in jlo..jhi {
            let r = rho(z0, grid.point(i, j));
            // Grid points meant to sit on the sphere may land a rounding error outside.
            if r <= radius * (1.0 + REL_TOL) {
                f(i, j, r.min(radius));
            }
        }
    }
}

/// Index range of `v` within `half` of `c`, clipped to `bounds`.
fn window(v: &[f64], c: f64, half: f64, bounds: (usize, usize)) -> (usize, usize) {
    let lo = v.partition_point(|&a| a < c - half * (1.0 + 1e-12));
    let hi = v.partition_point(|&a| a <= c + half * (1.0 + 1e-12));
    (lo.max(bounds.0), hi.min(bounds.1))
}

/// Running max from the end: bucket `k` collects values with `rho` in
/// `(eps_{k+1}, eps_k]`, so rung `k` is the max over buckets `>= k`.
fn suffix_max(mut v: Vec<f64>) -> Vec<f64> {
    for k in (0..v.len().saturating_sub(1)).rev() {
        v[k] = v[k].max(v[k + 1]);
    }
    v
}

/// Fit requirements: minimum point count and minimum ratio between the
/// largest and smallest abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRequirements {
    pub points: usize,
    pub span: f64,
}

impl Default for FitRequirements {
    fn default() -> Self {
        FitRequirements { points: 5, span: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub log_x: Vec<f64>,
    pub log_y: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub r2: f64,
}

/// Least squares of `log y` on `log x` with the default requirements
/// (5 points over a decade).
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> Result<ExponentFit> {
    fit_exponent_with(xs, ys, FitRequirements::default())
}

pub fn fit_exponent_with(xs: &[f64], ys: &[f64], req: FitRequirements) -> Result<ExponentFit> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("fit", "abscissa and ordinate lengths differ"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid("fit", "values must be positive and finite"));
    }
    let n = xs.len();
    let (lo, hi) = xs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let span = if n > 0 { hi / lo } else { 0.0 };
    if n < req.points || span < req.span * (1.0 - 1e-12) {
        return Err(Error::InsufficientSpan { points: n, need: req.points, span, span_needed: req.span });
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let nf = n as f64;
    let mx = lx.iter().sum::<f64>() / nf;
    let my = ly.iter().sum::<f64>() / nf;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let slope_se = if n > 2 { (sse / (nf - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    Ok(ExponentFit { log_x: lx, log_y: ly, slope, intercept, slope_se, r2 })
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallBallRow {
    pub r: f64,
    pub eps: f64,
    pub hits: usize,
    pub m: usize,
    pub p: f64,
    pub lo: f64,
    pub hi: f64,
}

impl SmallBallRow {
    pub fn ratio(&self) -> f64 {
        self.r / self.eps
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallBallEstimate {
    pub rows: Vec<SmallBallRow>,
    /// Fit of `log(-log p)` on `log(r / eps)`; `None` when too few usable rows.
    pub fit: Option<ExponentFit>,
    /// Rows left out of the fit because `p = 0`, and because `p = 1`.
    pub excluded_zero: usize,
    pub excluded_one: usize,
}

/// Small-ball probabilities from per-path sups. `sups[k][m]` is the sup of
/// `|f - f(z0)|` over `B(z0, radii[k])` on path `m`; every radius is paired
/// with every ratio `r / eps`.
pub fn small_ball(sups: &[Vec<f64>], radii: &[f64], ratios: &[f64], req: FitRequirements) -> Result<SmallBallEstimate> {
    if sups.len() != radii.len() || sups.is_empty() {
        return Err(Error::invalid("small_ball", "one sup sample per radius"));
    }
    let m = sups[0].len();
    if m < 1000 || sups.iter().any(|s| s.len() != m) {
        return Err(Error::invalid("small_ball", "need the same M >= 1000 paths for every radius"));
    }
    let mut rows = Vec::new();
    for (s, &r) in sups.iter().zip(radii) {
        for &q in ratios {
            let eps = r / q;
            let hits = s.iter().filter(|&&v| v <= eps).count();
            let (lo, hi) = wilson(hits, m, Z95);
            rows.push(SmallBallRow { r, eps, hits, m, p: hits as f64 / m as f64, lo, hi });
        }
    }
    let excluded_zero = rows.iter().filter(|r| r.hits == 0).count();
    let excluded_one = rows.iter().filter(|r| r.hits == m).count();
    let usable: Vec<&SmallBallRow> = rows.iter().filter(|r| r.hits > 0 && r.hits < m).collect();
    let xs: Vec<f64> = usable.iter().map(|r| r.ratio()).collect();
    let ys: Vec<f64> = usable.iter().map(|r| -r.p.ln()).collect();
    let fit = fit_exponent_with(&xs, &ys, req).ok();
    Ok(SmallBallEstimate { rows, fit, excluded_zero, excluded_one })
}

/// Two estimates agree when their difference is within `z` joint standard
/// errors.
pub fn proportions_agree(a: &SmallBallRow, b: &SmallBallRow, z: f64) -> bool {
    let v = a.p * (1.0 - a.p) / a.m as f64 + b.p * (1.0 - b.p) / b.m as f64;
    (a.p - b.p).abs() <= z * v.sqrt() + 1e-15
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRow {
    pub k: u32,
    pub norm: f64,
    /// `norm / sqrt(k)`.
    pub per_sqrt_k: f64,
}

/// Empirical `||X||_k = (E|X|^k)^{1/k}`.
pub fn moment_growth(samples: &[f64], ks: &[u32], bounded: bool) -> Result<Vec<MomentRow>> {
    if !bounded {
        return Err(Error::invalid("moments", "moment growth needs bounded coefficients"));
    }
    if ks.iter().any(|&k| k > 8) && samples.len() < 100_000 {
        return Err(Error::invalid("moments", "k > 8 needs at least 1e5 samples"));
    }
    if samples.is_empty() || ks.contains(&0) {
        return Err(Error::invalid("moments", "need samples and k >= 1"));
    }
    Ok(ks
        .iter()
        .map(|&k| {
            let norm = lp_norm(samples, k);
            MomentRow { k, norm, per_sqrt_k: norm / (k as f64).sqrt() }
        })
        .collect())
}

pub fn lp_norm(samples: &[f64], k: u32) -> f64 {
    let m = samples.iter().map(|x| x.abs().powi(k as i32)).sum::<f64>() / samples.len() as f64;
    m.powf(1.0 / k as f64)
}

/// `||X||_k / ||X||_j` and its standard error from `batches` batch means.
pub fn norm_ratio(samples: &[f64], k: u32, j: u32, batches: usize) -> (f64, f64) {
    let ratio = lp_norm(samples, k) / lp_norm(samples, j);
    let size = samples.len() / batches.max(2);
    let rs: Vec<f64> = samples.chunks_exact(size.max(1)).map(|c| lp_norm(c, k) / lp_norm(c, j)).collect();
    let (_, var) = mean_var(&rs);
    (ratio, (var / rs.len() as f64).sqrt())
}

/// Sample mean and unbiased variance.
pub fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var)
}

/// Linear-interpolation quantile of unsorted data, `q` in `[0, 1]`.
pub fn quantile(v: &[f64], q: f64) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    if s.is_empty() {
        return f64::NAN;
    }
    let h = (s.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

pub fn median(v: &[f64]) -> f64 {
    quantile(v, 0.5)
}

pub fn iqr(v: &[f64]) -> f64 {
    quantile(v, 0.75) - quantile(v, 0.25)
}

/// Median of `num / den` over paths, skipping pairs with `den = 0`.
pub fn median_ratio(num: &[f64], den: &[f64]) -> f64 {
    let r: Vec<f64> = num.iter().zip(den).filter(|(_, d)| **d > 0.0).map(|(n, d)| n / d).collect();
    median(&r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::sync::Arc;

    use crate::gaussian_field::NoiseRecord;

    fn path(values: impl Fn(f64, f64) -> f64) -> FieldPath {
        let times: Vec<f64> = (0..40).map(|i| 0.5 + i as f64 * 1e-4).collect();
        let xs: Vec<f64> = (0..40).map(|j| 0.3 + j as f64 / 100.0).collect();
        let mut v = Vec::new();
        for &t in &times {
            for &x in &xs {
                v.push(values(t, x));
            }
        }
        FieldPath { grid: Arc::new(Grid::new(times, xs).unwrap()), values: v, seed: 0, stream: 0, noise: NoiseRecord::None }
    }

    #[test]
    fn constant_paths_give_zero_statistics() {
        let p = path(|_, _| 3.0);
        let ladder = Ladder::new(vec![0.3, 0.2]).unwrap();
        assert_eq!(local_modulus(&p, (20, 20), &ladder, Normalizer::LogLog).unwrap(), vec![0.0, 0.0]);
        assert_eq!(chung_statistic(&p, (20, 20), &ladder).unwrap(), vec![0.0, 0.0]);
        let rect = Rect { t: (5, 35), x: (5, 35) };
        assert_eq!(uniform_modulus(&p, rect, &ladder, &|_| 1.0).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn sups_are_monotone_in_radius() {
        let p = path(|t, x| (37.0 * t).sin() + (11.0 * x).cos() * x);
        let ladder = Ladder::new(vec![0.3, 0.25, 0.2, 0.16]).unwrap();
        let s = ball_sups(&p, (20, 20), &ladder);
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let c = chung_statistic(&p, (20, 20), &ladder).unwrap();
        assert!(c.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn resolution_guard() {
        let p = path(|t, _| t);
        let ladder = Ladder::new(vec![0.3, 0.01]).unwrap();
        assert!(matches!(local_modulus(&p, (20, 20), &ladder, Normalizer::LogLog), Err(Error::BelowResolution { .. })));
    }

    #[test]
    fn exceptional_scan_edges() {
        let p = path(|t, x| (50.0 * t).sin() * (9.0 * x).cos());
        let rect = Rect { t: (5, 35), x: (5, 35) };
        let s = exceptional_scan(&p, rect, 0.25, &[0.0], &|_| 1.0).unwrap();
        let k = s.uniform_constant;
        let s = exceptional_scan(&p, rect, 0.25, &[0.0, 0.5 * k, k, k * 1.0001], &|_| 1.0).unwrap();
        assert_eq!(s.fractions[0], 1.0);
        assert!(s.fractions.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(s.fractions[3], 0.0);
    }

    #[test]
    fn exact_power_law_fit() {
        let xs: Vec<f64> = (0..8).map(|i| 10f64.powf(i as f64 / 4.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let f = fit_exponent(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        assert!(matches!(fit_exponent(&xs[..3], &ys[..3]), Err(Error::InsufficientSpan { .. })));
    }

    #[test]
    fn wilson_interval_contains_estimate() {
        let (lo, hi) = wilson(30, 100, Z95);
        assert!(lo < 0.3 && 0.3 < hi);
        assert_eq!(wilson(0, 50, Z95).0, 0.0);
        assert_eq!(wilson(50, 50, Z95).1, 1.0);
    }

    #[test]
    fn moment_guards() {
        let s = vec![1.0; 10];
        assert!(moment_growth(&s, &[2], false).is_err());
        assert!(moment_growth(&s, &[10], true).is_err());
        let rows = moment_growth(&s, &[2, 4, 8], true).unwrap();
        assert!(rows.iter().all(|r| (r.norm - 1.0).abs() < 1e-15));
    }
}
