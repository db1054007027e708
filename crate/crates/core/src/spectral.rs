//! Eigen-system of `-1/2 d^2/dx^2` on `(0, L)`.
//!
//! Dirichlet and Neumann modes are closed forms. Robin modes
//! `e(x) = cos(eta x) - (alpha/eta) sin(eta x)` come from the positive roots
//! of `tan(eta L) (eta^2 + alpha beta) = (beta - alpha) eta`. When the
//! boundary parameters push the bottom of the spectrum below zero the
//! hyperbolic modes `cosh(kappa x) - (alpha/kappa) sinh(kappa x)` are
//! included as well.
//!
//! Modes are indexed from 0 in code; index `i` is the mode usually written `f_{i+1}`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
    /// `u' + alpha u = 0` at 0 and `u' + beta u = 0` at `L`.
    Robin { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCondition {
    pub kind: BoundaryKind,
    pub length: f64,
}

impl BoundaryCondition {
    pub fn dirichlet(length: f64) -> Self {
        BoundaryCondition { kind: BoundaryKind::Dirichlet, length }
    }

    pub fn neumann(length: f64) -> Self {
        BoundaryCondition { kind: BoundaryKind::Neumann, length }
    }

    pub fn robin(alpha: f64, beta: f64, length: f64) -> Self {
        BoundaryCondition { kind: BoundaryKind::Robin { alpha, beta }, length }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::invalid("length", alloc::format!("must be positive and finite, got {}", self.length)));
        }
        if let BoundaryKind::Robin { alpha, beta } = self.kind {
            if !alpha.is_finite() || !beta.is_finite() {
                return Err(Error::invalid("alpha/beta", "must be finite"));
            }
        }
        Ok(())
    }

    pub fn is_robin(&self) -> bool {
        matches!(self.kind, BoundaryKind::Robin { .. })
    }

    /// Robin pairs with `alpha = beta / (1 + beta L)` have a zero eigenvalue.
    pub fn has_zero_mode(&self) -> bool {
        match self.kind {
            BoundaryKind::Dirichlet => false,
            BoundaryKind::Neumann => true,
            BoundaryKind::Robin { alpha, beta } => zero_mode_condition(alpha, beta, self.length),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            BoundaryKind::Dirichlet => "dirichlet",
            BoundaryKind::Neumann => "neumann",
            BoundaryKind::Robin { .. } => "robin",
        }
    }
}

fn zero_mode_condition(alpha: f64, beta: f64, l: f64) -> bool {
    (alpha * (1.0 + beta * l) - beta).abs() < 1e-12 * (1.0 + beta.abs() * l).max(1.0)
}

/// Un-normalized shape of a mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeShape {
    /// `sin(k x)`.
    Sine { k: f64 },
    /// `cos(eta x) - (alpha/eta) sin(eta x)`; Neumann modes have `alpha = 0`.
    Trig { eta: f64, alpha: f64 },
    /// `1 - alpha x`, the zero-eigenvalue mode.
    Linear { alpha: f64 },
    /// `cosh(kappa x) - (alpha/kappa) sinh(kappa x)`, a negative eigenvalue.
    Hyperbolic { kappa: f64, alpha: f64 },
}

impl ModeShape {
    #[inline]
    fn value(&self, x: f64) -> f64 {
        match *self {
            ModeShape::Sine { k } => (k * x).sin(),
            ModeShape::Trig { eta, alpha } => {
                let (s, c) = (eta * x).sin_cos();
                c - alpha / eta * s
            }
            ModeShape::Linear { alpha } => 1.0 - alpha * x,
            ModeShape::Hyperbolic { kappa, alpha } => (kappa * x).cosh() - alpha / kappa * (kappa * x).sinh(),
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        match *self {
            ModeShape::Sine { k } => k * (k * x).cos(),
            ModeShape::Trig { eta, alpha } => {
                let (s, c) = (eta * x).sin_cos();
                -eta * s - alpha * c
            }
            ModeShape::Linear { alpha } => -alpha,
            ModeShape::Hyperbolic { kappa, alpha } => kappa * (kappa * x).sinh() - alpha * (kappa * x).cosh(),
        }
    }

    fn second_derivative(&self, x: f64) -> f64 {
        match *self {
            ModeShape::Sine { k } => -k * k * self.value(x),
            ModeShape::Trig { eta, .. } => -eta * eta * self.value(x),
            ModeShape::Linear { .. } => 0.0,
            ModeShape::Hyperbolic { kappa, .. } => kappa * kappa * self.value(x),
        }
    }

    /// Closed-form squared `L^2(0, L)` norm.
    fn norm_squared(&self, l: f64) -> f64 {
        match *self {
            ModeShape::Sine { .. } => 0.5 * l,
            ModeShape::Trig { eta, alpha } => {
                let s2 = (2.0 * eta * l).sin() / (4.0 * eta);
                let s = (eta * l).sin();
                let a = alpha / eta;
                0.5 * l + s2 - alpha / (eta * eta) * s * s + a * a * (0.5 * l - s2)
            }
            ModeShape::Linear { alpha } => l - alpha * l * l + alpha * alpha * l * l * l / 3.0,
            ModeShape::Hyperbolic { kappa, alpha } => {
                let sh2 = (2.0 * kappa * l).sinh() / (4.0 * kappa);
                let sh = (kappa * l).sinh();
                let b = alpha / kappa;
                0.5 * l + sh2 - alpha / (kappa * kappa) * sh * sh + b * b * (sh2 - 0.5 * l)
            }
        }
    }

    /// Sup of `|e|` over `[0, L]`.
    fn sup(&self, l: f64) -> f64 {
        match *self {
            ModeShape::Sine { .. } => 1.0,
            ModeShape::Trig { eta, alpha } => (1.0 + (alpha / eta).powi(2)).sqrt(),
            ModeShape::Linear { alpha } => 1.0_f64.max((1.0 - alpha * l).abs()),
            // Either monotone or with an interior extremum of modulus < 1.
            ModeShape::Hyperbolic { .. } => 1.0_f64.max(self.value(l).abs()),
        }
    }
}

/// One normalized eigenpair: `f(x) = norm * shape(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub lambda: f64,
    pub shape: ModeShape,
    pub norm: f64,
}

impl Mode {
    fn new(lambda: f64, shape: ModeShape, l: f64) -> Self {
        Mode { lambda, shape, norm: 1.0 / shape.norm_squared(l).sqrt() }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.norm * self.shape.value(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.norm * self.shape.derivative(x)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        self.norm * self.shape.second_derivative(x)
    }

    /// Frequency of the mode. Negative values encode a hyperbolic mode with
    /// `kappa = -eta`.
    pub fn eta(&self) -> f64 {
        match self.shape {
            ModeShape::Sine { k } => k,
            ModeShape::Trig { eta, .. } => eta,
            ModeShape::Linear { .. } => 0.0,
            ModeShape::Hyperbolic { kappa, .. } => -kappa,
        }
    }
}

/// Diagnostics from the Robin root scan.
#[derive(Debug, Clone, PartialEq)]
pub struct RootReport {
    /// `|g(eta)| / sqrt((eta^2 + alpha beta)^2 + (beta - alpha)^2 eta^2)`,
    /// the residual relative to the amplitude of `g` near the root.
    pub residuals: Vec<f64>,
    /// Roots dropped because they were closer than the dedupe tolerance.
    pub merged: usize,
    pub scan_upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    pub n0: i64,
    /// `(n, n |eta_n - pi (n0 + n) / L|)` over oscillatory modes, `n` 1-based.
    pub residuals: Vec<(usize, f64)>,
    /// `(n, ||e_n||^{-2} L / 2)`, which tends to 1.
    pub norm_trend: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct EigenSystem {
    bc: BoundaryCondition,
    modes: Vec<Mode>,
    quadrature: GaussLegendre,
    roots: Option<RootReport>,
    growth: f64,
    sup_bound: f64,
}

pub fn default_quad_order(n: usize) -> usize {
    (4 * n).max(64)
}

impl EigenSystem {
    pub fn build(bc: BoundaryCondition, n: usize) -> Result<Self> {
        Self::build_with_order(bc, n, default_quad_order(n))
    }

    pub fn build_with_order(bc: BoundaryCondition, n: usize, quad_order: usize) -> Result<Self> {
        bc.validate()?;
        if n == 0 {
            return Err(Error::invalid("modes", "need at least one mode"));
        }
        if quad_order == 0 {
            return Err(Error::invalid("quad_order", "must be positive"));
        }
        let l = bc.length;
        let (modes, roots) = match bc.kind {
            BoundaryKind::Dirichlet => {
                let modes = (1..=n)
                    .map(|k| {
                        let k = PI * k as f64 / l;
                        Mode::new(0.5 * k * k, ModeShape::Sine { k }, l)
                    })
                    .collect();
                (modes, None)
            }
            BoundaryKind::Neumann => {
                let mut modes = Vec::with_capacity(n);
                modes.push(Mode::new(0.0, ModeShape::Linear { alpha: 0.0 }, l));
                for k in 1..n {
                    let eta = PI * k as f64 / l;
                    modes.push(Mode::new(0.5 * eta * eta, ModeShape::Trig { eta, alpha: 0.0 }, l));
                }
                (modes, None)
            }
            BoundaryKind::Robin { alpha, beta } => {
                let (modes, report) = robin_modes(alpha, beta, l, n)?;
                (modes, Some(report))
            }
        };
        let growth = growth_constant(&modes);
        let sup_bound = modes.iter().map(|m| m.norm * m.shape.sup(l)).fold(0.0, f64::max);
        Ok(EigenSystem { bc, modes, quadrature: GaussLegendre::on_interval(quad_order, 0.0, l), roots, growth, sup_bound })
    }

    pub fn bc(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn length(&self) -> f64 {
        self.bc.length
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn mode(&self, i: usize) -> &Mode {
        &self.modes[i]
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.lambda).collect()
    }

    pub fn etas(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.eta()).collect()
    }

    pub fn norm_factors(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.norm).collect()
    }

    pub fn quadrature(&self) -> &GaussLegendre {
        &self.quadrature
    }

    pub fn root_report(&self) -> Option<&RootReport> {
        self.roots.as_ref()
    }

    /// `min lambda_n / n^2` over `n >= 3` (1-based): the lower growth constant.
    pub fn growth_constant(&self) -> f64 {
        self.growth
    }

    /// `sup_n sup_x |f_n(x)|` over the built modes.
    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn contains(&self, x: f64) -> bool {
        (0.0..=self.bc.length).contains(&x)
    }

    /// `f_{i+1}(x)`, checking that `x` lies in `[0, L]`.
    pub fn evaluate(&self, i: usize, x: f64) -> Result<f64> {
        if i >= self.modes.len() {
            return Err(Error::invalid("mode", alloc::format!("index {i} beyond {} built modes", self.modes.len())));
        }
        if !self.contains(x) {
            return Err(Error::OutOfDomain { t: f64::NAN, x });
        }
        Ok(self.modes[i].value(x))
    }

    /// Writes `f_1(x), ..., f_k(x)` into `out` (`k = out.len()`).
    pub fn eval_all(&self, x: f64, out: &mut [f64]) {
        for (o, m) in out.iter_mut().zip(&self.modes) {
            *o = m.value(x);
        }
    }

    pub fn values_at(&self, x: f64, count: usize) -> Vec<f64> {
        let mut out = vec![0.0; count.min(self.modes.len())];
        self.eval_all(x, &mut out);
        out
    }

    /// `<phi, f_n>` for every built mode, by quadrature.
    pub fn expand(&self, phi: impl Fn(f64) -> f64) -> Vec<f64> {
        let samples: Vec<f64> = self.quadrature.nodes.iter().map(|&x| phi(x)).collect();
        self.modes
            .iter()
            .map(|m| {
                self.quadrature
                    .nodes
                    .iter()
                    .zip(&self.quadrature.weights)
                    .zip(&samples)
                    .map(|((&x, &w), &p)| w * p * m.value(x))
                    .sum()
            })
            .collect()
    }

    /// `sum_n c_n f_n(x)`.
    pub fn reconstruct(&self, coeffs: &[f64], x: f64) -> f64 {
        coeffs.iter().zip(&self.modes).map(|(c, m)| c * m.value(x)).sum()
    }

    /// `<f_i, f_j>` by the stored quadrature.
    pub fn inner(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.modes[i], &self.modes[j]);
        self.quadrature.integrate(|x| a.value(x) * b.value(x))
    }

    /// Checks the large-`n` law `eta_n = pi (n0 + n) / L + O(1/n)`.
    pub fn asymptotics(&self) -> Result<AsymptoticsReport> {
        if !self.bc.is_robin() {
            return Err(Error::NotRobin);
        }
        let n = self.modes.len();
        if n < 16 {
            return Err(Error::TooFewModes { have: n, need: 16 });
        }
        let l = self.bc.length;
        let top = n - n / 4;
        let shift: f64 =
            (top..n).map(|i| self.modes[i].eta() * l / PI - (i + 1) as f64).sum::<f64>() / (n - top) as f64;
        let n0 = shift.round() as i64;
        let mut residuals = Vec::new();
        let mut norm_trend = Vec::new();
        for (i, m) in self.modes.iter().enumerate() {
            if let ModeShape::Trig { eta, .. } = m.shape {
                let k = (i + 1) as f64;
                residuals.push((i + 1, k * (eta - PI * (n0 as f64 + k) / l).abs()));
                norm_trend.push((i + 1, m.norm * m.norm * 0.5 * l));
            }
        }
        Ok(AsymptoticsReport { n0, residuals, norm_trend })
    }
}

fn growth_constant(modes: &[Mode]) -> f64 {
    let c = modes
        .iter()
        .enumerate()
        .skip(2)
        .map(|(i, m)| m.lambda / ((i + 1) * (i + 1)) as f64)
        .fold(f64::INFINITY, f64::min);
    if c.is_finite() {
        return c;
    }
    // Fewer than three modes: fall back to the positive ones.
    modes
        .iter()
        .enumerate()
        .filter(|(_, m)| m.lambda > 0.0)
        .map(|(i, m)| m.lambda / ((i + 1) * (i + 1)) as f64)
        .fold(f64::INFINITY, f64::min)
}

/// `g(eta) / eta`: smooth at 0 with limit `L alpha beta - (beta - alpha)`.
fn robin_g(eta: f64, alpha: f64, beta: f64, l: f64) -> f64 {
    let sinc = if (eta * l).abs() < 1e-8 { l } else { (eta * l).sin() / eta };
    sinc * (eta * eta + alpha * beta) - (beta - alpha) * (eta * l).cos()
}

/// Hyperbolic analogue; roots `kappa > 0` give eigenvalues `-kappa^2 / 2`.
fn robin_h(kappa: f64, alpha: f64, beta: f64, l: f64) -> f64 {
    let tanhc = if (kappa * l).abs() < 1e-8 { l } else { (kappa * l).tanh() / kappa };
    tanhc * (kappa * kappa - alpha * beta) + (beta - alpha)
}

/// The residual `g(eta) = sin(eta L)(eta^2 + alpha beta) - cos(eta L)(beta - alpha) eta`
/// relative to its local amplitude.
pub fn robin_residual(eta: f64, alpha: f64, beta: f64, l: f64) -> f64 {
    let a = eta * eta + alpha * beta;
    let b = (beta - alpha) * eta;
    let g = (eta * l).sin() * a - (eta * l).cos() * b;
    let amp = (a * a + b * b).sqrt();
    if amp > 0.0 {
        (g / amp).abs()
    } else {
        g.abs()
    }
}

const DEDUPE: f64 = 1e-8;

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign-change scan of `f` on `(lo, hi]`, bisecting each bracket.
fn scan_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64, want: usize, roots: &mut Vec<f64>, merged: &mut usize) {
    let mut a = lo;
    let mut fa = f(a);
    while a < hi && roots.len() < want {
        let b = (a + step).min(hi);
        let fb = f(b);
        if fa == 0.0 && a > lo {
            push_root(roots, a, merged);
        } else if (fa < 0.0) != (fb < 0.0) && fb != 0.0 {
            push_root(roots, bisect(&f, a, b), merged);
        }
        a = b;
        fa = fb;
    }
}

fn push_root(roots: &mut Vec<f64>, r: f64, merged: &mut usize) {
    if let Some(&last) = roots.last() {
        if (r - last).abs() < DEDUPE {
            *merged += 1;
            return;
        }
    }
    roots.push(r);
}

fn robin_modes(alpha: f64, beta: f64, l: f64, n: usize) -> Result<(Vec<Mode>, RootReport)> {
    let step = (PI / (4.0 * l)).min(0.01);
    let mut merged = 0;
    let mut modes = Vec::with_capacity(n);

    // Negative part of the spectrum: at most two modes, all with kappa below
    // |beta - alpha| + sqrt(|alpha beta| + |beta - alpha| / L) + 1.
    let kmax = (beta - alpha).abs() + ((alpha * beta).abs() + (beta - alpha).abs() / l).sqrt() + 1.0;
    let mut kappas = Vec::new();
    scan_roots(|k| robin_h(k, alpha, beta, l), step.min(kmax) * 1e-3, kmax, step.min(1e-3), 2, &mut kappas, &mut merged);
    for &kappa in kappas.iter().rev() {
        modes.push(Mode::new(-0.5 * kappa * kappa, ModeShape::Hyperbolic { kappa, alpha }, l));
    }
    if zero_mode_condition(alpha, beta, l) {
        modes.push(Mode::new(0.0, ModeShape::Linear { alpha }, l));
    }

    let need = n.saturating_sub(modes.len());
    let mut etas = Vec::with_capacity(need);
    let mut lo = step;
    let mut hi = PI * (n + 2) as f64 / l;
    let limit = 4.0 * hi + 10.0;
    loop {
        scan_roots(|e| robin_g(e, alpha, beta, l), lo, hi, step, need, &mut etas, &mut merged);
        if etas.len() >= need {
            break;
        }
        if hi >= limit {
            return Err(Error::RootBracket { wanted: n, found: modes.len() + etas.len(), lo: step, hi });
        }
        lo = hi;
        hi = (2.0 * hi).min(limit);
    }
    let residuals = etas.iter().map(|&e| robin_residual(e, alpha, beta, l)).collect();
    for &eta in &etas {
        modes.push(Mode::new(0.5 * eta * eta, ModeShape::Trig { eta, alpha }, l));
    }
    modes.truncate(n);
    Ok((modes, RootReport { residuals, merged, scan_upper: hi }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_closed_form() {
        let es = EigenSystem::build(BoundaryCondition::dirichlet(PI), 4).unwrap();
        let want = [0.5, 2.0, 4.5, 8.0];
        for (l, w) in es.lambdas().iter().zip(want) {
            assert!((l - w).abs() < 1e-12);
        }
        let x = 0.7;
        assert!((es.mode(0).value(x) - (2.0 / PI).sqrt() * x.sin()).abs() < 1e-14);
        assert_eq!(es.mode(0).value(0.0), 0.0);
        assert!(es.mode(0).value(PI).abs() < 1e-15);
        assert!(es.mode(2).derivative(0.0) > 0.0);
    }

    #[test]
    fn neumann_closed_form() {
        let es = EigenSystem::build(BoundaryCondition::neumann(1.0), 3).unwrap();
        assert_eq!(es.mode(0).lambda, 0.0);
        assert!((es.mode(0).value(0.4) - 1.0).abs() < 1e-15);
        let x = 0.3;
        assert!((es.mode(1).value(x) - 2f64.sqrt() * (PI * x).cos()).abs() < 1e-14);
    }

    #[test]
    fn robin_zero_parameters_reduce_to_neumann() {
        let r = EigenSystem::build(BoundaryCondition::robin(0.0, 0.0, 1.0), 5).unwrap();
        let n = EigenSystem::build(BoundaryCondition::neumann(1.0), 5).unwrap();
        for (a, b) in r.lambdas().iter().zip(n.lambdas()) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        for x in [0.0, 0.25, 0.9] {
            for i in 0..5 {
                assert!((r.mode(i).value(x) - n.mode(i).value(x)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn robin_boundary_conditions_hold() {
        let (alpha, beta) = (1.0, 2.0);
        let es = EigenSystem::build(BoundaryCondition::robin(alpha, beta, 1.0), 12).unwrap();
        for m in es.modes() {
            assert!((m.derivative(0.0) + alpha * m.value(0.0)).abs() < 1e-9);
            assert!((m.derivative(1.0) + beta * m.value(1.0)).abs() < 1e-8 * (1.0 + m.lambda));
        }
        assert!(es.root_report().unwrap().residuals.iter().all(|r| *r < 1e-12));
    }

    #[test]
    fn robin_zero_mode_iff_condition() {
        let beta = 1.0;
        let alpha = beta / (1.0 + beta);
        let es = EigenSystem::build(BoundaryCondition::robin(alpha, beta, 1.0), 4).unwrap();
        assert!(es.mode(0).lambda.abs() < 1e-12);
        assert!(matches!(es.mode(0).shape, ModeShape::Linear { .. }));
        // Below the critical alpha the spectrum is positive, above it the
        // bottom mode is hyperbolic.
        let es = EigenSystem::build(BoundaryCondition::robin(0.5, 2.0, 1.0), 4).unwrap();
        assert!(es.mode(0).lambda > 1e-3);
        let es = EigenSystem::build(BoundaryCondition::robin(1.0, 2.0, 1.0), 4).unwrap();
        assert!(es.mode(0).lambda < -1e-3);
        assert!(matches!(es.mode(0).shape, ModeShape::Hyperbolic { .. }));
    }

    #[test]
    fn negative_mode_for_equal_parameters() {
        // alpha = beta = a gives e(x) = exp(-a x) with lambda = -a^2 / 2 and
        // the oscillatory roots at k pi.
        let es = EigenSystem::build(BoundaryCondition::robin(0.2, 0.2, 1.0), 6).unwrap();
        assert!((es.mode(0).lambda + 0.02).abs() < 1e-12);
        let x = 0.6;
        let expect = (-0.2 * x).exp() * es.mode(0).norm;
        assert!((es.mode(0).value(x) - expect).abs() < 1e-12);
        for k in 1..6 {
            assert!((es.mode(k).eta() - PI * k as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn asymptotics_needs_robin() {
        let es = EigenSystem::build(BoundaryCondition::dirichlet(1.0), 20).unwrap();
        assert_eq!(es.asymptotics(), Err(Error::NotRobin));
        let es = EigenSystem::build(BoundaryCondition::robin(0.0, 0.0, 1.0), 20).unwrap();
        let rep = es.asymptotics().unwrap();
        assert_eq!(rep.n0, -1);
        assert!(rep.residuals.iter().all(|(_, r)| *r < 1e-9));
    }

    #[test]
    fn rejects_bad_length() {
        assert!(EigenSystem::build(BoundaryCondition::dirichlet(0.0), 3).is_err());
        assert!(EigenSystem::build(BoundaryCondition::dirichlet(-1.0), 3).is_err());
    }
}
