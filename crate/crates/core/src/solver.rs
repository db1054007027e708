//! Pseudo-spectral exponential-Euler scheme for
//! `du = 1/2 u'' dt + b(u) dt + sigma(u) xi` in mild form, run together with
//! the additive-noise field `w` on the same noise.
//!
//! The state is the coefficient vector `a_n` of `u = sum a_n f_n`. One step:
//!
//! ```text
//! u_j  = sum_n a_n f_n(x_j)                       (cell centers)
//! F_j  = b(u_j) dt dx + sigma(u_j) M_j            (M_j ~ N(0, dt dx), cell mass)
//! a_n <- exp(-lambda_n dt) (a_n + sum_j f_n(x_j) F_j)
//! ```
//!
//! Coefficients are evaluated at the start of the step. `w` uses the same
//! masses with `b = 0`, `sigma = 1` and zero initial data.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::functions::Coefficients;
use crate::gaussian_field::{FieldPath, Grid, NoiseRecord, SpaceTimePoint};
use crate::heatkernel::InitialData;
use crate::rng::NoiseStream;
use crate::spectral::EigenSystem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub dt: f64,
    /// Number of collocation cells `J`; `dx = L / J`.
    pub cells: usize,
    pub modes: usize,
    pub steps: usize,
}

impl SchemeConfig {
    /// Steps are `round(horizon / dt)`; the horizon must be a multiple of `dt`.
    pub fn new(dt: f64, cells: usize, modes: usize, horizon: f64) -> Result<Self> {
        let steps = (horizon / dt).round();
        if !(horizon > 0.0) || (steps * dt - horizon).abs() > 1e-9 * horizon {
            return Err(Error::Config(alloc::format!("horizon {horizon} is not a positive multiple of dt = {dt}")));
        }
        Ok(SchemeConfig { dt, cells, modes, steps: steps as usize })
    }

    pub fn validate(&self, es: &EigenSystem) -> Result<()> {
        if !(self.dt > 0.0) || self.dt >= 1.0 {
            return Err(Error::Config(alloc::format!("dt = {} outside (0, 1)", self.dt)));
        }
        if self.modes < 8 {
            return Err(Error::Config(alloc::format!("{} modes; the scheme needs at least 8", self.modes)));
        }
        if self.modes > es.len() {
            return Err(Error::Config(alloc::format!("{} modes requested, eigen-system has {}", self.modes, es.len())));
        }
        if self.cells == 0 || self.steps == 0 {
            return Err(Error::Config("need at least one cell and one step".into()));
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }
}

/// Steps and cells at which the fields are recorded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationPlan {
    pub steps: Vec<usize>,
    pub cells: Vec<usize>,
}

impl ObservationPlan {
    pub fn new(steps: Vec<usize>, cells: Vec<usize>) -> Result<Self> {
        if steps.is_empty() || cells.is_empty() {
            return Err(Error::Config("observation plan needs steps and cells".into()));
        }
        if steps.windows(2).any(|w| w[1] <= w[0]) || cells.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("observation steps and cells must be strictly increasing".into()));
        }
        Ok(ObservationPlan { steps, cells })
    }

    /// Every cell at the final step.
    pub fn terminal(cfg: &SchemeConfig) -> Self {
        ObservationPlan { steps: vec![cfg.steps], cells: (0..cfg.cells).collect() }
    }
}

/// Where the cell masses come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseSource {
    Off,
    /// Masses are sums over a grid finer by `refine_t` in time and `refine_x`
    /// in space, so runs at different resolutions share one noise.
    White { seed: u64, stream: u64, refine_t: usize, refine_x: usize },
}

impl NoiseSource {
    pub fn white(seed: u64, stream: u64) -> Self {
        NoiseSource::White { seed, stream, refine_t: 1, refine_x: 1 }
    }
}

/// Solver output: `u`, `w` and the deterministic flow `G_t * u0` on the
/// observation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPaths {
    pub u: FieldPath,
    pub w: FieldPath,
    pub flow: Arc<Vec<f64>>,
    /// Minimum of `u` over every cell and step; over the observed values only
    /// when both coefficients are constant.
    pub min_u: f64,
}

impl CoupledPaths {
    pub fn grid(&self) -> &Grid {
        &self.u.grid
    }

    pub fn flow_value(&self, i: usize, j: usize) -> f64 {
        self.flow[i * self.u.nx() + j]
    }

    /// `u(z') - u(z) - [flow(z') - flow(z)] - sigma(u(z)) (w(z') - w(z))` at
    /// grid indices `(i, j)` and `(k, l)`.
    pub fn linearization_error_at(&self, sigma: &crate::ScalarFn, (i, j): (usize, usize), (k, l): (usize, usize)) -> f64 {
        let u0 = self.u.value(i, j);
        let du = self.u.value(k, l) - u0;
        let dflow = self.flow_value(k, l) - self.flow_value(i, j);
        let dw = self.w.value(k, l) - self.w.value(i, j);
        du - dflow - sigma.eval(u0) * dw
    }

    /// As [`Self::linearization_error_at`] for stored points; off-grid points
    /// are rejected.
    pub fn linearization_error(&self, sigma: &crate::ScalarFn, z: SpaceTimePoint, zp: SpaceTimePoint) -> Result<f64> {
        let g = self.grid();
        let idx = |p: SpaceTimePoint| match (g.time_index(p.t), g.x_index(p.x)) {
            (Some(i), Some(j)) => Ok((i, j)),
            _ => Err(Error::OffGrid { t: p.t, x: p.x }),
        };
        Ok(self.linearization_error_at(sigma, idx(z)?, idx(zp)?))
    }
}

#[derive(Debug, Clone)]
pub struct Solver<'a> {
    es: &'a EigenSystem,
    cfg: SchemeConfig,
    coeffs: Coefficients,
    basis: Vec<f64>,
    /// `sum_j f_n(x_j)`, the projection of a unit forcing.
    column_sums: Vec<f64>,
    decay: Vec<f64>,
    xs: Vec<f64>,
    dx: f64,
}

impl<'a> Solver<'a> {
    pub fn new(es: &'a EigenSystem, cfg: SchemeConfig, coeffs: Coefficients) -> Result<Self> {
        cfg.validate(es)?;
        let n = cfg.modes;
        let dx = es.length() / cfg.cells as f64;
        let xs: Vec<f64> = (0..cfg.cells).map(|j| (j as f64 + 0.5) * dx).collect();
        let mut basis = vec![0.0; cfg.cells * n];
        for (j, &x) in xs.iter().enumerate() {
            es.eval_all(x, &mut basis[j * n..(j + 1) * n]);
        }
        let mut column_sums = vec![0.0; n];
        for row in basis.chunks_exact(n) {
            axpy(1.0, row, &mut column_sums);
        }
        let decay = es.modes()[..n].iter().map(|m| (-m.lambda * cfg.dt).exp()).collect();
        Ok(Solver { es, cfg, coeffs, basis, column_sums, decay, xs, dx })
    }

    pub fn eigensystem(&self) -> &'a EigenSystem {
        self.es
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Fixes initial data and observation plan; the result runs replicates.
    pub fn prepare(&self, u0: &InitialData, plan: &ObservationPlan) -> Result<CoupledRun<'_, 'a>> {
        if plan.steps.last().copied().unwrap_or(0) > self.cfg.steps || plan.cells.last().copied().unwrap_or(0) >= self.cfg.cells
        {
            return Err(Error::Config("observation plan exceeds the scheme grid".into()));
        }
        let n = self.cfg.modes;
        let a0 = u0.coefficients[..n].to_vec();
        let times: Vec<f64> = plan.steps.iter().map(|&k| k as f64 * self.cfg.dt).collect();
        let xs: Vec<f64> = plan.cells.iter().map(|&j| self.xs[j]).collect();
        let grid = Arc::new(Grid::new(times, xs)?);
        let mut flow = Vec::with_capacity(grid.nt() * grid.nx());
        for &k in &plan.steps {
            let t = k as f64 * self.cfg.dt;
            let decay: Vec<f64> = self.es.modes()[..n].iter().map(|m| (-m.lambda * t).exp()).collect();
            for &j in &plan.cells {
                let row = &self.basis[j * n..(j + 1) * n];
                flow.push((0..n).map(|m| decay[m] * a0[m] * row[m]).sum());
            }
        }
        Ok(CoupledRun { solver: self, a0, plan: plan.clone(), grid, flow: Arc::new(flow) })
    }
}

#[derive(Debug, Clone)]
pub struct CoupledRun<'s, 'a> {
    solver: &'s Solver<'a>,
    a0: Vec<f64>,
    plan: ObservationPlan,
    grid: Arc<Grid>,
    flow: Arc<Vec<f64>>,
}

impl CoupledRun<'_, '_> {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn flow(&self) -> &Arc<Vec<f64>> {
        &self.flow
    }

    pub fn run(&self, noise: NoiseSource) -> Result<CoupledPaths> {
        let s = self.solver;
        let cfg = &s.cfg;
        let (n, cells) = (cfg.modes, cfg.cells);
        let mut a = self.a0.clone();
        let mut c = vec![0.0; n];
        let mut u = vec![0.0; cells];
        let mut masses = vec![0.0; cells];
        let nobs = self.grid.nt() * self.grid.nx();
        let mut u_obs = Vec::with_capacity(nobs);
        let mut w_obs = Vec::with_capacity(nobs);
        let mut next_obs = 0;
        let mut min_u = f64::INFINITY;
        let mut masses_src = MassSource::new(noise, cfg, s.dx);
        let additive = s.coeffs.b.is_constant() && s.coeffs.sigma.is_constant();

        let mut xi = vec![0.0; if additive { n } else { 0 }];
        let (b0, s0) = (s.coeffs.b.eval(0.0), s.coeffs.sigma.eval(0.0));

        for step in 0..=cfg.steps {
            let observe = next_obs < self.plan.steps.len() && self.plan.steps[next_obs] == step;
            if !additive || observe {
                for (j, uj) in u.iter_mut().enumerate() {
                    *uj = dot(&s.basis[j * n..(j + 1) * n], &a);
                }
            }
            if !additive {
                min_u = u.iter().copied().fold(min_u, f64::min);
            }
            if observe {
                for &j in &self.plan.cells {
                    u_obs.push(u[j]);
                    w_obs.push(dot(&s.basis[j * n..(j + 1) * n], &c));
                    if additive {
                        min_u = min_u.min(u[j]);
                    }
                }
                next_obs += 1;
            }
            if step == cfg.steps {
                break;
            }
            let noisy = masses_src.fill(step, &mut masses);
            if additive {
                // Constant coefficients: project the masses once and reuse.
                if noisy {
                    xi.iter_mut().for_each(|v| *v = 0.0);
                    for (j, &mj) in masses.iter().enumerate() {
                        axpy(mj, &s.basis[j * n..(j + 1) * n], &mut xi);
                    }
                    axpy(s0, &xi, &mut a);
                    axpy(1.0, &xi, &mut c);
                }
                if b0 != 0.0 {
                    axpy(b0 * cfg.dt * s.dx, &s.column_sums, &mut a);
                }
            } else {
                for j in 0..cells {
                    let (bj, sj) = (s.coeffs.b.eval(u[j]), s.coeffs.sigma.eval(u[j]));
                    let f = bj * cfg.dt * s.dx + if noisy { sj * masses[j] } else { 0.0 };
                    let row = &s.basis[j * n..(j + 1) * n];
                    if f != 0.0 {
                        axpy(f, row, &mut a);
                    }
                    if noisy {
                        axpy(masses[j], row, &mut c);
                    }
                }
            }
            for m in 0..n {
                a[m] *= s.decay[m];
                c[m] *= s.decay[m];
            }
            if !a[0].is_finite() || !a.iter().sum::<f64>().is_finite() {
                return Err(Error::NonFinite { step: step + 1 });
            }
        }
        let record = masses_src.record();
        let (seed, stream) = match noise {
            NoiseSource::Off => (0, 0),
            NoiseSource::White { seed, stream, .. } => (seed, stream),
        };
        let path = |values| FieldPath { grid: self.grid.clone(), values, seed, stream, noise: record };
        Ok(CoupledPaths { u: path(u_obs), w: path(w_obs), flow: self.flow.clone(), min_u })
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Cell masses `M_j` for each coarse step, built from fine-grid Gaussians.
struct MassSource {
    noise: NoiseSource,
    stream: Option<NoiseStream>,
    fine: Vec<f64>,
    refine_t: usize,
    refine_x: usize,
    scale: f64,
}

impl MassSource {
    fn new(noise: NoiseSource, cfg: &SchemeConfig, dx: f64) -> Self {
        match noise {
            NoiseSource::Off => MassSource { noise, stream: None, fine: Vec::new(), refine_t: 1, refine_x: 1, scale: 0.0 },
            NoiseSource::White { seed, stream, refine_t, refine_x } => {
                let (rt, rx) = (refine_t.max(1), refine_x.max(1));
                let fine_dt = cfg.dt / rt as f64;
                let fine_dx = dx / rx as f64;
                MassSource {
                    noise,
                    stream: Some(NoiseStream::new(seed, stream)),
                    fine: vec![0.0; cfg.cells * rx],
                    refine_t: rt,
                    refine_x: rx,
                    scale: (fine_dt * fine_dx).sqrt(),
                }
            }
        }
    }

    fn fill(&mut self, step: usize, masses: &mut [f64]) -> bool {
        let Some(rng) = self.stream.as_mut() else {
            return false;
        };
        masses.iter_mut().for_each(|m| *m = 0.0);
        let fine_cells = self.fine.len();
        for q in 0..self.refine_t {
            rng.seek_block((step * self.refine_t + q) as u64, fine_cells);
            rng.fill_normal(&mut self.fine);
            for (m, chunk) in masses.iter_mut().zip(self.fine.chunks_exact(self.refine_x)) {
                *m += chunk.iter().sum::<f64>();
            }
        }
        for m in masses.iter_mut() {
            *m *= self.scale;
        }
        true
    }

    fn record(&self) -> NoiseRecord {
        match self.noise {
            NoiseSource::Off => NoiseRecord::None,
            NoiseSource::White { seed, stream, .. } => {
                NoiseRecord::Cells { seed, stream, fine_cells: self.fine.len(), fine_steps: self.refine_t }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::ScalarFn;
    use crate::spectral::BoundaryCondition;

    #[test]
    fn deterministic_flow_is_exact() {
        let es = EigenSystem::build(BoundaryCondition::dirichlet(1.0), 16).unwrap();
        let cfg = SchemeConfig::new(1e-3, 32, 16, 0.05).unwrap();
        let coeffs = Coefficients::new(ScalarFn::Zero, ScalarFn::Zero).unwrap();
        let solver = Solver::new(&es, cfg, coeffs).unwrap();
        let u0 = InitialData::new(&es, ScalarFn::Bump { center: 0.5, half_width: 0.3 });
        let plan = ObservationPlan::terminal(&cfg);
        let run = solver.prepare(&u0, &plan).unwrap();
        let p = run.run(NoiseSource::white(1, 0)).unwrap();
        for j in 0..cfg.cells {
            assert!((p.u.value(0, j) - p.flow_value(0, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn additive_unit_noise_gives_identical_fields() {
        let es = EigenSystem::build(BoundaryCondition::neumann(1.0), 16).unwrap();
        let cfg = SchemeConfig::new(1e-3, 32, 16, 0.02).unwrap();
        let solver = Solver::new(&es, cfg, Coefficients::additive()).unwrap();
        let u0 = InitialData::zero(&es);
        let plan = ObservationPlan::new(vec![5, 20], vec![0, 7, 31]).unwrap();
        let p = solver.prepare(&u0, &plan).unwrap().run(NoiseSource::white(9, 2)).unwrap();
        assert_eq!(p.u.values, p.w.values);
    }

    #[test]
    fn constant_drift_under_neumann_grows_linearly() {
        let es = EigenSystem::build(BoundaryCondition::neumann(1.0), 16).unwrap();
        let cfg = SchemeConfig::new(1e-3, 32, 16, 0.1).unwrap();
        let coeffs = Coefficients::new(ScalarFn::Constant(1.0), ScalarFn::Zero).unwrap();
        let solver = Solver::new(&es, cfg, coeffs).unwrap();
        let p = solver.prepare(&InitialData::zero(&es), &ObservationPlan::terminal(&cfg)).unwrap().run(NoiseSource::Off).unwrap();
        for j in 0..cfg.cells {
            assert!((p.u.value(0, j) - 0.1).abs() < 1e-9, "{}", p.u.value(0, j));
        }
    }

    #[test]
    fn rejects_degenerate_configs() {
        let es = EigenSystem::build(BoundaryCondition::neumann(1.0), 16).unwrap();
        let cfg = SchemeConfig { dt: 1.0, cells: 8, modes: 8, steps: 1 };
        assert!(matches!(Solver::new(&es, cfg, Coefficients::additive()), Err(Error::Config(_))));
        let cfg = SchemeConfig { dt: 0.01, cells: 8, modes: 4, steps: 1 };
        assert!(matches!(Solver::new(&es, cfg, Coefficients::additive()), Err(Error::Config(_))));
    }
}
