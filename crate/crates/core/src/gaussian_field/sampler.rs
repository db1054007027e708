use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::path::{FieldPath, Grid, NoiseRecord};
use super::ou_variance;
use crate::error::{Error, Result};
use crate::rng::NoiseStream;
use crate::spectral::EigenSystem;

/// Exact sampler of `w` on a grid: each spectral coefficient is an
/// independent Ornstein-Uhlenbeck process started at 0 and advanced with its
/// exact Gaussian transition between consecutive grid times.
#[derive(Debug, Clone)]
pub struct OuSampler {
    grid: Arc<Grid>,
    modes: usize,
    basis: Vec<f64>,
    decay: Vec<f64>,
    sd: Vec<f64>,
}

impl OuSampler {
    pub fn new(es: &EigenSystem, modes: usize, grid: Grid) -> Result<Self> {
        if modes == 0 || modes > es.len() {
            return Err(Error::TooFewModes { have: es.len(), need: modes.max(1) });
        }
        for &x in &grid.xs {
            if !es.contains(x) {
                return Err(Error::OutOfDomain { t: 0.0, x });
            }
        }
        let mut basis = vec![0.0; grid.nx() * modes];
        for (j, &x) in grid.xs.iter().enumerate() {
            es.eval_all(x, &mut basis[j * modes..(j + 1) * modes]);
        }
        let mut decay = Vec::with_capacity(grid.nt() * modes);
        let mut sd = Vec::with_capacity(grid.nt() * modes);
        let mut prev = 0.0;
        for &t in &grid.times {
            let dt = t - prev;
            for m in &es.modes()[..modes] {
                decay.push((-m.lambda * dt).exp());
                sd.push(ou_variance(m.lambda, dt).sqrt());
            }
            prev = t;
        }
        Ok(OuSampler { grid: Arc::new(grid), modes, basis, decay, sd })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Coefficients `X_n(t_i)`, time-major.
    pub fn sample_coefficients(&self, seed: u64, stream: u64) -> Vec<f64> {
        let n = self.modes;
        let mut rng = NoiseStream::new(seed, stream);
        let mut z = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut out = Vec::with_capacity(self.grid.nt() * n);
        for i in 0..self.grid.nt() {
            rng.seek_block(i as u64, n);
            rng.fill_normal(&mut z);
            let d = &self.decay[i * n..(i + 1) * n];
            let s = &self.sd[i * n..(i + 1) * n];
            for k in 0..n {
                x[k] = d[k] * x[k] + s[k] * z[k];
            }
            out.extend_from_slice(&x);
        }
        out
    }

    pub fn sample(&self, seed: u64, stream: u64) -> FieldPath {
        let n = self.modes;
        let coeffs = self.sample_coefficients(seed, stream);
        let nx = self.grid.nx();
        let mut values = Vec::with_capacity(self.grid.nt() * nx);
        for row in coeffs.chunks_exact(n) {
            for j in 0..nx {
                let b = &self.basis[j * n..(j + 1) * n];
                values.push(b.iter().zip(row).map(|(a, c)| a * c).sum());
            }
        }
        FieldPath {
            grid: self.grid.clone(),
            values,
            seed,
            stream,
            noise: NoiseRecord::Modal { seed, stream, modes: n },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::BoundaryCondition;

    #[test]
    fn same_key_same_path() {
        let es = EigenSystem::build(BoundaryCondition::dirichlet(1.0), 32).unwrap();
        let g = Grid::new(vec![0.01, 0.02, 0.05], vec![0.25, 0.5]).unwrap();
        let s = OuSampler::new(&es, 32, g).unwrap();
        assert_eq!(s.sample(7, 3), s.sample(7, 3));
        assert_ne!(s.sample(7, 3).values, s.sample(7, 4).values);
    }
}
