use alloc::sync::Arc;
use alloc::vec::Vec;

use super::SpaceTimePoint;
use crate::error::{Error, Result};

/// Tensor grid of observation times and positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub times: Vec<f64>,
    pub xs: Vec<f64>,
}

impl Grid {
    pub fn new(times: Vec<f64>, xs: Vec<f64>) -> Result<Self> {
        if times.is_empty() || xs.is_empty() {
            return Err(Error::invalid("grid", "needs at least one time and one position"));
        }
        if times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("times", "must be nonnegative and strictly increasing"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("xs", "must be strictly increasing"));
        }
        Ok(Grid { times, xs })
    }

    pub fn nt(&self) -> usize {
        self.times.len()
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn time_index(&self, t: f64) -> Option<usize> {
        find(&self.times, t)
    }

    pub fn x_index(&self, x: f64) -> Option<usize> {
        find(&self.xs, x)
    }

    pub fn point(&self, i: usize, j: usize) -> SpaceTimePoint {
        SpaceTimePoint::new(self.times[i], self.xs[j])
    }
}

fn find(v: &[f64], target: f64) -> Option<usize> {
    let tol = 1e-9 * target.abs().max(1e-3);
    let i = v.partition_point(|&a| a < target - tol);
    (i < v.len() && (v[i] - target).abs() <= tol).then_some(i)
}

/// Key from which the noise that drove a path can be regenerated exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseRecord {
    /// No noise (deterministic run).
    None,
    /// One Gaussian per mode and step: stream `stream`, block = step.
    Modal { seed: u64, stream: u64, modes: usize },
    /// One Gaussian per fine space-time cell: stream `stream`, block = fine
    /// step, index = fine cell.
    Cells { seed: u64, stream: u64, fine_cells: usize, fine_steps: usize },
}

/// One realization on a grid; values are stored row by row (time-major).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPath {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
    pub noise: NoiseRecord,
}

impl FieldPath {
    pub fn nt(&self) -> usize {
        self.grid.nt()
    }

    pub fn nx(&self) -> usize {
        self.grid.nx()
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.nx() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let nx = self.grid.nx();
        &self.values[i * nx..(i + 1) * nx]
    }

    /// Value at a stored grid point; anything else is rejected.
    pub fn at(&self, z: SpaceTimePoint) -> Result<f64> {
        match (self.grid.time_index(z.t), self.grid.x_index(z.x)) {
            (Some(i), Some(j)) => Ok(self.value(i, j)),
            _ => Err(Error::OffGrid { t: z.t, x: z.x }),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Applies `f` to every value, keeping grid and noise key.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> FieldPath {
        FieldPath { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn grid_lookup_is_exact_up_to_rounding() {
        let g = Grid::new(vec![0.1, 0.2, 0.30000000000000004], vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(g.time_index(0.3), Some(2));
        assert_eq!(g.time_index(0.25), None);
        assert_eq!(g.x_index(0.0), Some(0));
        assert!(Grid::new(vec![0.2, 0.1], vec![0.0]).is_err());
    }
}
