//! Real functions of one variable used as drift, diffusion coefficients and
//! initial profiles.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::rng::NoiseStream;

/// Piecewise-linear interpolant through `(x, f(x))` nodes, constant beyond the
/// end nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Table {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::invalid("table", "need at least two (x, y) rows of equal length"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("table", "x column must be strictly increasing"));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("table", "non-finite entry"));
        }
        Ok(Table { xs, ys })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let hi = self.xs.partition_point(|&v| v <= x);
        let lo = hi - 1;
        let w = (x - self.xs[lo]) / (self.xs[hi] - self.xs[lo]);
        self.ys[lo] + w * (self.ys[hi] - self.ys[lo])
    }

    pub fn lipschitz(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.ys.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

type Custom = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function of one real variable.
#[derive(Clone)]
pub enum ScalarFn {
    Zero,
    Constant(f64),
    Identity,
    Cos,
    /// `offset + sin(u)`
    SinPlus(f64),
    Affine { slope: f64, intercept: f64 },
    /// `(1 - s^2)^3` with `s = (x - center) / half_width`, zero outside: a C^2 bump.
    Bump { center: f64, half_width: f64 },
    Table(Table),
    Custom { f: Custom, lipschitz: Option<f64>, bounded: bool },
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Zero => write!(f, "Zero"),
            ScalarFn::Constant(c) => write!(f, "Constant({c})"),
            ScalarFn::Identity => write!(f, "Identity"),
            ScalarFn::Cos => write!(f, "Cos"),
            ScalarFn::SinPlus(c) => write!(f, "SinPlus({c})"),
            ScalarFn::Affine { slope, intercept } => write!(f, "Affine({slope}, {intercept})"),
            ScalarFn::Bump { center, half_width } => write!(f, "Bump({center}, {half_width})"),
            ScalarFn::Table(t) => write!(f, "Table({} nodes)", t.xs.len()),
            ScalarFn::Custom { lipschitz, bounded, .. } => {
                write!(f, "Custom(lipschitz = {lipschitz:?}, bounded = {bounded})")
            }
        }
    }
}

impl ScalarFn {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFn::Custom { f: Arc::new(f), lipschitz: None, bounded: false }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ScalarFn::Zero => 0.0,
            ScalarFn::Constant(c) => *c,
            ScalarFn::Identity => x,
            ScalarFn::Cos => x.cos(),
            ScalarFn::SinPlus(c) => c + x.sin(),
            ScalarFn::Affine { slope, intercept } => slope * x + intercept,
            ScalarFn::Bump { center, half_width } => {
                let s = (x - center) / half_width;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    let q = 1.0 - s * s;
                    q * q * q
                }
            }
            ScalarFn::Table(t) => t.eval(x),
            ScalarFn::Custom { f, .. } => f(x),
        }
    }

    /// Known global Lipschitz constant, if any.
    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            ScalarFn::Zero | ScalarFn::Constant(_) => Some(0.0),
            ScalarFn::Identity => Some(1.0),
            ScalarFn::Cos | ScalarFn::SinPlus(_) => Some(1.0),
            ScalarFn::Affine { slope, .. } => Some(slope.abs()),
            // max |d/ds (1-s^2)^3| = 6 s (1-s^2)^2 at s = 1/sqrt(5)
            ScalarFn::Bump { half_width, .. } => Some(96.0 / (25.0 * 5.0.sqrt()) / half_width),
            ScalarFn::Table(t) => Some(t.lipschitz()),
            ScalarFn::Custom { lipschitz, .. } => *lipschitz,
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            ScalarFn::Identity => false,
            ScalarFn::Affine { slope, .. } => *slope == 0.0,
            ScalarFn::Custom { bounded, .. } => *bounded,
            _ => true,
        }
    }

    /// True when the function is a constant map (zero included).
    pub fn is_constant(&self) -> bool {
        match self {
            ScalarFn::Zero | ScalarFn::Constant(_) => true,
            ScalarFn::Affine { slope, .. } => *slope == 0.0,
            _ => false,
        }
    }
}

/// Drift `b` and diffusion `sigma` of the nonlinear equation together with
/// their declared Lipschitz constants.
#[derive(Debug, Clone)]
pub struct Coefficients {
    pub b: ScalarFn,
    pub sigma: ScalarFn,
    pub b_lipschitz: f64,
    pub sigma_lipschitz: f64,
}

impl Coefficients {
    /// Uses each function's known Lipschitz constant; custom functions must
    /// declare one.
    pub fn new(b: ScalarFn, sigma: ScalarFn) -> Result<Self> {
        let b_lipschitz = b
            .lipschitz()
            .ok_or_else(|| Error::invalid("b", "custom drift needs a declared Lipschitz constant"))?;
        let sigma_lipschitz = sigma
            .lipschitz()
            .ok_or_else(|| Error::invalid("sigma", "custom diffusion needs a declared Lipschitz constant"))?;
        Ok(Coefficients { b, sigma, b_lipschitz, sigma_lipschitz })
    }

    pub fn additive() -> Self {
        Coefficients { b: ScalarFn::Zero, sigma: ScalarFn::Constant(1.0), b_lipschitz: 0.0, sigma_lipschitz: 0.0 }
    }

    pub fn bounded(&self) -> bool {
        self.b.is_bounded() && self.sigma.is_bounded()
    }

    /// Checks `|f(x) - f(y)| <= L |x - y|` on `pairs` random pairs in
    /// `[-range, range]` for both coefficients.
    pub fn validate(&self, pairs: usize, range: f64, seed: u64) -> Result<()> {
        let mut stream = NoiseStream::new(seed, 0x11b5_c0ef);
        for (name, f, lip) in [("b", &self.b, self.b_lipschitz), ("sigma", &self.sigma, self.sigma_lipschitz)] {
            for _ in 0..pairs {
                let x = range * (2.0 * stream.uniform() - 1.0);
                let y = range * (2.0 * stream.uniform() - 1.0);
                let lhs = (f.eval(x) - f.eval(y)).abs();
                if lhs > lip * (x - y).abs() * (1.0 + 1e-9) + 1e-12 {
                    return Err(Error::invalid(
                        name,
                        alloc::format!("declared Lipschitz constant {lip} violated at ({x}, {y})"),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn table_interpolates_and_clamps() {
        let t = Table::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(t.eval(0.5), 1.0);
        assert_eq!(t.eval(1.5), 1.0);
        assert_eq!(t.eval(-3.0), 0.0);
        assert_eq!(t.eval(9.0), 0.0);
        assert_eq!(t.lipschitz(), 2.0);
        assert!(Table::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn bump_is_supported_and_lipschitz() {
        let f = ScalarFn::Bump { center: 0.5, half_width: 0.2 };
        assert_eq!(f.eval(0.29), 0.0);
        assert_eq!(f.eval(0.5), 1.0);
        let lip = f.lipschitz().unwrap();
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for i in 0..1000 {
            let x = 0.3 + 0.4 * i as f64 / 1000.0;
            worst = worst.max((f.eval(x + h) - f.eval(x)).abs() / h);
        }
        assert!(worst <= lip * 1.0001 && worst > 0.99 * lip);
    }

    #[test]
    fn declared_lipschitz_is_checked() {
        let ok = Coefficients::new(ScalarFn::Cos, ScalarFn::SinPlus(2.0)).unwrap();
        ok.validate(1000, 10.0, 7).unwrap();
        let bad = Coefficients {
            b: ScalarFn::Affine { slope: 3.0, intercept: 0.0 },
            sigma: ScalarFn::Constant(1.0),
            b_lipschitz: 1.0,
            sigma_lipschitz: 0.0,
        };
        assert!(bad.validate(1000, 10.0, 7).is_err());
    }
}
