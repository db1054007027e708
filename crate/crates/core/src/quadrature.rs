//! Gauss-Legendre quadrature.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// Nodes and weights on a finite interval.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `order`-point rule on `[-1, 1]` by Newton iteration on `P_order`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// The same rule mapped onto `[a, b]`.
    pub fn on_interval(order: usize, a: f64, b: f64) -> Self {
        let base = Self::new(order);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        GaussLegendre {
            nodes: base.nodes.iter().map(|x| mid + half * x).collect(),
            weights: base.weights.iter().map(|w| half * w).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule: `panels` equal panels of a `points`-point rule on `[a, b]`.
pub fn composite(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &GaussLegendre) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            s += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * s;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 64] {
            let q = GaussLegendre::on_interval(n, 0.0, 2.0);
            let deg = 2 * n - 1;
            let exact = 2f64.powi(deg as i32 + 1) / (deg as f64 + 1.0);
            let got = q.integrate(|x| x.powi(deg as i32));
            assert!((got - exact).abs() < 1e-11 * exact, "n = {n}: {got} vs {exact}");
        }
    }

    #[test]
    fn high_order_weights_sum_to_length() {
        let q = GaussLegendre::on_interval(2048, 0.0, 3.0);
        let s: f64 = q.weights.iter().sum();
        assert!((s - 3.0).abs() < 1e-12);
        assert!(q.nodes.windows(2).all(|w| w[1] > w[0]));
        let osc = q.integrate(|x| (200.0 * x).cos());
        assert!((osc - (600.0f64).sin() / 200.0).abs() < 1e-13);
    }
}
