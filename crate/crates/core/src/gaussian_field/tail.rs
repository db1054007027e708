//! Continuous-spectrum model of the modes above a cutoff frequency `K`.
//!
//! Far from the boundary `f_n(x) f_n(y)` averages to `(1/L) cos(k (x - y))`
//! with `lambda = k^2 / 2` and `L / pi` modes per unit `k`, so each tail sum
//! becomes `(1/pi) int_K^inf cos(k a) J(k) dk`. Everything reduces to
//!
//! * `A(c)  = int_K^inf (1 - exp(-c k^2)) / k^2 dk`
//! * `E0(c) = int_K^inf exp(-c k^2) / k^2 dk`
//! * `Q(a, c) = int_K^inf (1 - cos(k a)) exp(-c k^2) / k^2 dk`
//!
//! where `A` and `E0` are closed forms in `erfc` and `Q` is integrated
//! numerically up to a point where three terms of integration by parts are
//! exact to rounding.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::quadrature::GaussLegendre;

/// Tail part of `E[w(t, x) w(s, y)]` with `a = x - y`.
pub(crate) fn covariance(k: f64, a: f64, t: f64, s: f64) -> f64 {
    let half_sum = 0.5 * (t + s);
    let half_gap = 0.5 * (t - s).abs();
    (big_a(k, half_sum) - big_a(k, half_gap) - q(k, a, half_sum) + q(k, a, half_gap)) / PI
}

/// Tail part of `E|w(t, x) - w(s, y)|^2`, arranged without cancellation
/// between large terms.
pub(crate) fn increment(k: f64, a: f64, t: f64, s: f64) -> f64 {
    let half_sum = 0.5 * (t + s);
    let half_gap = 0.5 * (t - s).abs();
    (2.0 * big_a(k, half_gap) + 2.0 * q(k, a, half_gap) + 2.0 * e0(k, half_sum)
        - e0(k, t)
        - e0(k, s)
        - 2.0 * q(k, a, half_sum))
        / PI
}

pub(crate) fn big_a(k: f64, c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    -(-c * k * k).exp_m1() / k + (PI * c).sqrt() * libm::erfc(k * c.sqrt())
}

pub(crate) fn e0(k: f64, c: f64) -> f64 {
    if c <= 0.0 {
        return 1.0 / k;
    }
    let e = (-c * k * k).exp() / k - (PI * c).sqrt() * libm::erfc(k * c.sqrt());
    e.max(0.0)
}

/// Oscillations integrated numerically before switching to the asymptotic
/// expansion.
const OSCILLATIONS: f64 = 200.0;
/// `exp(-45)` is below double precision relative to the integrand's start.
const GAUSS_CUT: f64 = 45.0;

pub(crate) fn q(k: f64, a: f64, c: f64) -> f64 {
    let a = a.abs();
    if a == 0.0 || c * k * k > GAUSS_CUT {
        return 0.0;
    }
    let m = if c > 0.0 { (GAUSS_CUT / c).sqrt().max(k) } else { f64::INFINITY };
    let k1 = m.min(k + OSCILLATIONS * 2.0 * PI / a);
    let integrand = |x: f64| {
        let s = (0.5 * x * a).sin();
        2.0 * s * s * (-c * x * x).exp() / (x * x)
    };
    let mut total = panels(integrand, k, k1, a, c);
    if k1 < m {
        total += e0(k1, c) - cos_tail(k1, a, c);
    }
    total
}

/// `int_k1^inf cos(x a) g(x) dx` for `g = exp(-c x^2) / x^2`, by three terms
/// of integration by parts.
fn cos_tail(k1: f64, a: f64, c: f64) -> f64 {
    let e = (-c * k1 * k1).exp();
    let g = e / (k1 * k1);
    let g1 = -2.0 * e * (c / k1 + 1.0 / (k1 * k1 * k1));
    let k2 = k1 * k1;
    let g2 = 2.0 * e * (2.0 * c * c + 3.0 * c / k2 + 3.0 / (k2 * k2));
    let (s, co) = (k1 * a).sin_cos();
    -s * g / a - co * g1 / (a * a) + s * g2 / (a * a * a)
}

/// Composite 16-point Gauss-Legendre on geometric panels, each refined so a
/// sub-panel spans at most half an oscillation and a change of 2 in the
/// Gaussian exponent.
fn panels(f: impl Fn(f64) -> f64, lo: f64, hi: f64, a: f64, c: f64) -> f64 {
    let rule = GaussLegendre::new(16);
    let mut total = 0.0;
    let mut p = lo;
    while p < hi {
        let q = (2.0 * p).min(hi);
        let width = q - p;
        let by_osc = width * a / PI;
        let by_gauss = c * (q * q - p * p) / 2.0;
        let sub = (by_osc.max(by_gauss).ceil() as usize).max(1);
        let h = width / sub as f64;
        for i in 0..sub {
            let mid = p + h * (i as f64 + 0.5);
            let mut s = 0.0;
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                s += w * f(mid + 0.5 * h * x);
            }
            total += 0.5 * h * s;
        }
        p = q;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::composite;

    #[test]
    fn closed_forms_match_quadrature() {
        let k = 50.0;
        let rule = GaussLegendre::new(32);
        for c in [1e-5, 1e-4, 1e-3] {
            let hi = (60.0 / c).sqrt();
            let a = composite(|x| (1.0 - (-c * x * x).exp()) / (x * x), k, hi, 4000, &rule) + 1.0 / hi;
            assert!((big_a(k, c) - a).abs() < 1e-10 * a.max(1e-3), "A({c})");
            let e = composite(|x| (-c * x * x).exp() / (x * x), k, hi, 4000, &rule);
            assert!((e0(k, c) - e).abs() < 1e-10, "E0({c})");
        }
    }

    #[test]
    fn oscillatory_integral_matches_brute_force() {
        let k = 50.0;
        let rule = GaussLegendre::new(32);
        for (a, c) in [(0.01, 1e-6), (0.05, 0.0), (0.2, 1e-7), (1e-3, 1e-9)] {
            let hi = 2.0e5;
            let f = |x: f64| (1.0 - (x * a).cos()) * (-c * x * x).exp() / (x * x);
            let mut brute = composite(f, k, hi, 200_000, &rule);
            // Remaining piece beyond hi, averaged cos term.
            brute += (-c * hi * hi).exp() / hi;
            let got = q(k, a, c);
            assert!((got - brute).abs() < 1e-7 * brute.max(1e-6), "Q({a}, {c}): {got} vs {brute}");
        }
    }
}
