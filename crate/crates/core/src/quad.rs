//! Gauss–Legendre rules and small adaptive integrators.

use crate::error::{Error, Result};
use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

type Rule = Arc<Vec<(f64, f64)>>;

/// Nodes and weights on [-1, 1], cached per degree.
pub fn gl_rule(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("quadrature cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let n = NonZeroUsize::new(n.max(1)).unwrap();
            let mut v: Vec<(f64, f64)> = GaussLegendre::new(n)
                .as_node_weight_pairs()
                .iter()
                .map(|&(x, w)| (x, w))
                .collect();
            v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            Arc::new(v)
        })
        .clone()
}

/// Fixed-order rule on [a, b].
pub fn gl_fixed<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, n: usize) -> Complex64 {
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    let rule = gl_rule(n);
    let mut s = Complex64::new(0.0, 0.0);
    for &(x, w) in rule.iter() {
        s += f(c + h * x) * w;
    }
    s * h
}

pub fn gl_fixed_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    gl_fixed(|x| Complex64::new(f(x), 0.0), a, b, n).re
}

/// Adaptive bisection comparing a 24-point rule on the whole interval with
/// the sum over its halves.
pub fn adaptive<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    let whole = gl_fixed(f, a, b, 24);
    let (v, err) = adapt_rec(f, a, b, whole, tol, 0);
    if err > tol.max(1e-15 * v.norm()) * 10.0 {
        return Err(Error::Accuracy {
            message: format!("adaptive quadrature on [{a}, {b}] did not converge"),
            estimate: v,
        });
    }
    Ok(v)
}

fn adapt_rec<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    depth: usize,
) -> (Complex64, f64) {
    let m = 0.5 * (a + b);
    let left = gl_fixed(f, a, m, 24);
    let right = gl_fixed(f, m, b, 24);
    let split = left + right;
    let err = (split - whole).norm();
    if err <= tol.max(4.0 * f64::EPSILON * split.norm()) || depth >= 40 {
        return (split, err);
    }
    let (l, el) = adapt_rec(f, a, m, left, 0.5 * tol, depth + 1);
    let (r, er) = adapt_rec(f, m, b, right, 0.5 * tol, depth + 1);
    (l + r, el + er)
}

pub fn adaptive_real<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let g = |x: f64| Complex64::new(f(x), 0.0);
    adaptive(&g, a, b, tol).map(|c| c.re)
}

/// Integral over [a, inf) for an integrand decaying at least like
/// x^decay with decay < -1. Geometric panels until the tail bound is below
/// `tol`.
pub fn half_line<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    decay: f64,
    tol: f64,
    min_end: f64,
) -> Result<Complex64> {
    if decay >= -1.0 {
        return Err(Error::Precondition(format!(
            "integrand decay x^{decay} is not integrable at infinity"
        )));
    }
    let mut lo = a;
    let mut hi = if a > 0.0 { 2.0 * a } else { 1.0 };
    let mut total = Complex64::new(0.0, 0.0);
    for _ in 0..400 {
        total += adaptive(f, lo, hi, tol * 1e-2)?;
        let tail = f(hi).norm() * hi / (-1.0 - decay);
        if tail < tol && hi >= min_end {
            return Ok(total);
        }
        lo = hi;
        hi *= 2.0;
    }
    Err(Error::Accuracy {
        message: "half-line integral tail did not decay".into(),
        estimate: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_weights_sum_to_two() {
        for n in [1, 5, 24, 64] {
            let s: f64 = gl_rule(n).iter().map(|p| p.1).sum();
            assert!((s - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn adaptive_handles_peaks() {
        let f = |x: f64| Complex64::new(1.0 / (1e-4 + x * x), 0.0);
        let v = adaptive(&f, -1.0, 1.0, 1e-12).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v.re - exact).abs() < 1e-9);
    }

    #[test]
    fn half_line_power() {
        let f = |x: f64| Complex64::new(x.powf(-2.5), 0.0);
        let v = half_line(&f, 1.0, -2.5, 1e-13, 0.0).unwrap();
        assert!((v.re - 1.0 / 1.5).abs() < 1e-11);
    }
}
