#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use symzeta::exactnum::{rat, Polynomial, Rational};

pub fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Random polynomial with small rational coefficients, total degree <= deg.
pub fn random_polynomial<R: Rng>(rng: &mut R, d: usize, deg: u32) -> Polynomial {
    let nterms = rng.gen_range(1..=4);
    let mut terms = Vec::new();
    for _ in 0..nterms {
        let total = rng.gen_range(0..=deg);
        let mut e = vec![0u32; d];
        for _ in 0..total {
            e[rng.gen_range(0..d)] += 1;
        }
        let num = rng.gen_range(-9i64..=9);
        let den = rng.gen_range(1i64..=4);
        terms.push((rat(num, den), e));
    }
    Polynomial::new(d, terms).unwrap()
}

/// Sum of p over the cube |n|_sup <= n by enumeration.
pub fn brute_cube_sum(p: &Polynomial, n: i64) -> Rational {
    let d = p.d;
    let mut idx = vec![-n; d];
    let mut acc = rat(0, 1);
    loop {
        acc += p.eval(&idx);
        let mut i = 0;
        loop {
            if i == d {
                return acc;
            }
            idx[i] += 1;
            if idx[i] > n {
                idx[i] = -n;
                i += 1;
            } else {
                break;
            }
        }
    }
}

/// Symmetric difference (f(h) - f(-h)) / 2h at two steps, Richardson combined.
pub fn richardson_derivative(f: &dyn Fn(f64) -> f64, h: f64) -> f64 {
    let d1 = (f(h) - f(-h)) / (2.0 * h);
    let d2 = (f(h / 2.0) - f(-h / 2.0)) / h;
    (4.0 * d2 - d1) / 3.0
}

/// Gamma(1/4).
pub const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;
