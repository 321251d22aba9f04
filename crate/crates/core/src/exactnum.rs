//! Exact Bernoulli numbers and polynomials, periodic Bernoulli functions and
//! Faulhaber power sums.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::{Mutex, OnceLock};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Lossy conversion used by the floating point pipelines.
pub fn to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // very large numerator or denominator: scale by bit lengths
            let nb = r.numer().bits() as i64;
            let db = r.denom().bits() as i64;
            let shift_n = (nb - 60).max(0) as usize;
            let shift_d = (db - 60).max(0) as usize;
            let n = (r.numer() >> shift_n).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift_d).to_f64().unwrap_or(1.0);
            n / d * 2f64.powi(shift_n as i32 - shift_d as i32)
        }
    }
}

/// B_0..B_max together with the coefficients of B_n(x).
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    pub max_index: usize,
    pub numbers: Vec<Rational>,
    /// `poly_coeffs[n][k]` is the coefficient of x^k in B_n(x).
    pub poly_coeffs: Vec<Vec<Rational>>,
}

impl BernoulliTable {
    pub fn new(max_index: usize) -> Self {
        let numbers = bernoulli_series(max_index);
        let mut poly_coeffs = Vec::with_capacity(max_index + 1);
        for n in 0..=max_index {
            let mut row = vec![Rational::zero(); n + 1];
            let mut binom = BigInt::one();
            // B_n(x) = sum_k C(n,k) B_{n-k} x^k
            for (k, slot) in row.iter_mut().enumerate() {
                if k > 0 {
                    binom = binom * BigInt::from(n - k + 1) / BigInt::from(k);
                }
                *slot = &numbers[n - k] * BigRational::from_integer(binom.clone());
            }
            poly_coeffs.push(row);
        }
        BernoulliTable {
            max_index,
            numbers,
            poly_coeffs,
        }
    }
}

/// Power-series inversion of (e^t - 1)/t = sum t^k/(k+1)!.
fn bernoulli_series(max: usize) -> Vec<Rational> {
    let mut fact = vec![BigInt::one()];
    for k in 1..=max + 1 {
        let next = &fact[k - 1] * BigInt::from(k);
        fact.push(next);
    }
    let a: Vec<Rational> = (0..=max)
        .map(|k| BigRational::new(BigInt::one(), fact[k + 1].clone()))
        .collect();
    // b = 1/a, b_n = -sum_{k=1}^n a_k b_{n-k}
    let mut b: Vec<Rational> = Vec::with_capacity(max + 1);
    b.push(Rational::one());
    for n in 1..=max {
        let mut s = Rational::zero();
        for k in 1..=n {
            s += &a[k] * &b[n - k];
        }
        b.push(-s);
    }
    b.iter()
        .enumerate()
        .map(|(n, bn)| bn * BigRational::from_integer(fact[n].clone()))
        .collect()
}

fn table(n: usize) -> std::sync::MutexGuard<'static, BernoulliTable> {
    static MEMO: OnceLock<Mutex<BernoulliTable>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(BernoulliTable::new(64)));
    let mut guard = memo.lock().expect("bernoulli memo poisoned");
    if guard.max_index < n {
        let target = n.max(2 * guard.max_index);
        *guard = BernoulliTable::new(target);
    }
    guard
}

pub fn bernoulli_number(n: usize) -> Rational {
    table(n).numbers[n].clone()
}

/// Coefficients of B_n(x), lowest degree first.
pub fn bernoulli_poly_coeffs(n: usize) -> Vec<Rational> {
    table(n).poly_coeffs[n].clone()
}

pub fn bernoulli_poly(n: usize, x: &Rational) -> Rational {
    let c = bernoulli_poly_coeffs(n);
    let mut acc = Rational::zero();
    for coef in c.iter().rev() {
        acc = acc * x + coef;
    }
    acc
}

/// B_k(x - floor(x)) in double precision.
pub fn periodic_bernoulli(k: usize, x: f64) -> f64 {
    let c: Vec<f64> = bernoulli_poly_coeffs(k).iter().map(to_f64).collect();
    let t = x - x.floor();
    c.iter().rev().fold(0.0, |acc, &v| acc * t + v)
}

/// Coefficient cache for repeated periodic evaluations.
#[derive(Debug, Clone)]
pub struct PeriodicBernoulli {
    coeffs: Vec<f64>,
}

impl PeriodicBernoulli {
    pub fn new(k: usize) -> Self {
        PeriodicBernoulli {
            coeffs: bernoulli_poly_coeffs(k).iter().map(to_f64).collect(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = x - x.floor();
        self.coeffs.iter().rev().fold(0.0, |acc, &v| acc * t + v)
    }
}

/// The polynomial in N agreeing with sum_{n=1}^N n^p for N >= 1.
pub fn faulhaber_sum(p: usize, n: i64) -> Rational {
    // (B_{p+1}(N+1) - B_{p+1}(1)) / (p+1)
    let x = rat_int(n + 1);
    let top = bernoulli_poly(p + 1, &x) - bernoulli_poly(p + 1, &Rational::one());
    top / rat_int(p as i64 + 1)
}

/// sum_{n=-N}^{N} n^p as an exact rational (0^0 = 1).
pub fn symmetric_power_sum(p: usize, n: i64) -> Rational {
    if p == 0 {
        return rat_int(2 * n + 1);
    }
    if p % 2 == 1 {
        return Rational::zero();
    }
    faulhaber_sum(p, n) * rat_int(2)
}

/// Falling factorial x (x-1) ... (x-k+1) of a rational.
pub fn falling_factorial(x: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc *= x - rat_int(i as i64);
    }
    acc
}

pub fn is_integer(r: &Rational) -> bool {
    r.is_integer()
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}


/// Polynomial in d variables with rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub d: usize,
    /// (coefficient, exponent vector) pairs.
    pub terms: Vec<(Rational, Vec<u32>)>,
}

impl Polynomial {
    pub fn new(d: usize, terms: Vec<(Rational, Vec<u32>)>) -> crate::error::Result<Self> {
        for (_, e) in &terms {
            crate::error::check_dim(d, e.len())?;
        }
        Ok(Polynomial { d, terms })
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(c, _)| !c.is_zero())
            .map(|(_, e)| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, n: &[i64]) -> Rational {
        let mut acc = Rational::zero();
        for (c, e) in &self.terms {
            let mut m = BigInt::one();
            for (x, &k) in n.iter().zip(e) {
                m *= num_traits::pow(BigInt::from(*x), k as usize);
            }
            acc += c * BigRational::from_integer(m);
        }
        acc
    }

    /// Terms of total degree k.
    pub fn homogeneous_part(&self, k: u32) -> Vec<(Rational, Vec<u32>)> {
        self.terms
            .iter()
            .filter(|(c, e)| !c.is_zero() && e.iter().sum::<u32>() == k)
            .cloned()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_numbers() {
        assert_eq!(bernoulli_number(0), rat_int(1));
        assert_eq!(bernoulli_number(1), rat(-1, 2));
        assert_eq!(bernoulli_number(2), rat(1, 6));
        assert_eq!(bernoulli_number(4), rat(-1, 30));
        assert_eq!(bernoulli_number(12), rat(-691, 2730));
    }

    #[test]
    fn odd_numbers_vanish() {
        for k in 1..30 {
            assert!(bernoulli_number(2 * k + 1).is_zero());
        }
    }

    #[test]
    fn poly_values() {
        assert_eq!(bernoulli_poly(1, &rat_int(5)), rat(9, 2));
        assert_eq!(bernoulli_poly(2, &rat(1, 2)), rat(-1, 12));
        for n in 0..20 {
            assert_eq!(bernoulli_poly(n, &Rational::zero()), bernoulli_number(n));
            if n >= 2 {
                assert_eq!(bernoulli_poly(n, &Rational::one()), bernoulli_number(n));
            }
        }
    }

    #[test]
    fn periodic_values() {
        assert!((periodic_bernoulli(2, 2.5) + 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(periodic_bernoulli(1, 7.0), -0.5);
        assert!((periodic_bernoulli(3, 0.3) - periodic_bernoulli(3, 1.3)).abs() < 1e-15);
    }

    #[test]
    fn faulhaber_values() {
        assert_eq!(faulhaber_sum(1, 10), rat_int(55));
        assert_eq!(faulhaber_sum(3, 4), rat_int(100));
        for p in 0..8 {
            assert!(faulhaber_sum(p, 0).is_zero());
        }
    }

    #[test]
    fn table_grows_past_initial_size() {
        let b = bernoulli_number(100);
        assert!(b < Rational::zero() || b > Rational::zero());
        assert!(bernoulli_number(101).is_zero());
    }
}
