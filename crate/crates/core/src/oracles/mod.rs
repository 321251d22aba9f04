//! Reference values computed independently of the regularized-sum
//! machinery: theta-function Epstein zeta, multiprecision Riemann and
//! Hurwitz zeta, Dirichlet beta.

pub mod big;
mod epstein;
pub mod special;

pub use big::{BigComplex, Ctx};
pub use epstein::{epstein_oracle, EpsteinOracle};

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub precision_bits: usize,
    /// Explicit terms in the Euler–MacLaurin sum; 0 picks one.
    pub truncation: usize,
    pub target_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            precision_bits: 192,
            truncation: 0,
            target_tol: 1e-40,
        }
    }
}

/// A value with its error bound.
#[derive(Debug, Clone)]
pub struct OracleValue {
    pub big: BigComplex,
    pub value: Complex64,
    pub bound: f64,
}

fn check_config(cfg: &OracleConfig) -> Result<()> {
    if cfg.precision_bits < 128 {
        return Err(Error::Param(format!(
            "oracle precision must be at least 128 bits, got {}",
            cfg.precision_bits
        )));
    }
    Ok(())
}

fn sizes(s: Complex64, cfg: &OracleConfig) -> (usize, usize) {
    let (n, m) = big::em_sizes(s, cfg.precision_bits);
    if cfg.truncation > 0 {
        (cfg.truncation, m)
    } else {
        (n, m)
    }
}

fn finish(ctx: &mut Ctx, big: BigComplex, bound: f64, cfg: &OracleConfig) -> Result<OracleValue> {
    let value = ctx.to_c64(&big);
    if !(bound <= cfg.target_tol.max(value.norm() * 2f64.powi(-(cfg.precision_bits as i32) + 16))) {
        return Err(Error::Accuracy {
            message: format!("oracle bound {bound:e} above target {:e}", cfg.target_tol),
            estimate: value,
        });
    }
    Ok(OracleValue { big, value, bound })
}

/// zeta(s, a) = sum_{n >= 0} (n + a)^{-s}, s != 1.
pub fn hurwitz_zeta_oracle_with(s: Complex64, a: f64, cfg: &OracleConfig) -> Result<OracleValue> {
    check_config(cfg)?;
    if !(a > 0.0) {
        return Err(Error::Domain(format!("Hurwitz parameter must be positive, got {a}")));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Domain("zeta has a pole at s = 1".into()));
    }
    let mut ctx = Ctx::new(cfg.precision_bits)?;
    let ab = ctx.real(a);
    let (n, m) = sizes(s, cfg);
    let parts = big::hurwitz_parts(&mut ctx, s, &ab, n, m)?;
    let pole = big::pole_term(&mut ctx, s, &parts.log_na);
    let v = ctx.add(&parts.regular, &pole);
    finish(&mut ctx, v, parts.bound, cfg)
}

pub fn hurwitz_zeta_oracle(s: Complex64, a: f64) -> Result<Complex64> {
    Ok(hurwitz_zeta_oracle_with(s, a, &OracleConfig::default())?.value)
}

pub fn riemann_zeta_oracle_with(s: Complex64, cfg: &OracleConfig) -> Result<OracleValue> {
    hurwitz_zeta_oracle_with(s, 1.0, cfg)
}

pub fn riemann_zeta_oracle(s: Complex64) -> Result<Complex64> {
    Ok(riemann_zeta_oracle_with(s, &OracleConfig::default())?.value)
}

/// beta(s) = 4^{-s} (zeta(s, 1/4) - zeta(s, 3/4)); entire.
pub fn dirichlet_beta_oracle_with(s: Complex64, cfg: &OracleConfig) -> Result<OracleValue> {
    check_config(cfg)?;
    let mut ctx = Ctx::new(cfg.precision_bits)?;
    let (n, m) = sizes(s, cfg);
    let q1 = ctx.real(0.25);
    let q3 = ctx.real(0.75);
    let p1 = big::hurwitz_parts(&mut ctx, s, &q1, n, m)?;
    let p3 = big::hurwitz_parts(&mut ctx, s, &q3, n, m)?;
    let mut diff = ctx.sub(&p1.regular, &p3.regular);
    if s == Complex64::new(1.0, 0.0) {
        // the pole terms tend to ln(N + 3/4) - ln(N + 1/4)
        let l = p3.log_na.sub(&p1.log_na, ctx.p, astro_float::RoundingMode::ToEven);
        diff = ctx.add(&diff, &ctx.c_real(l));
    } else {
        let t1 = big::pole_term(&mut ctx, s, &p1.log_na);
        let t3 = big::pole_term(&mut ctx, s, &p3.log_na);
        diff = ctx.add(&diff, &ctx.sub(&t1, &t3));
    }
    let four = ctx.real(4.0);
    let l4 = ctx.ln(&four);
    let w = ctx.c(-s);
    let scale = ctx.exp_times(&w, &l4);
    let v = ctx.mul(&diff, &scale);
    let bound = (p1.bound + p3.bound) * 4f64.powf(-s.re);
    finish(&mut ctx, v, bound, cfg)
}

pub fn dirichlet_beta_oracle(s: Complex64) -> Result<Complex64> {
    Ok(dirichlet_beta_oracle_with(s, &OracleConfig::default())?.value)
}

/// Euler's constant from the Euler–MacLaurin expansion of harmonic numbers.
pub fn euler_gamma_oracle_with(cfg: &OracleConfig) -> Result<OracleValue> {
    check_config(cfg)?;
    let mut ctx = Ctx::new(cfg.precision_bits)?;
    let (n, m) = sizes(Complex64::new(1.0, 0.0), cfg);
    let one = ctx.real(1.0);
    // zeta(s, 1) - 1/(s-1) -> gamma as s -> 1: regular part minus ln(N+1)
    let parts = big::hurwitz_parts(&mut ctx, Complex64::new(1.0, 0.0), &one, n, m)?;
    let v = ctx.sub(&parts.regular, &ctx.c_real(parts.log_na.clone()));
    finish(&mut ctx, v, parts.bound, cfg)
}

pub fn euler_gamma_oracle() -> Result<f64> {
    Ok(euler_gamma_oracle_with(&OracleConfig::default())?.value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::QuadraticForm;
    use std::f64::consts::PI;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    const PI2_OVER_6: &str = "1.6449340668482264364724151666460251892189499012067984377355582293700074704032";
    const PI_OVER_4: &str = "0.78539816339744830961566084581987572104929234984377645524373614807695410157155";
    const EULER: &str = "0.57721566490153286060651209008240243104215933593992359880576723488486772677767";

    #[test]
    fn zeta_two_to_high_precision() {
        let cfg = OracleConfig::default();
        let v = riemann_zeta_oracle_with(c(2.0), &cfg).unwrap();
        let mut ctx = Ctx::new(cfg.precision_bits).unwrap();
        assert!(ctx.distance_to(&v.big, PI2_OVER_6, "0") < 1e-25);
        assert!(v.bound < 1e-40);
    }

    #[test]
    fn beta_one_is_leibniz() {
        let cfg = OracleConfig::default();
        let v = dirichlet_beta_oracle_with(c(1.0), &cfg).unwrap();
        let mut ctx = Ctx::new(cfg.precision_bits).unwrap();
        assert!(ctx.distance_to(&v.big, PI_OVER_4, "0") < 1e-25);
    }

    #[test]
    fn euler_constant() {
        let cfg = OracleConfig::default();
        let v = euler_gamma_oracle_with(&cfg).unwrap();
        let mut ctx = Ctx::new(cfg.precision_bits).unwrap();
        assert!(ctx.distance_to(&v.big, EULER, "0") < 1e-25);
    }

    #[test]
    fn zeta_negative_one() {
        let v = riemann_zeta_oracle(c(-1.0)).unwrap();
        assert!((v - c(-1.0 / 12.0)).norm() < 1e-15);
        assert!(riemann_zeta_oracle(c(1.0)).is_err());
        assert!(riemann_zeta_oracle_with(
            c(2.0),
            &OracleConfig {
                precision_bits: 64,
                ..OracleConfig::default()
            }
        )
        .is_err());
    }

    #[test]
    fn epstein_matches_direct_sum() {
        let q = QuadraticForm::identity(2);
        let o = epstein_oracle(&q, c(3.0)).unwrap();
        // square of side 601; the omitted tail is about 2e-10
        let mut direct = 0.0;
        let k = 300i64;
        for a in -k..=k {
            for b in -k..=k {
                if a != 0 || b != 0 {
                    let r = (a * a + b * b) as f64;
                    direct += r.powi(-3);
                }
            }
        }
        assert!((o.value.unwrap().re - direct).abs() < 1e-9);
        // the tail bound itself
        assert!(o.error_bound < 1e-12);
    }

    #[test]
    fn epstein_one_dimension_is_riemann() {
        let q = QuadraticForm::identity(1);
        for s in [c(1.3), c(-0.7), Complex64::new(0.25, 2.0), c(2.0)] {
            let o = epstein_oracle(&q, s).unwrap().value.unwrap();
            let z = riemann_zeta_oracle(s * 2.0).unwrap() * 2.0;
            assert!((o - z).norm() < 1e-12, "{s}: {o} vs {z}");
        }
    }

    #[test]
    fn epstein_pole_and_factorization() {
        let q = QuadraticForm::identity(2);
        let o = epstein_oracle(&q, c(1.0)).unwrap();
        assert!(o.value.is_none());
        assert!((o.s_residue_at_d_half - PI).abs() < 1e-12);
        for s in [c(2.0), c(3.0), c(-0.5), Complex64::new(0.5, 1.0)] {
            let z = epstein_oracle(&q, s).unwrap().value.unwrap();
            let f = riemann_zeta_oracle(s).unwrap() * dirichlet_beta_oracle(s).unwrap() * 4.0;
            assert!((z - f).norm() < 1e-10, "{s}: {z} vs {f}");
        }
        // constant term at s = 1 against the Laurent data of 4 zeta beta
        let h = 1e-5;
        let g = |s: f64| {
            let z = riemann_zeta_oracle(c(s)).unwrap() * dirichlet_beta_oracle(c(s)).unwrap() * 4.0;
            z.re - PI / (s - 1.0)
        };
        let expect = 0.5 * (g(1.0 + h) + g(1.0 - h));
        assert!((o.constant_at_pole - expect).abs() < 1e-8, "{} vs {expect}", o.constant_at_pole);
    }

    #[test]
    fn epstein_trivial_zeros() {
        let q = QuadraticForm::new(2, vec![1.0, 0.5, 0.5, 1.0]).unwrap();
        for k in 1..=3 {
            let v = epstein_oracle(&q, c(-(k as f64))).unwrap().value.unwrap();
            assert!(v.norm() < 1e-13);
        }
        let v = epstein_oracle(&q, c(0.0)).unwrap().value.unwrap();
        assert!((v - c(-1.0)).norm() < 1e-13);
    }
}
