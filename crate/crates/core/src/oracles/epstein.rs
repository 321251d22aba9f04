//! Epstein zeta by the incomplete-gamma split of the theta integral.

use super::special::{digamma_half_integer, rgamma, upper_gamma_scaled_with_error};
use crate::error::{Error, Result};
use crate::symbols::QuadraticForm;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct EpsteinOracle {
    /// Z_q(s); None at the pole s = d/2.
    pub value: Option<Complex64>,
    /// Residue in s at s = d/2.
    pub s_residue_at_d_half: f64,
    /// Constant term of the Laurent expansion in s at s = d/2.
    pub constant_at_pole: f64,
    pub error_bound: f64,
}

/// Exponent cut: terms with pi q(n) > X are dropped.
const X_CUT: f64 = 48.0;

/// sum over n != 0 with pi q(n) <= X of e^{-x} e^{x} x^{-a} Gamma(a, x),
/// x = pi q(n), plus a bound on the dropped tail and the rounding.
fn theta_half(q: &QuadraticForm, a: Complex64) -> (Complex64, f64) {
    let d = q.dim();
    let lam = q.min_eigenvalue();
    let k = (X_CUT / (PI * lam)).sqrt().ceil() as i64 + 1;
    let mut n = vec![-k; d];
    let mut total = Complex64::new(0.0, 0.0);
    let mut dropped_max = 0.0f64;
    let mut rounding = 0.0f64;
    loop {
        let x: Vec<f64> = n.iter().map(|&v| v as f64).collect();
        if n.iter().any(|&v| v != 0) {
            let t = PI * q.eval(&x);
            if t <= X_CUT {
                let (g, err) = upper_gamma_scaled_with_error(a, t);
                total += g * (-t).exp();
                rounding += (err + 4.0 * f64::EPSILON * g.norm()) * (-t).exp();
            } else {
                dropped_max = dropped_max.max((-t).exp());
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == d {
                let bound = dropped_max * (2 * k + 1).pow(d as u32) as f64 * (1.0 + a.norm()) + rounding;
                return (total, bound);
            }
            n[i] += 1;
            if n[i] > k {
                n[i] = -k;
                i += 1;
            } else {
                break;
            }
        }
    }
}

/// Z_q(s) = pi^s [ (A(s) + det^{-1/2} B(d/2 - s) + det^{-1/2}/(s - d/2)) / Gamma(s)
///                 - 1/Gamma(s + 1) ].
pub fn epstein_oracle(q: &QuadraticForm, s: Complex64) -> Result<EpsteinOracle> {
    let d = q.dim();
    if d == 0 || d > 3 {
        return Err(Error::Precondition(format!("the Epstein oracle supports 1 <= d <= 3, got {d}")));
    }
    let half = d as f64 / 2.0;
    let det_h = 1.0 / q.det().sqrt();
    let dual = q.dual();
    let residue = PI.powf(half) * det_h * rgamma(Complex64::new(half, 0.0)).re;
    // constant term: derivative of pi^s / Gamma(s) at d/2 times det^{-1/2}
    let psi = digamma_half_integer(d as u32);
    let g0 = PI.powf(half) * rgamma(Complex64::new(half, 0.0)).re;
    let s0 = Complex64::new(half, 0.0);
    let (a0, ea0) = theta_half(q, s0);
    let (b0, eb0) = theta_half(&dual, Complex64::new(0.0, 0.0));
    let regular0 = PI.powf(half) * (rgamma(s0) * (a0 + b0 * det_h) - rgamma(s0 + 1.0));
    let constant_at_pole = regular0.re + g0 * (PI.ln() - psi) * det_h;
    let bound0 = (ea0 + eb0) * g0;
    if (s - s0).norm() < 1e-12 {
        return Ok(EpsteinOracle {
            value: None,
            s_residue_at_d_half: residue,
            constant_at_pole,
            error_bound: bound0,
        });
    }
    let (a, ea) = theta_half(q, s);
    let (b, eb) = theta_half(&dual, Complex64::new(half, 0.0) - s);
    let pis = (s * PI.ln()).exp();
    let rg = rgamma(s);
    // 1/Gamma(s+1) = 1/(s Gamma(s)) keeps the two gamma factors consistent;
    // independent roundings would not cancel for large Im s
    let rg1 = if rg.norm() == 0.0 { rgamma(s + 1.0) } else { rg / s };
    let value = pis * (rg * (a + b * det_h + det_h / (s - half)) - rg1);
    // the theta pieces and the remaining terms are amplified by 1/Gamma(s),
    // which is large for large Im s
    let pieces = rg.norm() * (a.norm() + b.norm() * det_h + det_h / (s - half).norm()) + rg1.norm();
    let rounding = 16.0 * f64::EPSILON * pis.norm() * pieces;
    let bound = (ea + eb * det_h) * (pis * rg).norm() + rounding + 1e-15 * value.norm().max(1.0);
    Ok(EpsteinOracle {
        value: Some(value),
        s_residue_at_d_half: residue,
        constant_at_pole,
        error_bound: bound,
    })
}
