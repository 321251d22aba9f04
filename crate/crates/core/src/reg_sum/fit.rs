//! Least-squares fits of asymptotic expansions with known exponents.

use crate::dd::{self, Cdd, Dd};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Exponent set of value(x) ~ sum c_k x^{alpha_k} + c_log log x + c_0.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticModel {
    pub exponents: Vec<Complex64>,
    pub include_log: bool,
}

pub const MERGE_TOL: f64 = 1e-9;

impl AsymptoticModel {
    pub fn new(exponents: Vec<Complex64>, include_log: bool) -> Result<Self> {
        for (i, a) in exponents.iter().enumerate() {
            if a.norm() < MERGE_TOL {
                return Err(Error::Param(format!("exponent {a} coincides with the constant term")));
            }
            for b in &exponents[..i] {
                if (a - b).norm() < MERGE_TOL {
                    return Err(Error::Param(format!("exponents {a} and {b} are not distinct")));
                }
            }
        }
        Ok(AsymptoticModel {
            exponents,
            include_log,
        })
    }

    pub fn real(exponents: &[f64], include_log: bool) -> Result<Self> {
        AsymptoticModel::new(exponents.iter().map(|&e| Complex64::new(e, 0.0)).collect(), include_log)
    }

    pub fn unknowns(&self) -> usize {
        self.exponents.len() + 1 + usize::from(self.include_log)
    }
}

#[derive(Debug, Clone)]
pub struct FinitePartResult {
    pub constant: Complex64,
    pub log_coeff: Complex64,
    /// (exponent, coefficient) pairs in the fitted abscissa.
    pub power_coeffs: Vec<(Complex64, Complex64)>,
    /// Max deviation of the fit over the samples.
    pub residual_norm: f64,
    pub condition: f64,
}

pub const MAX_CONDITION: f64 = 1e12;

/// Raw fit without tolerance checks. Returns coefficients in model order:
/// exponents, then log (if any), then constant.
pub(crate) struct RawFit {
    pub coeffs: Vec<Cdd>,
    pub residual: f64,
    pub condition: f64,
}

fn sqrt_dd(x: Dd) -> Dd {
    let h = x.hi();
    if h <= 0.0 {
        return dd::dd(0.0);
    }
    let s = dd::dd(h.sqrt());
    s + dd::div(x - s * s, s * 2.0)
}

fn inner(a: &[Cdd], b: &[Cdd]) -> Cdd {
    let mut s = Cdd::ZERO;
    for (x, y) in a.iter().zip(b) {
        s += x.conj() * *y;
    }
    s
}

/// `exps` are the model exponents to double-double precision.
pub(crate) fn fit_dd(xs: &[Dd], ys: &[Cdd], model: &AsymptoticModel, exps: &[Cdd]) -> Result<RawFit> {
    let n = xs.len();
    let u = model.unknowns();
    if n < u + 2 {
        return Err(Error::Precondition(format!(
            "{n} samples cannot determine {u} unknowns (need at least {})",
            u + 2
        )));
    }
    if ys.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: ys.len() });
    }
    for w in xs.windows(2) {
        if !(w[1].hi() > w[0].hi()) || w[0].hi() <= 0.0 {
            return Err(Error::Precondition("sample radii must be positive and strictly increasing".into()));
        }
    }
    let logs: Vec<Dd> = xs.iter().map(|&x| dd::ln(x)).collect();
    let mut cols: Vec<Vec<Cdd>> = Vec::with_capacity(u);
    for &ec in exps {
        cols.push(logs.iter().map(|&l| Cdd::powc(l, ec)).collect());
    }
    if model.include_log {
        cols.push(logs.iter().map(|&l| Cdd::real(l)).collect());
    }
    cols.push(vec![Cdd::ONE; n]);
    let scales: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300))
        .collect();
    for (c, s) in cols.iter_mut().zip(&scales) {
        for v in c.iter_mut() {
            *v = v.scale_f(1.0 / s);
        }
    }
    let condition = {
        let m = DMatrix::from_fn(n, u, |i, j| cols[j][i].to_c64());
        let sv = m.singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    // Gram–Schmidt with re-orthogonalization
    let mut q: Vec<Vec<Cdd>> = Vec::with_capacity(u);
    let mut r = vec![vec![Cdd::ZERO; u]; u];
    for k in 0..u {
        let mut v = cols[k].clone();
        for _ in 0..2 {
            for j in 0..k {
                let p = inner(&q[j], &v);
                for (vi, qi) in v.iter_mut().zip(&q[j]) {
                    *vi = *vi - p * *qi;
                }
                r[j][k] += p;
            }
        }
        let nv = sqrt_dd(inner(&v, &v).re);
        if nv.hi() == 0.0 {
            return Err(Error::IllConditioned { condition: f64::INFINITY });
        }
        r[k][k] = Cdd::real(nv);
        let inv = dd::div(dd::dd(1.0), nv);
        q.push(v.iter().map(|x| x.scale(inv)).collect());
    }
    let mut rhs = vec![Cdd::ZERO; u];
    let mut y = ys.to_vec();
    for _ in 0..2 {
        for j in 0..u {
            let p = inner(&q[j], &y);
            for (yi, qi) in y.iter_mut().zip(&q[j]) {
                *yi = *yi - p * *qi;
            }
            rhs[j] += p;
        }
    }
    let mut c = vec![Cdd::ZERO; u];
    for k in (0..u).rev() {
        let mut s = rhs[k];
        for j in k + 1..u {
            s = s - r[k][j] * c[j];
        }
        c[k] = s / r[k][k];
    }
    let mut residual = 0.0f64;
    for i in 0..n {
        let mut fit = Cdd::ZERO;
        for k in 0..u {
            fit += cols[k][i] * c[k];
        }
        residual = residual.max((fit - ys[i]).abs());
    }
    for (ck, s) in c.iter_mut().zip(&scales) {
        *ck = ck.scale_f(1.0 / s);
    }
    Ok(RawFit {
        coeffs: c,
        residual,
        condition,
    })
}

pub(crate) fn package(model: &AsymptoticModel, raw: &RawFit) -> FinitePartResult {
    let m = model.exponents.len();
    let power_coeffs = model
        .exponents
        .iter()
        .zip(&raw.coeffs[..m])
        .map(|(e, c)| (*e, c.to_c64()))
        .collect();
    let log_coeff = if model.include_log {
        raw.coeffs[m].to_c64()
    } else {
        Complex64::new(0.0, 0.0)
    };
    FinitePartResult {
        constant: raw.coeffs[raw.coeffs.len() - 1].to_c64(),
        log_coeff,
        power_coeffs,
        residual_norm: raw.residual,
        condition: raw.condition,
    }
}

/// Fit value(x) against the model and return its constant term.
pub fn finite_part_extract(
    samples: &[(f64, Complex64)],
    model: &AsymptoticModel,
    tol: f64,
) -> Result<FinitePartResult> {
    let xs: Vec<Dd> = samples.iter().map(|s| dd::dd(s.0)).collect();
    let ys: Vec<Cdd> = samples.iter().map(|s| Cdd::from_c64(s.1)).collect();
    let exps: Vec<Cdd> = model.exponents.iter().map(|e| Cdd::from_c64(*e)).collect();
    let raw = fit_dd(&xs, &ys, model, &exps)?;
    let out = package(model, &raw);
    check_residual(out, tol)
}

pub(crate) fn check_residual(out: FinitePartResult, tol: f64) -> Result<FinitePartResult> {
    if out.residual_norm > tol {
        return Err(Error::PoorFit {
            residual: out.residual_norm,
            tol,
            constant: out.constant,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_power_log() {
        let xs = [8.0, 16.0, 24.0, 32.0, 48.0, 64.0];
        let samples: Vec<_> = xs
            .iter()
            .map(|&n: &f64| (n, Complex64::new(3.0 * n * n + 5.0 + 2.0 * n.ln(), 0.0)))
            .collect();
        let model = AsymptoticModel::real(&[2.0], true).unwrap();
        let r = finite_part_extract(&samples, &model, 1e-9).unwrap();
        assert!((r.constant.re - 5.0).abs() < 1e-9);
        assert!((r.log_coeff.re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_models() {
        assert!(AsymptoticModel::real(&[0.0], false).is_err());
        assert!(AsymptoticModel::real(&[1.0, 1.0], false).is_err());
        let model = AsymptoticModel::real(&[2.0, 1.0], true).unwrap();
        let s: Vec<_> = (1..6).map(|n| (n as f64, Complex64::new(0.0, 0.0))).collect();
        assert!(matches!(finite_part_extract(&s, &model, 1e-9), Err(Error::Precondition(_))));
    }

    #[test]
    fn poor_fit_reports_best_constant() {
        let samples: Vec<_> = (1..10)
            .map(|n| (n as f64, Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)))
            .collect();
        let model = AsymptoticModel::real(&[1.0], false).unwrap();
        assert!(matches!(
            finite_part_extract(&samples, &model, 1e-9),
            Err(Error::PoorFit { .. })
        ));
    }
}
