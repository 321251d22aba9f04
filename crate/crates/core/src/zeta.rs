//! Riemann, Hurwitz, Epstein and torus zeta functions from regularized sums.

use crate::dd::{self, Cdd};
use crate::error::{Error, Result};
use crate::meromorphic::{laurent_fit_with, sweep_lattice, LaurentFit, SweepOptions};
use crate::quad;
use crate::reg_integral::sphere_integral;
use crate::reg_sum::{
    cutoff_sum_1d, lattice_sum_supball, power_tail_fp, sweep_ladder, EMParams, LatticeSweep, SweepPoint,
};
use crate::symbols::{quadratic_symbol, riesz_family, ClassicalSymbol, CutoffFunction, QuadraticForm};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    Direct,
    Em,
    FpLattice,
    Oracle,
}

impl Pipeline {
    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::Direct => "direct",
            Pipeline::Em => "em",
            Pipeline::FpLattice => "fp_lattice",
            Pipeline::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub pipeline: Pipeline,
    /// Fit residual, or the contour aliasing estimate for sweeps, or the
    /// tail error estimate for direct sums.
    pub residual: f64,
    pub condition: f64,
    /// Residue in s (half the z-residue for the families used here).
    pub s_residue: Complex64,
    /// Largest sample size used.
    pub nmax: usize,
}

#[derive(Debug, Clone)]
pub struct ZetaResult {
    pub value: Complex64,
    pub is_pole: bool,
    pub residue_in_z: Complex64,
    pub diagnostics: Diagnostics,
}

/// Pipeline selection for `quadratic_zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PipelineChoice {
    #[default]
    Auto,
    Direct,
    FpLattice,
}

#[derive(Debug, Clone)]
pub struct ZetaOptions {
    pub pipeline: PipelineChoice,
    /// Cube size for direct summation; 0 picks one per dimension.
    pub nmax: usize,
    /// Direct summation is used when Re(2s) > d + margin.
    pub margin: f64,
    pub sweep: SweepOptions,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        ZetaOptions {
            pipeline: PipelineChoice::Auto,
            nmax: 0,
            margin: 0.5,
            sweep: SweepOptions::default(),
        }
    }
}

fn is_integer(s: Complex64) -> bool {
    s.im == 0.0 && s.re == s.re.round()
}

fn em_order(delta_re: f64) -> usize {
    let k = (delta_re.max(0.0).ceil() as usize + 14).max(16);
    k + k % 2
}

/// zeta(s) as half the canonical sum of chi |x|^{-s} over Z.
pub fn riemann_zeta_reg(s: Complex64) -> Result<ZetaResult> {
    riemann_zeta_with(s, &SweepOptions::default())
}

pub fn riemann_zeta_with(s: Complex64, opts: &SweepOptions) -> Result<ZetaResult> {
    let sigma = ClassicalSymbol::power(1, -s, Complex64::new(1.0, 0.0), Some(CutoffFunction::default()))?;
    let params = EMParams::default();
    if !is_integer(s) || s.re >= 2.0 {
        let v = cutoff_sum_1d(&sigma, &params)?;
        return Ok(ZetaResult {
            value: v * 0.5,
            is_pole: false,
            residue_in_z: ZERO,
            diagnostics: Diagnostics {
                pipeline: Pipeline::Em,
                residual: 0.0,
                condition: 1.0,
                s_residue: ZERO,
                nmax: 0,
            },
        });
    }
    let fam = riesz_family(&sigma, -1.0)?;
    let f = |z: Complex64| cutoff_sum_1d(&fam.at(z), &params);
    let fit = laurent_fit_with(&f, &opts.laurent)?;
    if fit.non_simple_pole {
        return Err(Error::NonSimplePole {
            c_minus2: fit.c_minus2.norm(),
        });
    }
    let pole = s == Complex64::new(1.0, 0.0);
    let residue = if pole { fit.c_minus1 * 0.5 } else { ZERO };
    Ok(ZetaResult {
        value: fit.c0 * 0.5,
        is_pole: pole,
        residue_in_z: residue,
        diagnostics: Diagnostics {
            pipeline: Pipeline::Em,
            residual: fit.max_aliasing_estimate.max(if pole { 0.0 } else { fit.c_minus1.norm() }),
            condition: 1.0,
            s_residue: residue,
            nmax: 0,
        },
    })
}

/// zeta(s, p) = sum_{n >= 0} (n + p)^{-s}, continued analytically. At s = 1
/// the value is the constant term -digamma(p) and the pole is flagged.
pub fn hurwitz_zeta_reg(s: Complex64, p: f64) -> Result<ZetaResult> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("Hurwitz parameter must be positive, got {p}")));
    }
    let delta = -s;
    let m = 10usize;
    let mut v = ZERO;
    for n in 0..m {
        v += Complex64::new(n as f64 + p, 0.0).powc(delta);
    }
    let tol = EMParams::default().quad_tol;
    v += power_tail_fp(delta, m as f64 + p, em_order(delta.re), tol, false)?;
    let pole = s == Complex64::new(1.0, 0.0);
    let residue = if pole { Complex64::new(1.0, 0.0) } else { ZERO };
    Ok(ZetaResult {
        value: v,
        is_pole: pole,
        residue_in_z: residue,
        diagnostics: Diagnostics {
            pipeline: Pipeline::Em,
            residual: 0.0,
            condition: 1.0,
            s_residue: residue,
            nmax: m,
        },
    })
}

fn default_nmax(d: usize) -> usize {
    match d {
        1 => 2000,
        2 => 128,
        _ => 40,
    }
}

fn check_form(q: &QuadraticForm, max_d: usize) -> Result<usize> {
    let d = q.dim();
    if d == 0 || d > max_d {
        return Err(Error::Precondition(format!("dimension must be between 1 and {max_d}, got {d}")));
    }
    Ok(d)
}

/// Integral of g over the 2d unit-cube faces, each face a (d-1)-cube
/// integrated by tensor Gauss-Legendre.
fn face_integral(d: usize, g: &dyn Fn(&[f64], usize, f64) -> Complex64) -> Complex64 {
    let rule = quad::gl_rule(48);
    let mut total = ZERO;
    let m = d - 1;
    let count = rule.len().pow(m as u32);
    let mut x = vec![0.0; d];
    for axis in 0..d {
        for side in [1.0, -1.0] {
            for idx in 0..count {
                let mut rest = idx;
                let mut w = 1.0;
                let mut k = 0;
                for (j, xj) in x.iter_mut().enumerate() {
                    if j == axis {
                        *xj = side;
                        continue;
                    }
                    let (node, weight) = rule[rest % rule.len()];
                    rest /= rule.len();
                    *xj = node;
                    w *= weight;
                    k += 1;
                }
                debug_assert_eq!(k, m);
                total += g(&x, axis, side) * w;
            }
        }
    }
    total
}

/// S(N) plus the integral over the complement of the cube and the first
/// midpoint correction; error O(R^{d - 2 Re s - 4}).
fn quadratic_direct(q: &QuadraticForm, s: Complex64, nmax: usize) -> Result<ZetaResult> {
    let d = q.dim();
    let sigma = quadratic_symbol(q, s, None);
    let partial = lattice_sum_supball(&sigma, nmax)?;
    let r = nmax as f64 + 0.5;
    let fpow = |x: &[f64]| Complex64::new(q.eval(x), 0.0).powc(-s);
    let outer = face_integral(d, &|x, _, _| fpow(x));
    // [d_i q^{-s}] between the faces x_i = +1 and x_i = -1
    let grad = face_integral(d, &|x, i, side| {
        let qx = q.eval(x);
        -s * Complex64::new(qx, 0.0).powc(-s - 1.0) * q.grad(x, i) * side
    });
    let e0 = Complex64::new(d as f64, 0.0) - s * 2.0;
    let tail = Complex64::new(r, 0.0).powc(e0) / (-e0) * outer;
    let corr = Complex64::new(r, 0.0).powc(e0 - 2.0) * grad / 24.0;
    let err = r.powf(e0.re - 4.0) * outer.norm().max(1.0) * (s.norm() + 1.0).powi(3);
    Ok(ZetaResult {
        value: partial + tail + corr,
        is_pole: false,
        residue_in_z: ZERO,
        diagnostics: Diagnostics {
            pipeline: Pipeline::Direct,
            residual: err,
            condition: 1.0,
            s_residue: ZERO,
            nmax,
        },
    })
}

/// Lattice sweep of q(n)^{-s - z/2}.
fn quadratic_sweep(q: &QuadraticForm, s: Complex64, opts: &SweepOptions) -> Result<(LaurentFit, LatticeSweep)> {
    let d = q.dim();
    let ladder = if opts.n_range.is_empty() {
        sweep_ladder(d)
    } else {
        opts.n_range.clone()
    };
    let neg_s = Cdd::from_c64(-s);
    let point = |x: &[f64]| -> SweepPoint {
        let qx = q.eval_dd(x);
        if qx.hi() == 0.0 {
            return (Cdd::ZERO, dd::dd(0.0), 1.0);
        }
        let l = dd::ln(qx);
        (Cdd::powc(l, neg_s), l * 0.5, 1.0)
    };
    let root = Cdd::real(dd::dd(d as f64)) - Cdd::from_c64(s).scale_f(2.0);
    let sweep = LatticeSweep::new(d, ladder, -1.0, vec![root], opts.laurent.radius, &point)?;
    let fit = sweep_lattice(&sweep, opts)?;
    Ok((fit, sweep))
}

/// Epstein zeta Z_q(s), the continuation of the sum of q(n)^{-s} over n != 0.
pub fn quadratic_zeta(q: &QuadraticForm, s: Complex64, opts: &ZetaOptions) -> Result<ZetaResult> {
    let d = check_form(q, 3)?;
    let at_pole = (s * 2.0 - d as f64).norm() < 1e-12;
    let direct_ok = (s * 2.0).re > d as f64 + opts.margin.max(0.0);
    let use_direct = match opts.pipeline {
        PipelineChoice::Auto => direct_ok,
        PipelineChoice::Direct => {
            if (s * 2.0).re <= d as f64 {
                return Err(Error::Precondition(format!(
                    "direct summation needs Re(2s) > {d}, got s = {s}"
                )));
            }
            true
        }
        PipelineChoice::FpLattice => false,
    };
    if use_direct {
        let n = if opts.nmax == 0 { default_nmax(d) } else { opts.nmax };
        return quadratic_direct(q, s, n);
    }
    // the pole of z -> Z_q(s + z/2) sits at z = d - 2s; keep the contour
    // well inside it
    let mut sweep_opts = opts.sweep.clone();
    let gap = (Complex64::new(d as f64, 0.0) - s * 2.0).norm();
    if !at_pole {
        sweep_opts.laurent.radius = sweep_opts.laurent.radius.min(0.4 * gap);
    }
    let (fit, sweep) = quadratic_sweep(q, s, &sweep_opts)?;
    // fit quality at a contour point
    let probe = sweep.finite_part_at(Complex64::new(sweep_opts.laurent.radius, 0.0), sweep_opts.fit_tol)?;
    let nmax = sweep.ladder().last().copied().unwrap_or(0);
    let (residue, residual) = if at_pole {
        (fit.c_minus1, fit.max_aliasing_estimate)
    } else {
        (ZERO, fit.max_aliasing_estimate.max(fit.c_minus1.norm()))
    };
    Ok(ZetaResult {
        value: fit.c0,
        is_pole: at_pole,
        residue_in_z: residue,
        diagnostics: Diagnostics {
            pipeline: Pipeline::FpLattice,
            residual: residual.max(probe.residual_norm),
            condition: probe.condition,
            s_residue: residue * 0.5,
            nmax,
        },
    })
}

/// Integral of q(w)^{-d/2} over the unit sphere: the z-residue of
/// Z_q(s + z/2) at 2s = d.
pub fn quadratic_zeta_residue(q: &QuadraticForm) -> Result<Complex64> {
    let d = check_form(q, 4)?;
    sphere_integral(|w| Complex64::new(q.eval(w).powf(-(d as f64) / 2.0), 0.0), d, 1e-13)
}

/// Regularized sum of the pure power q(x)^{-s} (no cutoff, zero at the
/// origin) for Re s <= 0, by a sweep of the Euclidean Riesz family
/// q^{-s} |x|^{-2z}.
#[allow(non_snake_case)]
pub fn C_of_power(q: &QuadraticForm, s: Complex64) -> Result<Complex64> {
    let d = check_form(q, 3)?;
    if s.re > 0.0 {
        return Err(Error::Precondition(format!("C of a pure power needs Re s <= 0, got {s}")));
    }
    if (s * 2.0 - d as f64).norm() < 1e-12 {
        return Err(Error::Precondition("2s = d".into()));
    }
    let sigma = quadratic_symbol(q, s, None);
    let fam = riesz_family(&sigma, -2.0)?;
    let opts = SweepOptions::default();
    let sweep = LatticeSweep::for_family(&fam, sweep_ladder(d), opts.laurent.radius)?;
    Ok(sweep_lattice(&sweep, &opts)?.c0)
}

/// Spectral zeta function of the flat torus Laplacian R^d / (2 pi Z)^d.
pub fn torus_zeta(d: usize, s: Complex64) -> Result<ZetaResult> {
    torus_zeta_with(d, s, &ZetaOptions::default())
}

pub fn torus_zeta_with(d: usize, s: Complex64, opts: &ZetaOptions) -> Result<ZetaResult> {
    if d == 0 || d > 3 {
        return Err(Error::Precondition(format!("torus dimension must be 1, 2 or 3, got {d}")));
    }
    quadratic_zeta(&QuadraticForm::identity(d), s, opts)
}

/// Derivative estimates of the torus zeta at s = 0.
#[derive(Debug, Clone)]
pub struct TorusDeterminant {
    pub value: f64,
    pub zeta_prime: f64,
    /// Central differences at h = 1e-3 and 5e-4.
    pub differences: [f64; 2],
}

pub const DET_STEPS: [f64; 2] = [1e-3, 5e-4];

pub fn torus_determinant_details(d: usize) -> Result<TorusDeterminant> {
    if d == 0 || d > 2 {
        return Err(Error::Precondition(format!("determinant supports d = 1 or 2, got {d}")));
    }
    let opts = ZetaOptions::default();
    let mut diffs = [0.0; 2];
    for (k, h) in DET_STEPS.iter().enumerate() {
        let plus = torus_zeta_with(d, Complex64::new(*h, 0.0), &opts)?.value.re;
        let minus = torus_zeta_with(d, Complex64::new(-h, 0.0), &opts)?.value.re;
        diffs[k] = (plus - minus) / (2.0 * h);
    }
    let ratio = DET_STEPS[0] / DET_STEPS[1];
    let r2 = ratio * ratio;
    let zp = (r2 * diffs[1] - diffs[0]) / (r2 - 1.0);
    let gap = (diffs[0] - diffs[1]).abs();
    if gap > 1e-4 * zp.abs().max(1.0) {
        return Err(Error::Accuracy {
            message: format!("derivative estimates {} and {} disagree", diffs[0], diffs[1]),
            estimate: Complex64::new((-zp).exp(), 0.0),
        });
    }
    Ok(TorusDeterminant {
        value: (-zp).exp(),
        zeta_prime: zp,
        differences: diffs,
    })
}

/// exp(-zeta'(0)) for the torus Laplacian.
pub fn torus_zeta_determinant(d: usize) -> Result<f64> {
    Ok(torus_determinant_details(d)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{dirichlet_beta_oracle, epstein_oracle, riemann_zeta_oracle};
    use std::f64::consts::PI;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn riemann_negative_odd() {
        let v = riemann_zeta_reg(c(-1.0)).unwrap();
        assert!((v.value - c(-1.0 / 12.0)).norm() < 1e-9, "{:?}", v);
        let v = riemann_zeta_reg(c(-3.0)).unwrap();
        assert!((v.value - c(1.0 / 120.0)).norm() < 1e-9, "{:?}", v);
        let v = riemann_zeta_reg(c(0.0)).unwrap();
        assert!((v.value - c(-0.5)).norm() < 1e-9);
    }

    #[test]
    fn riemann_pole_and_regular() {
        let v = riemann_zeta_reg(c(1.0)).unwrap();
        assert!(v.is_pole);
        assert!((v.residue_in_z - c(1.0)).norm() < 1e-7);
        assert!((v.value - c(0.577_215_664_901_532_9)).norm() < 1e-7);
        let v = riemann_zeta_reg(c(2.0)).unwrap();
        assert!((v.value - c(PI * PI / 6.0)).norm() < 1e-9);
        let s = Complex64::new(0.5, 3.0);
        let v = riemann_zeta_reg(s).unwrap();
        assert!((v.value - riemann_zeta_oracle(s).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn hurwitz_examples() {
        let v = hurwitz_zeta_reg(c(-1.0), 3.0).unwrap();
        assert!((v.value - c(-37.0 / 12.0)).norm() < 1e-10, "{:?}", v.value);
        let v = hurwitz_zeta_reg(c(-1.0), 1.0).unwrap();
        assert!((v.value - c(-1.0 / 12.0)).norm() < 1e-10);
        let v = hurwitz_zeta_reg(c(3.0), 2.0).unwrap();
        let z3 = riemann_zeta_oracle(c(3.0)).unwrap();
        assert!((v.value - (z3 - 1.0)).norm() < 1e-10);
        let v = hurwitz_zeta_reg(c(1.0), 1.0).unwrap();
        assert!(v.is_pole);
        assert!((v.value - c(0.577_215_664_901_532_9)).norm() < 1e-10);
        assert!(hurwitz_zeta_reg(c(2.0), 0.0).is_err());
    }

    #[test]
    fn gaussian_integer_factorization() {
        let q = QuadraticForm::identity(2);
        let v = quadratic_zeta(&q, c(2.0), &ZetaOptions::default()).unwrap();
        assert_eq!(v.diagnostics.pipeline, Pipeline::Direct);
        let f = riemann_zeta_oracle(c(2.0)).unwrap() * dirichlet_beta_oracle(c(2.0)).unwrap() * 4.0;
        assert!((v.value - f).norm() < 1e-7, "{} vs {f}", v.value);
    }

    #[test]
    fn pole_of_the_gaussian_zeta() {
        let q = QuadraticForm::identity(2);
        let v = quadratic_zeta(&q, c(1.0), &ZetaOptions::default()).unwrap();
        assert!(v.is_pole);
        assert!((v.residue_in_z - c(2.0 * PI)).norm() < 1e-4, "{:?}", v.residue_in_z);
        let o = epstein_oracle(&q, c(1.0)).unwrap();
        assert!((v.value.re - o.constant_at_pole).abs() < 1e-5, "{} vs {}", v.value, o.constant_at_pole);
    }

    #[test]
    fn direct_and_lattice_agree() {
        let q = QuadraticForm::new(2, vec![1.0, 0.5, 0.5, 1.0]).unwrap();
        for s in [c(1.4), Complex64::new(1.6, 1.0)] {
            let a = quadratic_zeta(
                &q,
                s,
                &ZetaOptions {
                    pipeline: PipelineChoice::Direct,
                    ..ZetaOptions::default()
                },
            )
            .unwrap();
            let b = quadratic_zeta(
                &q,
                s,
                &ZetaOptions {
                    pipeline: PipelineChoice::FpLattice,
                    ..ZetaOptions::default()
                },
            )
            .unwrap();
            assert!((a.value - b.value).norm() < 1e-6, "{s}: {} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn residue_formula() {
        assert!((quadratic_zeta_residue(&QuadraticForm::identity(2)).unwrap() - c(2.0 * PI)).norm() < 1e-12);
        assert!((quadratic_zeta_residue(&QuadraticForm::identity(3)).unwrap() - c(4.0 * PI)).norm() < 1e-10);
        let q = QuadraticForm::new(2, vec![1.0, 0.0, 0.0, 4.0]).unwrap();
        let r = quadratic_zeta_residue(&q).unwrap();
        assert!((r - c(PI)).norm() < 1e-6);
        let o = epstein_oracle(&q, c(1.0)).unwrap();
        assert!((r.re - 2.0 * o.s_residue_at_d_half).abs() < 1e-6);
    }

    #[test]
    fn pure_power_constant() {
        let q = QuadraticForm::identity(1);
        let v = C_of_power(&q, c(-0.5)).unwrap();
        assert!((v - c(-1.0 / 6.0)).norm() < 1e-7, "{v}");
        let q2 = QuadraticForm::identity(2);
        let a = C_of_power(&q2, c(-0.7)).unwrap();
        let b = quadratic_zeta(&q2, c(-0.7), &ZetaOptions::default()).unwrap().value;
        assert!((a - b).norm() < 1e-5, "{a} vs {b}");
        assert!(C_of_power(&q2, c(-1.0)).unwrap().norm() < 1e-5);
        assert!(C_of_power(&q2, c(0.5)).is_err());
    }

    #[test]
    fn torus_values() {
        let v = torus_zeta(1, c(2.0)).unwrap();
        assert!((v.value - c(PI.powi(4) / 45.0)).norm() < 1e-8);
        let v = torus_zeta(2, c(-1.0)).unwrap();
        assert!(v.value.norm() < 1e-5, "{:?}", v.value);
    }

    #[test]
    fn circle_determinant() {
        let det = torus_zeta_determinant(1).unwrap();
        assert!((det - 4.0 * PI * PI).abs() < 1e-5, "{det}");
    }
}
