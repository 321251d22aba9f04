//! Laurent coefficients at z = 0 of regularized sums and integrals along
//! holomorphic families.

use crate::error::{Error, Result};
use crate::reg_integral;
use crate::reg_sum::{sweep_ladder, LatticeSweep};
use crate::symbols::HolomorphicFamily;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub const DEFAULT_RADIUS: f64 = 0.25;
pub const DEFAULT_POINTS: usize = 32;
const HIGHER: usize = 4;

#[derive(Debug, Clone)]
pub struct LaurentFit {
    pub c_minus1: Complex64,
    pub c0: Complex64,
    /// c_1, ..., c_m
    pub higher: Vec<Complex64>,
    pub radius: f64,
    pub npoints: usize,
    /// max |c_k(r) - c_k(r/2)| over k = -1, 0
    pub max_aliasing_estimate: f64,
    /// Probe for a double pole.
    pub c_minus2: Complex64,
    pub non_simple_pole: bool,
    /// Contour samples (z, F(z)) at the main radius.
    pub samples: Vec<(Complex64, Complex64)>,
}

#[derive(Debug, Clone)]
pub struct LaurentOptions {
    pub radius: f64,
    pub npoints: usize,
    /// Tolerance for |c_{-2}| relative to max(1, |c_{-1}|, |c_0|).
    pub pole_tol: f64,
}

impl Default for LaurentOptions {
    fn default() -> Self {
        LaurentOptions {
            radius: DEFAULT_RADIUS,
            npoints: DEFAULT_POINTS,
            pole_tol: 1e-6,
        }
    }
}

fn contour(f: &(dyn Fn(Complex64) -> Result<Complex64> + Sync), radius: f64, n: usize) -> Result<Vec<(Complex64, Complex64)>> {
    (0..n)
        .into_par_iter()
        .map(|j| {
            let z = Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64);
            match f(z) {
                Ok(v) if v.is_finite() => Ok((z, v)),
                Ok(v) => Err(Error::Contour {
                    z,
                    message: format!("non-finite value {v}"),
                }),
                Err(e) => Err(Error::Contour {
                    z,
                    message: e.to_string(),
                }),
            }
        })
        .collect()
}

fn coefficient(samples: &[(Complex64, Complex64)], k: i32) -> Complex64 {
    let n = samples.len() as f64;
    samples.iter().map(|(z, v)| v * z.powi(-k)).sum::<Complex64>() / n
}

/// Laurent coefficients c_{-1}, c_0, c_1.. of F at 0 from equispaced samples
/// on |z| = radius, with an aliasing estimate from radius / 2.
pub fn laurent_fit(
    f: &(dyn Fn(Complex64) -> Result<Complex64> + Sync),
    radius: f64,
    npoints: usize,
) -> Result<LaurentFit> {
    laurent_fit_with(
        f,
        &LaurentOptions {
            radius,
            npoints,
            ..LaurentOptions::default()
        },
    )
}

pub fn laurent_fit_with(f: &(dyn Fn(Complex64) -> Result<Complex64> + Sync), opts: &LaurentOptions) -> Result<LaurentFit> {
    let n = opts.npoints;
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::Param(format!("contour points must be a power of two >= 8, got {n}")));
    }
    if !(opts.radius > 0.0) {
        return Err(Error::Param("contour radius must be positive".into()));
    }
    let main = contour(f, opts.radius, n)?;
    let half = contour(f, opts.radius / 2.0, n)?;
    let c_minus1 = coefficient(&main, -1);
    let c0 = coefficient(&main, 0);
    let c_minus2 = coefficient(&main, -2);
    let higher = (1..=HIGHER as i32).map(|k| coefficient(&main, k)).collect();
    let alias = (coefficient(&half, -1) - c_minus1)
        .norm()
        .max((coefficient(&half, 0) - c0).norm());
    let scale = 1f64.max(c_minus1.norm()).max(c0.norm());
    Ok(LaurentFit {
        c_minus1,
        c0,
        higher,
        radius: opts.radius,
        npoints: n,
        max_aliasing_estimate: alias,
        c_minus2,
        non_simple_pole: c_minus2.norm() > opts.pole_tol * scale,
        samples: main,
    })
}

fn require_simple(fit: LaurentFit) -> Result<LaurentFit> {
    if fit.non_simple_pole {
        return Err(Error::NonSimplePole {
            c_minus2: fit.c_minus2.norm(),
        });
    }
    Ok(fit)
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub laurent: LaurentOptions,
    /// Lattice sample sizes; empty selects the sweep ladder.
    pub n_range: Vec<usize>,
    /// Fit residual tolerance relative to the sample size.
    pub fit_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            laurent: LaurentOptions::default(),
            n_range: Vec::new(),
            fit_tol: 1e-7,
        }
    }
}

/// Laurent expansion of z -> canonical sum of sigma(z) over Z^d.
pub fn zsweep_regularized_sum(family: &HolomorphicFamily, opts: &SweepOptions) -> Result<LaurentFit> {
    let d = family.base().dim();
    let ladder = if opts.n_range.is_empty() {
        sweep_ladder(d)
    } else {
        opts.n_range.clone()
    };
    let sweep = LatticeSweep::for_family(family, ladder, opts.laurent.radius)?;
    sweep_lattice(&sweep, opts)
}

/// Laurent expansion of a prepared lattice sweep.
pub fn sweep_lattice(sweep: &LatticeSweep, opts: &SweepOptions) -> Result<LaurentFit> {
    let f = |z: Complex64| sweep.finite_part_at(z, opts.fit_tol).map(|r| r.constant);
    require_simple(laurent_fit_with(&f, &opts.laurent)?)
}

/// Laurent expansion of z -> cut-off integral of sigma(z).
pub fn zsweep_regularized_integral(family: &HolomorphicFamily, opts: &SweepOptions) -> Result<LaurentFit> {
    let f = |z: Complex64| reg_integral::cutoff_integral(&family.at(z)).map(|r| r.value);
    require_simple(laurent_fit_with(&f, &opts.laurent)?)
}

/// Difference of the regularized sums c0(fam1) - c0(fam2).
pub fn compare_regularizations(fam1: &HolomorphicFamily, fam2: &HolomorphicFamily, opts: &SweepOptions) -> Result<Complex64> {
    let (a, b) = (fam1.base(), fam2.base());
    if a.dim() != b.dim() || (a.order() - b.order()).norm() > 1e-12 || fam1.slope() != fam2.slope() {
        return Err(Error::Precondition("families must share the base order and alpha(z)".into()));
    }
    let s1 = zsweep_regularized_sum(fam1, opts)?;
    let s2 = zsweep_regularized_sum(fam2, opts)?;
    if s1.samples == s2.samples {
        return Ok(ZERO);
    }
    Ok(s1.c0 - s2.c0)
}

/// -(2 pi)^{d/2} res(sigma) / alpha'(0).
pub fn predicted_residue(family: &HolomorphicFamily) -> Result<Complex64> {
    let d = family.base().dim() as f64;
    let res = reg_integral::noncommutative_residue(family.base())?;
    Ok(-(2.0 * PI).powf(d / 2.0) * res / family.slope())
}
