//! Cut-off regularized integrals, sphere quadrature, the noncommutative
//! residue and the cube-versus-ball correction.

use crate::error::{Error, Result};
use crate::quad;
use crate::symbols::{ClassicalSymbol, PointFn, Profile};
use num_complex::Complex64;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Tolerance for treating a + d - j as zero.
pub const LOG_TOL: f64 = 1e-6;

/// Nodes and weights on S^{d-1}.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub d: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereQuadrature {
    /// `n` controls the resolution: n trapezoid points on S^1, n
    /// Gauss–Legendre nodes per polar angle in higher dimensions.
    pub fn new(d: usize, n: usize) -> Result<Self> {
        let n = n.max(2);
        let (nodes, weights) = match d {
            1 => (vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0]),
            2 => {
                let mut nodes = Vec::with_capacity(n);
                for k in 0..n {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    nodes.push(vec![t.cos(), t.sin()]);
                }
                (nodes, vec![2.0 * PI / n as f64; n])
            }
            3 => {
                let rule = quad::gl_rule(n);
                let m = 2 * n;
                let mut nodes = Vec::with_capacity(n * m);
                let mut weights = Vec::with_capacity(n * m);
                for &(u, w) in rule.iter() {
                    let s = (1.0 - u * u).sqrt();
                    for k in 0..m {
                        let p = 2.0 * PI * k as f64 / m as f64;
                        nodes.push(vec![u, s * p.cos(), s * p.sin()]);
                        weights.push(w * 2.0 * PI / m as f64);
                    }
                }
                (nodes, weights)
            }
            4 => {
                let inner = SphereQuadrature::new(3, n)?;
                let rule = quad::gl_rule(n);
                let mut nodes = Vec::new();
                let mut weights = Vec::new();
                for &(x, w) in rule.iter() {
                    let psi = 0.5 * PI * (x + 1.0);
                    let (s, c) = psi.sin_cos();
                    let wpsi = 0.5 * PI * w * s * s;
                    for (v, wv) in inner.nodes.iter().zip(&inner.weights) {
                        nodes.push(vec![c, s * v[0], s * v[1], s * v[2]]);
                        weights.push(wpsi * wv);
                    }
                }
                (nodes, weights)
            }
            _ => {
                return Err(Error::Param(format!("sphere quadrature supports d <= 4, got {d}")));
            }
        };
        Ok(SphereQuadrature { d, nodes, weights })
    }

    pub fn integrate<F: Fn(&[f64]) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| f(x) * *w)
            .sum()
    }
}

/// Adaptive sphere integral; refinement doubles the resolution until two
/// successive estimates differ by less than `tol` (relative to max(1,|I|)).
pub fn sphere_integral<F: Fn(&[f64]) -> Complex64>(f: F, d: usize, tol: f64) -> Result<Complex64> {
    if d == 1 {
        return Ok(f(&[1.0]) + f(&[-1.0]));
    }
    let max_n = match d {
        2 => 4096,
        3 => 256,
        _ => 64,
    };
    let mut n = 8;
    let mut prev = SphereQuadrature::new(d, n)?.integrate(&f);
    while n < max_n {
        n *= 2;
        let cur = SphereQuadrature::new(d, n)?.integrate(&f);
        if (cur - prev).norm() <= tol.max(1e-12) * cur.norm().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Accuracy {
        message: format!("sphere quadrature (d = {d}) did not converge"),
        estimate: prev,
    })
}

fn profile_integral(p: &Profile, d: usize) -> Result<Complex64> {
    match p {
        Profile::Zero => Ok(ZERO),
        Profile::Constant(c) => Ok(c * sphere_volume(d)),
        _ => sphere_integral(|w| p.on_sphere(w), d, 1e-14),
    }
}

/// |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2).
pub fn sphere_volume(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => {
            // recursion |S^{d-1}| = 2 pi |S^{d-3}| / (d-2)
            2.0 * PI * sphere_volume(d - 2) / (d as f64 - 2.0)
        }
    }
}

/// (2 pi)^{-d/2} times the sphere integral of the degree -d component.
pub fn noncommutative_residue(sigma: &ClassicalSymbol) -> Result<Complex64> {
    let d = sigma.dim();
    let target = -(d as f64);
    for (j, c) in sigma.components().iter().enumerate() {
        let deg = sigma.effective_degree(j);
        if (deg - target).norm() < 1e-9 {
            let s = profile_integral(&c.profile, d)?;
            return Ok(s / (2.0 * PI).powf(d as f64 / 2.0));
        }
    }
    Ok(ZERO)
}

#[derive(Debug, Clone, Default)]
pub struct RegIntegralBreakdown {
    pub remainder_part: Complex64,
    pub ball_part: Complex64,
    pub sphere_parts: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct RegIntegralResult {
    pub value: Complex64,
    pub breakdown: RegIntegralBreakdown,
    pub had_log_obstruction: bool,
    /// Coefficient of log R in the ball expansion.
    pub log_coeff: Complex64,
}

/// Cut-off regularized integral over R^d via the constant-term formula.
pub fn cutoff_integral(sigma: &ClassicalSymbol) -> Result<RegIntegralResult> {
    let d = sigma.dim();
    if d > 4 {
        return Err(Error::Precondition(format!("cutoff integral supports d <= 4, got {d}")));
    }
    let shift = sigma.shift().copied();
    if let Some(rem) = sigma.remainder() {
        let eff = rem.decay + shift.map(|s| s.bz.re).unwrap_or(0.0);
        if eff >= -(d as f64) {
            return Err(Error::Precondition(format!(
                "remainder decay {eff} is not below -d; include more homogeneous components"
            )));
        }
    }
    let cutoff = sigma.cutoff();
    if cutoff.is_none() && shift.is_some() {
        return Err(Error::Precondition("a shifted symbol needs a cutoff".into()));
    }
    let mut out = RegIntegralBreakdown::default();
    let mut flag = false;
    let mut log_coeff = ZERO;
    let rho = match cutoff {
        Some(c) => c.r1.max(1.0).max(shift.map(|s| s.cutoff.r1).unwrap_or(0.0)),
        None => 1.0,
    };
    for (j, comp) in sigma.components().iter().enumerate() {
        if comp.profile.is_zero() {
            out.sphere_parts.push(ZERO);
            continue;
        }
        let p = profile_integral(&comp.profile, d)?;
        let base = comp.degree;
        let eff = sigma.effective_degree(j);
        let beta = eff + d as f64;
        if let Some(chi) = cutoff {
            let w = |r: f64| -> Complex64 {
                let c = chi.radial(r);
                if c == 0.0 {
                    return ZERO;
                }
                let radial = ((base + (d as f64 - 1.0)) * r.ln()).exp() * c;
                match shift {
                    Some(s) => radial * s.factor(r),
                    None => radial,
                }
            };
            let mut cuts = vec![chi.r0, chi.r1, rho];
            if let Some(s) = shift {
                cuts.push(s.cutoff.r0);
                cuts.push(s.cutoff.r1);
            }
            cuts.retain(|&v| v >= chi.r0 && v <= rho);
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cuts.dedup();
            let mut ball = ZERO;
            for win in cuts.windows(2) {
                ball += quad::adaptive(&w, win[0], win[1], 1e-15)?;
            }
            out.ball_part += ball * p;
        }
        if beta.norm() < LOG_TOL {
            flag = true;
            log_coeff += p;
            out.sphere_parts.push(-p * rho.ln());
        } else if cutoff.is_some() {
            out.sphere_parts.push(-p * (beta * rho.ln()).exp() / beta);
        } else {
            // pure homogeneous term: ball and sphere parts cancel
            out.sphere_parts.push(ZERO);
        }
    }
    if let Some(rem) = sigma.remainder() {
        let decay = rem.decay + shift.map(|s| s.bz.re).unwrap_or(0.0);
        let f = |x: &[f64]| -> Complex64 {
            let v = (rem.eval)(x);
            match shift {
                Some(s) => v * s.factor(x.iter().map(|t| t * t).sum::<f64>().sqrt()),
                None => v,
            }
        };
        out.remainder_part = integrate_rd(&f, d, decay, 1e-13, 2.0 * sigma.saturation_radius().max(1.0))?;
    }
    let value = out.remainder_part + out.ball_part + out.sphere_parts.iter().sum::<Complex64>();
    Ok(RegIntegralResult {
        value,
        breakdown: out,
        had_log_obstruction: flag,
        log_coeff,
    })
}

/// Integral over R^d of an integrable function decaying like |x|^decay.
fn integrate_rd(f: &dyn Fn(&[f64]) -> Complex64, d: usize, decay: f64, tol: f64, min_end: f64) -> Result<Complex64> {
    if d == 1 {
        let g = |t: f64| f(&[t]) + f(&[-t]);
        return quad::half_line(&g, 0.0, decay, tol, min_end);
    }
    let sq = SphereQuadrature::new(d, if d == 2 { 64 } else { 24 })?;
    let g = |r: f64| -> Complex64 {
        let s = sq.integrate(|w| {
            let x: Vec<f64> = w.iter().map(|v| v * r).collect();
            f(&x)
        });
        s * r.powi(d as i32 - 1)
    };
    quad::half_line(&g, 0.0, decay + d as f64 - 1.0, tol, min_end)
}

/// Integral of f over the euclidean ball B(0, R).
pub fn ball_integral_numeric(f: &dyn PointFn, r: f64, tol: f64) -> Result<Complex64> {
    let d = f.dim();
    if r <= 0.0 {
        return Err(Error::Param("radius must be positive".into()));
    }
    if d == 1 {
        return line_integral(f, -r, r, tol);
    }
    if d > 4 {
        return Err(Error::Precondition("ball integrals support d <= 4".into()));
    }
    let radial_profile = |r: f64, sq: &SphereQuadrature| -> Complex64 {
        if f.is_radial() {
            let mut x = vec![0.0; d];
            x[0] = r;
            f.eval(&x) * sphere_volume(d)
        } else {
            sq.integrate(|w| {
                let x: Vec<f64> = w.iter().map(|v| v * r).collect();
                f.eval(&x)
            })
        }
    };
    let run = |n: usize| -> Result<Complex64> {
        let sq = SphereQuadrature::new(d, n)?;
        let g = |t: f64| radial_profile(t, &sq) * t.powi(d as i32 - 1);
        let cuts = radial_cuts(f.smooth_beyond(), r);
        let mut s = ZERO;
        for w in cuts.windows(2) {
            s += quad::adaptive(&g, w[0], w[1], tol * 1e-2)?;
        }
        Ok(s)
    };
    if f.is_radial() {
        return run(2);
    }
    let base = if d == 2 { 64 } else { 16 };
    let a = run(base)?;
    let b = run(2 * base)?;
    if (a - b).norm() > tol * b.norm().max(1.0) {
        return Err(Error::Accuracy {
            message: "ball integral angular resolution insufficient".into(),
            estimate: b,
        });
    }
    Ok(b)
}

fn radial_cuts(smooth: f64, r: f64) -> Vec<f64> {
    let mut cuts = vec![0.0];
    let mut t = 0.25;
    while t < smooth.min(r) {
        cuts.push(t);
        t += 0.25;
    }
    let mut t = smooth.max(t);
    while t < r {
        cuts.push(t);
        t *= 2.0;
    }
    cuts.push(r);
    cuts.dedup();
    cuts
}

fn line_integral(f: &dyn PointFn, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    let g = |t: f64| f.eval(&[t]);
    // unit panels near the origin, geometric panels further out
    let mut cuts = vec![a, b];
    let s = f.smooth_beyond();
    let mut t = -s.ceil() - 1.0;
    while t <= s.ceil() + 1.0 {
        cuts.push(t);
        t += 0.25;
    }
    let mut t = s.max(1.0) * 2.0;
    while t < b.max(-a) {
        cuts.push(t);
        cuts.push(-t);
        t *= 2.0;
    }
    cuts.retain(|&v| v >= a && v <= b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut total = ZERO;
    for w in cuts.windows(2) {
        total += quad::adaptive(&g, w[0], w[1], tol * 1e-2)?;
    }
    Ok(total)
}

/// Points of the face of [-1, 1]^d normal to axis i with sign `sgn`.
fn face_point(d: usize, i: usize, sgn: f64, y: &[f64]) -> Vec<f64> {
    let mut x = Vec::with_capacity(d);
    let mut k = 0;
    for a in 0..d {
        if a == i {
            x.push(sgn);
        } else {
            x.push(y[k]);
            k += 1;
        }
    }
    x
}

/// Tensor Gauss–Legendre over [-1, 1]^m.
fn cube_rule(m: usize, n: usize) -> Vec<(Vec<f64>, f64)> {
    let rule = quad::gl_rule(n);
    let mut out = vec![(Vec::new(), 1.0)];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * n);
        for (p, w) in &out {
            for &(x, wx) in rule.iter() {
                let mut q = p.clone();
                q.push(x);
                next.push((q, w * wx));
            }
        }
        out = next;
    }
    out
}

/// Integral of f over the cube [-R, R]^d.
pub fn supball_integral_numeric(f: &dyn PointFn, r: f64, tol: f64) -> Result<Complex64> {
    let d = f.dim();
    if d == 1 {
        return ball_integral_numeric(f, r, tol);
    }
    if d > 3 {
        return Err(Error::Precondition("cube integrals support d <= 3".into()));
    }
    let rho = f.smooth_beyond().min(r);
    let inner = ball_integral_numeric(f, rho, tol)?;
    let run = |ny: usize, nt: usize| -> Complex64 {
        let ys = cube_rule(d - 1, ny);
        let trule = quad::gl_rule(nt);
        let mut total = ZERO;
        for i in 0..d {
            for sgn in [1.0, -1.0] {
                for (y, wy) in &ys {
                    let v = face_point(d, i, sgn, y);
                    let len = v.iter().map(|t| t * t).sum::<f64>().sqrt();
                    let t0 = rho / len;
                    if t0 >= r {
                        continue;
                    }
                    // t = e^u, dx = t^{d-1} dt dy = t^d du dy
                    let (u0, u1) = (t0.ln(), r.ln());
                    let h = 0.5 * (u1 - u0);
                    let c = 0.5 * (u1 + u0);
                    let mut s = ZERO;
                    for &(xn, wn) in trule.iter() {
                        let t = (c + h * xn).exp();
                        let x: Vec<f64> = v.iter().map(|a| a * t).collect();
                        s += f.eval(&x) * (wn * t.powi(d as i32));
                    }
                    total += s * (h * wy);
                }
            }
        }
        total
    };
    let a = run(40, 40);
    let b = run(64, 64);
    if (a - b).norm() > tol * b.norm().max(1.0) {
        return Err(Error::Accuracy {
            message: "cube integral quadrature did not converge".into(),
            estimate: inner + b,
        });
    }
    Ok(inner + b)
}

/// Integral of the degree -d component over [-1,1]^d minus B(0,1).
pub fn polytope_ball_correction(sigma: &ClassicalSymbol) -> Result<Complex64> {
    let d = sigma.dim();
    if d == 1 {
        return Ok(ZERO);
    }
    if d > 3 {
        return Err(Error::Precondition("cube correction supports d <= 3".into()));
    }
    let target = -(d as f64);
    let comp = sigma
        .components()
        .iter()
        .enumerate()
        .find(|(j, _)| (sigma.effective_degree(*j) - target).norm() < 1e-9);
    let Some((j, comp)) = comp else {
        return Ok(ZERO);
    };
    let shift = sigma.shift_exponent();
    let run = |n: usize| -> Complex64 {
        let ys = cube_rule(d - 1, n);
        let mut total = ZERO;
        for i in 0..d {
            for sgn in [1.0, -1.0] {
                for (y, w) in &ys {
                    let v = face_point(d, i, sgn, y);
                    let len = v.iter().map(|t| t * t).sum::<f64>().sqrt();
                    let val = comp.eval(&v) * (shift * len.ln()).exp();
                    total += val * (len.ln() * w);
                }
            }
        }
        total
    };
    let _ = j;
    let a = run(48);
    let b = run(96);
    if (a - b).norm() > 1e-10 * b.norm().max(1.0) {
        return Err(Error::Accuracy {
            message: "cube correction quadrature did not converge".into(),
            estimate: b,
        });
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{quadratic_symbol, CutoffFunction, QuadraticForm};

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn sphere_examples() {
        let one = |_: &[f64]| c(1.0);
        assert!((sphere_integral(one, 2, 1e-13).unwrap().re - 2.0 * PI).abs() < 1e-12);
        assert!((sphere_integral(one, 3, 1e-13).unwrap().re - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_integral(one, 4, 1e-13).unwrap().re - 2.0 * PI * PI).abs() < 1e-11);
        let sq = |w: &[f64]| c(w[0] * w[0]);
        assert!((sphere_integral(sq, 2, 1e-13).unwrap().re - PI).abs() < 1e-12);
        assert!((sphere_integral(sq, 3, 1e-13).unwrap().re - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn residue_examples() {
        let s = ClassicalSymbol::radial_power(1, -1.0);
        let r = noncommutative_residue(&s).unwrap();
        assert!((r.re - 2.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        let s = ClassicalSymbol::radial_power(1, -1.5);
        assert_eq!(noncommutative_residue(&s).unwrap(), ZERO);
        let q = QuadraticForm::new(2, vec![1.0, 0.0, 0.0, 4.0]).unwrap();
        let s = quadratic_symbol(&q, c(1.0), Some(CutoffFunction::default()));
        // (2 pi)^{-1} * 2 pi / sqrt(det)
        assert!((noncommutative_residue(&s).unwrap().re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pure_power_integral_vanishes() {
        let q = QuadraticForm::identity(2);
        let s = quadratic_symbol(&q, c(-0.7), None);
        assert_eq!(cutoff_integral(&s).unwrap().value, ZERO);
    }

    #[test]
    fn convergent_integral_matches_numeric() {
        // chi |x|^{-3.5} in d = 2: 2 pi int chi r^{-2.5} dr
        let s = ClassicalSymbol::radial_power(2, -3.5);
        let v = cutoff_integral(&s).unwrap().value;
        let chi = CutoffFunction::default();
        let g = |r: f64| chi.radial(r) * r.powf(-2.5);
        let direct = 2.0 * PI * (quad::adaptive_real(&g, 0.5, 1.0, 1e-15).unwrap() + 1.0 / 1.5);
        assert!((v.re - direct).abs() < 1e-12);
    }

    #[test]
    fn corner_correction_positive() {
        let s = ClassicalSymbol::radial_power(2, -2.0);
        let v = polytope_ball_correction(&s).unwrap();
        // 4 int_{-1}^{1} ln(1+y^2)/(2(1+y^2)) dy
        let g = |y: f64| (1.0 + y * y).ln() / (2.0 * (1.0 + y * y));
        let e = 4.0 * quad::adaptive_real(&g, -1.0, 1.0, 1e-15).unwrap();
        assert!(v.re > 0.0);
        assert!((v.re - e).abs() < 1e-12);
    }
}
