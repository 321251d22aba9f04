//! One-dimensional Euler–MacLaurin engine.

use crate::error::{Error, Result};
use crate::exactnum::{self, PeriodicBernoulli};
use crate::quad;
use crate::symbols::{ClassicalSymbol, PointFn};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Parameters of the Euler–MacLaurin pipeline.
#[derive(Debug, Clone)]
pub struct EMParams {
    /// Bernoulli correction order; 0 picks one automatically.
    pub k: usize,
    pub quad_tol: f64,
    pub n_range: Vec<usize>,
}

impl Default for EMParams {
    fn default() -> Self {
        EMParams {
            k: 0,
            quad_tol: 1e-14,
            n_range: Vec::new(),
        }
    }
}

/// f together with derivatives: `f(x, k)` returns f^{(k)}(x).
pub struct SmoothFn {
    f: Box<dyn Fn(f64, usize) -> f64 + Send + Sync>,
}

impl SmoothFn {
    pub fn new(f: impl Fn(f64, usize) -> f64 + Send + Sync + 'static) -> Self {
        SmoothFn { f: Box::new(f) }
    }

    /// Derivatives by central differences (orders up to about 6 are usable).
    pub fn from_values(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SmoothFn::new(move |x, k| {
            if k == 0 {
                return f(x);
            }
            let h = 0.02 * x.abs().max(1.0);
            let est = |h: f64| {
                let mut s = 0.0;
                let mut binom = 1.0;
                for i in 0..=k {
                    let t = x + (k as f64 / 2.0 - i as f64) * h;
                    let sgn = if i % 2 == 0 { 1.0 } else { -1.0 };
                    s += sgn * binom * f(t);
                    binom = binom * (k - i) as f64 / (i + 1) as f64;
                }
                s / h.powi(k as i32)
            };
            (4.0 * est(h / 2.0) - est(h)) / 3.0
        })
    }

    pub fn eval(&self, x: f64, k: usize) -> f64 {
        (self.f)(x, k)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EmCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Compare sum_{n=M}^N f(n) with the Euler–MacLaurin right-hand side.
pub fn em_identity_check(f: &SmoothFn, m: i64, n: i64, k: usize) -> Result<EmCheck> {
    if m >= n {
        return Err(Error::Param(format!("need M < N, got {m} >= {n}")));
    }
    if k < 1 {
        return Err(Error::Param("K must be at least 1".into()));
    }
    let lhs: f64 = (m..=n).map(|i| f.eval(i as f64, 0)).sum();
    let nodes = 16 + k;
    let mut integral = 0.0;
    for i in m..n {
        integral += quad::gl_fixed_real(|x| f.eval(x, 0), i as f64, i as f64 + 1.0, nodes);
    }
    let (a, b) = (m as f64, n as f64);
    let mut rhs = integral + 0.5 * (f.eval(a, 0) + f.eval(b, 0));
    for j in 1..=k / 2 {
        let b2 = exactnum::to_f64(&exactnum::bernoulli_number(2 * j));
        rhs += b2 / factorial(2 * j) * (f.eval(b, 2 * j - 1) - f.eval(a, 2 * j - 1));
    }
    let pb = PeriodicBernoulli::new(k);
    let mut rem = 0.0;
    for i in m..n {
        rem += quad::gl_fixed_real(|x| pb.eval(x) * f.eval(x, k), i as f64, i as f64 + 1.0, nodes);
    }
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    rhs += sign * rem / factorial(k);
    Ok(EmCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, i| a * i as f64)
}

fn falling(a: Complex64, k: usize) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, i| acc * (a - i as f64))
}

fn cpow(x: f64, e: Complex64) -> Complex64 {
    (e * x.ln()).exp()
}

fn exact_nonneg_integer(z: Complex64) -> Option<usize> {
    if z.im == 0.0 && z.re >= 0.0 && z.re == z.re.round() {
        Some(z.re as usize)
    } else {
        None
    }
}

/// Finite part of sum_{j >= 0} (m + j)^delta. With `at_infinity` false the
/// boundary finite parts at infinity are dropped, which gives the analytic
/// continuation in delta instead of the finite part.
pub(crate) fn power_tail_fp(delta: Complex64, m: f64, k: usize, tol: f64, at_infinity: bool) -> Result<Complex64> {
    // fp of the integral from m to N
    let dp1 = delta + 1.0;
    let mut v = if dp1.norm() == 0.0 {
        Complex64::new(-m.ln(), 0.0)
    } else {
        -cpow(m, dp1) / dp1
    };
    // (f(m) + fp f(N)) / 2
    v += cpow(m, delta) * 0.5;
    if at_infinity && delta == ZERO {
        v += 0.5;
    }
    let int_deg = exact_nonneg_integer(delta);
    for j in 1..=k / 2 {
        let order = 2 * j - 1;
        let b2 = exactnum::to_f64(&exactnum::bernoulli_number(2 * j)) / factorial(2 * j);
        let at_m = falling(delta, order) * cpow(m, delta - order as f64);
        let at_inf = if at_infinity && int_deg == Some(order) {
            falling(delta, order)
        } else {
            ZERO
        };
        v += (at_inf - at_m) * b2;
    }
    // remainder (-1)^{K-1}/K! int_m^inf P_K f^{(K)}
    let fk = falling(delta, k);
    if fk != ZERO {
        let pb = PeriodicBernoulli::new(k);
        let e = delta - k as f64;
        let nodes = 8 + k / 2 + 8;
        let mut acc = ZERO;
        let mut x = m;
        let start = cpow(m, e).norm();
        for _ in 0..1_000_000 {
            let piece = quad::gl_fixed(|t| cpow(t, e) * pb.eval(t - m), x, x + 1.0, nodes);
            acc += piece;
            x += 1.0;
            // remaining tail of |x^e| beyond x, relative to the start
            let tail = cpow(x, e).norm() * x / (-e.re - 1.0).max(1e-3);
            if tail * fk.norm() / factorial(k) < tol * 1e-3 || cpow(x, e).norm() < 1e-20 * start {
                break;
            }
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        v += acc * fk * (sign / factorial(k));
    }
    Ok(v)
}

/// Canonical regularized sum over Z of a d = 1 symbol.
pub fn cutoff_sum_1d(sigma: &ClassicalSymbol, params: &EMParams) -> Result<Complex64> {
    if sigma.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: sigma.dim() });
    }
    let order = sigma.order();
    let k_min = order.re + 2.0;
    let k = if params.k == 0 {
        let mut k = (k_min.max(0.0).ceil() as usize + 14).max(16);
        if k % 2 == 1 {
            k += 1;
        }
        k
    } else {
        params.k
    };
    if (k as f64) <= k_min {
        return Err(Error::Param(format!(
            "K = {k} is too small for order {order}: need K > Re(a) + 2"
        )));
    }
    let m = (sigma.saturation_radius().ceil() as i64 + 1).max(10);
    let mut total = ZERO;
    for n in -(m - 1)..=(m - 1) {
        total += PointFn::eval(sigma, &[n as f64]);
    }
    let remainder = sigma.remainder();
    for (j, comp) in sigma.components().iter().enumerate() {
        if comp.profile.is_zero() {
            continue;
        }
        let delta = sigma.effective_degree(j);
        let fp = power_tail_fp(delta, m as f64, k, params.quad_tol, true)?;
        let cp = comp.profile.on_sphere(&[1.0]);
        let cm = comp.profile.on_sphere(&[-1.0]);
        total += fp * (cp + cm);
    }
    if let Some(rem) = remainder {
        let decay = rem.decay + sigma.shift_exponent().re;
        if decay >= -1.0 {
            return Err(Error::Precondition(format!(
                "remainder decay {decay} is not summable"
            )));
        }
        let shift = sigma.shift().copied();
        let g = |x: f64| -> Complex64 {
            let v = (rem.eval)(&[x]);
            match shift {
                Some(s) => v * s.factor(x.abs()),
                None => v,
            }
        };
        total += remainder_tail(&g, m, decay, params.quad_tol)?;
    }
    Ok(total)
}

/// sum_{|n| >= m} g(n) by direct summation followed by an integral tail.
fn remainder_tail(g: &dyn Fn(f64) -> Complex64, m: i64, decay: f64, tol: f64) -> Result<Complex64> {
    let l = 4096i64.max(4 * m);
    let mut s = ZERO;
    for n in m..=l {
        s += g(n as f64) + g(-(n as f64));
    }
    for sgn in [1.0, -1.0] {
        let h = |x: f64| g(sgn * x);
        let lf = l as f64;
        // sum_{n > L} h(n) ~ int_L^inf h - h(L)/2 - h'(L)/12
        let int = quad::half_line(&h, lf, decay, tol, 0.0)?;
        let dh = (h(lf + 0.5) - h(lf - 0.5)) / 1.0;
        s += int - h(lf) * 0.5 - dh / 12.0;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_identity_is_exact() {
        let f = SmoothFn::new(|x, k| match k {
            0 => x * x * x,
            1 => 3.0 * x * x,
            2 => 6.0 * x,
            3 => 6.0,
            _ => 0.0,
        });
        let c = em_identity_check(&f, 0, 5, 4).unwrap();
        assert!(c.gap < 1e-12, "{c:?}");
        assert!((c.lhs - 225.0).abs() < 1e-12);
    }

    #[test]
    fn lorentzian_identity() {
        // 1/(1+x^2) = Im 1/(x - i)
        let f = SmoothFn::new(|x, k| {
            let z = Complex64::new(x, -1.0);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            (z.powi(-(k as i32) - 1) * (sign * factorial(k))).im
        });
        let c = em_identity_check(&f, -10, 10, 6).unwrap();
        assert!(c.gap < 1e-9, "{c:?}");
    }

    #[test]
    fn exponential_identity() {
        let f = SmoothFn::new(|x, k| if k % 2 == 0 { (-x).exp() } else { -(-x).exp() });
        let c = em_identity_check(&f, 0, 20, 8).unwrap();
        assert!(c.gap < 1e-9, "{c:?}");
    }

    #[test]
    fn convergent_sum_matches_zeta3() {
        let s = ClassicalSymbol::radial_power(1, -3.0);
        let v = cutoff_sum_1d(&s, &EMParams::default()).unwrap();
        let zeta3 = 1.202_056_903_159_594_2;
        assert!((v.re - 2.0 * zeta3).abs() < 1e-12, "{v}");
    }

    #[test]
    fn half_integer_power_matches_zeta() {
        // 2 zeta(1.5)
        let s = ClassicalSymbol::radial_power(1, -1.5);
        let v = cutoff_sum_1d(&s, &EMParams::default()).unwrap();
        assert!((v.re - 2.0 * 2.612_375_348_685_488).abs() < 1e-12, "{v}");
    }

    #[test]
    fn small_k_is_rejected() {
        let s = ClassicalSymbol::radial_power(1, 3.5);
        let p = EMParams {
            k: 4,
            ..EMParams::default()
        };
        assert!(matches!(cutoff_sum_1d(&s, &p), Err(Error::Param(_))));
    }
}
