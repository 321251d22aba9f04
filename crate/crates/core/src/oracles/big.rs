//! Multiprecision complex arithmetic and the Euler–MacLaurin Hurwitz zeta.

use crate::error::{Error, Result};
use crate::exactnum;
use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_complex::Complex64;

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision and constants cache.
pub struct Ctx {
    pub p: usize,
    cc: Consts,
}

#[derive(Clone, Debug)]
pub struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

fn big_to_f64(x: &BigFloat, cc: &mut Consts) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    match x.format(Radix::Dec, RM, cc) {
        Ok(s) => s.parse::<f64>().unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    }
}

impl Ctx {
    pub fn new(p: usize) -> Result<Self> {
        let cc = Consts::new().map_err(|e| Error::Accuracy {
            message: format!("constant cache: {e:?}"),
            estimate: Complex64::new(f64::NAN, 0.0),
        })?;
        Ok(Ctx { p, cc })
    }

    pub fn real(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    pub fn int(&self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.p)
    }

    pub fn parse(&mut self, s: &str) -> BigFloat {
        BigFloat::parse(s, Radix::Dec, self.p, RM, &mut self.cc)
    }

    pub fn rational(&mut self, r: &exactnum::Rational) -> BigFloat {
        let n = self.parse(&r.numer().to_string());
        let d = self.parse(&r.denom().to_string());
        n.div(&d, self.p, RM)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.p, RM)
    }

    pub fn c(&self, z: Complex64) -> BigComplex {
        BigComplex {
            re: self.real(z.re),
            im: self.real(z.im),
        }
    }

    pub fn c_real(&self, x: BigFloat) -> BigComplex {
        BigComplex {
            re: x,
            im: self.real(0.0),
        }
    }

    pub fn add(&self, a: &BigComplex, b: &BigComplex) -> BigComplex {
        BigComplex {
            re: a.re.add(&b.re, self.p, RM),
            im: a.im.add(&b.im, self.p, RM),
        }
    }

    pub fn sub(&self, a: &BigComplex, b: &BigComplex) -> BigComplex {
        BigComplex {
            re: a.re.sub(&b.re, self.p, RM),
            im: a.im.sub(&b.im, self.p, RM),
        }
    }

    pub fn mul(&self, a: &BigComplex, b: &BigComplex) -> BigComplex {
        let p = self.p;
        BigComplex {
            re: a.re.mul(&b.re, p, RM).sub(&a.im.mul(&b.im, p, RM), p, RM),
            im: a.re.mul(&b.im, p, RM).add(&a.im.mul(&b.re, p, RM), p, RM),
        }
    }

    pub fn scale(&self, a: &BigComplex, k: &BigFloat) -> BigComplex {
        BigComplex {
            re: a.re.mul(k, self.p, RM),
            im: a.im.mul(k, self.p, RM),
        }
    }

    pub fn div(&self, a: &BigComplex, b: &BigComplex) -> BigComplex {
        let p = self.p;
        let den = b.re.mul(&b.re, p, RM).add(&b.im.mul(&b.im, p, RM), p, RM);
        let re = a.re.mul(&b.re, p, RM).add(&a.im.mul(&b.im, p, RM), p, RM);
        let im = a.im.mul(&b.re, p, RM).sub(&a.re.mul(&b.im, p, RM), p, RM);
        BigComplex {
            re: re.div(&den, p, RM),
            im: im.div(&den, p, RM),
        }
    }

    pub fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(self.p, RM, &mut self.cc)
    }

    /// exp(w * log_x) for a real logarithm log_x.
    pub fn exp_times(&mut self, w: &BigComplex, log_x: &BigFloat) -> BigComplex {
        let p = self.p;
        let a = w.re.mul(log_x, p, RM);
        let b = w.im.mul(log_x, p, RM);
        let m = a.exp(p, RM, &mut self.cc);
        let c = b.cos(p, RM, &mut self.cc);
        let s = b.sin(p, RM, &mut self.cc);
        BigComplex {
            re: m.mul(&c, p, RM),
            im: m.mul(&s, p, RM),
        }
    }

    pub fn to_c64(&mut self, z: &BigComplex) -> Complex64 {
        Complex64::new(big_to_f64(&z.re, &mut self.cc), big_to_f64(&z.im, &mut self.cc))
    }

    pub fn to_f64(&mut self, x: &BigFloat) -> f64 {
        big_to_f64(x, &mut self.cc)
    }

    /// |z - (re + i im)| with re given in decimal.
    pub fn distance_to(&mut self, z: &BigComplex, re: &str, im: &str) -> f64 {
        let r = self.parse(re);
        let i = self.parse(im);
        let dr = z.re.sub(&r, self.p, RM);
        let di = z.im.sub(&i, self.p, RM);
        let n = dr.mul(&dr, self.p, RM).add(&di.mul(&di, self.p, RM), self.p, RM);
        self.to_f64(&n).sqrt()
    }

    pub fn abs_f64(&mut self, z: &BigComplex) -> f64 {
        self.to_c64(z).norm()
    }
}

/// Euler–MacLaurin evaluation with an error bound.
pub struct HurwitzParts {
    /// Everything except the pole term (N+a)^{1-s}/(s-1).
    pub regular: BigComplex,
    /// ln(N + a), for pole bookkeeping.
    pub log_na: BigFloat,
    pub bound: f64,
}

/// Pieces of zeta(s, a) = sum_{k>=0} (k+a)^{-s} with N explicit terms and
/// M Bernoulli corrections.
pub fn hurwitz_parts(ctx: &mut Ctx, s: Complex64, a: &BigFloat, n: usize, m: usize) -> Result<HurwitzParts> {
    let sb = ctx.c(s);
    let neg_s = ctx.c(-s);
    let mut sum = ctx.c(Complex64::new(0.0, 0.0));
    for k in 0..n {
        let x = a.add(&ctx.int(k as i64), ctx.p, RM);
        let lx = ctx.ln(&x);
        let t = ctx.exp_times(&neg_s, &lx);
        sum = ctx.add(&sum, &t);
    }
    let na = a.add(&ctx.int(n as i64), ctx.p, RM);
    let lna = ctx.ln(&na);
    let pw = ctx.exp_times(&neg_s, &lna);
    let half = ctx.real(0.5);
    sum = ctx.add(&sum, &ctx.scale(&pw, &half));
    // B_{2j}/(2j)! (s)_{2j-1} (N+a)^{-s-2j+1}
    let inv_na = ctx.int(1).div(&na, ctx.p, RM);
    let inv_na2 = inv_na.mul(&inv_na, ctx.p, RM);
    let mut rising = sb.clone();
    let mut power = ctx.scale(&pw, &inv_na);
    let mut fact = ctx.int(2);
    let mut last = 0.0;
    for j in 1..=m {
        let b = ctx.rational(&exactnum::bernoulli_number(2 * j));
        let coef = b.div(&fact, ctx.p, RM);
        let term = ctx.scale(&ctx.mul(&rising, &power), &coef);
        last = ctx.abs_f64(&term);
        sum = ctx.add(&sum, &term);
        // advance to j + 1
        // shifts of s in full precision; rounding s + k in f64 would
        // break the cancellation against the pole term
        let k1 = ctx.add(&sb, &ctx.c_real(ctx.int((2 * j - 1) as i64)));
        let k2 = ctx.add(&sb, &ctx.c_real(ctx.int((2 * j) as i64)));
        rising = ctx.mul(&ctx.mul(&rising, &k1), &k2);
        power = ctx.scale(&power, &inv_na2);
        let f1 = ctx.int((2 * j + 1) as i64);
        let f2 = ctx.int((2 * j + 2) as i64);
        fact = fact.mul(&f1, ctx.p, RM).mul(&f2, ctx.p, RM);
    }
    // remainder bounded by the first omitted term times |s + 2M + 1| / Re(s + 2M + 1)
    let sigma = s.re + 2.0 * m as f64 + 1.0;
    if sigma <= 0.0 {
        return Err(Error::Accuracy {
            message: "too few Bernoulli corrections for this s".into(),
            estimate: ctx.to_c64(&sum),
        });
    }
    let bound = last * (s + 2.0 * m as f64 + 1.0).norm() / sigma;
    Ok(HurwitzParts {
        regular: sum,
        log_na: lna,
        bound,
    })
}

/// (N+a)^{1-s}/(s-1).
pub fn pole_term(ctx: &mut Ctx, s: Complex64, log_na: &BigFloat) -> BigComplex {
    let one = ctx.c_real(ctx.int(1));
    let sb = ctx.c(s);
    let w = ctx.sub(&one, &sb);
    let pw = ctx.exp_times(&w, log_na);
    let den = ctx.sub(&sb, &one);
    ctx.div(&pw, &den)
}

/// Truncation N and Bernoulli order M for a target tolerance.
pub fn em_sizes(s: Complex64, bits: usize) -> (usize, usize) {
    let digits = bits as f64 * 0.30103;
    let m = (digits * 0.7).ceil() as usize + 10;
    let n = (s.norm() + 2.0 * m as f64) as usize / 2 + 20;
    (n, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_roundtrip() {
        let mut ctx = Ctx::new(192).unwrap();
        let x = ctx.real(-0.15625);
        assert_eq!(ctx.to_f64(&x), -0.15625);
        let r = ctx.rational(&exactnum::rat(1, 3));
        assert!((ctx.to_f64(&r) - 1.0 / 3.0).abs() < 1e-16);
        let pi = ctx.pi();
        assert_eq!(ctx.to_f64(&pi), std::f64::consts::PI);
    }
}
