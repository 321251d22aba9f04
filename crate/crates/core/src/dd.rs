//! Double-double helpers on top of `twofloat` arithmetic.
//!
//! The elementary functions here are written out because lattice sums of
//! growing symbols lose the finite part to cancellation in plain f64, and
//! the transcendental functions shipped with `twofloat` are not accurate to
//! full double-double precision.

use num_complex::Complex64;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use twofloat::TwoFloat;

pub type Dd = TwoFloat;

const LN2: (f64, f64) = (std::f64::consts::LN_2, 2.319_046_813_846_299_6e-17);
const FRAC_PI_2: (f64, f64) = (std::f64::consts::FRAC_PI_2, 6.123_233_995_736_766e-17);

#[inline]
pub fn dd(x: f64) -> Dd {
    TwoFloat::from(x)
}

#[inline]
fn pair(hi: f64, lo: f64) -> Dd {
    TwoFloat::new_add(hi, lo)
}

#[inline]
pub fn to_f64(x: Dd) -> f64 {
    x.hi() + x.lo()
}

/// Quotient to full double-double accuracy; the `Div` impl of `twofloat`
/// is only good to about one ulp of f64.
pub fn div(a: Dd, b: Dd) -> Dd {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

pub fn exp(x: Dd) -> Dd {
    let h = x.hi();
    if h > 709.0 {
        return dd(f64::INFINITY);
    }
    if h < -745.0 {
        return dd(0.0);
    }
    let k = (h / LN2.0).round();
    let r = (x - pair(LN2.0, LN2.1) * k) / 1024.0;
    // expm1 by Taylor, then ten doublings e^{2y}-1 = (e^y-1)(e^y+1)
    let mut term = r;
    let mut sum = r;
    for i in 2..=12 {
        term = div(term * r, dd(i as f64));
        sum += term;
    }
    for _ in 0..10 {
        sum = sum * (sum + 2.0);
    }
    let e = sum + 1.0;
    scale2(e, k as i32)
}

fn scale2(x: Dd, k: i32) -> Dd {
    // split to stay inside the normal range of powi
    let mut out = x;
    let mut k = k;
    while k > 1000 {
        out *= 2f64.powi(1000);
        k -= 1000;
    }
    while k < -1000 {
        out *= 2f64.powi(-1000);
        k += 1000;
    }
    out * 2f64.powi(k)
}

pub fn ln(x: Dd) -> Dd {
    let h = x.hi();
    if h <= 0.0 {
        return dd(f64::NAN);
    }
    let y = dd(h.ln());
    // one Newton step doubles the f64 accuracy
    y + x * exp(-y) - 1.0
}

/// sin and cos of a double-double argument.
pub fn sin_cos(x: Dd) -> (Dd, Dd) {
    let k = (x.hi() / FRAC_PI_2.0).round();
    let r = x - pair(FRAC_PI_2.0, FRAC_PI_2.1) * k;
    let r2 = r * r;
    let mut s = r;
    let mut c = dd(1.0);
    let mut ts = r;
    let mut tc = dd(1.0);
    for i in 1..=14 {
        let n = 2 * i;
        tc = -div(tc * r2, dd((n * (n - 1)) as f64));
        ts = -div(ts * r2, dd((n * (n + 1)) as f64));
        c += tc;
        s += ts;
    }
    match (k as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// Complex double-double.
#[derive(Clone, Copy, Debug)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: TwoFloat::from_f64(0.0),
        im: TwoFloat::from_f64(0.0),
    };
    pub const ONE: Cdd = Cdd {
        re: TwoFloat::from_f64(1.0),
        im: TwoFloat::from_f64(0.0),
    };

    #[inline]
    pub fn new(re: Dd, im: Dd) -> Self {
        Cdd { re, im }
    }

    #[inline]
    pub fn real(re: Dd) -> Self {
        Cdd { re, im: dd(0.0) }
    }

    #[inline]
    pub fn from_c64(z: Complex64) -> Self {
        Cdd {
            re: dd(z.re),
            im: dd(z.im),
        }
    }

    #[inline]
    pub fn to_c64(self) -> Complex64 {
        Complex64::new(to_f64(self.re), to_f64(self.im))
    }

    #[inline]
    pub fn scale(self, k: Dd) -> Self {
        Cdd {
            re: self.re * k,
            im: self.im * k,
        }
    }

    #[inline]
    pub fn scale_f(self, k: f64) -> Self {
        Cdd {
            re: self.re * k,
            im: self.im * k,
        }
    }

    pub fn conj(self) -> Self {
        Cdd {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.to_c64().norm()
    }

    pub fn exp(self) -> Self {
        let m = exp(self.re);
        if self.im.hi() == 0.0 && self.im.lo() == 0.0 {
            return Cdd::real(m);
        }
        let (s, c) = sin_cos(self.im);
        Cdd { re: m * c, im: m * s }
    }

    /// `base^e` for a positive double-double base.
    pub fn powc(log_base: Dd, e: Cdd) -> Self {
        e.scale(log_base).exp()
    }
}

impl Add for Cdd {
    type Output = Cdd;
    #[inline]
    fn add(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl AddAssign for Cdd {
    #[inline]
    fn add_assign(&mut self, o: Cdd) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    #[inline]
    fn sub(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    #[inline]
    fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, o: Cdd) -> Cdd {
        let den = o.norm_sqr();
        let num = self * o.conj();
        Cdd {
            re: div(num.re, den),
            im: div(num.im, den),
        }
    }
}
