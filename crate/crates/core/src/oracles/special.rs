//! Gamma functions in double precision.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn nonpositive_integer(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

/// Gamma(s) for Re s >= 1/2.
fn gamma_right(s: Complex64) -> Complex64 {
    let z = s - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

pub fn gamma(s: Complex64) -> Complex64 {
    if s.re < 0.5 {
        PI / ((s * PI).sin() * gamma_right(Complex64::new(1.0, 0.0) - s))
    } else {
        gamma_right(s)
    }
}

/// 1 / Gamma(s), exactly 0 at the poles of Gamma.
pub fn rgamma(s: Complex64) -> Complex64 {
    if nonpositive_integer(s) {
        return Complex64::new(0.0, 0.0);
    }
    if s.re < 0.5 {
        (s * PI).sin() * gamma_right(Complex64::new(1.0, 0.0) - s) / PI
    } else {
        1.0 / gamma_right(s)
    }
}

/// e^{x} x^{-a} Gamma(a, x) for x > 0 by the Legendre continued fraction.
pub fn upper_gamma_scaled(a: Complex64, x: f64) -> Complex64 {
    upper_gamma_scaled_with_error(a, x).0
}

/// As `upper_gamma_scaled`, with an estimate of the rounding error, which
/// grows with the number of continued fraction steps.
pub fn upper_gamma_scaled_with_error(a: Complex64, x: f64) -> (Complex64, f64) {
    const TINY: f64 = 1e-300;
    let one = Complex64::new(1.0, 0.0);
    let mut b = one * x + 1.0 - a;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = if b.norm() < TINY { one / TINY } else { one / b };
    let mut h = d;
    let mut steps = 1;
    for i in 1..20_000 {
        steps = i;
        let an = (a - i as f64) * i as f64;
        b += 2.0;
        d = an * d + b;
        if d.norm() < TINY {
            d = one * TINY;
        }
        c = b + an / c;
        if c.norm() < TINY {
            c = one * TINY;
        }
        d = one / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).norm() < 1e-15 {
            break;
        }
    }
    (h, 8.0 * (steps as f64 + 4.0) * f64::EPSILON * h.norm())
}

/// Digamma at 1/2, 1, 3/2, ...
pub fn digamma_half_integer(twice: u32) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    let (mut v, mut x) = if twice % 2 == 0 {
        (-EULER, 1.0)
    } else {
        (-EULER - 2.0 * std::f64::consts::LN_2, 0.5)
    };
    while 2.0 * x < twice as f64 {
        v += 1.0 / x;
        x += 1.0;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(c(5.0)) - c(24.0)).norm() < 1e-12);
        assert!((gamma(c(0.5)) - c(PI.sqrt())).norm() < 1e-14);
        assert!((gamma(c(-0.5)) - c(-2.0 * PI.sqrt())).norm() < 1e-13);
        assert_eq!(rgamma(c(-3.0)), c(0.0));
    }

    #[test]
    fn incomplete_gamma_closed_forms() {
        // Gamma(1, x) = e^{-x}
        assert!((upper_gamma_scaled(c(1.0), 2.0) - c(0.5)).norm() < 1e-15);
        // Gamma(2, x) = (x + 1) e^{-x}
        assert!((upper_gamma_scaled(c(2.0), 1.5) - c(2.5 / 2.25)).norm() < 1e-14);
        // Gamma(0, x) = E1(x); E1(1) = 0.21938393439552027
        let e1 = 0.219_383_934_395_520_27 * 1f64.exp();
        assert!((upper_gamma_scaled(c(0.0), 1.0) - c(e1)).norm() < 1e-13);
    }

    #[test]
    fn digamma_values() {
        assert!((digamma_half_integer(2) + 0.577_215_664_901_532_9).abs() < 1e-15);
        assert!((digamma_half_integer(3) - 0.036_489_973_978_576_52).abs() < 1e-14);
    }
}
