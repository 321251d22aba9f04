//! Constant-coefficient classical symbols on R^d, cutoff functions, quadratic
//! forms and Riesz-type holomorphic families.

use crate::dd::{self, Cdd, Dd};
use crate::error::{check_dim, Error, Result};
use crate::exactnum::{self, Polynomial};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Tolerance under which an order or exponent counts as an integer.
pub const INTEGER_TOL: f64 = 1e-6;

pub fn is_near_integer(z: Complex64) -> bool {
    z.im.abs() < INTEGER_TOL && (z.re - z.re.round()).abs() < INTEGER_TOL
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Smooth radial cutoff: 0 on |x| <= r0, 1 on |x| >= r1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffFunction {
    pub r0: f64,
    pub r1: f64,
}

impl Default for CutoffFunction {
    fn default() -> Self {
        CutoffFunction { r0: 0.5, r1: 1.0 }
    }
}

impl CutoffFunction {
    pub fn new(r0: f64, r1: f64) -> Result<Self> {
        if !(r0 > 0.0 && r1 > r0 && r1.is_finite()) {
            return Err(Error::Param(format!("cutoff radii need 0 < r0 < r1, got {r0}, {r1}")));
        }
        Ok(CutoffFunction { r0, r1 })
    }

    /// psi(u) = e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)}).
    pub fn bridge(u: f64) -> f64 {
        if u <= 0.0 {
            0.0
        } else if u >= 1.0 {
            1.0
        } else {
            let g = 1.0 / u - 1.0 / (1.0 - u);
            if g > 700.0 {
                0.0
            } else {
                1.0 / (1.0 + g.exp())
            }
        }
    }

    fn bridge_derivative(u: f64) -> f64 {
        if u <= 0.0 || u >= 1.0 {
            return 0.0;
        }
        let p = Self::bridge(u);
        p * (1.0 - p) * (1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u)))
    }

    pub fn radial(&self, r: f64) -> f64 {
        Self::bridge((r - self.r0) / (self.r1 - self.r0))
    }

    pub fn radial_derivative(&self, r: f64) -> f64 {
        Self::bridge_derivative((r - self.r0) / (self.r1 - self.r0)) / (self.r1 - self.r0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.radial(norm(x))
    }
}

/// Symmetric positive definite form q(x) = x^T A x.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    d: usize,
    a: Vec<f64>,
    inv: Vec<f64>,
    det: f64,
}

impl QuadraticForm {
    pub fn new(d: usize, matrix: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Param("dimension must be positive".into()));
        }
        check_dim(d * d, matrix.len())?;
        let scale = matrix.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..d {
            for j in 0..i {
                if (matrix[i * d + j] - matrix[j * d + i]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::Domain("quadratic form matrix is not symmetric".into()));
                }
            }
        }
        let m = DMatrix::from_row_slice(d, d, &matrix);
        let chol = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Domain("quadratic form is not positive definite".into()))?;
        let det = chol.l().diagonal().iter().map(|v| v * v).product();
        let inv_m = chol.inverse();
        let mut inv = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                inv[i * d + j] = 0.5 * (inv_m[(i, j)] + inv_m[(j, i)]);
            }
        }
        Ok(QuadraticForm { d, a: matrix, inv, det })
    }

    pub fn identity(d: usize) -> Self {
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            m[i * d + i] = 1.0;
        }
        QuadraticForm::new(d, m).expect("identity is positive definite")
    }

    /// Parse a row-major matrix such as `"1,0;0,1"`.
    pub fn parse(text: &str) -> Result<Self> {
        let rows: Vec<Vec<f64>> = text
            .split(';')
            .map(|r| {
                r.split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad matrix entry '{}'", v.trim())))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Parse(format!("matrix '{text}' is not square")));
        }
        QuadraticForm::new(d, rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.d;
        let mut s = 0.0;
        for i in 0..d {
            let mut row = 0.0;
            for j in 0..d {
                row += self.a[i * d + j] * x[j];
            }
            s += x[i] * row;
        }
        s
    }

    /// Double-double value, exact for integer x and dyadic entries.
    pub fn eval_dd(&self, x: &[f64]) -> Dd {
        let d = self.d;
        let mut s = dd::dd(0.0);
        for i in 0..d {
            for j in 0..d {
                let aij = self.a[i * d + j];
                if aij != 0.0 {
                    s += Dd::new_mul(x[i] * x[j], aij);
                }
            }
        }
        s
    }

    /// i-th component of the gradient, 2 (A x)_i.
    pub fn grad(&self, x: &[f64], i: usize) -> f64 {
        let d = self.d;
        2.0 * (0..d).map(|j| self.a[i * d + j] * x[j]).sum::<f64>()
    }

    /// Form of the inverse matrix.
    pub fn dual(&self) -> QuadraticForm {
        QuadraticForm::new(self.d, self.inv.clone()).expect("inverse of SPD matrix is SPD")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = DMatrix::from_row_slice(self.d, self.d, &self.a);
        m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn is_identity(&self) -> bool {
        let d = self.d;
        (0..d).all(|i| (0..d).all(|j| self.a[i * d + j] == if i == j { 1.0 } else { 0.0 }))
    }
}

type PointFnBox = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// Angular profile of a homogeneous component.
#[derive(Clone)]
pub enum Profile {
    Zero,
    Constant(Complex64),
    /// d = 1 only: values at +1 and -1.
    Sided { plus: Complex64, minus: Complex64 },
    /// coeff * q(x)^exponent, homogeneous of degree 2*exponent.
    QuadraticPower {
        form: Arc<QuadraticForm>,
        exponent: Complex64,
        coeff: Complex64,
    },
    /// Homogeneous polynomial sum c * x^e.
    Monomials(Vec<(Complex64, Vec<u32>)>),
    Sum(Vec<Profile>),
    /// Arbitrary function on the unit sphere.
    Custom(PointFnBox),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Zero => write!(f, "Zero"),
            Profile::Constant(c) => write!(f, "Constant({c})"),
            Profile::Sided { plus, minus } => write!(f, "Sided({plus}, {minus})"),
            Profile::QuadraticPower { exponent, coeff, .. } => {
                write!(f, "{coeff}*q^({exponent})")
            }
            Profile::Monomials(m) => write!(f, "Monomials({m:?})"),
            Profile::Sum(v) => f.debug_list().entries(v).finish(),
            Profile::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Profile {
    /// Degree of the natural homogeneous extension used in `extension`.
    fn natural_degree(&self) -> Complex64 {
        match self {
            Profile::QuadraticPower { exponent, .. } => exponent * 2.0,
            Profile::Monomials(m) => {
                Complex64::new(m.first().map(|t| t.1.iter().sum::<u32>()).unwrap_or(0) as f64, 0.0)
            }
            _ => ZERO,
        }
    }

    /// Value of the natural homogeneous extension at x != 0.
    fn extension(&self, x: &[f64]) -> Complex64 {
        match self {
            Profile::Zero => ZERO,
            Profile::Constant(c) => *c,
            Profile::Sided { plus, minus } => {
                if x[0] >= 0.0 {
                    *plus
                } else {
                    *minus
                }
            }
            Profile::QuadraticPower { form, exponent, coeff } => {
                coeff * Complex64::new(form.eval(x), 0.0).powc(*exponent)
            }
            Profile::Monomials(m) => m
                .iter()
                .map(|(c, e)| c * e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product::<f64>())
                .sum(),
            Profile::Sum(_) => unreachable!("sums are expanded by the caller"),
            Profile::Custom(f) => {
                let r = norm(x);
                let w: Vec<f64> = x.iter().map(|v| v / r).collect();
                f(&w)
            }
        }
    }

    fn extension_dd(&self, x: &[f64]) -> Cdd {
        match self {
            Profile::QuadraticPower { form, exponent, coeff } => {
                let lq = dd::ln(form.eval_dd(x));
                Cdd::powc(lq, Cdd::from_c64(*exponent)) * Cdd::from_c64(*coeff)
            }
            Profile::Monomials(m) => {
                let mut acc = Cdd::ZERO;
                for (c, e) in m {
                    let mut p = dd::dd(1.0);
                    for (&k, v) in e.iter().zip(x) {
                        for _ in 0..k {
                            p = p * *v;
                        }
                    }
                    acc += Cdd::from_c64(*c).scale(p);
                }
                acc
            }
            other => Cdd::from_c64(other.extension(x)),
        }
    }

    /// Value on the unit sphere.
    pub fn on_sphere(&self, w: &[f64]) -> Complex64 {
        match self {
            Profile::Sum(v) => v.iter().map(|p| p.on_sphere(w)).sum(),
            Profile::Custom(f) => f(w),
            p => p.extension(w),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Zero => true,
            Profile::Constant(c) => *c == ZERO,
            Profile::Sided { plus, minus } => *plus == ZERO && *minus == ZERO,
            Profile::Monomials(m) => m.iter().all(|t| t.0 == ZERO),
            Profile::Sum(v) => v.iter().all(|p| p.is_zero()),
            _ => false,
        }
    }

    pub fn scaled(&self, k: Complex64) -> Profile {
        match self {
            Profile::Zero => Profile::Zero,
            Profile::Constant(c) => Profile::Constant(c * k),
            Profile::Sided { plus, minus } => Profile::Sided {
                plus: plus * k,
                minus: minus * k,
            },
            Profile::QuadraticPower { form, exponent, coeff } => Profile::QuadraticPower {
                form: form.clone(),
                exponent: *exponent,
                coeff: coeff * k,
            },
            Profile::Monomials(m) => Profile::Monomials(m.iter().map(|(c, e)| (c * k, e.clone())).collect()),
            Profile::Sum(v) => Profile::Sum(v.iter().map(|p| p.scaled(k)).collect()),
            Profile::Custom(f) => {
                let f = f.clone();
                Profile::Custom(Arc::new(move |w: &[f64]| f(w) * k))
            }
        }
    }
}

/// |x|^degree * profile(x/|x|).
#[derive(Debug, Clone)]
pub struct HomogeneousComponent {
    pub degree: Complex64,
    pub profile: Profile,
}

impl HomogeneousComponent {
    pub fn new(degree: Complex64, profile: Profile) -> Self {
        HomogeneousComponent { degree, profile }
    }

    /// Value at x != 0; returns 0 at the origin.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.eval_shifted(x, ZERO)
    }

    fn eval_shifted(&self, x: &[f64], shift: Complex64) -> Complex64 {
        let r = norm(x);
        if r == 0.0 {
            return ZERO;
        }
        match &self.profile {
            Profile::Zero => ZERO,
            Profile::Sum(v) => v
                .iter()
                .map(|p| HomogeneousComponent::new(self.degree, p.clone()).eval_shifted(x, shift))
                .sum(),
            p => {
                let extra = self.degree + shift - p.natural_degree();
                let h = p.extension(x);
                if extra == ZERO {
                    h
                } else {
                    h * (extra * r.ln()).exp()
                }
            }
        }
    }

    /// True when the component is a polynomial in x.
    pub fn is_polynomial(&self) -> bool {
        let d = self.degree;
        let nonneg_int = |v: Complex64| v.im == 0.0 && v.re >= 0.0 && v.re == v.re.round();
        if !nonneg_int(d) {
            return self.profile.is_zero();
        }
        fn check(p: &Profile, d: f64) -> bool {
            match p {
                Profile::Zero => true,
                Profile::Constant(_) => d as u64 % 2 == 0,
                Profile::Monomials(m) => m.iter().all(|t| t.1.iter().sum::<u32>() as f64 == d),
                Profile::QuadraticPower { exponent, .. } => exponent.im == 0.0 && exponent.re * 2.0 == d,
                Profile::Sum(v) => v.iter().all(|q| check(q, d)),
                _ => p.is_zero(),
            }
        }
        check(&self.profile, d.re)
    }

    /// Double-double value at x != 0, given ln|x| in double-double.
    pub fn eval_dd(&self, x: &[f64], ln_r: Dd) -> Cdd {
        match &self.profile {
            Profile::Zero => Cdd::ZERO,
            Profile::Sum(v) => {
                let mut acc = Cdd::ZERO;
                for p in v {
                    acc += HomogeneousComponent::new(self.degree, p.clone()).eval_dd(x, ln_r);
                }
                acc
            }
            p => {
                let extra = self.degree - p.natural_degree();
                let h = p.extension_dd(x);
                if extra == ZERO {
                    h
                } else {
                    h * Cdd::powc(ln_r, Cdd::from_c64(extra))
                }
            }
        }
    }
}

/// Remainder term with a declared decay exponent.
#[derive(Clone)]
pub struct Remainder {
    pub eval: PointFnBox,
    /// |remainder(x)| <= C (1+|x|)^decay.
    pub decay: f64,
}

impl fmt::Debug for Remainder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Remainder(decay {})", self.decay)
    }
}

/// Inner modification produced by a Riesz family at a fixed z: the symbol
/// is multiplied by (1 - chi~) + chi~ |x|^{bz}.
#[derive(Debug, Clone, Copy)]
pub struct RieszShift {
    pub bz: Complex64,
    pub cutoff: CutoffFunction,
}

impl RieszShift {
    pub fn factor(&self, r: f64) -> Complex64 {
        let c = self.cutoff.radial(r);
        if c == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let p = (self.bz * r.ln()).exp();
        Complex64::new(1.0 - c, 0.0) + p * c
    }
}

/// Classical symbol sum_j chi * sigma_{a-j} + remainder.
#[derive(Debug, Clone)]
pub struct ClassicalSymbol {
    d: usize,
    order: Complex64,
    components: Vec<HomogeneousComponent>,
    cutoff: Option<CutoffFunction>,
    remainder: Option<Remainder>,
    shift: Option<RieszShift>,
}

impl ClassicalSymbol {
    /// Components must have degrees order, order-1, ... in this sequence.
    /// `cutoff = None` gives the pure homogeneous symbol whose value at the
    /// origin is taken to be 0.
    pub fn new(
        d: usize,
        order: Complex64,
        components: Vec<HomogeneousComponent>,
        cutoff: Option<CutoffFunction>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::Param("dimension must be positive".into()));
        }
        for (j, c) in components.iter().enumerate() {
            if (c.degree - (order - j as f64)).norm() > 1e-12 * (1.0 + order.norm()) {
                return Err(Error::Param(format!(
                    "component {j} has degree {}, expected {}",
                    c.degree,
                    order - j as f64
                )));
            }
            if d != 1 && matches!(c.profile, Profile::Sided { .. }) {
                return Err(Error::Param("sided profiles need d = 1".into()));
            }
        }
        Ok(ClassicalSymbol {
            d,
            order,
            components,
            cutoff,
            remainder: None,
            shift: None,
        })
    }

    /// Build from (degree, profile) terms whose degrees differ by integers.
    pub fn from_terms(
        d: usize,
        terms: Vec<(Complex64, Profile)>,
        cutoff: Option<CutoffFunction>,
    ) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().filter(|t| !t.1.is_zero()).collect();
        if terms.is_empty() {
            return ClassicalSymbol::new(d, ZERO, vec![], cutoff);
        }
        let top = terms
            .iter()
            .map(|t| t.0)
            .fold(terms[0].0, |m, z| if z.re > m.re { z } else { m });
        let mut comps: Vec<Vec<Profile>> = Vec::new();
        for (deg, prof) in terms {
            let gap = top - deg;
            if gap.im.abs() > 1e-12 || (gap.re - gap.re.round()).abs() > 1e-9 {
                return Err(Error::Param(format!(
                    "degrees {top} and {deg} do not differ by an integer"
                )));
            }
            let j = gap.re.round() as usize;
            if comps.len() <= j {
                comps.resize(j + 1, Vec::new());
            }
            comps[j].push(prof);
        }
        let components = comps
            .into_iter()
            .enumerate()
            .map(|(j, mut ps)| {
                let profile = match ps.len() {
                    0 => Profile::Zero,
                    1 => ps.pop().unwrap(),
                    _ => Profile::Sum(ps),
                };
                HomogeneousComponent::new(top - j as f64, profile)
            })
            .collect();
        ClassicalSymbol::new(d, top, components, cutoff)
    }

    /// chi(x) * coeff * |x|^a.
    pub fn power(d: usize, a: Complex64, coeff: Complex64, cutoff: Option<CutoffFunction>) -> Result<Self> {
        ClassicalSymbol::new(
            d,
            a,
            vec![HomogeneousComponent::new(a, Profile::Constant(coeff))],
            cutoff,
        )
    }

    /// chi(x) |x|^a with the default cutoff.
    pub fn radial_power(d: usize, a: f64) -> Self {
        ClassicalSymbol::power(d, Complex64::new(a, 0.0), Complex64::new(1.0, 0.0), Some(CutoffFunction::default()))
            .expect("valid power symbol")
    }

    /// chi(x) P(x) for a polynomial P.
    pub fn from_polynomial(p: &Polynomial, cutoff: Option<CutoffFunction>) -> Result<Self> {
        let top = p.degree();
        let mut terms = Vec::new();
        for k in (0..=top).rev() {
            let part = p.homogeneous_part(k);
            if part.is_empty() {
                continue;
            }
            let m = part
                .into_iter()
                .map(|(c, e)| (Complex64::new(exactnum::to_f64(&c), 0.0), e))
                .collect();
            terms.push((Complex64::new(k as f64, 0.0), Profile::Monomials(m)));
        }
        let mut s = ClassicalSymbol::from_terms(p.d, terms, cutoff)?;
        if s.components.is_empty() {
            s.order = ZERO;
        }
        Ok(s)
    }

    pub fn with_remainder(
        mut self,
        eval: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
        decay: f64,
    ) -> Self {
        self.remainder = Some(Remainder {
            eval: Arc::new(eval),
            decay,
        });
        self
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Order including any Riesz shift.
    pub fn order(&self) -> Complex64 {
        self.order + self.shift_exponent()
    }

    pub fn base_order(&self) -> Complex64 {
        self.order
    }

    pub fn components(&self) -> &[HomogeneousComponent] {
        &self.components
    }

    pub fn cutoff(&self) -> Option<CutoffFunction> {
        self.cutoff
    }

    pub fn remainder(&self) -> Option<&Remainder> {
        self.remainder.as_ref()
    }

    pub fn shift(&self) -> Option<&RieszShift> {
        self.shift.as_ref()
    }

    pub fn shift_exponent(&self) -> Complex64 {
        self.shift.map(|s| s.bz).unwrap_or(ZERO)
    }

    /// Degree of component j at infinity (including the shift).
    pub fn effective_degree(&self, j: usize) -> Complex64 {
        self.components[j].degree + self.shift_exponent()
    }

    pub fn is_integer_order(&self) -> bool {
        is_near_integer(self.order())
    }

    /// Polynomial outside the cutoff region (so lattice sums are exact
    /// polynomials in N).
    pub fn is_polynomial(&self) -> bool {
        self.remainder.is_none() && self.shift.is_none() && self.components.iter().all(|c| c.is_polynomial())
    }

    /// Radius beyond which the symbol is the plain sum of its components.
    pub fn saturation_radius(&self) -> f64 {
        let a = self.cutoff.map(|c| c.r1).unwrap_or(0.0);
        let b = self.shift.map(|s| s.cutoff.r1).unwrap_or(0.0);
        a.max(b)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Complex64> {
        check_dim(self.d, x.len())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> Complex64 {
        let r = norm(x);
        let shift = self.shift.map(|s| s.factor(r));
        let mut v = ZERO;
        if r > 0.0 {
            let chi = self.cutoff.map(|c| c.radial(r)).unwrap_or(1.0);
            if chi != 0.0 {
                let s: Complex64 = self.components.iter().map(|c| c.eval(x)).sum();
                v = s * chi;
            }
        }
        if let Some(rem) = &self.remainder {
            v += (rem.eval)(x);
        }
        match shift {
            Some(f) => v * f,
            None => v,
        }
    }

    /// Double-double value without the Riesz shift factor.
    pub(crate) fn eval_base_dd(&self, x: &[f64], ln_r: Dd) -> Cdd {
        let r = norm(x);
        let mut v = Cdd::ZERO;
        if r > 0.0 {
            let chi = self.cutoff.map(|c| c.radial(r)).unwrap_or(1.0);
            if chi != 0.0 {
                for c in &self.components {
                    v += c.eval_dd(x, ln_r);
                }
                if chi != 1.0 {
                    v = v.scale_f(chi);
                }
            }
        }
        if let Some(rem) = &self.remainder {
            v += Cdd::from_c64((rem.eval)(x));
        }
        v
    }

    /// Full double-double value including the shift factor.
    pub(crate) fn eval_dd(&self, x: &[f64]) -> Cdd {
        let r2: Dd = x.iter().fold(dd::dd(0.0), |s, v| s + Dd::new_mul(*v, *v));
        let ln_r = if r2.hi() > 0.0 { dd::ln(r2) * 0.5 } else { dd::dd(0.0) };
        let v = self.eval_base_dd(x, ln_r);
        match self.shift {
            None => v,
            Some(s) => {
                let c = s.cutoff.radial(norm(x));
                if c == 0.0 {
                    v
                } else {
                    let p = Cdd::powc(ln_r, Cdd::from_c64(s.bz));
                    v * (Cdd::real(dd::dd(1.0 - c)) + p.scale_f(c))
                }
            }
        }
    }

    /// The d = 1 derivative as a classical symbol; the cutoff derivative is
    /// moved into a compactly supported remainder.
    pub fn differentiate_1d(&self) -> Result<ClassicalSymbol> {
        if self.d != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.d });
        }
        if self.remainder.is_some() || self.shift.is_some() {
            return Err(Error::Precondition(
                "symbolic derivative needs a symbol without remainder or shift".into(),
            ));
        }
        let mut comps = Vec::new();
        for c in &self.components {
            let plus = c.profile.on_sphere(&[1.0]);
            let minus = c.profile.on_sphere(&[-1.0]);
            comps.push(HomogeneousComponent::new(
                c.degree - 1.0,
                Profile::Sided {
                    plus: plus * c.degree,
                    minus: -minus * c.degree,
                },
            ));
        }
        let mut out = ClassicalSymbol::new(1, self.order - 1.0, comps, self.cutoff)?;
        if let Some(cut) = self.cutoff {
            let base = self.components.clone();
            out.remainder = Some(Remainder {
                eval: Arc::new(move |x: &[f64]| {
                    let r = x[0].abs();
                    let dchi = cut.radial_derivative(r) * x[0].signum();
                    if dchi == 0.0 {
                        return ZERO;
                    }
                    base.iter().map(|c| c.eval(x)).sum::<Complex64>() * dchi
                }),
                decay: -1e3,
            });
        }
        Ok(out)
    }

    /// Drop the cutoff (pure homogeneous symbol, value 0 at the origin).
    pub fn without_cutoff(&self) -> ClassicalSymbol {
        let mut s = self.clone();
        s.cutoff = None;
        s
    }

    pub fn scaled(&self, k: Complex64) -> ClassicalSymbol {
        let mut s = self.clone();
        for c in &mut s.components {
            c.profile = c.profile.scaled(k);
        }
        if let Some(rem) = &self.remainder {
            let f = rem.eval.clone();
            s.remainder = Some(Remainder {
                eval: Arc::new(move |x: &[f64]| f(x) * k),
                decay: rem.decay,
            });
        }
        s
    }

    /// Sum of two symbols with the same dimension and cutoff whose degree
    /// sets differ by integers.
    pub fn add(&self, other: &ClassicalSymbol) -> Result<ClassicalSymbol> {
        check_dim(self.d, other.d)?;
        if self.cutoff != other.cutoff || self.shift.is_some() || other.shift.is_some() {
            return Err(Error::Precondition("symbols must share the cutoff and carry no shift".into()));
        }
        let terms = self
            .components
            .iter()
            .chain(other.components.iter())
            .map(|c| (c.degree, c.profile.clone()))
            .collect();
        let mut s = ClassicalSymbol::from_terms(self.d, terms, self.cutoff)?;
        s.remainder = match (&self.remainder, &other.remainder) {
            (None, None) => None,
            (a, b) => {
                let fa = a.as_ref().map(|r| r.eval.clone());
                let fb = b.as_ref().map(|r| r.eval.clone());
                let decay = a.iter().chain(b.iter()).map(|r| r.decay).fold(f64::NEG_INFINITY, f64::max);
                Some(Remainder {
                    eval: Arc::new(move |x: &[f64]| {
                        fa.as_ref().map(|f| f(x)).unwrap_or(ZERO) + fb.as_ref().map(|f| f(x)).unwrap_or(ZERO)
                    }),
                    decay,
                })
            }
        };
        Ok(s)
    }
}

/// Classical symbol of order -2s with single component q(x)^{-s}.
pub fn quadratic_symbol(q: &QuadraticForm, s: Complex64, cutoff: Option<CutoffFunction>) -> ClassicalSymbol {
    let order = -s * 2.0;
    let profile = Profile::QuadraticPower {
        form: Arc::new(q.clone()),
        exponent: -s,
        coeff: Complex64::new(1.0, 0.0),
    };
    ClassicalSymbol::new(q.dim(), order, vec![HomogeneousComponent::new(order, profile)], cutoff)
        .expect("single component symbol is well formed")
}

/// Pointwise evaluator on R^d.
pub trait PointFn: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Complex64;
    /// Radius beyond which the function is smooth and free of cutoff effects.
    fn smooth_beyond(&self) -> f64 {
        1.0
    }
    /// True when the value depends on |x| only.
    fn is_radial(&self) -> bool {
        false
    }
}

impl PointFn for ClassicalSymbol {
    fn dim(&self) -> usize {
        self.d
    }
    fn eval(&self, x: &[f64]) -> Complex64 {
        self.eval_unchecked(x)
    }
    fn smooth_beyond(&self) -> f64 {
        self.saturation_radius().max(1.0)
    }
    fn is_radial(&self) -> bool {
        self.remainder.is_none()
            && self
                .components
                .iter()
                .all(|c| matches!(c.profile, Profile::Zero | Profile::Constant(_)))
    }
}

/// x -> sigma(x + p). Not in classical form.
#[derive(Debug, Clone)]
pub struct Translated {
    pub symbol: Arc<ClassicalSymbol>,
    pub p: Vec<f64>,
}

impl Translated {
    pub fn translate(&self, q: &[f64]) -> Result<Translated> {
        check_dim(self.p.len(), q.len())?;
        Ok(Translated {
            symbol: self.symbol.clone(),
            p: self.p.iter().zip(q).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Complex64> {
        check_dim(self.p.len(), x.len())?;
        Ok(PointFn::eval(self, x))
    }
}

impl PointFn for Translated {
    fn dim(&self) -> usize {
        self.p.len()
    }
    fn eval(&self, x: &[f64]) -> Complex64 {
        let y: Vec<f64> = x.iter().zip(&self.p).map(|(a, b)| a + b).collect();
        self.symbol.eval_unchecked(&y)
    }
    fn smooth_beyond(&self) -> f64 {
        self.symbol.smooth_beyond() + norm(&self.p)
    }
}

pub fn translate(sigma: &ClassicalSymbol, p: &[f64]) -> Result<Translated> {
    check_dim(sigma.dim(), p.len())?;
    Ok(Translated {
        symbol: Arc::new(sigma.clone()),
        p: p.to_vec(),
    })
}

/// k-th derivative of a d = 1 symbol, valid where the cutoff is saturated.
#[derive(Debug, Clone)]
pub struct Derivative1d {
    symbol: Arc<ClassicalSymbol>,
    k: usize,
}

fn falling(a: Complex64, k: usize) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, i| acc * (a - i as f64))
}

impl Derivative1d {
    pub fn order(&self) -> usize {
        self.k
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        let s = &self.symbol;
        if x.abs() < s.saturation_radius() || x == 0.0 {
            return Err(Error::Domain(format!(
                "derivative requested at |x| = {} inside the cutoff region",
                x.abs()
            )));
        }
        let k = self.k;
        let sign = if x > 0.0 { 1.0 } else { -1.0 };
        let ax = x.abs();
        let mut v = ZERO;
        for j in 0..s.components.len() {
            let c = s.components[j].profile.on_sphere(&[sign]);
            if c == ZERO {
                continue;
            }
            let deg = s.effective_degree(j);
            let dir = if k % 2 == 1 { sign } else { 1.0 };
            v += c * falling(deg, k) * ((deg - k as f64) * ax.ln()).exp() * dir;
        }
        if let Some(rem) = &s.remainder {
            let f = |t: f64| (rem.eval)(&[t]);
            v += finite_difference(&f, x, k);
        }
        Ok(v)
    }
}

/// Central finite difference with one Richardson step.
fn finite_difference(f: &dyn Fn(f64) -> Complex64, x: f64, k: usize) -> Complex64 {
    let est = |h: f64| {
        let mut s = ZERO;
        let mut binom = 1.0;
        for i in 0..=k {
            let t = x + (k as f64 / 2.0 - i as f64) * h;
            let sgn = if i % 2 == 0 { 1.0 } else { -1.0 };
            s += f(t) * (sgn * binom);
            binom = binom * (k - i) as f64 / (i + 1) as f64;
        }
        s / h.powi(k as i32)
    };
    let h = 0.05 * x.abs().max(1.0);
    let a = est(h);
    let b = est(h / 2.0);
    (b * 4.0 - a) / 3.0
}

pub fn derivative_1d(sigma: &ClassicalSymbol, k: usize) -> Result<Derivative1d> {
    if sigma.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: sigma.dim() });
    }
    if k == 0 {
        return Err(Error::Param("derivative order must be positive".into()));
    }
    Ok(Derivative1d {
        symbol: Arc::new(sigma.clone()),
        k,
    })
}

/// z -> chi sigma ((1 - chi~) + chi~ |x|^{bz}), order a + bz.
#[derive(Debug, Clone)]
pub struct HolomorphicFamily {
    base: Arc<ClassicalSymbol>,
    b: f64,
    family_cutoff: CutoffFunction,
}

impl HolomorphicFamily {
    pub fn base(&self) -> &ClassicalSymbol {
        &self.base
    }

    pub fn slope(&self) -> f64 {
        self.b
    }

    pub fn family_cutoff(&self) -> CutoffFunction {
        self.family_cutoff
    }

    /// Use a different cutoff for the |x|^{bz} factor.
    pub fn with_family_cutoff(mut self, c: CutoffFunction) -> Self {
        self.family_cutoff = c;
        self
    }

    pub fn order(&self, z: Complex64) -> Complex64 {
        self.base.order() + z * self.b
    }

    pub fn at(&self, z: Complex64) -> ClassicalSymbol {
        let mut s = (*self.base).clone();
        if z != ZERO {
            s.shift = Some(RieszShift {
                bz: z * self.b,
                cutoff: self.family_cutoff,
            });
        }
        s
    }

    pub fn eval(&self, z: Complex64, x: &[f64]) -> Result<Complex64> {
        self.at(z).evaluate(x)
    }

    /// d/dz sigma(z)(x) at z = 0: chi~ sigma b log|x|.
    pub fn derivative_at_zero(&self, x: &[f64]) -> Result<Complex64> {
        let v = self.base.evaluate(x)?;
        let r = norm(x);
        if r == 0.0 {
            return Ok(ZERO);
        }
        Ok(v * self.family_cutoff.radial(r) * self.b * r.ln())
    }
}

pub fn riesz_family(sigma: &ClassicalSymbol, b: f64) -> Result<HolomorphicFamily> {
    if b == 0.0 || !b.is_finite() {
        return Err(Error::Param("a holomorphic family needs a non constant affine order (b != 0)".into()));
    }
    if sigma.shift.is_some() {
        return Err(Error::Precondition("base symbol already carries a shift".into()));
    }
    Ok(HolomorphicFamily {
        base: Arc::new(sigma.clone()),
        b,
        family_cutoff: sigma.cutoff.unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn evaluate_examples() {
        let s = ClassicalSymbol::radial_power(1, -1.5);
        assert!((s.evaluate(&[2.0]).unwrap() - c(2f64.powf(-1.5))).norm() < 1e-15);
        assert_eq!(s.evaluate(&[0.0]).unwrap(), ZERO);
        let q = quadratic_symbol(&QuadraticForm::identity(2), c(1.0), Some(CutoffFunction::default()));
        assert!((q.evaluate(&[3.0, 4.0]).unwrap() - c(1.0 / 25.0)).norm() < 1e-15);
        let q2 = QuadraticForm::new(2, vec![1.0, 0.0, 0.0, 4.0]).unwrap();
        let s2 = quadratic_symbol(&q2, c(0.5), Some(CutoffFunction::default()));
        assert!((s2.evaluate(&[0.0, 1.0]).unwrap() - c(0.5)).norm() < 1e-15);
        assert!(s.evaluate(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn cutoff_shape() {
        let chi = CutoffFunction::default();
        assert_eq!(chi.radial(0.5), 0.0);
        assert_eq!(chi.radial(1.0), 1.0);
        assert!((chi.radial(0.75) - 0.5).abs() < 1e-15);
        assert!(CutoffFunction::new(1.0, 0.5).is_err());
    }

    #[test]
    fn derivative_power_rule() {
        let s = ClassicalSymbol::radial_power(1, -2.0);
        let d1 = derivative_1d(&s, 1).unwrap();
        assert!((d1.eval(2.0).unwrap() - c(-0.25)).norm() < 1e-15);
        let s = ClassicalSymbol::radial_power(1, -1.5);
        let d2 = derivative_1d(&s, 2).unwrap();
        let expect = (-1.5) * (-2.5) * 4f64.powf(-3.5);
        assert!((d2.eval(4.0).unwrap() - c(expect)).norm() < 1e-15);
        assert!(d2.eval(0.7).is_err());
    }

    #[test]
    fn translation_composes() {
        let s = ClassicalSymbol::radial_power(1, -1.5);
        let t = translate(&s, &[1.0]).unwrap();
        assert!((t.evaluate(&[1.0]).unwrap() - c(2f64.powf(-1.5))).norm() < 1e-15);
    }

    #[test]
    fn riesz_family_examples() {
        let s = ClassicalSymbol::radial_power(1, -1.0);
        let f = riesz_family(&s, -1.0).unwrap();
        let v = f.eval(c(0.5), &[4.0]).unwrap();
        assert!((v - c(4f64.powf(-1.5))).norm() < 1e-15);
        assert_eq!(f.derivative_at_zero(&[1.0]).unwrap(), ZERO);
        assert!(riesz_family(&s, 0.0).is_err());
    }

    #[test]
    fn dd_matches_f64() {
        let q = QuadraticForm::new(2, vec![1.0, 0.5, 0.5, 1.0]).unwrap();
        let s = quadratic_symbol(&q, Complex64::new(-0.7, 0.3), Some(CutoffFunction::default()));
        for x in [[3.0, -2.0], [1.0, 0.0], [7.0, 5.0]] {
            let a = s.eval_dd(&x).to_c64();
            let b = s.evaluate(&x).unwrap();
            assert!((a - b).norm() < 1e-13 * b.norm());
        }
    }

    #[test]
    fn quadratic_form_checks() {
        assert!(QuadraticForm::parse("1,2;2,1").is_err());
        assert!(QuadraticForm::parse("1,0;1,1").is_err());
        let q = QuadraticForm::parse("1,0.5;0.5,1").unwrap();
        assert!((q.det() - 0.75).abs() < 1e-15);
        let d = q.dual();
        assert!((d.matrix()[1] + 0.5 / 0.75).abs() < 1e-14);
    }
}
