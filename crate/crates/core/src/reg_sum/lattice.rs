//! Lattice sums over sup-norm hypercubes and their finite parts.

use super::fit::{self, AsymptoticModel, FinitePartResult, MERGE_TOL};
use crate::dd::{self, Cdd, Dd};
use crate::error::{Error, Result};
use crate::exactnum::{self, Polynomial, Rational};
use crate::reg_integral;
use crate::symbols::{ClassicalSymbol, PointFn, Translated};
use num_complex::Complex64;
use rayon::prelude::*;

/// Exponents with |e| below this are merged into the constant term.
pub const NEAR_ZERO: f64 = 1e-6;
/// Expansion terms are kept down to this real part.
pub const MIN_EXPONENT: f64 = -7.0;

pub fn default_ladder(d: usize) -> Vec<usize> {
    match d {
        1 => vec![16, 24, 32, 48, 64, 96, 128, 192, 256],
        2 => vec![8, 12, 16, 24, 32, 48, 64],
        _ => vec![4, 6, 8, 10, 12, 14, 16],
    }
}

/// Longer ladders for z-sweeps, where exponents move off the integers.
pub fn sweep_ladder(d: usize) -> Vec<usize> {
    match d {
        1 => vec![16, 24, 32, 48, 64, 96, 128, 192, 256, 384, 512],
        2 => vec![8, 10, 12, 16, 20, 24, 32, 40, 48, 64, 80, 100],
        _ => vec![4, 5, 6, 7, 8, 10, 12, 14, 16],
    }
}

/// Translated symbols lose the even structure of the expansion.
pub fn translated_ladder(d: usize) -> Vec<usize> {
    match d {
        1 => vec![64, 96, 128, 192, 256, 384, 512, 768, 1024, 1536, 2048],
        _ => sweep_ladder(d),
    }
}

#[derive(Debug, Clone)]
pub struct LatticeOptions {
    /// Sample sizes N; empty selects a default ladder.
    pub n_range: Vec<usize>,
    /// Allowed fit residual relative to max(1, max |sample|).
    pub tol: f64,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions {
            n_range: Vec::new(),
            tol: 1e-9,
        }
    }
}

impl LatticeOptions {
    pub fn with_range(n_range: Vec<usize>) -> Self {
        LatticeOptions {
            n_range,
            ..Self::default()
        }
    }

    fn ladder(&self, fallback: Vec<usize>) -> Vec<usize> {
        if self.n_range.is_empty() {
            fallback
        } else {
            self.n_range.clone()
        }
    }
}

fn check_lattice_dim(d: usize) -> Result<()> {
    if d == 0 || d > 3 {
        return Err(Error::Precondition(format!("lattice sums support 1 <= d <= 3, got {d}")));
    }
    Ok(())
}

/// Calls `f` on every n with |n|_sup = m, in lexicographic order.
fn for_each_shell_point(d: usize, m: i64, f: &mut dyn FnMut(&[f64])) {
    let mut x = vec![0.0; d];
    if m == 0 {
        f(&x);
        return;
    }
    fn rec(x: &mut Vec<f64>, k: usize, m: i64, hit: bool, f: &mut dyn FnMut(&[f64])) {
        let d = x.len();
        if k == d {
            if hit {
                f(x);
            }
            return;
        }
        // remaining axes must supply the sup if none has so far
        let last = k + 1 == d;
        for v in -m..=m {
            let on = v.abs() == m;
            if last && !hit && !on {
                continue;
            }
            x[k] = v as f64;
            rec(x, k + 1, m, hit || on, f);
        }
    }
    rec(&mut x, 0, m, false, f);
}

/// Per-shell sums of `f` for shells 0..=nmax.
fn shell_sums(d: usize, nmax: usize, f: &(dyn Fn(&[f64]) -> Cdd + Sync)) -> Vec<Cdd> {
    (0..=nmax as i64)
        .into_par_iter()
        .map(|m| {
            let mut s = Cdd::ZERO;
            for_each_shell_point(d, m, &mut |x| s += f(x));
            s
        })
        .collect()
}

/// Cumulative sums at each ladder entry (ascending shell order).
fn cumulative(shells: &[Cdd], ladder: &[usize]) -> Vec<Cdd> {
    let mut out = Vec::with_capacity(ladder.len());
    let mut acc = Cdd::ZERO;
    let mut next = 0;
    for (m, s) in shells.iter().enumerate() {
        acc += *s;
        while next < ladder.len() && ladder[next] == m {
            out.push(acc);
            next += 1;
        }
    }
    out
}

fn check_ladder(ladder: &[usize]) -> Result<()> {
    if ladder.is_empty() || ladder[0] == 0 || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Param("sample sizes must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Sum of sigma(n) over |n|_sup <= N; the origin contributes sigma(0) = 0
/// for cut-off or pure symbols.
pub fn lattice_sum_supball(sigma: &ClassicalSymbol, n: usize) -> Result<Complex64> {
    check_lattice_dim(sigma.dim())?;
    let shells = shell_sums(sigma.dim(), n, &|x| sigma.eval_dd(x));
    Ok(cumulative(&shells, &[n])[0].to_c64())
}

/// Same as `lattice_sum_supball` for a translated symbol.
pub fn lattice_sum_supball_translated(t: &Translated, n: usize) -> Result<Complex64> {
    check_lattice_dim(t.dim())?;
    let shells = shell_sums(t.dim(), n, &translated_dd(t));
    Ok(cumulative(&shells, &[n])[0].to_c64())
}

fn translated_dd(t: &Translated) -> impl Fn(&[f64]) -> Cdd + Sync + '_ {
    move |x: &[f64]| {
        let y: Vec<f64> = x.iter().zip(&t.p).map(|(a, b)| a + b).collect();
        t.symbol.eval_dd(&y)
    }
}

/// Shape of an expansion: root exponents e_j, each spawning e_j - step*m.
/// Roots are double-double: the samples of large orders are sensitive to
/// the last bits of the exponent.
#[derive(Debug, Clone)]
pub(crate) struct ExpansionShape {
    pub roots: Vec<Cdd>,
    pub step: f64,
    /// Stop at exponents with Re <= 0 (exact polynomial growth).
    pub polynomial: bool,
    /// The log term appears only for a root equal to 0.
    pub log_allowed: bool,
}

impl ExpansionShape {
    /// The fit model and its exponents to double-double precision.
    pub fn model(&self, max_unknowns: usize) -> Result<(AsymptoticModel, Vec<Cdd>)> {
        let floor = if self.polynomial { NEAR_ZERO } else { MIN_EXPONENT };
        let mut exps: Vec<(Complex64, Cdd)> = Vec::new();
        let mut log = false;
        for &r in &self.roots {
            let mut m = 0;
            loop {
                let exact = r - Cdd::real(dd::dd(self.step * m as f64));
                let e = exact.to_c64();
                if e.re <= floor {
                    break;
                }
                if e.norm() < NEAR_ZERO {
                    if m == 0 && self.log_allowed {
                        log = true;
                    }
                } else if !exps.iter().any(|x| (x.0 - e).norm() < MERGE_TOL) {
                    exps.push((e, exact));
                }
                m += 1;
            }
        }
        exps.sort_by(|a, b| b.0.re.partial_cmp(&a.0.re).unwrap());
        let budget = max_unknowns.saturating_sub(1 + usize::from(log));
        exps.truncate(budget);
        let exact = exps.iter().map(|e| e.1).collect();
        Ok((AsymptoticModel::new(exps.into_iter().map(|e| e.0).collect(), log)?, exact))
    }
}

/// Shape of the expansion of the cube sums of sigma in R = N + 1/2.
fn symbol_shape(sigma: &ClassicalSymbol) -> ExpansionShape {
    let d = sigma.dim() as f64;
    let roots = sigma
        .components()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.profile.is_zero())
        .map(|(_, c)| Cdd::from_c64(c.degree) + Cdd::from_c64(sigma.shift_exponent()) + Cdd::real(dd::dd(d)))
        .collect();
    ExpansionShape {
        roots,
        step: 2.0,
        polynomial: sigma.is_polynomial(),
        log_allowed: true,
    }
}

fn is_positive_integer(e: Complex64) -> Option<i32> {
    let k = e.re.round();
    if e.im.abs() < MERGE_TOL && (e.re - k).abs() < MERGE_TOL && k >= 1.0 {
        Some(k as i32)
    } else {
        None
    }
}

/// Converts a fit in R = N + 1/2 to the finite part in N.
fn shift_to_n(mut out: FinitePartResult) -> FinitePartResult {
    let mut extra = Complex64::new(0.0, 0.0);
    for (e, c) in &out.power_coeffs {
        if let Some(k) = is_positive_integer(*e) {
            extra += c * 0.5f64.powi(k);
        }
    }
    out.constant += extra;
    out
}

fn fit_ladder(
    ladder: &[usize],
    ys: &[Cdd],
    shape: &ExpansionShape,
    half_shift: bool,
    tol: f64,
) -> Result<FinitePartResult> {
    let xs: Vec<Dd> = ladder
        .iter()
        .map(|&n| dd::dd(n as f64 + if half_shift { 0.5 } else { 0.0 }))
        .collect();
    let (model, exact) = shape.model(ladder.len() - 2)?;
    let raw = fit::fit_dd(&xs, ys, &model, &exact)?;
    let mut out = fit::package(&model, &raw);
    if half_shift {
        out = shift_to_n(out);
    }
    let scale = ys.iter().map(|y| y.abs()).fold(1.0, f64::max);
    fit::check_residual(out, tol * scale)
}

/// Finite part of the sup-norm cube sums; its constant is the canonical
/// regularized sum over Z^d. Power exponents refer to R = N + 1/2.
pub fn cutoff_sum_lattice(sigma: &ClassicalSymbol, opts: &LatticeOptions) -> Result<FinitePartResult> {
    let d = sigma.dim();
    check_lattice_dim(d)?;
    let ladder = opts.ladder(default_ladder(d));
    check_ladder(&ladder)?;
    let shells = shell_sums(d, *ladder.last().unwrap(), &|x| sigma.eval_dd(x));
    let ys = cumulative(&shells, &ladder);
    fit_ladder(&ladder, &ys, &symbol_shape(sigma), true, opts.tol)
}

/// Shape for functions whose expansion has every step (translates).
fn full_shape(sigma: &ClassicalSymbol) -> ExpansionShape {
    let mut s = symbol_shape(sigma);
    s.step = 1.0;
    s
}

/// Finite part in N of the cube sums of x -> sigma(x + p).
pub fn cutoff_sum_translated(t: &Translated, opts: &LatticeOptions) -> Result<FinitePartResult> {
    let d = t.dim();
    check_lattice_dim(d)?;
    let ladder = opts.ladder(translated_ladder(d));
    check_ladder(&ladder)?;
    let f = translated_dd(t);
    let shells = shell_sums(d, *ladder.last().unwrap(), &f);
    let ys = cumulative(&shells, &ladder);
    fit_ladder(&ladder, &ys, &full_shape(&t.symbol), false, opts.tol)
}

/// C(sigma) with a flag for integer orders, where it depends on conventions.
#[derive(Debug, Clone, Copy)]
pub struct CConstant {
    pub value: Complex64,
    pub convention_dependent: bool,
}

/// Canonical sum minus cut-off integral.
pub fn c_constant(sigma: &ClassicalSymbol) -> Result<CConstant> {
    let sum = cutoff_sum_lattice(sigma, &LatticeOptions::default())?;
    let int = reg_integral::cutoff_integral(sigma)?;
    Ok(CConstant {
        value: sum.constant - int.value,
        convention_dependent: sigma.is_integer_order(),
    })
}

/// C of a translate, with the integral finite part taken from ball
/// integrals of the translate itself.
pub fn c_constant_translated(t: &Translated) -> Result<CConstant> {
    let opts = LatticeOptions::default();
    let sum = cutoff_sum_translated(t, &opts)?;
    let int = ball_finite_part(t, &full_shape(&t.symbol), &translated_ladder(t.dim()), 1e-9)?;
    Ok(CConstant {
        value: sum.constant - int.constant,
        convention_dependent: t.symbol.is_integer_order(),
    })
}

/// Finite part of R -> integral over B(0, R), fitted on the given radii.
pub(crate) fn ball_finite_part(
    f: &dyn PointFn,
    shape: &ExpansionShape,
    radii: &[usize],
    tol: f64,
) -> Result<FinitePartResult> {
    let d = f.dim();
    // integrate shell by shell to reuse work across radii
    let mut ys = Vec::with_capacity(radii.len());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut prev = 0.0;
    for &r in radii {
        let r = r as f64;
        if prev == 0.0 {
            acc = reg_integral::ball_integral_numeric(f, r, 1e-14)?;
        } else {
            acc += annulus_integral(f, d, prev, r)?;
        }
        prev = r;
        ys.push(Cdd::from_c64(acc));
    }
    let xs: Vec<usize> = radii.to_vec();
    fit_ladder(&xs, &ys, shape, false, tol)
}

fn annulus_integral(f: &dyn PointFn, d: usize, a: f64, b: f64) -> Result<Complex64> {
    if d == 1 {
        let g = |t: f64| f.eval(&[t]) + f.eval(&[-t]);
        return crate::quad::adaptive(&g, a, b, 1e-15);
    }
    let n = if d == 2 { 128 } else { 32 };
    let sq = reg_integral::SphereQuadrature::new(d, n)?;
    let g = |t: f64| {
        sq.integrate(|w| {
            let x: Vec<f64> = w.iter().map(|v| v * t).collect();
            f.eval(&x)
        }) * t.powi(d as i32 - 1)
    };
    crate::quad::adaptive(&g, a, b, 1e-15)
}

/// Exact sum of P over |n|_sup <= N from per-axis power sums.
pub fn kp_hypercube_polynomial_sum(p: &Polynomial, n: i64) -> Rational {
    let mut total = exactnum::rat_int(0);
    let mut cache: Vec<Option<Rational>> = Vec::new();
    for (c, e) in &p.terms {
        let mut term = c.clone();
        for &k in e {
            let k = k as usize;
            if cache.len() <= k {
                cache.resize(k + 1, None);
            }
            let s = cache[k].get_or_insert_with(|| exactnum::symmetric_power_sum(k, n)).clone();
            term *= s;
        }
        total += term;
    }
    total
}

/// Lattice data prepared once for a family sigma(z) = v e^{b z L} (outside
/// the family cutoff), evaluated for many z by a power series in b z L.
pub struct LatticeSweep {
    d: usize,
    ladder: Vec<usize>,
    b: f64,
    shape0: ExpansionShape,
    z_max: f64,
    /// moments[i][m] = sum over |n| <= ladder[i] of v L^m
    moments: Vec<Vec<Cdd>>,
    /// points inside the family cutoff: (shell, v, L, w)
    specials: Vec<(usize, Cdd, Dd, f64)>,
}

/// Per-point data of a family: base value v, log weight L, family weight w.
pub type SweepPoint = (Cdd, Dd, f64);

impl LatticeSweep {
    /// `roots` are the exponents deg_j + d at z = 0; the exponent of each
    /// moves by b z.
    pub(crate) fn new(
        d: usize,
        ladder: Vec<usize>,
        b: f64,
        roots: Vec<Cdd>,
        z_max: f64,
        point: &(dyn Fn(&[f64]) -> SweepPoint + Sync),
    ) -> Result<Self> {
        check_lattice_dim(d)?;
        check_ladder(&ladder)?;
        let nmax = *ladder.last().unwrap();
        let l_max = ((d as f64).sqrt() * nmax as f64).ln().abs().max(1.0) * 1.5;
        let x = b.abs() * z_max * l_max;
        let mut nmom = 1;
        let mut term = 1.0;
        while !(term < 1e-34 && nmom as f64 > x) {
            term *= x / nmom as f64;
            nmom += 1;
        }
        let shells: Vec<(Vec<Cdd>, Vec<(usize, Cdd, Dd, f64)>)> = (0..=nmax as i64)
            .into_par_iter()
            .map(|m| {
                let mut acc = vec![Cdd::ZERO; nmom];
                let mut spec = Vec::new();
                for_each_shell_point(d, m, &mut |x| {
                    let (v, l, w) = point(x);
                    if w < 1.0 {
                        spec.push((m as usize, v, l, w));
                        return;
                    }
                    let mut p = v;
                    for a in acc.iter_mut() {
                        *a += p;
                        p = p.scale(l);
                    }
                });
                (acc, spec)
            })
            .collect();
        let mut moments = Vec::with_capacity(ladder.len());
        let mut specials = Vec::new();
        let mut run = vec![Cdd::ZERO; nmom];
        let mut next = 0;
        for (m, (acc, spec)) in shells.into_iter().enumerate() {
            for (r, a) in run.iter_mut().zip(&acc) {
                *r += *a;
            }
            specials.extend(spec);
            while next < ladder.len() && ladder[next] == m {
                moments.push(run.clone());
                next += 1;
            }
        }
        Ok(LatticeSweep {
            d,
            ladder,
            b,
            shape0: ExpansionShape {
                roots,
                step: 2.0,
                polynomial: false,
                log_allowed: true,
            },
            z_max,
            moments,
            specials,
        })
    }

    /// Sweep of the cube sums of a Riesz family at the base symbol's
    /// components.
    pub fn for_family(family: &crate::symbols::HolomorphicFamily, ladder: Vec<usize>, z_max: f64) -> Result<Self> {
        let base = family.base();
        let chi = family.family_cutoff();
        let d = base.dim();
        let shape = symbol_shape(base);
        let point = |x: &[f64]| -> SweepPoint {
            let r2: Dd = x.iter().fold(dd::dd(0.0), |s, v| s + Dd::new_mul(*v, *v));
            if r2.hi() == 0.0 {
                return (Cdd::ZERO, dd::dd(0.0), 1.0);
            }
            let l = dd::ln(r2) * 0.5;
            let r = r2.hi().sqrt();
            (base.eval_base_dd(x, l), l, chi.radial(r))
        };
        LatticeSweep::new(d, ladder, family.slope(), shape.roots, z_max, &point)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn ladder(&self) -> &[usize] {
        &self.ladder
    }

    /// Cube sums at z for each ladder entry.
    pub fn sums_at(&self, z: Complex64) -> Result<Vec<Cdd>> {
        if z.norm() > self.z_max * (1.0 + 1e-12) {
            return Err(Error::Param(format!(
                "|z| = {} exceeds the prepared sweep radius {}",
                z.norm(),
                self.z_max
            )));
        }
        let bz = Cdd::from_c64(z * self.b);
        let nmom = self.moments.first().map(|m| m.len()).unwrap_or(1);
        let mut coef = Vec::with_capacity(nmom);
        let mut c = Cdd::ONE;
        for m in 0..nmom {
            coef.push(c);
            c = (c * bz).scale(dd::div(dd::dd(1.0), dd::dd((m + 1) as f64)));
        }
        let mut out = Vec::with_capacity(self.ladder.len());
        for (i, mom) in self.moments.iter().enumerate() {
            let mut s = Cdd::ZERO;
            for (a, k) in mom.iter().zip(&coef).rev() {
                s += *a * *k;
            }
            for &(shell, v, l, w) in &self.specials {
                if shell <= self.ladder[i] {
                    let f = Cdd::real(dd::dd(1.0 - w)) + Cdd::powc(l, bz).scale_f(w);
                    s += v * f;
                }
            }
            out.push(s);
        }
        Ok(out)
    }

    /// Finite part in N of the cube sums of sigma(z).
    pub fn finite_part_at(&self, z: Complex64, tol: f64) -> Result<FinitePartResult> {
        let ys = self.sums_at(z)?;
        let mut shape = self.shape0.clone();
        // the same rounding as the exponent used in sums_at
        let shift = Cdd::from_c64(z * self.b);
        for r in shape.roots.iter_mut() {
            *r += shift;
        }
        fit_ladder(&self.ladder, &ys, &shape, true, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::symbols::{quadratic_symbol, riesz_family, translate, CutoffFunction, QuadraticForm};

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn shells_partition_the_cube() {
        for d in 1..=3 {
            let mut count = 0usize;
            for m in 0..=4 {
                for_each_shell_point(d, m, &mut |x| {
                    let s = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                    assert_eq!(s, m as f64);
                    count += 1;
                });
            }
            assert_eq!(count, 9usize.pow(d as u32));
        }
    }

    #[test]
    fn eight_point_check() {
        let p = Polynomial::new(2, vec![(rat(1, 1), vec![2, 0])]).unwrap();
        let s = ClassicalSymbol::from_polynomial(&p, None).unwrap();
        // six of the eight neighbours have n1 = +-1
        assert_eq!(lattice_sum_supball(&s, 1).unwrap(), c(6.0));
    }

    #[test]
    fn polynomial_finite_part_vanishes() {
        let p = Polynomial::new(2, vec![(rat(1, 1), vec![2, 2])]).unwrap();
        let s = ClassicalSymbol::from_polynomial(&p, None).unwrap();
        let f = cutoff_sum_lattice(&s, &LatticeOptions::default()).unwrap();
        assert!(f.constant.norm() < 1e-8, "{:?}", f);
    }

    #[test]
    fn convergent_epstein_constant() {
        let q = QuadraticForm::identity(2);
        let s = quadratic_symbol(&q, c(1.3), Some(CutoffFunction::default()));
        let f = cutoff_sum_lattice(&s, &LatticeOptions::default()).unwrap();
        // direct sum to N = 400 plus the leading integral tail
        let n = 400;
        let direct = lattice_sum_supball(&s, n).unwrap();
        let r = n as f64 + 0.5;
        // integral of |x|^{-2.6} outside the square [-R, R]^2
        let faces = 4.0 * crate::quad::adaptive_real(&|y: f64| (1.0 + y * y).powf(-1.3), -1.0, 1.0, 1e-15).unwrap();
        let tail = faces * r.powf(-0.6) / 0.6;
        assert!((f.constant - direct - tail).norm() < 1e-6, "{} {}", f.constant, direct + tail);
    }

    #[test]
    fn euler_maclaurin_and_lattice_agree() {
        let s = ClassicalSymbol::radial_power(1, -1.5);
        let f = cutoff_sum_lattice(&s, &LatticeOptions::default()).unwrap();
        let em = super::super::cutoff_sum_1d(&s, &Default::default()).unwrap();
        assert!((f.constant - em).norm() < 1e-7, "{} {}", f.constant, em);
    }

    #[test]
    fn log_coefficient_matches_sphere_integral() {
        let s = ClassicalSymbol::radial_power(2, -2.0);
        let f = cutoff_sum_lattice(&s, &LatticeOptions::default()).unwrap();
        assert!((f.log_coeff - c(2.0 * std::f64::consts::PI)).norm() < 1e-4, "{:?}", f);
    }

    #[test]
    fn translate_keeps_the_canonical_sum() {
        let s = ClassicalSymbol::radial_power(1, -1.5);
        let base = cutoff_sum_lattice(&s, &LatticeOptions::default()).unwrap().constant;
        for p in [1.0, 3.0] {
            let t = translate(&s, &[p]).unwrap();
            let v = cutoff_sum_translated(&t, &LatticeOptions::default()).unwrap();
            assert!((v.constant - base).norm() < 1e-7, "p = {p}: {} vs {base}", v.constant);
        }
    }

    #[test]
    fn kp_matches_enumeration() {
        let p = Polynomial::new(2, vec![(rat(1, 1), vec![2, 2]), (rat(-3, 2), vec![1, 0])]).unwrap();
        let mut brute = rat(0, 1);
        for a in -3..=3 {
            for b in -3..=3 {
                brute += p.eval(&[a, b]);
            }
        }
        assert_eq!(kp_hypercube_polynomial_sum(&p, 3), brute);
        let one = Polynomial::new(3, vec![(rat(1, 1), vec![0, 0, 0])]).unwrap();
        assert_eq!(kp_hypercube_polynomial_sum(&one, 2), rat(125, 1));
        assert_eq!(kp_hypercube_polynomial_sum(&p, 0), p.eval(&[0, 0]));
    }

    #[test]
    fn sweep_at_zero_matches_direct_sum() {
        let s = ClassicalSymbol::radial_power(2, -2.5);
        let fam = riesz_family(&s, -1.0).unwrap();
        let sw = LatticeSweep::for_family(&fam, vec![8, 16], 0.25).unwrap();
        let z = Complex64::new(0.1, 0.2);
        let sums = sw.sums_at(z).unwrap();
        let direct = lattice_sum_supball(&fam.at(z), 16).unwrap();
        assert!((sums[1].to_c64() - direct).norm() < 1e-12);
    }
}
