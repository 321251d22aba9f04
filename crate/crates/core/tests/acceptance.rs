//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed. The
//! process fails when a criterion's outcome differs from the expectation
//! table at the bottom.

mod common;

use common::{brute_cube_sum, c, random_polynomial, richardson_derivative, GAMMA_QUARTER};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;
use symzeta::exactnum::{self, Rational};
use symzeta::meromorphic::{predicted_residue, zsweep_regularized_integral, zsweep_regularized_sum, SweepOptions};
use symzeta::oracles::{dirichlet_beta_oracle, epstein_oracle, riemann_zeta_oracle};
use symzeta::reg_integral::{
    ball_integral_numeric, cutoff_integral, polytope_ball_correction, supball_integral_numeric,
};
use symzeta::reg_sum::{
    c_constant, c_constant_translated, cutoff_sum_lattice, cutoff_sum_translated, finite_part_extract,
    kp_hypercube_polynomial_sum, AsymptoticModel, LatticeOptions,
};
use symzeta::symbols::{quadratic_symbol, riesz_family, translate, ClassicalSymbol, CutoffFunction, QuadraticForm};
use symzeta::zeta::{
    hurwitz_zeta_reg, quadratic_zeta, riemann_zeta_reg, torus_zeta, torus_zeta_determinant, ZetaOptions,
};

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn run<F: FnOnce() -> Result<(bool, String), String>>(id: &'static str, f: F) -> Line {
    let t = Instant::now();
    let (pass, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Line {
        id,
        pass,
        detail: format!("{detail} [{:.2} s]", t.elapsed().as_secs_f64()),
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn crit1() -> Result<(bool, String), String> {
    let t = Instant::now();
    let a = riemann_zeta_reg(c(-1.0)).map_err(e)?.value;
    let b = riemann_zeta_reg(c(-3.0)).map_err(e)?.value;
    let secs = t.elapsed().as_secs_f64();
    let ea = (a - c(-1.0 / 12.0)).norm();
    let eb = (b - c(1.0 / 120.0)).norm();
    Ok((
        ea < 1e-8 && eb < 1e-8 && secs < 1.0,
        format!("|err| {ea:.1e}, {eb:.1e} in {secs:.3} s"),
    ))
}

fn crit2() -> Result<(bool, String), String> {
    let mut worst = 0.0f64;
    for k in 0..=4usize {
        for (pn, pd) in [(1i64, 2i64), (1, 1), (3, 1)] {
            let p = exactnum::rat(pn, pd);
            let v = hurwitz_zeta_reg(c(-(k as f64)), pn as f64 / pd as f64).map_err(e)?.value;
            let b: Rational = exactnum::bernoulli_poly(k + 1, &p) / exactnum::rat_int(k as i64 + 1);
            worst = worst.max((v + c(exactnum::to_f64(&b))).norm());
        }
    }
    Ok((worst < 1e-9, format!("max |err| {worst:.1e} over 15 cases")))
}

fn crit3() -> Result<(bool, String), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let d = 1 + i % 3;
        let p = random_polynomial(&mut rng, d, 4);
        let s = ClassicalSymbol::from_polynomial(&p, None).map_err(e)?;
        let f = cutoff_sum_lattice(&s, &LatticeOptions::default()).map_err(e)?;
        worst = worst.max(f.constant.norm());
    }
    Ok((worst < 1e-7, format!("max |fp| {worst:.1e} over 10 polynomials")))
}

fn crit4() -> Result<(bool, String), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ok = 0;
    for i in 0..20 {
        let d = 1 + i % 3;
        let p = random_polynomial(&mut rng, d, 4);
        let n = (i % 7) as i64;
        if kp_hypercube_polynomial_sum(&p, n) == brute_cube_sum(&p, n) {
            ok += 1;
        }
    }
    Ok((ok == 20, format!("{ok}/20 exact matches")))
}

/// Finite part of R -> integral over the ball or cube of radius R.
fn integral_fp(s: &ClassicalSymbol, a: f64, cube: bool) -> Result<Complex64, String> {
    let radii = [4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0];
    let mut samples = Vec::new();
    for r in radii {
        let v = if cube {
            supball_integral_numeric(s, r, 1e-12)
        } else {
            ball_integral_numeric(s, r, 1e-12)
        }
        .map_err(e)?;
        samples.push((r, v));
    }
    let beta = a + 2.0;
    let model = if beta.abs() < 1e-12 {
        AsymptoticModel::real(&[], true)
    } else {
        AsymptoticModel::real(&[beta], false)
    }
    .map_err(e)?;
    Ok(finite_part_extract(&samples, &model, 1e-8).map_err(e)?.constant)
}

fn crit5() -> Result<(bool, String), String> {
    let mut worst = 0.0f64;
    for a in [-1.5, -2.5, -0.7, 0.3, -3.2] {
        let s = ClassicalSymbol::radial_power(2, a);
        let diff = integral_fp(&s, a, true)? - integral_fp(&s, a, false)?;
        worst = worst.max(diff.norm());
    }
    let s = ClassicalSymbol::radial_power(2, -2.0);
    let diff = integral_fp(&s, -2.0, true)? - integral_fp(&s, -2.0, false)?;
    let corr = polytope_ball_correction(&s).map_err(e)?;
    let gap = (diff - corr).norm();
    Ok((
        worst < 1e-5 && gap < 2e-4,
        format!("non-integer max |diff| {worst:.1e}; order -2 diff {:.6} vs correction {:.6}", diff.re, corr.re),
    ))
}

fn crit6() -> Result<(bool, String), String> {
    let s = ClassicalSymbol::radial_power(1, -1.5);
    let base = cutoff_sum_lattice(&s, &LatticeOptions::default()).map_err(e)?.constant;
    let cbase = c_constant(&s).map_err(e)?.value;
    let mut worst = 0.0f64;
    let mut worst_c = 0.0f64;
    for p in [1.0, 3.0] {
        let t = translate(&s, &[p]).map_err(e)?;
        let v = cutoff_sum_translated(&t, &LatticeOptions::default()).map_err(e)?.constant;
        worst = worst.max((v - base).norm());
        let cv = c_constant_translated(&t).map_err(e)?.value;
        worst_c = worst_c.max((cv - cbase).norm());
    }
    Ok((
        worst < 1e-7 && worst_c < 1e-7,
        format!("sum shift {worst:.1e}, C shift {worst_c:.1e}"),
    ))
}

fn crit7() -> Result<(bool, String), String> {
    let opts = SweepOptions::default();
    let mut worst_pred = 0.0f64;
    let mut worst_pair = 0.0f64;
    for (d, a) in [(1usize, -1.0), (2, -2.0)] {
        let fam = riesz_family(&ClassicalSymbol::radial_power(d, a), -1.0).map_err(e)?;
        let sum = zsweep_regularized_sum(&fam, &opts).map_err(e)?;
        let int = zsweep_regularized_integral(&fam, &opts).map_err(e)?;
        let pred = predicted_residue(&fam).map_err(e)?;
        worst_pred = worst_pred.max((sum.c_minus1 - pred).norm());
        worst_pair = worst_pair.max((sum.c_minus1 - int.c_minus1).norm());
    }
    Ok((
        worst_pred < 1e-5 && worst_pair < 1e-5,
        format!("vs formula {worst_pred:.1e}, sum vs integral {worst_pair:.1e}"),
    ))
}

fn crit8() -> Result<(bool, String), String> {
    let q = QuadraticForm::identity(2);
    let v = quadratic_zeta(&q, c(1.0), &ZetaOptions::default()).map_err(e)?;
    let o = epstein_oracle(&q, c(1.0)).map_err(e)?;
    let er = (v.residue_in_z - c(2.0 * PI)).norm();
    let eo = (o.s_residue_at_d_half - PI).abs();
    Ok((
        v.is_pole && er < 1e-4 && eo < 1e-8,
        format!("residue_in_z err {er:.1e}, oracle s-residue err {eo:.1e}"),
    ))
}

pub const EPSTEIN_POINTS: [(f64, f64); 12] = [
    (-1.7, 0.0),
    (-1.2, -0.4),
    (-0.6, 0.8),
    (-0.3, 0.0),
    (0.25, 0.0),
    (0.5, 2.0),
    (0.8, 0.0),
    (1.25, 0.5),
    (1.6, 0.0),
    (2.2, 0.0),
    (2.5, -1.0),
    (3.0, 0.0),
];

fn crit9() -> Result<(bool, String), String> {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for q in [
        QuadraticForm::identity(2),
        QuadraticForm::new(2, vec![1.0, 0.5, 0.5, 1.0]).map_err(e)?,
    ] {
        for (re, im) in EPSTEIN_POINTS {
            let s = Complex64::new(re, im);
            let v = quadratic_zeta(&q, s, &ZetaOptions::default()).map_err(e)?.value;
            let o = epstein_oracle(&q, s).map_err(e)?.value.ok_or("unexpected pole")?;
            worst = worst.max((v - o).norm());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let z4 = quadratic_zeta(&QuadraticForm::identity(2), c(2.0), &ZetaOptions::default())
        .map_err(e)?
        .value;
    let f = riemann_zeta_oracle(c(2.0)).map_err(e)? * dirichlet_beta_oracle(c(2.0)).map_err(e)? * 4.0;
    let ef = (z4 - f).norm();
    Ok((
        worst < 1e-5 && secs < 60.0 && ef < 1e-7,
        format!("max |err| {worst:.1e} over 24 evaluations in {secs:.1} s; 4 zeta beta err {ef:.1e}"),
    ))
}

fn trivial_zeros(ks: &[usize]) -> Result<(f64, String), String> {
    let forms = [
        QuadraticForm::identity(1),
        QuadraticForm::new(1, vec![3.0]).map_err(e)?,
        QuadraticForm::identity(2),
        QuadraticForm::new(2, vec![1.0, 0.5, 0.5, 1.0]).map_err(e)?,
    ];
    let mut worst = 0.0f64;
    let mut values = Vec::new();
    for &k in ks {
        let s = c(-(k as f64));
        for q in &forms {
            let v = quadratic_zeta(q, s, &ZetaOptions::default()).map_err(e)?.value;
            worst = worst.max(v.norm());
            values.push(v.re);
        }
        for d in 1..=2 {
            let v = torus_zeta(d, s).map_err(e)?.value;
            worst = worst.max(v.norm());
            values.push(v.re);
        }
    }
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.6}")).collect();
    Ok((worst, shown.join(" ")))
}

fn crit10a() -> Result<(bool, String), String> {
    let (worst, _) = trivial_zeros(&[1, 2])?;
    Ok((worst < 1e-5, format!("k = 1, 2: max |Z| {worst:.1e}")))
}

fn crit10b() -> Result<(bool, String), String> {
    let (worst, values) = trivial_zeros(&[0])?;
    Ok((
        worst < 1e-5,
        format!("k = 0: values {values} (the continuation gives Z(0) = -1)"),
    ))
}

fn crit11() -> Result<(bool, String), String> {
    let d1 = torus_zeta_determinant(1).map_err(e)?;
    let e1 = (d1 - 4.0 * PI * PI).abs();
    let d2 = torus_zeta_determinant(2).map_err(e)?;
    let q = QuadraticForm::identity(2);
    let z = |s: f64| epstein_oracle(&q, c(s)).unwrap().value.unwrap().re;
    let oracle = (-richardson_derivative(&z, 1e-3)).exp();
    let e2 = (d2 - oracle).abs();
    let closed = GAMMA_QUARTER.powi(4) / (4.0 * PI);
    Ok((
        e1 < 1e-5 && e2 < 1e-4,
        format!("d=1 err {e1:.1e}; d=2 {d2:.8} vs oracle {oracle:.8} (err {e2:.1e}), closed form {closed:.8}"),
    ))
}

fn crit12() -> Result<(bool, String), String> {
    let q = QuadraticForm::new(2, vec![2.0, 0.3, 0.3, 1.0]).map_err(e)?;
    let symbols = [
        ClassicalSymbol::radial_power(1, -1.5),
        ClassicalSymbol::radial_power(1, 0.5),
        ClassicalSymbol::radial_power(2, -2.5),
        quadratic_symbol(&q, c(0.35), Some(CutoffFunction::default())),
        ClassicalSymbol::radial_power(3, 0.3),
    ];
    let mut worst = 0.0f64;
    for s in &symbols {
        let fam = riesz_family(s, -1.0).map_err(e)?;
        let l = zsweep_regularized_integral(&fam, &SweepOptions::default()).map_err(e)?;
        let v = cutoff_integral(s).map_err(e)?.value;
        worst = worst.max((l.c0 - v).norm());
    }
    Ok((worst < 1e-7, format!("max |fp - cutoff integral| {worst:.1e}")))
}

fn main() {
    // libtest flags such as --nocapture or a filter are accepted and ignored
    let lines = vec![
        run("1", crit1),
        run("2", crit2),
        run("3", crit3),
        run("4", crit4),
        run("5", crit5),
        run("6", crit6),
        run("7", crit7),
        run("8", crit8),
        run("9", crit9),
        run("10a", crit10a),
        run("10b", crit10b),
        run("11", crit11),
        run("12", crit12),
    ];
    // 10b asks for Z_q(0) = 0; the value is -1 for every form
    let expected_fail = ["10b"];
    let mut unexpected = Vec::new();
    for l in &lines {
        println!("{} criterion {}: {}", if l.pass { "PASS" } else { "FAIL" }, l.id, l.detail);
        if l.pass == expected_fail.contains(&l.id) {
            unexpected.push(l.id);
        }
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    println!("acceptance: {passed}/{} passed; expected failures: {}", lines.len(), expected_fail.join(", "));
    if !unexpected.is_empty() {
        println!("unexpected outcome for: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
