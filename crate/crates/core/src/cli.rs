//! Command-line front end.

use crate::error::{Error, Result};
use crate::exactnum::{self, Polynomial, Rational};
use crate::meromorphic::{self, LaurentFit, SweepOptions};
use crate::oracles::{self, OracleConfig};
use crate::reg_integral;
use crate::reg_sum::{self, LatticeOptions};
use crate::symbols::{self, ClassicalSymbol, CutoffFunction, QuadraticForm};
use crate::zeta::{self, PipelineChoice, ZetaOptions, ZetaResult};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeMap;
use std::time::Instant;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed CSV header.
pub const CSV_HEADER: &str =
    "command,point_re,point_im,value_re,value_im,is_pole,residue_re,residue_im,pipeline,residual,condition,nmax,runtime_ms";

#[derive(Parser, Debug)]
#[command(name = "symzeta", version, about = "Regularized lattice sums and Epstein zeta functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutFormat::Json, global = true)]
    out: OutFormat,
    /// Fit residual tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Largest sample size (cube half-width).
    #[arg(long, global = true)]
    nmax: Option<usize>,
    /// Oracle precision in bits.
    #[arg(long, global = true, default_value_t = 192)]
    prec: usize,
    /// Sample-size ladder preset.
    #[arg(long, value_enum, global = true, default_value_t = Profile::Default)]
    profile: Profile,
    /// Accepted and ignored.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Profile {
    Default,
    Sweep,
    Translated,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zeta functions.
    Zeta {
        #[command(subcommand)]
        which: ZetaCmd,
    },
    /// Regularized sums.
    Sum {
        #[command(subcommand)]
        which: SumCmd,
    },
    /// Regularized integrals.
    Integral {
        #[command(subcommand)]
        which: IntegralCmd,
    },
    /// Noncommutative residues.
    Residue {
        #[command(subcommand)]
        which: ResidueCmd,
    },
    /// Zeta determinants.
    Det {
        #[command(subcommand)]
        which: DetCmd,
    },
    /// Laurent sweeps along Riesz families.
    Sweep {
        #[command(subcommand)]
        which: SweepCmd,
    },
}

#[derive(Subcommand, Debug)]
enum ZetaCmd {
    Riemann {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Use the multiprecision reference instead.
        #[arg(long)]
        oracle: bool,
    },
    Hurwitz {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        oracle: bool,
    },
    Quadratic {
        /// Row-major matrix "a,b;c,d".
        #[arg(long)]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, value_enum, default_value_t = PipelineArg::Auto)]
        pipeline: PipelineArg,
        #[arg(long)]
        oracle: bool,
    },
    Torus {
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum PipelineArg {
    Auto,
    Direct,
    Lattice,
}

#[derive(Subcommand, Debug)]
enum SumCmd {
    /// Canonical regularized sum over Z^d.
    Fp {
        #[command(flatten)]
        symbol: SymbolArgs,
        /// Report C = sum - integral instead.
        #[arg(long)]
        defect: bool,
        /// Exact sum of the polynomial over the cube of half-width N.
        #[arg(long)]
        kp: Option<i64>,
    },
}

#[derive(Subcommand, Debug)]
enum IntegralCmd {
    /// Cut-off regularized integral over R^d.
    Cutoff {
        #[command(flatten)]
        symbol: SymbolArgs,
    },
}

#[derive(Subcommand, Debug)]
enum ResidueCmd {
    Symbol {
        #[command(flatten)]
        symbol: SymbolArgs,
    },
}

#[derive(Subcommand, Debug)]
enum DetCmd {
    Torus {
        #[arg(long)]
        dim: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SweepCmd {
    /// Laurent coefficients at z = 0.
    Laurent {
        #[command(flatten)]
        symbol: SymbolArgs,
        /// Slope b of the factor |x|^{bz}.
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, value_enum, default_value_t = SweepKind::Sum)]
        kind: SweepKind,
        #[arg(long, default_value_t = meromorphic::DEFAULT_RADIUS)]
        radius: f64,
        #[arg(long, default_value_t = meromorphic::DEFAULT_POINTS)]
        points: usize,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SweepKind {
    Sum,
    Integral,
}

#[derive(Args, Debug, Clone)]
struct SymbolArgs {
    #[arg(long)]
    dim: Option<usize>,
    /// chi(x) |x|^a with complex a.
    #[arg(long, allow_hyphen_values = true)]
    power: Option<String>,
    /// chi(x) q(x)^{-s}; needs --s.
    #[arg(long)]
    form: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    /// Expression such as "pow(norm2(x), -1.5) - 2*pow(q(x), -0.3)";
    /// q(x) needs --form, norm2(x) alone needs --dim.
    #[arg(long, allow_hyphen_values = true)]
    symbol: Option<String>,
    /// Polynomial such as "x0^2*x1 - 3/2*x1"; needs --dim.
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Drop the cutoff near the origin.
    #[arg(long)]
    pure: bool,
    /// Translate by p: x -> sigma(x + p).
    #[arg(long, allow_hyphen_values = true)]
    translate: Option<String>,
}

/// JSON number with 17 significant digits.
fn sig17<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if !v.is_finite() {
        return s.serialize_none();
    }
    let raw = serde_json::value::RawValue::from_string(format!("{v:.16e}")).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

/// null reads back as NaN.
fn nan_or<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Num {
    #[serde(serialize_with = "sig17", deserialize_with = "nan_or")]
    pub re: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "nan_or")]
    pub im: f64,
}

impl From<Complex64> for Num {
    fn from(z: Complex64) -> Self {
        Num { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeDiagnostics {
    pub pipeline: String,
    #[serde(serialize_with = "sig17", deserialize_with = "nan_or")]
    pub residual: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "nan_or")]
    pub condition: f64,
    pub nmax: usize,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub value: Num,
    pub is_pole: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residue: Option<Num>,
    pub diagnostics: EnvelopeDiagnostics,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    /// Contour samples for sweeps.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub samples: Vec<(Num, Num)>,
    /// Exact rational result when one exists.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<String>,
}

/// Output of one invocation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse a sum of terms `[c*]pow(norm2(x), a)` or `[c*]pow(q(x), e)`, where
/// norm2(x) is the euclidean norm |x|, q is the given form, c is real and the
/// exponents are complex literals. Every term carries the cutoff.
pub fn parse_symbol(
    text: &str,
    d: usize,
    q: Option<&QuadraticForm>,
    cutoff: Option<CutoffFunction>,
) -> Result<ClassicalSymbol> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |why: &str| Error::Parse(format!("bad symbol '{text}': {why}"));
    // split at + and - outside parentheses, keeping signs
    let mut terms: Vec<(f64, String)> = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut sign = 1.0;
    let bytes = t.as_bytes();
    for (k, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                let prev = if k > 0 { bytes[k - 1] } else { b'+' };
                if matches!(prev, b'e' | b'E' | b'*') {
                    continue;
                }
                if k > start {
                    terms.push((sign, t[start..k].to_string()));
                } else if k > 0 {
                    return Err(bad("empty term"));
                }
                sign = if b == b'-' { -1.0 } else { 1.0 };
                start = k + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(bad("unbalanced parentheses"));
        }
    }
    if depth != 0 || start >= t.len() {
        return Err(bad("unbalanced or empty"));
    }
    terms.push((sign, t[start..].to_string()));
    let mut out: Option<ClassicalSymbol> = None;
    for (sign, term) in terms {
        let (coeff, call) = match term.find("*pow(") {
            Some(k) => (term[..k].parse::<f64>().map_err(|_| bad("coefficient"))?, &term[k + 1..]),
            None => (1.0, term.as_str()),
        };
        let inner = call
            .strip_prefix("pow(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad("expected pow(base, exponent)"))?;
        let (base, expo) = inner.split_once(',').ok_or_else(|| bad("pow needs two arguments"))?;
        let expo = parse_complex(expo.trim_start_matches('(').trim_end_matches(')'))?;
        let k = Complex64::new(sign * coeff, 0.0);
        let piece = match base {
            "norm2(x)" => ClassicalSymbol::power(d, expo, k, cutoff)?,
            "q(x)" => {
                let q = q.ok_or_else(|| bad("q(x) needs --form"))?;
                symbols::quadratic_symbol(q, -expo, cutoff).scaled(k)
            }
            _ => return Err(bad("base must be norm2(x) or q(x)")),
        };
        out = Some(match out {
            None => piece,
            Some(acc) => acc.add(&piece)?,
        });
    }
    out.ok_or_else(|| bad("empty"))
}

/// Parse "a+bi", "-1", "2i", "0.5-3i".
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad complex number '{text}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(num(&t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => num(v)?,
    };
    Ok(Complex64::new(num(re)?, im))
}

fn parse_vector(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad vector entry '{}'", v.trim()))))
        .collect()
}

fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad coefficient '{text}'"));
    let int = |s: &str| s.trim().parse::<num_bigint::BigInt>().map_err(|_| bad());
    match text.split_once('/') {
        Some((n, d)) => {
            let d = int(d)?;
            if d == num_bigint::BigInt::from(0) {
                return Err(bad());
            }
            Ok(Rational::new(int(n)?, d))
        }
        None => Ok(Rational::from_integer(int(text)?)),
    }
}

/// Parse a polynomial in x0, x1, ... with rational coefficients.
pub fn parse_polynomial(text: &str, d: usize) -> Result<Polynomial> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |m: String| Error::Parse(format!("polynomial '{text}': {m}"));
    let mut terms = Vec::new();
    let mut chunks = Vec::new();
    let mut start = 0;
    for (k, ch) in t.char_indices() {
        if (ch == '+' || ch == '-') && k > 0 {
            chunks.push(&t[start..k]);
            start = k;
        }
    }
    chunks.push(&t[start..]);
    for chunk in chunks {
        let (sign, body) = match chunk.as_bytes().first() {
            Some(b'-') => (-1, &chunk[1..]),
            Some(b'+') => (1, &chunk[1..]),
            _ => (1, chunk),
        };
        if body.is_empty() {
            return Err(bad("empty term".into()));
        }
        let mut coef = exactnum::rat_int(sign);
        let mut exps = vec![0u32; d];
        for factor in body.split('*') {
            if let Some(var) = factor.strip_prefix('x') {
                let (idx, pow) = match var.split_once('^') {
                    Some((i, p)) => (i, p.parse::<u32>().map_err(|_| bad(format!("bad power in '{factor}'")))?),
                    None => (var, 1),
                };
                let i: usize = idx.parse().map_err(|_| bad(format!("bad variable '{factor}'")))?;
                if i >= d {
                    return Err(bad(format!("variable x{i} outside dimension {d}")));
                }
                exps[i] += pow;
            } else {
                coef *= parse_rational(factor)?;
            }
        }
        terms.push((coef, exps));
    }
    Polynomial::new(d, terms)
}

struct BuiltSymbol {
    symbol: ClassicalSymbol,
    translate: Option<Vec<f64>>,
    poly: Option<Polynomial>,
}

fn build_symbol(a: &SymbolArgs, inputs: &mut BTreeMap<String, String>) -> Result<BuiltSymbol> {
    let cutoff = if a.pure { None } else { Some(CutoffFunction::default()) };
    let chosen = [a.power.is_some(), a.form.is_some() && a.symbol.is_none(), a.poly.is_some(), a.symbol.is_some()]
        .iter()
        .filter(|v| **v)
        .count();
    if chosen != 1 {
        return Err(Error::Param("give exactly one of --power, --form, --poly, --symbol".into()));
    }
    let mut poly = None;
    let symbol = if let Some(text) = &a.symbol {
        let q = a.form.as_deref().map(QuadraticForm::parse).transpose()?;
        let d = match (&q, a.dim) {
            (Some(q), Some(d)) if d != q.dim() => return Err(Error::DimensionMismatch { expected: q.dim(), got: d }),
            (Some(q), _) => q.dim(),
            (None, Some(d)) => d,
            (None, None) => 1,
        };
        inputs.insert("dim".into(), d.to_string());
        inputs.insert("symbol".into(), text.clone());
        if let Some(f) = &a.form {
            inputs.insert("form".into(), f.clone());
        }
        parse_symbol(text, d, q.as_ref(), cutoff)?
    } else if let Some(p) = &a.power {
        let d = a.dim.unwrap_or(1);
        inputs.insert("dim".into(), d.to_string());
        inputs.insert("power".into(), p.clone());
        ClassicalSymbol::power(d, parse_complex(p)?, Complex64::new(1.0, 0.0), cutoff)?
    } else if let Some(f) = &a.form {
        let q = QuadraticForm::parse(f)?;
        let s = a.s.as_deref().ok_or_else(|| Error::Param("--form needs --s".into()))?;
        inputs.insert("form".into(), f.clone());
        inputs.insert("s".into(), s.to_string());
        symbols::quadratic_symbol(&q, parse_complex(s)?, cutoff)
    } else {
        let text = a.poly.as_ref().unwrap();
        let d = a.dim.ok_or_else(|| Error::Param("--poly needs --dim".into()))?;
        inputs.insert("dim".into(), d.to_string());
        inputs.insert("poly".into(), text.clone());
        let p = parse_polynomial(text, d)?;
        let s = ClassicalSymbol::from_polynomial(&p, None)?;
        poly = Some(p);
        s
    };
    if a.pure {
        inputs.insert("pure".into(), "true".into());
    }
    let translate = match &a.translate {
        Some(t) => {
            inputs.insert("translate".into(), t.clone());
            let v = parse_vector(t)?;
            crate::error::check_dim(symbol.dim(), v.len())?;
            Some(v)
        }
        None => None,
    };
    Ok(BuiltSymbol {
        symbol,
        translate,
        poly,
    })
}

fn ladder(common: &Common, d: usize) -> Vec<usize> {
    let base = match common.profile {
        Profile::Default => reg_sum::default_ladder(d),
        Profile::Sweep => reg_sum::sweep_ladder(d),
        Profile::Translated => reg_sum::translated_ladder(d),
    };
    match common.nmax {
        Some(n) => base.into_iter().filter(|&m| m <= n).collect(),
        None => base,
    }
}

/// Everything a command computes before it is rendered.
struct Computed {
    value: Complex64,
    is_pole: bool,
    residue: Option<Complex64>,
    pipeline: &'static str,
    residual: f64,
    condition: f64,
    nmax: usize,
    samples: Vec<(Complex64, Complex64)>,
    exact: Option<String>,
}

impl Computed {
    fn plain(value: Complex64, pipeline: &'static str) -> Self {
        Computed {
            value,
            is_pole: false,
            residue: None,
            pipeline,
            residual: 0.0,
            condition: 1.0,
            nmax: 0,
            samples: Vec::new(),
            exact: None,
        }
    }

    fn from_zeta(r: ZetaResult) -> Self {
        Computed {
            value: r.value,
            is_pole: r.is_pole,
            residue: r.is_pole.then_some(r.residue_in_z),
            pipeline: r.diagnostics.pipeline.as_str(),
            residual: r.diagnostics.residual,
            condition: r.diagnostics.condition,
            nmax: r.diagnostics.nmax,
            samples: Vec::new(),
            exact: None,
        }
    }

    fn from_laurent(l: LaurentFit, pipeline: &'static str, nmax: usize) -> Self {
        Computed {
            value: l.c0,
            is_pole: l.c_minus1.norm() > 1e-6 * l.c0.norm().max(1.0),
            residue: Some(l.c_minus1),
            pipeline,
            residual: l.max_aliasing_estimate,
            condition: 1.0,
            nmax,
            samples: l.samples,
            exact: None,
        }
    }
}

fn oracle_result(value: Complex64, bound: f64) -> Computed {
    Computed {
        residual: bound,
        ..Computed::plain(value, "oracle")
    }
}

fn sweep_options(common: &Common, d: usize) -> SweepOptions {
    let mut o = SweepOptions::default();
    if let Some(t) = common.tol {
        o.fit_tol = t;
    }
    if common.nmax.is_some() || common.profile != Profile::Default {
        let mut l = ladder(common, d);
        if common.profile == Profile::Default {
            l = reg_sum::sweep_ladder(d).into_iter().filter(|&m| m <= common.nmax.unwrap()).collect();
        }
        o.n_range = l;
    }
    o
}

fn run_command(cli: &Cli, inputs: &mut BTreeMap<String, String>) -> Result<(String, Computed)> {
    let common = &cli.common;
    let cfg = OracleConfig {
        precision_bits: common.prec,
        ..OracleConfig::default()
    };
    match &cli.command {
        Command::Zeta { which } => match which {
            ZetaCmd::Riemann { s, oracle } => {
                inputs.insert("s".into(), s.clone());
                let s = parse_complex(s)?;
                let out = if *oracle {
                    let v = oracles::riemann_zeta_oracle_with(s, &cfg)?;
                    oracle_result(v.value, v.bound)
                } else {
                    Computed::from_zeta(zeta::riemann_zeta_reg(s)?)
                };
                Ok(("zeta riemann".into(), out))
            }
            ZetaCmd::Hurwitz { s, p, oracle } => {
                inputs.insert("s".into(), s.clone());
                inputs.insert("p".into(), p.to_string());
                let s = parse_complex(s)?;
                let out = if *oracle {
                    let v = oracles::hurwitz_zeta_oracle_with(s, *p, &cfg)?;
                    oracle_result(v.value, v.bound)
                } else {
                    Computed::from_zeta(zeta::hurwitz_zeta_reg(s, *p)?)
                };
                Ok(("zeta hurwitz".into(), out))
            }
            ZetaCmd::Quadratic {
                form,
                s,
                pipeline,
                oracle,
            } => {
                inputs.insert("form".into(), form.clone());
                inputs.insert("s".into(), s.clone());
                let q = QuadraticForm::parse(form)?;
                let s = parse_complex(s)?;
                Ok(("zeta quadratic".into(), quadratic(&q, s, *pipeline, *oracle, common)?))
            }
            ZetaCmd::Torus { dim, s, oracle } => {
                inputs.insert("dim".into(), dim.to_string());
                inputs.insert("s".into(), s.clone());
                if *dim == 0 || *dim > 3 {
                    return Err(Error::Precondition(format!("torus dimension must be 1, 2 or 3, got {dim}")));
                }
                let q = QuadraticForm::identity(*dim);
                let s = parse_complex(s)?;
                Ok(("zeta torus".into(), quadratic(&q, s, PipelineArg::Auto, *oracle, common)?))
            }
        },
        Command::Sum {
            which: SumCmd::Fp { symbol, defect, kp },
        } => {
            let b = build_symbol(symbol, inputs)?;
            let d = b.symbol.dim();
            if let Some(n) = kp {
                inputs.insert("kp".into(), n.to_string());
                let p = b
                    .poly
                    .as_ref()
                    .ok_or_else(|| Error::Param("--kp needs --poly".into()))?;
                let r = reg_sum::kp_hypercube_polynomial_sum(p, *n);
                let mut out = Computed::plain(Complex64::new(exactnum::to_f64(&r), 0.0), "exact");
                out.exact = Some(r.to_string());
                out.nmax = *n as usize;
                return Ok(("sum fp".into(), out));
            }
            let opts = LatticeOptions {
                n_range: if common.nmax.is_some() || common.profile != Profile::Default {
                    ladder(common, d)
                } else {
                    Vec::new()
                },
                tol: common.tol.unwrap_or(LatticeOptions::default().tol),
            };
            if *defect {
                inputs.insert("defect".into(), "true".into());
                let c = match &b.translate {
                    Some(p) => reg_sum::c_constant_translated(&symbols::translate(&b.symbol, p)?)?,
                    None => reg_sum::c_constant(&b.symbol)?,
                };
                return Ok(("sum fp".into(), Computed::plain(c.value, "fp_lattice")));
            }
            let fit = match &b.translate {
                Some(p) => reg_sum::cutoff_sum_translated(&symbols::translate(&b.symbol, p)?, &opts)?,
                None if d == 1 && opts.n_range.is_empty() => {
                    let v = reg_sum::cutoff_sum_1d(&b.symbol, &reg_sum::EMParams::default())?;
                    return Ok(("sum fp".into(), Computed::plain(v, "em")));
                }
                None => reg_sum::cutoff_sum_lattice(&b.symbol, &opts)?,
            };
            let nmax = opts.n_range.last().copied().unwrap_or_else(|| *reg_sum::default_ladder(d).last().unwrap());
            Ok((
                "sum fp".into(),
                Computed {
                    residual: fit.residual_norm,
                    condition: fit.condition,
                    nmax,
                    ..Computed::plain(fit.constant, "fp_lattice")
                },
            ))
        }
        Command::Integral {
            which: IntegralCmd::Cutoff { symbol },
        } => {
            let b = build_symbol(symbol, inputs)?;
            if b.translate.is_some() {
                return Err(Error::Param("translation is not supported for integrals".into()));
            }
            let r = reg_integral::cutoff_integral(&b.symbol)?;
            Ok(("integral cutoff".into(), Computed::plain(r.value, "direct")))
        }
        Command::Residue {
            which: ResidueCmd::Symbol { symbol },
        } => {
            let b = build_symbol(symbol, inputs)?;
            let r = reg_integral::noncommutative_residue(&b.symbol)?;
            Ok(("residue symbol".into(), Computed::plain(r, "direct")))
        }
        Command::Det {
            which: DetCmd::Torus { dim },
        } => {
            inputs.insert("dim".into(), dim.to_string());
            let r = zeta::torus_determinant_details(*dim)?;
            let mut out = Computed::plain(Complex64::new(r.value, 0.0), "fp_lattice");
            out.residual = (r.differences[0] - r.differences[1]).abs();
            out.nmax = *reg_sum::sweep_ladder(*dim).last().unwrap();
            Ok(("det torus".into(), out))
        }
        Command::Sweep {
            which:
                SweepCmd::Laurent {
                    symbol,
                    b,
                    kind,
                    radius,
                    points,
                },
        } => {
            let built = build_symbol(symbol, inputs)?;
            if built.translate.is_some() {
                return Err(Error::Param("translation is not supported for sweeps".into()));
            }
            inputs.insert("b".into(), b.to_string());
            inputs.insert("kind".into(), format!("{kind:?}").to_lowercase());
            let fam = symbols::riesz_family(&built.symbol, *b)?;
            let mut opts = sweep_options(common, built.symbol.dim());
            opts.laurent.radius = *radius;
            opts.laurent.npoints = *points;
            let d = built.symbol.dim();
            let out = match kind {
                SweepKind::Sum => {
                    let l = meromorphic::zsweep_regularized_sum(&fam, &opts)?;
                    let nmax = opts
                        .n_range
                        .last()
                        .copied()
                        .unwrap_or_else(|| *reg_sum::sweep_ladder(d).last().unwrap());
                    Computed::from_laurent(l, "fp_lattice", nmax)
                }
                SweepKind::Integral => {
                    let l = meromorphic::zsweep_regularized_integral(&fam, &opts)?;
                    Computed::from_laurent(l, "direct", 0)
                }
            };
            Ok(("sweep laurent".into(), out))
        }
    }
}

fn quadratic(q: &QuadraticForm, s: Complex64, pipeline: PipelineArg, oracle: bool, common: &Common) -> Result<Computed> {
    if oracle {
        let o = oracles::epstein_oracle(q, s)?;
        return Ok(match o.value {
            Some(v) => oracle_result(v, o.error_bound),
            None => Computed {
                is_pole: true,
                residue: Some(Complex64::new(2.0 * o.s_residue_at_d_half, 0.0)),
                ..oracle_result(Complex64::new(o.constant_at_pole, 0.0), o.error_bound)
            },
        });
    }
    let opts = ZetaOptions {
        pipeline: match pipeline {
            PipelineArg::Auto => PipelineChoice::Auto,
            PipelineArg::Direct => PipelineChoice::Direct,
            PipelineArg::Lattice => PipelineChoice::FpLattice,
        },
        nmax: common.nmax.unwrap_or(0),
        sweep: sweep_options(common, q.dim()),
        ..ZetaOptions::default()
    };
    Ok(Computed::from_zeta(zeta::quadratic_zeta(q, s, &opts)?))
}

fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

fn render_csv(env: &ResultEnvelope) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let res = env.residue.unwrap_or(Num { re: 0.0, im: 0.0 });
    let row = |point: Option<Num>, value: Num| {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            env.command,
            point.map(|p| fmt(p.re)).unwrap_or_default(),
            point.map(|p| fmt(p.im)).unwrap_or_default(),
            fmt(value.re),
            fmt(value.im),
            env.is_pole,
            fmt(res.re),
            fmt(res.im),
            env.diagnostics.pipeline,
            fmt(env.diagnostics.residual),
            fmt(env.diagnostics.condition),
            env.diagnostics.nmax,
            env.diagnostics.runtime_ms
        )
    };
    out.push_str(&row(None, env.value));
    for (z, v) in &env.samples {
        out.push_str(&row(Some(*z), *v));
    }
    out
}

fn render(env: &ResultEnvelope, format: OutFormat) -> String {
    match format {
        OutFormat::Json => serde_json::to_string_pretty(env).expect("envelope serializes") + "\n",
        OutFormat::Csv => render_csv(env),
    }
}

fn error_estimate(e: &Error) -> Complex64 {
    match e {
        Error::PoorFit { constant, .. } => *constant,
        Error::Accuracy { estimate, .. } => *estimate,
        _ => Complex64::new(f64::NAN, 0.0),
    }
}

/// Parse argv (including the program name), compute, and render.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let start = Instant::now();
    let mut inputs = BTreeMap::new();
    let result = run_command(&cli, &mut inputs);
    let runtime_ms = start.elapsed().as_millis() as u64;
    let command_name = |c: &Command| -> String {
        match c {
            Command::Zeta { which } => match which {
                ZetaCmd::Riemann { .. } => "zeta riemann",
                ZetaCmd::Hurwitz { .. } => "zeta hurwitz",
                ZetaCmd::Quadratic { .. } => "zeta quadratic",
                ZetaCmd::Torus { .. } => "zeta torus",
            },
            Command::Sum { .. } => "sum fp",
            Command::Integral { .. } => "integral cutoff",
            Command::Residue { .. } => "residue symbol",
            Command::Det { .. } => "det torus",
            Command::Sweep { .. } => "sweep laurent",
        }
        .to_string()
    };
    match result {
        Ok((command, c)) => {
            let env = ResultEnvelope {
                command,
                inputs,
                value: c.value.into(),
                is_pole: c.is_pole,
                residue: c.residue.map(Num::from),
                diagnostics: EnvelopeDiagnostics {
                    pipeline: c.pipeline.to_string(),
                    residual: c.residual,
                    condition: c.condition,
                    nmax: c.nmax,
                    runtime_ms,
                },
                version: VERSION.to_string(),
                error: None,
                samples: c.samples.into_iter().map(|(z, v)| (z.into(), v.into())).collect(),
                exact: c.exact,
            };
            Outcome {
                code: 0,
                stdout: render(&env, cli.common.out),
                stderr: String::new(),
            }
        }
        Err(e) if e.is_accuracy() => {
            let env = ResultEnvelope {
                command: command_name(&cli.command),
                inputs,
                value: error_estimate(&e).into(),
                is_pole: false,
                residue: None,
                diagnostics: EnvelopeDiagnostics {
                    pipeline: "failed".into(),
                    residual: match &e {
                        Error::PoorFit { residual, .. } => *residual,
                        _ => f64::NAN,
                    },
                    condition: match &e {
                        Error::IllConditioned { condition } => *condition,
                        _ => f64::NAN,
                    },
                    nmax: 0,
                    runtime_ms,
                },
                version: VERSION.to_string(),
                error: Some(e.to_string()),
                samples: Vec::new(),
                exact: None,
            };
            Outcome {
                code: 3,
                stdout: render(&env, cli.common.out),
                stderr: format!("error: {e}\n"),
            }
        }
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("-1").unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(parse_complex("0.5+2i").unwrap(), Complex64::new(0.5, 2.0));
        assert_eq!(parse_complex("1e-3-2.5i").unwrap(), Complex64::new(1e-3, -2.5));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("3i").unwrap(), Complex64::new(0.0, 3.0));
        assert_eq!(parse_complex("2e+1").unwrap(), Complex64::new(20.0, 0.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn polynomial_parsing() {
        let p = parse_polynomial("x0^2*x1 - 3/2*x1 + 4", 2).unwrap();
        assert_eq!(p.eval(&[2, 3]), exactnum::rat(23, 2));
        assert!(parse_polynomial("x2", 2).is_err());
    }

    #[test]
    fn symbol_expressions() {
        let s = parse_symbol("pow(norm2(x), -1.5) - 2*pow(norm2(x), -2.5)", 2, None, None).unwrap();
        let v = s.evaluate(&[3.0, 4.0]).unwrap();
        assert!((v.re - (5f64.powf(-1.5) - 2.0 * 5f64.powf(-2.5))).abs() < 1e-15);
        let q = QuadraticForm::parse("2,0;0,1").unwrap();
        let s = parse_symbol("pow(q(x), -0.5+1i)", 2, Some(&q), None).unwrap();
        let v = s.evaluate(&[1.0, 1.0]).unwrap();
        assert!((v - Complex64::new(3.0, 0.0).powc(Complex64::new(-0.5, 1.0))).norm() < 1e-14);
        assert!(parse_symbol("pow(q(x), 1)", 2, None, None).is_err());
        assert!(parse_symbol("pow(norm2(x), 1", 2, None, None).is_err());
        assert!(parse_symbol("sin(x)", 2, None, None).is_err());
    }

    #[test]
    fn seventeen_digits() {
        let out = run(["symzeta", "zeta", "riemann", "--s", "2"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let env: ResultEnvelope = serde_json::from_str(&out.stdout).unwrap();
        assert!((env.value.re - 1.644_934_066_848_226_4).abs() < 1e-12);
        // mantissa with 16 digits after the point
        assert!(out.stdout.contains("\"re\": 1.64493406684822"), "{}", out.stdout);
        let line = out.stdout.lines().find(|l| l.contains("\"re\"")).unwrap();
        let digits: String = line.split(':').nth(1).unwrap().split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect();
        assert_eq!(digits.len(), 17);
    }
}
