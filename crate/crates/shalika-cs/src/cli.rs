//! Command-line front end: parses character inputs, dispatches to the
//! library, and renders tables and reports as JSON or TSV.
//!
//! Exit status: 0 on success (including verified identities), 1 on input
//! errors, 2 when a verification reports a mismatch.

use std::fs;
use std::ops::RangeInclusive;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::exactalg::{fmt_rational, int, Rational, RationalFn};
use crate::lfactor::{character_table, euler_factor, lfactor_series, verify_identity_with, IdentityReport, Twist};
use crate::satake::{konst, sym_q, sym_u, Case, CharacterTriple};
use crate::selftest::{random_regular_context, run_all, SelftestConfig};
use crate::shalika::{cs_inert, cs_split, CSContext};
use crate::structure::{padic_integral_comp1, padic_integral_comp2, PadicSampler};
use crate::theta::{case_tag, mackey_conditions, shalika_verdict, theta_transfer};

/// Environment variable overriding the default truncation order.
pub const ORDER_ENV: &str = "SHALIKA_CS_ORDER";

/// Failure classes of a command.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("verification mismatch: {0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Mismatch(_) => 2,
        }
    }
}

fn input_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Symbolic,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Split,
    Inert,
}

impl From<CaseArg> for Case {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Split => Case::Split,
            CaseArg::Inert => Case::Inert,
        }
    }
}

/// Exact Casselman-Shalika values, theta transfer and L-factor identities
/// for unitary Shalika models of GU(2,2).
#[derive(Debug, Parser)]
#[command(name = "shalika-cs", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Split or inert quadratic algebra.
    #[arg(long, value_enum, global = true, default_value = "split")]
    pub case: CaseArg,
    /// Keep u, v, q free, or specialize at rational values.
    #[arg(long, value_enum, global = true, default_value = "symbolic")]
    pub mode: Mode,
    /// Truncation order; defaults to 8 symbolic and 16 numeric.
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Range of n such as `0..5` (inclusive) or a single value.
    #[arg(long, global = true, default_value = "0..5")]
    pub n: String,
    /// Seed for random-point batches.
    #[arg(long, global = true, default_value_t = 20240611)]
    pub seed: u64,
    /// Character input: a path to a JSON file or inline JSON.
    #[arg(long, global = true)]
    pub input: Option<String>,
    /// Output path; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<String>,
    #[arg(long, value_enum, global = true, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Standard L-factor: Euler factor and series coefficients.
    Lfactor,
    /// Table of normalized Casselman-Shalika values.
    CsValues,
    /// Compare the zeta series with the L-factor series.
    VerifyIdentity {
        /// Number of random points in numeric mode without input.
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Character-level theta transfer with its case tag.
    ThetaTransfer,
    /// Existence and uniqueness verdict for the Shalika functional.
    ShalikaReport,
    /// Numeric p-adic period integrals against their closed forms.
    PadicOracle {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(long, default_value_t = 1.0)]
        z2: f64,
        #[arg(long, default_value_t = 12)]
        jmax: u32,
        #[arg(long, default_value_t = 1.0)]
        z1: f64,
        #[arg(long, default_value_t = 0.5)]
        z0: f64,
    },
    /// Run the ten acceptance criteria.
    Selftest,
}

/// Character input. Values are integers or strings such as `"3/2"`.
///
/// Either `(u, v)` or some of `(x1, x2, x0)` are given. Missing GSp4 values
/// are completed with `x0 = 1/u` and `x1 x2 x0^2 = 1` for a free symbol `u`;
/// when only `x0` is missing it is taken as a rational square root.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CharacterInput {
    #[serde(default)]
    pub x1: Option<Value>,
    #[serde(default)]
    pub x2: Option<Value>,
    #[serde(default)]
    pub x0: Option<Value>,
    #[serde(default)]
    pub u: Option<Value>,
    #[serde(default)]
    pub v: Option<Value>,
    #[serde(default)]
    pub q: Option<Value>,
}

fn parse_rational(v: &Value, field: &str) -> Result<Rational, CliError> {
    let s = match v {
        Value::Number(n) if n.is_i64() => n.to_string(),
        Value::String(s) => s.trim().to_string(),
        other => return Err(CliError::Input(format!("{}: expected an integer or \"a/b\" string, got {}", field, other))),
    };
    Rational::from_str(&s).map_err(|_| CliError::Input(format!("{}: cannot parse {:?} as a rational", field, s)))
}

fn opt_rational(v: &Option<Value>, field: &str) -> Result<Option<Rational>, CliError> {
    v.as_ref().map(|x| parse_rational(x, field)).transpose()
}

impl CharacterInput {
    /// Reads inline JSON, or a file when the argument is not JSON.
    pub fn load(arg: &str) -> Result<Self, CliError> {
        let text = if arg.trim_start().starts_with('{') {
            arg.to_string()
        } else {
            fs::read_to_string(arg).map_err(|e| CliError::Input(format!("{}: {}", arg, e)))?
        };
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("malformed JSON: {}", e)))
    }

    pub fn q(&self) -> Result<Option<Rational>, CliError> {
        opt_rational(&self.q, "q")
    }

    /// The GSp4 character, possibly with symbolic entries.
    pub fn character(&self) -> Result<CharacterTriple, CliError> {
        let (u, v) = (opt_rational(&self.u, "u")?, opt_rational(&self.v, "v")?);
        if let (Some(u), Some(v)) = (&u, &v) {
            if u.is_integer() && *u == int(0) || *v == int(0) {
                return Err(CliError::Input("u and v must be nonzero".into()));
            }
            return Ok(CharacterTriple::gsp4_from_uv(konst(u.clone()), konst(v.clone())));
        }
        let x1 = opt_rational(&self.x1, "x1")?;
        let x2 = opt_rational(&self.x2, "x2")?;
        let x0 = opt_rational(&self.x0, "x0")?;
        let nonzero = |x: &Option<Rational>, f: &str| match x {
            Some(r) if *r == int(0) => Err(CliError::Input(format!("{} must be nonzero", f))),
            _ => Ok(()),
        };
        nonzero(&x1, "x1")?;
        nonzero(&x2, "x2")?;
        nonzero(&x0, "x0")?;
        let chi = match (x1, x2, x0) {
            (Some(a), Some(b), Some(c)) => CharacterTriple::gsp4(a, b, c),
            (Some(a), Some(b), None) => {
                let target = int(1) / (&a * &b);
                let c = rational_sqrt(&target)
                    .ok_or_else(|| CliError::Input(format!("1/(x1 x2) = {} has no rational square root; give x0", target)))?;
                CharacterTriple::gsp4(a, b, c)
            }
            (a, b, None) if a.is_none() || b.is_none() => {
                let x0 = sym_u().recip().map_err(input_err)?;
                let x0sq = &x0 * &x0;
                let (x1, x2) = match (a, b) {
                    (Some(a), None) => {
                        let a = konst(a);
                        let b = (&a * &x0sq).recip().map_err(input_err)?;
                        (a, b)
                    }
                    (None, Some(b)) => {
                        let b = konst(b);
                        let a = (&b * &x0sq).recip().map_err(input_err)?;
                        (a, b)
                    }
                    _ => return Ok(CharacterTriple::gsp4_symbolic()),
                };
                CharacterTriple::new(crate::satake::Group::GSp4, vec![x1, x2, x0]).map_err(input_err)?
            }
            _ => return Err(CliError::Input("give (u, v), or x1 and x2 (x0 optional)".into())),
        };
        chi.check_central().map_err(input_err)?;
        Ok(chi)
    }
}

fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if *x < int(0) {
        return None;
    }
    let (n, d) = (x.numer().sqrt(), x.denom().sqrt());
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Parses `a..b` (inclusive) or a single integer.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u32>, CliError> {
    let bad = || CliError::Input(format!("--n: expected `a..b` or an integer, got {:?}", s));
    if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok(a..=b)
    } else {
        let a: u32 = s.trim().parse().map_err(|_| bad())?;
        Ok(a..=a)
    }
}

/// Truncation order from the flag, the environment, or the mode default.
pub fn resolve_order(flag: Option<usize>, mode: Mode) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    if let Ok(s) = std::env::var(ORDER_ENV) {
        return s.trim().parse().map_err(|_| CliError::Input(format!("{} = {:?} is not an integer", ORDER_ENV, s)));
    }
    Ok(match mode {
        Mode::Symbolic => 8,
        Mode::Numeric => 16,
    })
}

/// Emitted artifact of a successful (or mismatching) command.
#[derive(Debug, Clone)]
pub struct Emitted {
    pub text: String,
    pub exit_code: i32,
}

fn emit(format: Format, json_value: Value, tsv: String, exit_code: i32) -> Emitted {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&json_value).expect("serializable") + "\n",
        Format::Tsv => tsv,
    };
    Emitted { text, exit_code }
}

fn load_input(cli: &Cli) -> Result<Option<CharacterInput>, CliError> {
    cli.input.as_deref().map(CharacterInput::load).transpose()
}

/// Context for `--mode`: free symbols, or the numeric point from `--input`.
fn context(cli: &Cli, input: Option<&CharacterInput>) -> Result<CSContext, CliError> {
    let case: Case = cli.case.into();
    match cli.mode {
        Mode::Symbolic => CSContext::symbolic(case).map_err(input_err),
        Mode::Numeric => {
            let input = input.ok_or_else(|| CliError::Input("numeric mode needs --input".into()))?;
            let q = input.q()?.ok_or_else(|| CliError::Input("numeric mode needs q in the input".into()))?;
            let chi = input.character()?;
            if !chi.is_numeric() {
                return Err(CliError::Input("numeric mode needs fully numeric character values".into()));
            }
            CSContext::from_chi(case, &chi, q).map_err(input_err)
        }
    }
}

fn render(x: &RationalFn) -> String {
    match x.as_constant() {
        Some(c) => fmt_rational(&c),
        None => x.to_string(),
    }
}

fn cmd_lfactor(cli: &Cli) -> Result<Emitted, CliError> {
    let input = load_input(cli)?;
    let order = resolve_order(cli.order, cli.mode)?;
    let chi = match (&input, cli.mode) {
        (Some(i), _) => i.character()?,
        (None, Mode::Symbolic) => CharacterTriple::gsp4_symbolic(),
        (None, Mode::Numeric) => return Err(CliError::Input("numeric mode needs --input".into())),
    };
    let twist: Twist = Case::from(cli.case).into();
    let ef = euler_factor(&chi, twist).map_err(input_err)?;
    let series = lfactor_series(&chi, twist, order).map_err(input_err)?;
    let coeffs: Vec<String> = series.coeffs().iter().map(render).collect();
    let inverse: Vec<String> = ef.inverse.iter().map(render).collect();
    let mut tsv = String::from("k\tcoefficient\n");
    for (k, c) in coeffs.iter().enumerate() {
        tsv.push_str(&format!("{}\t{}\n", k, c));
    }
    let v = json!({ "twist": twist, "order": order, "euler_factor_inverse": inverse, "series": coeffs });
    Ok(emit(cli.format, v, tsv, 0))
}

fn cmd_cs_values(cli: &Cli) -> Result<Emitted, CliError> {
    let input = load_input(cli)?;
    let ctx = context(cli, input.as_ref())?;
    let range = parse_range(&cli.n)?;
    let mut rows = Vec::new();
    let mut tsv = String::from("n\tvalue\n");
    for n in range {
        let val = match ctx.case {
            Case::Split => cs_split(n, &ctx),
            Case::Inert => cs_inert(n, &ctx),
        }
        .map_err(input_err)?;
        let s = render(&val);
        tsv.push_str(&format!("{}\t{}\n", n, s));
        rows.push(json!({ "n": n, "value": s }));
    }
    let v = json!({ "case": ctx.case, "mode": if ctx.is_numeric() { "numeric" } else { "symbolic" }, "rows": rows });
    Ok(emit(cli.format, v, tsv, 0))
}

fn cmd_verify(cli: &Cli, points: usize) -> Result<Emitted, CliError> {
    let input = load_input(cli)?;
    let order = resolve_order(cli.order, cli.mode)?;
    let table = character_table(order).map_err(input_err)?;
    let contexts = if cli.mode == Mode::Numeric && input.is_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
        (0..points).map(|_| random_regular_context(cli.case.into(), &mut rng)).collect()
    } else {
        vec![context(cli, input.as_ref())?]
    };
    let mut reports: Vec<IdentityReport> = Vec::new();
    for ctx in &contexts {
        reports.push(verify_identity_with(ctx, order, &table).map_err(input_err)?);
    }
    let all_equal = reports.iter().all(|r| r.equal);
    let mut tsv = String::from("case\torder\tequal\tfirst_mismatch\n");
    for r in &reports {
        let fm = r.first_mismatch.map(|k| k.to_string()).unwrap_or_default();
        tsv.push_str(&format!("{}\t{}\t{}\t{}\n", r.case, r.order, r.equal, fm));
    }
    let v = if reports.len() == 1 {
        serde_json::to_value(&reports[0]).expect("serializable")
    } else {
        serde_json::to_value(&reports).expect("serializable")
    };
    Ok(emit(cli.format, v, tsv, if all_equal { 0 } else { 2 }))
}

fn character_and_q(cli: &Cli) -> Result<(CharacterTriple, RationalFn), CliError> {
    let input = load_input(cli)?.unwrap_or_default();
    let chi = input.character()?;
    let q = input.q()?.map(konst).unwrap_or_else(sym_q);
    Ok((chi, q))
}

fn cmd_theta(cli: &Cli) -> Result<Emitted, CliError> {
    let (chi, q) = character_and_q(cli)?;
    let (xi, tag) = theta_transfer(&chi, &q).map_err(input_err)?;
    debug_assert_eq!(tag, case_tag(&chi));
    let (cond1, cond2) = mackey_conditions(&xi);
    let vals: Vec<String> = xi.values.iter().map(render).collect();
    let tsv = format!("case_tag\ty1\ty2\ty0\tcond1\tcond2\n{}\t{}\t{}\t{}\t{}\t{}\n", tag.as_str(), vals[0], vals[1], vals[2], cond1, cond2);
    let v = json!({ "case_tag": tag, "xi": vals, "cond1": cond1, "cond2": cond2 });
    Ok(emit(cli.format, v, tsv, 0))
}

fn cmd_shalika_report(cli: &Cli) -> Result<Emitted, CliError> {
    let (chi, q) = character_and_q(cli)?;
    let report = shalika_verdict(&chi, &q).map_err(input_err)?;
    let tsv = format!(
        "exists\tunique\tcase_tag\tcond1\tcond2\n{}\t{}\t{}\t{}\t{}\n",
        report.exists,
        report.unique,
        report.case_tag.as_str(),
        report.cond1,
        report.cond2
    );
    Ok(emit(cli.format, serde_json::to_value(&report).expect("serializable"), tsv, 0))
}

#[allow(clippy::too_many_arguments)]
fn cmd_padic(cli: &Cli, p: u64, depth: u32, z2: f64, jmax: u32, z1: f64, z0: f64) -> Result<Emitted, CliError> {
    let s = PadicSampler::new(p, depth).map_err(input_err)?;
    let c1 = padic_integral_comp1(&s, z2, jmax).map_err(input_err)?;
    let c2 = padic_integral_comp2(&s, z1, z0).map_err(input_err)?;
    let tsv = format!(
        "integral\tre\tim\ttarget\terror\ncomp1\t{}\t{}\t{}\t{:e}\ncomp2\t{}\t{}\t{}\t{:e}\ncomp2_unit\t{}\t{}\t{}\t{:e}\n",
        c1.re,
        c1.im,
        c1.target,
        c1.error(),
        c2.total.re,
        c2.total.im,
        c2.total.target,
        c2.total.error(),
        c2.unit_stratum.re,
        c2.unit_stratum.im,
        c2.unit_stratum.target,
        c2.unit_stratum.error()
    );
    let v = json!({ "sampler": s, "comp1": c1, "comp2": c2 });
    Ok(emit(cli.format, v, tsv, 0))
}

fn cmd_selftest(cli: &Cli) -> Result<Emitted, CliError> {
    let mut cfg = SelftestConfig { seed: cli.seed, ..SelftestConfig::default() };
    if let Some(n) = cli.order {
        cfg.numeric_order = n;
    }
    let results = run_all(&cfg);
    let ok = results.iter().all(|r| r.passed);
    let mut lines = String::new();
    for r in &results {
        lines.push_str(&r.line());
        lines.push('\n');
    }
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&results).expect("serializable") + "\n",
        Format::Tsv => lines,
    };
    Ok(Emitted { text, exit_code: if ok { 0 } else { 2 } })
}

/// Runs a parsed command.
pub fn run(cli: &Cli) -> Result<Emitted, CliError> {
    match &cli.command {
        Command::Lfactor => cmd_lfactor(cli),
        Command::CsValues => cmd_cs_values(cli),
        Command::VerifyIdentity { points } => cmd_verify(cli, *points),
        Command::ThetaTransfer => cmd_theta(cli),
        Command::ShalikaReport => cmd_shalika_report(cli),
        Command::PadicOracle { p, depth, z2, jmax, z1, z0 } => cmd_padic(cli, *p, *depth, *z2, *jmax, *z1, *z0),
        Command::Selftest => cmd_selftest(cli),
    }
}

/// Runs a command and writes its artifact, returning the exit status.
pub fn main_with(cli: Cli) -> i32 {
    match run(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.output {
                if let Err(e) = fs::write(path, &out.text) {
                    eprintln!("input error: cannot write {}: {}", path, e);
                    return 1;
                }
            } else {
                print!("{}", out.text);
            }
            out.exit_code
        }
        Err(e) => {
            eprintln!("{}", e);
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::CaseTag;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("shalika-cs").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0..5").unwrap(), 0..=5);
        assert_eq!(parse_range("3").unwrap(), 3..=3);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn inert_symbolic_identity_exits_zero() {
        let cli = parse(&["verify-identity", "--case", "inert", "--mode", "symbolic", "--order", "8"]);
        let out = run(&cli).unwrap();
        assert_eq!(out.exit_code, 0);
        let v: Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["equal"], Value::Bool(true));
        let back: IdentityReport = serde_json::from_value(v).unwrap();
        assert!(back.equal);
    }

    #[test]
    fn singular_split_input_is_an_input_error() {
        let cli = parse(&["cs-values", "--case", "split", "--mode", "numeric", "--n", "0..5", "--input", r#"{"u": 1, "v": 2, "q": 3}"#]);
        let err = run(&cli).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("Weyl denominator"));
    }

    #[test]
    fn theta_transfer_dihedral_tag() {
        let cli = parse(&["theta-transfer", "--input", r#"{"x2": -1}"#]);
        let out = run(&cli).unwrap();
        let v: Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["case_tag"], serde_json::to_value(CaseTag::Dihedral2a).unwrap());
        assert_eq!(v["case_tag"], "dihedral-2a");
        assert_eq!(v["cond2"], Value::Bool(true));
    }

    #[test]
    fn numeric_cs_values_tsv() {
        let cli = parse(&[
            "cs-values", "--case", "inert", "--mode", "numeric", "--n", "2", "--format", "tsv", "--input",
            r#"{"x1": 4, "x2": "1/9", "x0": "3/2", "q": 3}"#,
        ]);
        let out = run(&cli).unwrap();
        assert_eq!(out.text, "n\tvalue\n2\t202105/104976\n");
    }

    #[test]
    fn malformed_json_is_an_input_error() {
        let cli = parse(&["theta-transfer", "--input", "{not json"]);
        assert_eq!(run(&cli).unwrap_err().exit_code(), 1);
        let cli = parse(&["theta-transfer", "--input", r#"{"x1": 2, "x2": 3, "x0": 1}"#]);
        assert_eq!(run(&cli).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn numeric_batch_and_reports() {
        let cli = parse(&["verify-identity", "--case", "split", "--mode", "numeric", "--order", "6", "--points", "3"]);
        let out = run(&cli).unwrap();
        assert_eq!(out.exit_code, 0);
        let v: Vec<IdentityReport> = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v.len(), 3);
        let cli = parse(&["shalika-report", "--input", r#"{"x1": 4, "x2": "1/9", "x0": "3/2", "q": 3}"#]);
        let v: Value = serde_json::from_str(&run(&cli).unwrap().text).unwrap();
        assert_eq!(v["exists"], Value::Bool(true));
        let cli = parse(&["lfactor", "--order", "2", "--format", "tsv"]);
        assert!(run(&cli).unwrap().text.starts_with("k\tcoefficient\n0\t1\n"));
    }

    #[test]
    fn padic_oracle_runs() {
        let cli = parse(&["padic-oracle", "--p", "5", "--depth", "2"]);
        let v: Value = serde_json::from_str(&run(&cli).unwrap().text).unwrap();
        assert!(v["comp1"]["target"].as_f64().unwrap() > 0.0);
        let cli = parse(&["padic-oracle", "--p", "9"]);
        assert_eq!(run(&cli).unwrap_err().exit_code(), 1);
    }
}
