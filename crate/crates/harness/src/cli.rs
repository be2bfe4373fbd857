//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mirrorcount_core::factor::factor_over_z;
use mirrorcount_core::instance::{CountRecord, DworkInstance, LambdaKey, Method};
use mirrorcount_core::poly::IntPolynomial;
use mirrorcount_core::zeta::{purity_check, FactorReport};
use mirrorcount_core::{Error, Result};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::engine::{Counter, Settings};
use crate::report::{exit_code, write_count_csv, write_report_csv, write_value_csv, Output, VerificationReport};
use crate::verify::{self, quotient_consistent, PURITY_TOL};

#[derive(Parser, Debug)]
#[command(name = "mirrorcount", version, about = "Point counts of the Dwork family and its mirror")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    pub out: OutFormat,
    /// Directory for Gauss tables and count records.
    #[arg(long, global = true, env = "MIRRORCOUNT_CACHE_DIR")]
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
    /// Iteration cap for enumeration and exponent-vector work.
    #[arg(long, global = true, default_value_t = Settings::default().budget)]
    pub budget: u64,
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = Settings::default().precision)]
    pub precision: u32,
    /// Recompute cached records and fail if they differ.
    #[arg(long, global = true)]
    pub verify_cache: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Direct,
    Formula,
    Both,
}

#[derive(Args, Debug, Serialize)]
pub struct FieldArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyArgs {
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct MemberArgs {
    /// Discrete-log index of lambda, or `zero`.
    #[arg(long, conflicts_with = "psi")]
    #[serde(serialize_with = "ser_key")]
    pub lambda: Option<LambdaKey>,
    /// Discrete-log index of psi, with lambda = -(n+1) psi.
    #[arg(long)]
    #[serde(serialize_with = "ser_key")]
    pub psi: Option<LambdaKey>,
}

fn ser_key<S: serde::Serializer>(k: &Option<LambdaKey>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match k {
        Some(k) => s.serialize_str(&k.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Construction details of F_(p^m).
    FieldInfo(FieldArgs),
    /// Point counts for one member, or every member when no parameter is given.
    Count {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        #[serde(flatten)]
        member: MemberArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
    },
    /// #X = #Y over extensions passing the gcd gate.
    VerifyEqual {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        kmax: Option<u32>,
        #[arg(long)]
        #[serde(serialize_with = "ser_key")]
        lambda: Option<LambdaKey>,
    },
    /// Congruences for #X and #Y modulo d and l d.
    VerifyCong {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1)]
        kmax: u32,
    },
    /// #X = #Y modulo l q^k.
    VerifyCrt {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1)]
        kmax: u32,
    },
    /// Structure of the zeta quotient of one smooth member.
    Quotient {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        #[serde(flatten)]
        member: MemberArgs,
        #[arg(long, default_value_t = 8)]
        order: usize,
        /// Run even when the smoothness inequality fails.
        #[arg(long)]
        allow_singular: bool,
    },
    /// Factor an integer polynomial with constant term 1.
    Factor {
        /// Coefficients, constant term first.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        #[serde(serialize_with = "ser_big")]
        coeffs: Vec<BigInt>,
        /// Field size for the purity check of each factor.
        #[arg(long, requires = "weight")]
        #[serde(serialize_with = "ser_big_opt")]
        q_eff: Option<BigInt>,
        #[arg(long, requires = "q_eff", allow_hyphen_values = true)]
        weight: Option<i32>,
    },
    /// The default verification grid.
    VerifyAll,
}

fn ser_big<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

fn ser_big_opt<S: serde::Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(b) => s.serialize_str(&b.to_string()),
        None => s.serialize_none(),
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::FieldInfo(_) => "field-info",
            Command::Count { .. } => "count",
            Command::VerifyEqual { .. } => "verify-equal",
            Command::VerifyCong { .. } => "verify-cong",
            Command::VerifyCrt { .. } => "verify-crt",
            Command::Quotient { .. } => "quotient",
            Command::Factor { .. } => "factor",
            Command::VerifyAll => "verify-all",
        }
    }
}

/// Exit status for an error that aborted a command.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::BoundExceeded { .. } | Error::PrecisionBudgetExceeded { .. } => 3,
        Error::NotPrime(..)
        | Error::InvalidArgument(_)
        | Error::SmoothnessGate(_)
        | Error::CharacteristicDividesDegree { .. }
        | Error::HypothesisViolated(_)
        | Error::DegreeBound { .. }
        | Error::Cache(_) => 2,
        _ => 1,
    }
}

enum Rendered {
    Reports(Vec<VerificationReport>),
    Records(Vec<CountRecord>, i32),
    Values(Vec<Value>, i32),
}

fn member(c: &Counter, family: &FamilyArgs, m: &MemberArgs) -> Result<Vec<DworkInstance>> {
    let f = c.field(family.field.p, family.field.m)?;
    match (m.lambda, m.psi) {
        (Some(l), _) => Ok(vec![DworkInstance::new(family.n, f.clone(), l.element(&f)?)?]),
        (None, Some(psi)) => Ok(vec![DworkInstance::from_psi(family.n, f.clone(), psi.element(&f)?)?]),
        (None, None) => f.elements().map(|l| DworkInstance::new(family.n, f.clone(), l)).collect(),
    }
}

fn count(c: &Counter, family: &FamilyArgs, m: &MemberArgs, method: MethodArg) -> Result<Rendered> {
    let mut records = Vec::new();
    let mut code = 0;
    for inst in member(c, family, m)? {
        match method {
            MethodArg::Direct => records.push(c.record(&inst, Method::Direct)?),
            MethodArg::Formula => records.push(c.record(&inst, Method::GaussFormula)?),
            MethodArg::Both => {
                let a = c.record(&inst, Method::Direct)?;
                let b = c.record(&inst, Method::GaussFormula)?;
                if (a.count_x, a.count_nstar, a.count_y) != (b.count_x, b.count_nstar, b.count_y) {
                    code = 1;
                }
                records.push(a);
                records.push(b);
            }
        }
    }
    Ok(Rendered::Records(records, code))
}

fn quotient(c: &Counter, family: &FamilyArgs, m: &MemberArgs, order: usize, gate: bool) -> Result<Rendered> {
    let f = c.field(family.field.p, family.field.m)?;
    let key = match (m.lambda, m.psi) {
        (Some(l), _) => l,
        (None, Some(psi)) => {
            let inst = DworkInstance::from_psi(family.n, f.clone(), psi.element(&f)?)?;
            inst.lambda_key()
        }
        (None, None) => return Err(Error::InvalidArgument("quotient needs --lambda or --psi".into())),
    };
    let r = verify::run_quotient(c, family.n, family.field.p, family.field.m, key, order, gate)?;
    let code = if quotient_consistent(&r) { 0 } else { 1 };
    Ok(Rendered::Values(vec![serde_json::to_value(&r).expect("serializable")], code))
}

fn factor(coeffs: &[BigInt], q_eff: Option<&BigInt>, weight: Option<i32>) -> Result<Rendered> {
    let poly = IntPolynomial::new(coeffs.to_vec())?;
    let mut out = Vec::new();
    for (g, multiplicity) in factor_over_z(&poly)? {
        let purity = match (q_eff, weight) {
            (Some(q), Some(w)) if g.degree() > 0 => Some(purity_check(&g, q, w, PURITY_TOL)?),
            _ => None,
        };
        let r = FactorReport {
            polynomial: g.to_string(),
            coefficients: g.coeffs().iter().map(|c| c.to_string()).collect(),
            degree: g.degree(),
            multiplicity,
            purity,
        };
        out.push(serde_json::to_value(&r).expect("serializable"));
    }
    Ok(Rendered::Values(out, 0))
}

fn execute(c: &Counter, cmd: &Command) -> Result<Rendered> {
    Ok(match cmd {
        Command::FieldInfo(a) => {
            let f = c.field(a.p, a.m)?;
            Rendered::Values(vec![serde_json::to_value(f.info()).expect("serializable")], 0)
        }
        Command::Count { family, member, method } => count(c, family, member, *method)?,
        Command::VerifyEqual { family, kmax, lambda } => Rendered::Reports(vec![verify::verify_equal(
            c,
            family.n,
            family.field.p,
            family.field.m,
            *kmax,
            *lambda,
        )?]),
        Command::VerifyCong { family, kmax } => {
            Rendered::Reports(verify::verify_cong(c, family.n, family.field.p, family.field.m, *kmax)?)
        }
        Command::VerifyCrt { family, kmax } => Rendered::Reports(vec![verify::verify_crt(
            c,
            family.n,
            family.field.p,
            family.field.m,
            *kmax,
        )?]),
        Command::Quotient {
            family,
            member,
            order,
            allow_singular,
        } => quotient(c, family, member, *order, !allow_singular)?,
        Command::Factor { coeffs, q_eff, weight } => factor(coeffs, q_eff.as_ref(), *weight)?,
        Command::VerifyAll => Rendered::Reports(verify::verify_all(c)?),
    })
}

fn params(cli: &Cli) -> Value {
    let mut v = serde_json::to_value(&cli.command).expect("serializable");
    if !v.is_object() {
        v = json!({});
    }
    let common = serde_json::to_value(&cli.common).expect("serializable");
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, common) {
        dst.extend(src);
    }
    v
}

fn render(cli: &Cli, rendered: Rendered, out: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::InvalidArgument(e.to_string());
    let (results, code): (Vec<Value>, i32) = match &rendered {
        Rendered::Reports(r) => (
            r.iter().map(|r| serde_json::to_value(r).expect("serializable")).collect(),
            exit_code(r),
        ),
        Rendered::Records(r, code) => (
            r.iter().map(|r| serde_json::to_value(r).expect("serializable")).collect(),
            *code,
        ),
        Rendered::Values(v, code) => (v.clone(), *code),
    };
    match cli.common.out {
        OutFormat::Json => {
            let o = Output::new(cli.command.name(), params(cli), results);
            out.write_all(o.to_json().as_bytes()).map_err(io)?;
        }
        OutFormat::Csv => match &rendered {
            Rendered::Reports(r) => write_report_csv(out, r)?,
            Rendered::Records(r, _) => write_count_csv(out, r)?,
            Rendered::Values(v, _) => write_value_csv(out, v)?,
        },
    }
    Ok(code)
}

/// Runs a parsed command, writing the result to `out`; returns the exit code.
pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let c = Counter::new(Settings {
        precision: cli.common.precision,
        budget: cli.common.budget,
        cache_dir: cli.common.cache_dir.clone(),
        verify_cache: cli.common.verify_cache,
    })?;
    let rendered = execute(&c, &cli.command)?;
    c.flush()?;
    render(cli, rendered, out)
}

/// Parses `args`, runs the command against stdout, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let start = Instant::now();
    let stdout = std::io::stdout();
    let code = match dispatch(&cli, &mut stdout.lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    };
    eprintln!("wall time: {:.3}s", start.elapsed().as_secs_f64());
    code
}
