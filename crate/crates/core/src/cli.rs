//! Command-line front end. Every command prints one JSON record
//! `{schema_version, command, payload[, timings]}`, or CSV / a table on request.
//!
//! Exit codes: 0 success, 1 a check ran and failed, 2 usage error, 3 resource limit.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::funcalg::{parse, FunctionExpr};
use crate::galois::FieldSpec;
use crate::harness::{self, ConjectureReport, CriterionReport, Profile, Status, Which};
use crate::numtheory::{self, EigenReport, IrreducibilityVerdict};
use crate::oracle::{exp_sum_expr, sum_sequence, ExpSumOptions, Method};
use crate::recurrence::{discover, family_poly, satisfies, Family, IntPolynomial, Provenance, Sequence};
use crate::transfer::{
    build_for_expr, integer_annihilator, sequence_annihilator, AnnihilatorOptions, SystemDump, TransferOptions,
    DEFAULT_BLOWUP_LIMIT, DEFAULT_DEGREE_CAP, DEFAULT_STATE_LIMIT,
};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "galsum", version, about = "Exact exponential sums over Galois fields and their recurrences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Human-readable table instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// `json` or `csv` selects the format; anything else is a file to write.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Enumeration budget in points.
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Worker threads for enumeration.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// `p^r` or the order `q`.
    #[arg(long)]
    pub field: String,
    /// Ascending coefficients of a monic irreducible modulus.
    #[arg(long, allow_hyphen_values = true)]
    pub modulus: Option<String>,
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    /// Ascending integer coefficients, e.g. `-2,-2,0,1`.
    #[arg(long, allow_hyphen_values = true)]
    pub poly: Option<String>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Brute,
    Transfer,
    Recurrence,
    /// Transfer when a system can be built, otherwise enumeration.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// Minimal polynomial of the integer blow-up of the matrix.
    Matrix,
    /// Minimal recurrence of the projected sequence.
    Sequence,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exponential sums over a range of n.
    Expsum {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        expr: String,
        /// `a..b` (inclusive) or a single n.
        #[arg(long)]
        n: String,
        #[arg(long, value_enum, default_value = "brute")]
        method: MethodArg,
        #[command(flatten)]
        poly: PolyArgs,
    },
    /// Checks that a polynomial annihilates the sequence of sums.
    Verify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        expr: String,
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    /// Finds the least-order recurrence of the sequence of sums.
    Discover {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 12)]
        max_order: usize,
        #[arg(long)]
        holdout: Option<usize>,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    /// Integer annihilating polynomial of a transfer system.
    Annihilator {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
        degree_cap: usize,
        #[arg(long, value_enum, default_value = "matrix")]
        scope: Scope,
        #[arg(long, default_value_t = DEFAULT_STATE_LIMIT)]
        state_limit: usize,
        #[arg(long, default_value_t = DEFAULT_BLOWUP_LIMIT)]
        blowup_limit: usize,
        /// Include the full system.
        #[arg(long)]
        dump: bool,
    },
    /// Compares a conjectured recurrence with enumeration.
    Conjecture {
        #[arg(long)]
        which: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "2")]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        modulus: Option<String>,
        #[arg(long)]
        n_max: usize,
        /// Exit 1 when the conjecture is refuted.
        #[arg(long)]
        strict: bool,
    },
    #[command(subcommand)]
    Numtheory(NumCommand),
    /// Runs the acceptance battery.
    Accept {
        #[arg(long, default_value = "quick")]
        profile: String,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u32>>,
    },
    /// Times enumeration against the transfer method and checks they agree.
    Bench {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        expr: String,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum NumCommand {
    GaussSum {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        a: i64,
    },
    EigenCheck {
        #[arg(long)]
        p: u64,
    },
    Eisenstein {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        p: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord<T> {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub payload: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequencePayload {
    pub field: String,
    pub expr: String,
    pub n_min: i64,
    pub values: Vec<CycInt>,
    pub method: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyPayload {
    pub field: String,
    pub expr: String,
    pub poly: IntPolynomial,
    pub poly_text: String,
    pub n_range: (i64, i64),
    pub method: Provenance,
    pub satisfied: bool,
    /// First `n` whose window is not annihilated.
    pub first_failure: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscoverPayload {
    pub field: String,
    pub expr: String,
    pub n_range: (i64, i64),
    pub method: Provenance,
    pub poly: IntPolynomial,
    pub poly_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnihilatorPayload {
    pub field: String,
    pub expr: String,
    pub scope: Scope,
    pub states: usize,
    pub n0: usize,
    pub shift: usize,
    pub poly: IntPolynomial,
    pub poly_text: String,
    /// Range on which the projected sequence was checked against `poly`.
    pub checked_range: (i64, i64),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemDump>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjecturePayload {
    pub report: ConjectureReport,
    pub conjectured: Sequence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussSumPayload {
    pub p: u64,
    pub a: i64,
    pub value: CycInt,
    pub numeric: [f64; 2],
    /// `(a/p)` times the closed form of `g(1; p)`.
    pub closed_form: [f64; 2],
    pub deviation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EisensteinPayload {
    pub p: u64,
    pub poly: IntPolynomial,
    pub poly_text: String,
    pub verdict: IrreducibilityVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchPayload {
    pub field: String,
    pub expr: String,
    pub n: usize,
    pub value: CycInt,
    pub method: Provenance,
    pub equal: bool,
}

/// What a command produced, before formatting.
enum Output {
    Sequence(SequencePayload),
    Verify(VerifyPayload),
    Discover(DiscoverPayload),
    Annihilator(AnnihilatorPayload),
    Conjecture(ConjecturePayload, bool),
    Gauss(GaussSumPayload),
    Eigen(EigenReport),
    Eisenstein(EisensteinPayload),
    Accept(Vec<CriterionReport>),
    Bench(BenchPayload, BTreeMap<String, f64>),
}

impl Output {
    fn failed(&self) -> bool {
        match self {
            Output::Verify(v) => !v.satisfied,
            Output::Conjecture(c, strict) => *strict && c.report.first_disagreement.is_some(),
            Output::Gauss(g) => g.deviation > g.tolerance,
            Output::Eigen(r) => !r.passed(),
            Output::Accept(rs) => rs.iter().any(|r| r.status == Status::Fail),
            Output::Bench(b, _) => !b.equal,
            _ => false,
        }
    }

    fn payload(&self) -> Value {
        let v = match self {
            Output::Sequence(p) => serde_json::to_value(p),
            Output::Verify(p) => serde_json::to_value(p),
            Output::Discover(p) => serde_json::to_value(p),
            Output::Annihilator(p) => serde_json::to_value(p),
            Output::Conjecture(p, _) => serde_json::to_value(p),
            Output::Gauss(p) => serde_json::to_value(p),
            Output::Eigen(p) => serde_json::to_value(p),
            Output::Eisenstein(p) => serde_json::to_value(p),
            Output::Accept(p) => serde_json::to_value(p),
            Output::Bench(p, _) => serde_json::to_value(p),
        };
        v.expect("payloads serialize")
    }

    fn timings(&self) -> Option<BTreeMap<String, f64>> {
        match self {
            Output::Bench(_, t) => Some(t.clone()),
            _ => None,
        }
    }
}

fn parse_modulus(m: &Option<String>) -> Result<Option<Vec<u64>>> {
    m.as_ref()
        .map(|s| {
            s.split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|_| Error::InvalidModulus(format!("bad coefficient `{}`", t.trim()))))
                .collect()
        })
        .transpose()
}

fn field_from(spec: &str, modulus: &Option<String>) -> Result<FieldSpec> {
    let m = parse_modulus(modulus)?;
    FieldSpec::parse(spec, m.as_deref())
}

/// `a..b`, `a..=b` or `a`.
pub fn parse_range(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Syntax { pos: 0, msg: format!("bad range `{s}`, expected a..b") };
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(Error::EmptyRange);
    }
    Ok((lo, hi))
}

fn resolve_poly(args: &PolyArgs, f: &FieldSpec) -> Result<IntPolynomial> {
    match (&args.poly, &args.family) {
        (Some(p), None) => IntPolynomial::parse_ascending(p),
        (None, Some(fam)) => {
            let fam: Family = fam.parse()?;
            family_poly(fam, args.k.unwrap_or(0), f)
        }
        (Some(_), Some(_)) => Err(Error::OutOfRange("give either --poly or --family, not both".into())),
        (None, None) => Err(Error::OutOfRange("a polynomial is required: --poly or --family with --k".into())),
    }
}

fn oracle_opts(o: &OutputArgs) -> ExpSumOptions {
    let mut opts = ExpSumOptions::default();
    if let Some(b) = o.budget {
        opts.budget = b;
    }
    opts.workers = o.workers;
    opts
}

/// Sums by `method` on `lo..=hi`; `auto` falls back to enumeration when no system applies.
fn sequence_by(e: &FunctionExpr, f: &FieldSpec, lo: usize, hi: usize, method: MethodArg, poly: Option<&PolyArgs>, opts: &ExpSumOptions) -> Result<Sequence> {
    match method {
        MethodArg::Brute => sum_sequence(e, f, lo..=hi, &Method::Brute, opts),
        MethodArg::Transfer => sum_sequence(e, f, lo..=hi, &Method::Transfer, opts),
        MethodArg::Auto => match sum_sequence(e, f, lo..=hi, &Method::Transfer, opts) {
            Err(Error::Unsupported(_)) | Err(Error::StateLimit { .. }) => sum_sequence(e, f, lo..=hi, &Method::Brute, opts),
            other => other,
        },
        MethodArg::Recurrence => {
            let args = poly.ok_or_else(|| Error::OutOfRange("the recurrence method needs a polynomial".into()))?;
            let pol = resolve_poly(args, f)?;
            let start = e.min_n();
            let init = sequence_by(e, f, start, start + pol.degree() - 1, MethodArg::Auto, None, opts)?;
            let init = Sequence { provenance: Provenance::Recurrence, ..init };
            sum_sequence(e, f, lo..=hi, &Method::Recurrence { init, poly: pol }, opts)
        }
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    let opts = oracle_opts(&cli.output);
    match &cli.command {
        Command::Expsum { field, expr, n, method, poly } => {
            let f = field_from(&field.field, &field.modulus)?;
            let e = parse(expr)?;
            let (lo, hi) = parse_range(n)?;
            let s = sequence_by(&e, &f, lo, hi, *method, Some(poly), &opts)?;
            Ok(Output::Sequence(SequencePayload { field: f.to_string(), expr: e.to_string(), n_min: s.n_min, values: s.values, method: s.provenance }))
        }
        Command::Verify { field, expr, poly, n_min, n_max, method } => {
            let f = field_from(&field.field, &field.modulus)?;
            let e = parse(expr)?;
            let pol = resolve_poly(poly, &f)?;
            let lo = n_min.unwrap_or_else(|| e.min_n());
            if lo > *n_max {
                return Err(Error::EmptyRange);
            }
            let s = sequence_by(&e, &f, lo, *n_max, *method, None, &opts)?;
            let satisfied = satisfies(&s, &pol)?;
            let d = pol.degree();
            let first_failure = (!satisfied)
                .then(|| {
                    (0..=s.len() - d - 1).find(|&i| !satisfies(&s.window(s.n_min + i as i64, s.n_min + (i + d + 1) as i64), &pol).unwrap_or(true))
                })
                .flatten()
                .map(|i| s.n_min + i as i64);
            Ok(Output::Verify(VerifyPayload {
                field: f.to_string(),
                expr: e.to_string(),
                poly_text: pol.to_string(),
                poly: pol,
                n_range: (s.n_min, s.n_end() - 1),
                method: s.provenance,
                satisfied,
                first_failure,
            }))
        }
        Command::Discover { field, expr, max_order, holdout, n_min, n_max, method } => {
            let f = field_from(&field.field, &field.modulus)?;
            let e = parse(expr)?;
            let lo = n_min.unwrap_or_else(|| e.min_n());
            let need = 2 * max_order + holdout.unwrap_or(*max_order);
            let hi = n_max.unwrap_or(lo + need.max(1) - 1);
            if lo > hi {
                return Err(Error::EmptyRange);
            }
            let s = sequence_by(&e, &f, lo, hi, *method, None, &opts)?;
            let pol = discover(&s, *max_order, *holdout)?;
            Ok(Output::Discover(DiscoverPayload {
                field: f.to_string(),
                expr: e.to_string(),
                n_range: (s.n_min, s.n_end() - 1),
                method: s.provenance,
                poly_text: pol.to_string(),
                poly: pol,
            }))
        }
        Command::Annihilator { field, expr, degree_cap, scope, state_limit, blowup_limit, dump } => {
            let f = field_from(&field.field, &field.modulus)?;
            let e = parse(expr)?;
            let topts = TransferOptions { state_limit: *state_limit, budget: opts.budget, ..Default::default() };
            let sys = build_for_expr(&e, &f, &topts)?;
            let aopts = AnnihilatorOptions { degree_cap: *degree_cap, blowup_limit: *blowup_limit };
            let pol = match scope {
                Scope::Matrix => integer_annihilator(&sys, &aopts)?,
                Scope::Sequence => sequence_annihilator(&sys, &aopts)?,
            };
            let run = sys.run(sys.first_n() + pol.degree() + 10)?;
            if !satisfies(&run, &pol)? {
                return Err(Error::Consistency(format!("{pol} does not annihilate the projected sequence")));
            }
            Ok(Output::Annihilator(AnnihilatorPayload {
                field: f.to_string(),
                expr: e.to_string(),
                scope: *scope,
                states: sys.dim(),
                n0: sys.n0,
                shift: sys.shift,
                poly_text: pol.to_string(),
                poly: pol,
                checked_range: (run.n_min, run.n_end() - 1),
                system: dump.then(|| sys.dump()),
            }))
        }
        Command::Conjecture { which, k, field, modulus, n_max, strict } => {
            let which: Which = which.parse()?;
            let f = field_from(field, modulus)?;
            let report = harness::check_conjecture(which, *k, &f, *n_max, &opts)?;
            let conjectured = match which {
                Which::Trapezoid => harness::trap_conjecture_seq(*k, &f, *n_max)?,
                Which::Rotation => harness::rot_conjecture_seq(*k, *n_max)?,
            };
            Ok(Output::Conjecture(ConjecturePayload { report, conjectured }, *strict))
        }
        Command::Numtheory(NumCommand::GaussSum { p, a }) => {
            let value = numtheory::gauss_sum(*a, *p)?;
            let z = value.to_complex();
            let closed = numtheory::gauss_sum_closed_form(*p) * f64::from(numtheory::legendre(*a, *p)?);
            Ok(Output::Gauss(GaussSumPayload {
                p: *p,
                a: *a,
                numeric: [z.re, z.im],
                closed_form: [closed.re, closed.im],
                deviation: (z - closed).norm(),
                tolerance: numtheory::EIGEN_TOLERANCE,
                value,
            }))
        }
        Command::Numtheory(NumCommand::EigenCheck { p }) => Ok(Output::Eigen(numtheory::eigen_check(*p)?)),
        Command::Numtheory(NumCommand::Eisenstein { poly, p }) => {
            let pol = IntPolynomial::parse_ascending(poly)?;
            let verdict = numtheory::eisenstein_dumas(&pol, *p)?;
            Ok(Output::Eisenstein(EisensteinPayload { p: *p, poly_text: pol.to_string(), poly: pol, verdict }))
        }
        Command::Accept { profile, only } => {
            let profile: Profile = profile.parse()?;
            let reports = match only {
                None => harness::acceptance_run(profile),
                Some(ids) => ids.iter().map(|&id| harness::run_criterion(id, profile)).collect::<Result<_>>()?,
            };
            Ok(Output::Accept(reports))
        }
        Command::Bench { field, expr, n } => {
            let f = field_from(&field.field, &field.modulus)?;
            let e = parse(expr)?;
            let mut timings = BTreeMap::new();
            let t = Instant::now();
            let brute = exp_sum_expr(&e, *n, &f, &opts)?;
            timings.insert("brute_ms".to_string(), t.elapsed().as_secs_f64() * 1e3);
            let t = Instant::now();
            let fast = sum_sequence(&e, &f, *n..=*n, &Method::Transfer, &opts)?;
            timings.insert("transfer_ms".to_string(), t.elapsed().as_secs_f64() * 1e3);
            let value = fast.values[0].clone();
            Ok(Output::Bench(
                BenchPayload { field: f.to_string(), expr: e.to_string(), n: *n, equal: value == brute, value, method: fast.provenance },
                timings,
            ))
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_resource_limit() {
        EXIT_RESOURCE
    } else if matches!(e, Error::Consistency(_)) {
        EXIT_CHECK_FAILED
    } else {
        EXIT_USAGE
    }
}

fn csv_rows(out: &Output) -> Result<Vec<Vec<String>>> {
    let poly_rows = |p: &IntPolynomial| {
        let mut rows = vec![vec!["power".to_string(), "coefficient".to_string()]];
        rows.extend(p.coeffs().iter().enumerate().map(|(i, c)| vec![i.to_string(), c.to_string()]));
        rows
    };
    Ok(match out {
        Output::Sequence(s) => {
            let p = s.values.first().map_or(2, |v| v.p());
            let mut head = vec!["n".to_string()];
            head.extend((0..p - 1).map(|i| format!("c{i}")));
            let mut rows = vec![head];
            for (i, v) in s.values.iter().enumerate() {
                let mut row = vec![(s.n_min + i as i64).to_string()];
                row.extend(v.coeffs().iter().map(|c| c.to_string()));
                rows.push(row);
            }
            rows
        }
        Output::Discover(d) => poly_rows(&d.poly),
        Output::Annihilator(a) => poly_rows(&a.poly),
        Output::Eisenstein(e) => poly_rows(&e.poly),
        Output::Accept(rs) => {
            let mut rows = vec![["id", "status", "millis", "expected", "got"].map(String::from).to_vec()];
            rows.extend(rs.iter().map(|r| vec![r.id.to_string(), r.status.to_string(), r.millis.to_string(), r.expected.clone(), r.got.clone()]));
            rows
        }
        _ => return Err(Error::Unsupported("CSV output is available for expsum, discover, annihilator, eisenstein and accept".into())),
    })
}

fn render_csv(out: &Output) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in csv_rows(out)? {
        w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            format!("[{}]", a.iter().map(render_value).collect::<Vec<_>>().join(", "))
        }
        other => other.to_string(),
    }
}

fn render_pretty(out: &Output) -> String {
    let mut s = String::new();
    match out {
        Output::Sequence(p) => {
            s.push_str(&format!("S({}) over F_{}\n", p.expr, p.field));
            let rows: Vec<(String, String)> =
                p.values.iter().enumerate().map(|(i, v)| ((p.n_min + i as i64).to_string(), v.to_string())).collect();
            let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(1).max(1);
            s.push_str(&format!("{:>w$}  value\n", "n"));
            for (n, v) in rows {
                s.push_str(&format!("{n:>w$}  {v}\n"));
            }
        }
        Output::Accept(rs) => {
            for r in rs {
                s.push_str(&format!("[{}] C{:02} {:>7} ms  {}\n        {}\n", r.status, r.id, r.millis, r.expected, r.got));
            }
        }
        other => {
            if let Value::Object(m) = other.payload() {
                let w = m.keys().map(|k| k.len()).max().unwrap_or(0);
                for (k, v) in m {
                    s.push_str(&format!("{k:<w$}  {}\n", render_value(&v)));
                }
            }
        }
    }
    if let Some(t) = out.timings() {
        for (k, v) in t {
            s.push_str(&format!("{k}: {v:.3}\n"));
        }
    }
    s
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
            return code;
        }
    };
    let (format, file) = match cli.output.out.as_deref() {
        Some("json") => (Format::Json, None),
        Some("csv") => (Format::Csv, None),
        Some(path) => (cli.output.format.unwrap_or(Format::Json), Some(path.to_string())),
        None => (cli.output.format.unwrap_or(Format::Json), None),
    };
    let out = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let command: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let text = if cli.output.pretty {
        Ok(render_pretty(&out))
    } else {
        match format {
            Format::Json => {
                let rec = OutputRecord { schema_version: SCHEMA_VERSION, command, payload: out.payload(), timings: out.timings() };
                Ok(serde_json::to_string_pretty(&rec).expect("records serialize") + "\n")
            }
            Format::Csv => render_csv(&out),
        }
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    if let Some(path) = file {
        // the bare payload goes to the file
        let body = match format {
            Format::Json if !cli.output.pretty => serde_json::to_string_pretty(&out.payload()).expect("payloads serialize") + "\n",
            _ => text.clone(),
        };
        if let Err(e) = std::fs::write(&path, body) {
            let _ = writeln!(stderr, "error: cannot write {path}: {e}");
            return EXIT_USAGE;
        }
    }
    let _ = stdout.write_all(text.as_bytes());
    if out.failed() {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..6").unwrap(), (3, 6));
        assert_eq!(parse_range("3..=6").unwrap(), (3, 6));
        assert_eq!(parse_range("5").unwrap(), (5, 5));
        assert_eq!(parse_range("3..2").unwrap_err(), Error::EmptyRange);
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::BudgetExceeded { points: 10, budget: 1 }), EXIT_RESOURCE);
        assert_eq!(exit_code(&Error::EmptyRange), EXIT_USAGE);
        assert_eq!(exit_code(&Error::Consistency(String::new())), EXIT_CHECK_FAILED);
    }
}
