//! Command-line surface: argument parsing, job execution and report rendering.
//!
//! Every command produces an ordered list of [`Row`]s, rendered as text, JSON
//! or CSV. Rows are assembled in catalog order, so a fixed job (including the
//! seed) always yields a byte-identical report.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::is_prime;
use crate::engine::{check_bivariate_symmetry, Engine};
use crate::error::{EngineError, OracleError, SplittingError, SymbolicError};
use crate::oracle::{
    compare_exact, compare_monte_carlo, CompareError, OracleRecord, DEFAULT_GUARD,
};
use crate::splitting::{catalog, splitting_types_of_degree, SplittingType};
use crate::symbolic::json::{fracpoly_to_json, genfun_to_json};
use crate::symbolic::{FracPoly, GenFun, Rat, Var};

/// Exit code for a failed verification item.
pub const EXIT_VERIFY: i32 = 1;
/// Exit code for malformed input.
pub const EXIT_PARSE: i32 = 2;
/// Exit code for a wild prime.
pub const EXIT_WILD: i32 = 3;
/// Exit code for a non-integral exponent in the rewrite in `q`.
pub const EXIT_NON_INTEGRAL: i32 = 4;
/// Exit code for any other failure.
pub const EXIT_OTHER: i32 = 5;

/// Evaluation point for the asymptotic check.
const ASYMPTOTIC_Q: i64 = 10_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Compute,
    Table,
    Verify,
    Oracle,
    Conjecture,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "tame-density",
    version,
    about = "Exact densities of p-adic polynomials with a prescribed tame splitting type"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Splitting type, e.g. `e1f1,e1f2` or `e2f2@e2f1`.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Base `(e, f)`, e.g. `e2f1`; overridden by an `@` suffix in `--sigma`.
    #[arg(long, default_value = "e1f1")]
    pub base: String,
    /// A concrete prime for numeric values and the oracle.
    #[arg(short = 'p', long = "prime")]
    pub p: Option<u64>,
    /// Largest discriminant valuation compared by the oracle.
    #[arg(long, default_value_t = 4)]
    pub cmax: u64,
    /// Monte Carlo samples for the oracle (0 disables sampling).
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Starting valuations `b_i` for the oracle, comma-separated.
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Catalog bound for table, verify and conjecture.
    #[arg(long = "degree-max", default_value_t = 5)]
    pub degree_max: u64,
    /// Write the report to a file instead of standard output.
    #[arg(long)]
    pub emit: Option<PathBuf>,
    #[arg(long)]
    pub alpha: bool,
    #[arg(long)]
    pub beta: bool,
    #[arg(long)]
    pub asymptotic: bool,
    #[arg(long)]
    pub bivariate: bool,
    /// Shorthand for `--alpha --beta --asymptotic`.
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Splitting(#[from] SplittingError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<CompareError> for CliError {
    fn from(e: CompareError) -> Self {
        match e {
            CompareError::Oracle(o) => CliError::Oracle(o),
            CompareError::Engine(g) => CliError::Engine(g),
        }
    }
}

impl From<SymbolicError> for CliError {
    fn from(e: SymbolicError) -> Self {
        CliError::Engine(EngineError::Symbolic(e))
    }
}

fn splitting_code(e: &SplittingError) -> i32 {
    match e {
        SplittingError::WildInput { .. } => EXIT_WILD,
        _ => EXIT_PARSE,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Splitting(s) => splitting_code(s),
            CliError::Oracle(OracleError::Splitting(s)) => splitting_code(s),
            CliError::Engine(EngineError::Splitting(s)) => splitting_code(s),
            CliError::Engine(EngineError::Symbolic(SymbolicError::NonIntegralExponent {
                ..
            })) => EXIT_NON_INTEGRAL,
            CliError::Usage(_) => EXIT_PARSE,
            _ => EXIT_OTHER,
        }
    }
}

/// Which optional densities `compute` and `table` print.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Extras {
    pub alpha: bool,
    pub beta: bool,
    pub asymptotic: bool,
    pub bivariate: bool,
}

/// A fully validated job.
#[derive(Clone, Debug)]
pub struct JobSpec {
    pub command: Command,
    pub sigma: Option<SplittingType>,
    pub e_base: u64,
    pub f_base: u64,
    pub p: Option<u64>,
    pub b: Option<Vec<u64>>,
    pub c_max: u64,
    pub samples: u64,
    pub seed: u64,
    pub format: Format,
    pub degree_max: u64,
    pub extras: Extras,
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, SplittingError> {
        Err(SplittingError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn expect(&mut self, c: u8) -> Result<(), SplittingError> {
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{}'", c as char))
        }
    }

    fn number(&mut self) -> Result<u64, SplittingError> {
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a positive integer");
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        match text.parse::<u64>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(SplittingError::Parse {
                pos: start,
                msg: "expected a positive integer".into(),
            }),
        }
    }

    fn pair(&mut self) -> Result<(u64, u64), SplittingError> {
        self.expect(b'e')?;
        let e = self.number()?;
        self.expect(b'f')?;
        let f = self.number()?;
        Ok((e, f))
    }
}

/// Parses a single `e<int>f<int>` pair.
pub fn parse_pair(s: &str) -> Result<(u64, u64), SplittingError> {
    let mut c = Cursor {
        s: s.trim().as_bytes(),
        pos: 0,
    };
    let p = c.pair()?;
    if c.pos != c.s.len() {
        return c.err("unexpected trailing input");
    }
    Ok(p)
}

/// Parses `e1f1,e1f2` or `e2f2@e2f1` (absolute components, optional base).
pub fn parse_sigma(s: &str) -> Result<SplittingType, SplittingError> {
    parse_sigma_with_base(s, (1, 1))
}

/// As [`parse_sigma`], with the base used when no `@` suffix is present.
pub fn parse_sigma_with_base(s: &str, base: (u64, u64)) -> Result<SplittingType, SplittingError> {
    let mut c = Cursor {
        s: s.as_bytes(),
        pos: 0,
    };
    let mut comps = vec![c.pair()?];
    while c.s.get(c.pos) == Some(&b',') {
        c.pos += 1;
        comps.push(c.pair()?);
    }
    let base = if c.s.get(c.pos) == Some(&b'@') {
        c.pos += 1;
        c.pair()?
    } else {
        base
    };
    if c.pos != c.s.len() {
        return c.err("unexpected character");
    }
    SplittingType::new(comps, base.0, base.1)
}

fn parse_b(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("invalid b entry '{}'", x)))
        })
        .collect()
}

impl JobSpec {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let base = parse_pair(&cli.base)?;
        let sigma = cli
            .sigma
            .as_deref()
            .map(|s| parse_sigma_with_base(s, base))
            .transpose()?;
        let (e_base, f_base) = sigma.as_ref().map_or(base, |s| (s.e_base, s.f_base));
        if let Some(p) = cli.p {
            if !is_prime(p) {
                return Err(SplittingError::NotPrime(p).into());
            }
            if let Some(s) = &sigma {
                s.check_tame(p)?;
            }
        }
        let b = cli.b.as_deref().map(parse_b).transpose()?;
        let needs_sigma = matches!(cli.command, Command::Compute | Command::Oracle);
        if needs_sigma && sigma.is_none() {
            return Err(CliError::Usage(
                "--sigma is required for this command".into(),
            ));
        }
        if cli.command == Command::Oracle && cli.p.is_none() {
            return Err(CliError::Usage("-p is required for the oracle".into()));
        }
        Ok(JobSpec {
            command: cli.command,
            sigma,
            e_base,
            f_base,
            p: cli.p,
            b,
            c_max: cli.cmax,
            samples: cli.samples,
            seed: cli.seed,
            format: cli.format,
            degree_max: cli.degree_max,
            extras: Extras {
                alpha: cli.alpha || cli.all,
                beta: cli.beta || cli.all,
                asymptotic: cli.asymptotic || cli.all,
                bivariate: cli.bivariate,
            },
        })
    }
}

/// A reported value.
#[derive(Clone, Debug)]
pub enum RowValue {
    Func(FracPoly),
    BiFunc(GenFun),
    Number(Rat),
    Check(bool),
    Oracle(OracleRecord),
}

/// One line of a report.
#[derive(Clone, Debug)]
pub struct Row {
    pub sigma: Option<SplittingType>,
    pub e_base: u64,
    pub f_base: u64,
    pub quantity: String,
    pub value: RowValue,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: Command,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| match &r.value {
                RowValue::Check(ok) => !ok,
                RowValue::Oracle(rec) => !rec.matches,
                _ => false,
            })
            .count()
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures() > 0 {
            EXIT_VERIFY
        } else {
            0
        }
    }
}

fn row(sigma: &SplittingType, quantity: impl Into<String>, value: RowValue) -> Row {
    Row {
        sigma: Some(sigma.clone()),
        e_base: sigma.e_base,
        f_base: sigma.f_base,
        quantity: quantity.into(),
        value,
    }
}

fn q_at(p: u64, f_base: u64) -> Rat {
    Rat::from_integer(BigInt::from(p).pow(f_base as u32))
}

fn density_rows(
    engine: &Engine,
    sigma: &SplittingType,
    job: &JobSpec,
) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    let rho = engine.compute_rho(sigma)?;
    let mut funcs = vec![("rho", rho)];
    if job.extras.alpha {
        funcs.push(("alpha", engine.compute_alpha(sigma)?));
    }
    if job.extras.beta {
        funcs.push(("beta", engine.compute_beta_monic(sigma)?));
    }
    if job.extras.asymptotic {
        funcs.push(("asymptotic", crate::engine::asymptotic_rho(sigma)));
    }
    for (name, f) in funcs {
        if let Some(p) = job.p {
            let q = q_at(p, sigma.f_base);
            let v = f.eval(&q).ok_or(SymbolicError::Pole)?;
            rows.push(row(sigma, name, RowValue::Func(f)));
            rows.push(row(sigma, format!("{}@p={}", name, p), RowValue::Number(v)));
        } else {
            rows.push(row(sigma, name, RowValue::Func(f)));
        }
    }
    if job.extras.bivariate {
        rows.push(row(
            sigma,
            "rho_bivariate",
            RowValue::BiFunc(engine.compute_rho_bivariate(sigma)?),
        ));
    }
    Ok(rows)
}

/// The catalog of a job: tame at `p` when a prime is supplied.
fn job_catalog(job: &JobSpec) -> Vec<SplittingType> {
    let mut cat = catalog(job.degree_max, job.e_base, job.f_base);
    if let Some(p) = job.p {
        cat.retain(|s| s.check_tame(p).is_ok());
    }
    cat.sort_by_key(|s| (s.degree(), s.components.clone()));
    cat
}

fn concat(parts: Vec<Result<Vec<Row>, CliError>>) -> Result<Vec<Row>, CliError> {
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn verify_rows(engine: &Engine, job: &JobSpec) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    let q = Rat::from_integer(BigInt::from(ASYMPTOTIC_Q));
    let tol = Rat::new(BigInt::from(10), BigInt::from(ASYMPTOTIC_Q));
    for n in 1..=job.degree_max {
        let mut types = splitting_types_of_degree(n, job.e_base, job.f_base);
        if let Some(p) = job.p {
            types.retain(|s| s.check_tame(p).is_ok());
        }
        type PerSigma = Result<(Vec<Row>, [FracPoly; 3]), CliError>;
        let per: Vec<PerSigma> = types
            .par_iter()
            .map(|s| {
                let rho = engine.compute_rho(s)?;
                let alpha = engine.compute_alpha(s)?;
                let beta = engine.compute_beta_monic(s)?;
                let mut r = vec![
                    row(
                        s,
                        "functional_equation",
                        RowValue::Check(rho.invert_var() == rho),
                    ),
                    row(s, "duality", RowValue::Check(alpha.invert_var() == beta)),
                ];
                let scaled = rho.eval(&q).ok_or(SymbolicError::Pole)?
                    * Rat::from_integer(BigInt::from(crate::splitting::perm(s) * s.prod_f_rel()))
                    * q.pow(s.ramification_excess() as i32);
                let dev = (scaled - Rat::one()).abs();
                r.push(row(s, "asymptotics", RowValue::Check(dev <= tol)));
                let c0 = engine.min_disc_valuation(s).is_ok();
                r.push(row(s, "min_disc_valuation", RowValue::Check(c0)));
                Ok((r, [rho, alpha, beta]))
            })
            .collect();
        let mut sums = [
            FracPoly::zero(Var::Q),
            FracPoly::zero(Var::Q),
            FracPoly::zero(Var::Q),
        ];
        let mut per_sigma = Vec::new();
        for item in per {
            let (r, fs) = item?;
            per_sigma.extend(r);
            for (acc, f) in sums.iter_mut().zip(fs.iter()) {
                *acc = acc.add(f);
            }
        }
        let one = FracPoly::one(Var::Q);
        let degree_row = |name: &str, ok: bool| Row {
            sigma: None,
            e_base: job.e_base,
            f_base: job.f_base,
            quantity: format!("degree {}: {} = 1", n, name),
            value: RowValue::Check(ok),
        };
        // Tameness filtering at a prime removes types, so the sums are
        // only meaningful over the full symbolic catalog.
        if job.p.is_none() {
            rows.push(degree_row("sum_rho", sums[0] == one));
            rows.push(degree_row("sum_alpha", sums[1] == one));
            rows.push(degree_row("sum_beta", sums[2] == one));
        }
        rows.extend(per_sigma);
    }
    Ok(rows)
}

fn oracle_rows(engine: &Engine, job: &JobSpec) -> Result<Vec<Row>, CliError> {
    let sigma = job.sigma.as_ref().expect("validated");
    let p = job.p.expect("validated");
    let b = job.b.clone().unwrap_or_else(|| vec![0; sigma.m()]);
    let mut recs = compare_exact(engine, sigma, &b, job.c_max, p, DEFAULT_GUARD)?;
    if job.samples > 0 {
        recs.extend(compare_monte_carlo(
            engine,
            sigma,
            &b,
            job.c_max,
            p,
            job.samples,
            job.seed,
            3.0,
        )?);
    }
    Ok(recs
        .into_iter()
        .map(|r| {
            let kind = if r.exact_mass.is_some() { "a" } else { "a_mc" };
            row(sigma, format!("{}(c={})", kind, r.c), RowValue::Oracle(r))
        })
        .collect())
}

fn conjecture_rows(engine: &Engine, job: &JobSpec) -> Result<Vec<Row>, CliError> {
    let types = match &job.sigma {
        Some(s) => vec![s.clone()],
        None => job_catalog(job),
    };
    let parts: Vec<Result<Vec<Row>, CliError>> = types
        .par_iter()
        .map(|s| {
            let g = engine.compute_rho_bivariate(s)?;
            let (ok, _) = check_bivariate_symmetry(&g);
            let rho = engine.compute_rho(s)?;
            Ok(vec![
                row(s, "rho_bivariate", RowValue::BiFunc(g)),
                row(s, "bivariate_symmetry", RowValue::Check(ok)),
                row(
                    s,
                    "functional_equation",
                    RowValue::Check(rho.invert_var() == rho),
                ),
            ])
        })
        .collect();
    concat(parts)
}

/// Executes a job.
pub fn run(job: &JobSpec, engine: &Engine) -> Result<Report, CliError> {
    let rows = match job.command {
        Command::Compute => {
            let sigma = job.sigma.as_ref().expect("validated");
            density_rows(engine, sigma, job)?
        }
        Command::Table => {
            let types = job_catalog(job);
            concat(
                types
                    .par_iter()
                    .map(|s| density_rows(engine, s, job))
                    .collect(),
            )?
        }
        Command::Verify => verify_rows(engine, job)?,
        Command::Oracle => oracle_rows(engine, job)?,
        Command::Conjecture => conjecture_rows(engine, job)?,
    };
    Ok(Report {
        command: job.command,
        rows,
    })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn number_display(v: &Rat) -> String {
    if v.is_integer() {
        v.to_string()
    } else {
        format!("{} (~ {:.6e})", v, v.to_f64().unwrap_or(f64::NAN))
    }
}

fn sigma_header(s: &SplittingType) -> String {
    format!(
        "sigma (e,f pairs): {}    sigma (f^e): {}    base: e{}f{}",
        s.pairs_string(),
        s.f_pow_e_string(),
        s.e_base,
        s.f_base
    )
}

fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let mut current: Option<String> = None;
    for r in &report.rows {
        let key = r.sigma.as_ref().map(|s| s.pairs_string());
        if key != current {
            if let Some(s) = &r.sigma {
                let _ = writeln!(out, "{}", sigma_header(s));
            }
            current = key;
        }
        let indent = if r.sigma.is_some() { "  " } else { "" };
        let body = match &r.value {
            RowValue::Func(f) => format!("{} = {}", r.quantity, f),
            RowValue::BiFunc(g) => format!("{} = {}", r.quantity, g),
            RowValue::Number(v) => format!("{} = {}", r.quantity, number_display(v)),
            RowValue::Check(ok) => format!("{}: {}", r.quantity, pass(*ok)),
            RowValue::Oracle(rec) => {
                let oracle = match (&rec.exact_mass, rec.estimate, rec.stderr) {
                    (Some(m), _, _) => m.clone(),
                    (None, Some(e), Some(se)) => format!("{:.6} +- {:.6}", e, se),
                    _ => "-".into(),
                };
                format!(
                    "{} p={} b={:?}: oracle = {}, engine = {}, match: {}",
                    r.quantity, rec.p, rec.b, oracle, rec.engine_value, rec.matches
                )
            }
        };
        let _ = writeln!(out, "{}{}", indent, body);
    }
    let _ = writeln!(
        out,
        "summary: {} rows, {} failures",
        report.rows.len(),
        report.failures()
    );
    out
}

fn value_json(v: &RowValue) -> Value {
    match v {
        RowValue::Func(f) => fracpoly_to_json(f),
        RowValue::BiFunc(g) => genfun_to_json(g),
        RowValue::Number(x) => json!({"num": x.numer().to_string(), "den": x.denom().to_string()}),
        RowValue::Check(ok) => json!(ok),
        RowValue::Oracle(rec) => serde_json::to_value(rec).unwrap_or(Value::Null),
    }
}

fn value_display(v: &RowValue) -> String {
    match v {
        RowValue::Func(f) => f.to_string(),
        RowValue::BiFunc(g) => g.to_string(),
        RowValue::Number(x) => x.to_string(),
        RowValue::Check(ok) => pass(*ok).to_string(),
        RowValue::Oracle(rec) => format!("match: {}", rec.matches),
    }
}

fn render_json(report: &Report) -> String {
    let records: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "sigma": r.sigma.as_ref().map(|s| s.pairs_string()),
                "sigma_f_pow_e": r.sigma.as_ref().map(|s| s.f_pow_e_string()),
                "e_base": r.e_base,
                "f_base": r.f_base,
                "quantity": r.quantity,
                "value": value_json(&r.value),
                "display": value_display(&r.value),
            })
        })
        .collect();
    let doc = json!({
        "command": format!("{:?}", report.command).to_lowercase(),
        "failures": report.failures(),
        "records": records,
    });
    let mut s = serde_json::to_string_pretty(&doc).unwrap_or_default();
    s.push('\n');
    s
}

/// Numerator and denominator strings for the CSV columns.
fn csv_parts(v: &RowValue) -> (String, String) {
    match v {
        RowValue::Func(f) => {
            let (n, d) = f.cleared();
            let name = f.var().name();
            (n.fmt_with([name]), d.fmt_with([name]))
        }
        RowValue::BiFunc(g) => (
            g.numerator().fmt_with(["p", "t"]),
            g.denominator().fmt_with(["p", "t"]),
        ),
        RowValue::Number(x) => (x.numer().to_string(), x.denom().to_string()),
        RowValue::Check(ok) => ((*ok as u8).to_string(), "1".into()),
        RowValue::Oracle(rec) => match &rec.exact_mass {
            Some(m) => {
                let r: Rat = m.parse().unwrap_or_default();
                (r.numer().to_string(), r.denom().to_string())
            }
            None => (format!("{}", rec.estimate.unwrap_or(f64::NAN)), "1".into()),
        },
    }
}

fn render_csv(report: &Report) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record([
        "sigma",
        "e_base",
        "f_base",
        "quantity",
        "value_numerator",
        "value_denominator",
    ])
    .map_err(io)?;
    for r in &report.rows {
        let (n, d) = csv_parts(&r.value);
        let sigma = r
            .sigma
            .as_ref()
            .map(|s| s.pairs_string())
            .unwrap_or_default();
        w.write_record([
            sigma,
            r.e_base.to_string(),
            r.f_base.to_string(),
            r.quantity.clone(),
            n,
            d,
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

/// Renders a report in the requested format.
pub fn render(report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Text => Ok(render_text(report)),
        Format::Json => Ok(render_json(report)),
        Format::Csv => render_csv(report),
    }
}

/// Parses arguments, runs the job and writes the report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let job = JobSpec::from_cli(cli)?;
    let engine = Engine::new();
    let report = run(&job, &engine)?;
    let text = render(&report, job.format)?;
    match &cli.emit {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{}", text),
    }
    Ok(report.exit_code())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sigma_grammar() {
        let s = parse_sigma("e1f1,e1f1").unwrap();
        assert_eq!(s.components, vec![(1, 1), (1, 1)]);
        let s = parse_sigma("e2f2@e2f1").unwrap();
        assert_eq!((s.e_rel(0), s.f_rel(0)), (1, 2));
        assert!(matches!(
            parse_sigma("e2f1@e1f2"),
            Err(SplittingError::Divisibility { .. })
        ));
        assert_eq!(
            parse_sigma("e1f1,x"),
            Err(SplittingError::Parse {
                pos: 5,
                msg: "expected 'e'".into()
            })
        );
        assert!(matches!(
            parse_sigma("e0f1"),
            Err(SplittingError::Parse { pos: 1, .. })
        ));
        assert!(matches!(
            parse_sigma("e1f1;"),
            Err(SplittingError::Parse { pos: 4, .. })
        ));
    }

    fn job(args: &[&str]) -> JobSpec {
        let mut full = vec!["tame-density"];
        full.extend_from_slice(args);
        JobSpec::from_cli(&Cli::try_parse_from(full).unwrap()).unwrap()
    }

    #[test]
    fn compute_prints_golden_value() {
        let j = job(&["compute", "--sigma", "e1f2"]);
        let rep = run(&j, &Engine::new()).unwrap();
        let text = render(&rep, Format::Text).unwrap();
        assert!(
            text.contains("rho = (q^2 - q + 1)/(2*(q^2 + q + 1))"),
            "{text}"
        );
        assert!(text.contains("sigma (f^e): (2^1)"));
    }

    #[test]
    fn wild_prime_and_usage_codes() {
        let cli =
            Cli::try_parse_from(["tame-density", "compute", "--sigma", "e3f1", "-p", "3"]).unwrap();
        assert_eq!(JobSpec::from_cli(&cli).unwrap_err().exit_code(), EXIT_WILD);
        let cli = Cli::try_parse_from(["tame-density", "compute", "--sigma", "e3x"]).unwrap();
        assert_eq!(JobSpec::from_cli(&cli).unwrap_err().exit_code(), EXIT_PARSE);
        let cli = Cli::try_parse_from(["tame-density", "oracle", "--sigma", "e2f1"]).unwrap();
        assert_eq!(JobSpec::from_cli(&cli).unwrap_err().exit_code(), EXIT_PARSE);
    }

    #[test]
    fn non_integral_exponent_has_its_own_code() {
        let e = CliError::from(SymbolicError::NonIntegralExponent {
            f_base: 2,
            value: "p^(1/2)".into(),
        });
        assert_eq!(e.exit_code(), EXIT_NON_INTEGRAL);
    }

    #[test]
    fn csv_quotes_sigma() {
        let j = job(&[
            "compute",
            "--sigma",
            "e1f1,e1f2",
            "--format",
            "csv",
            "-p",
            "3",
        ]);
        let text = render(&run(&j, &Engine::new()).unwrap(), Format::Csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("sigma,e_base,f_base,quantity,value_numerator,value_denominator")
        );
        assert!(text.contains("\"e1f1,e1f2\",1,1,rho@p=3,"));
    }
}
