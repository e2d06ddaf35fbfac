//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage/input errors and battery mismatches,
//! 2 input that is not a K3 quartic, 3 a failed bound audit.

use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::families::{self, battery_cases, catalog, instantiate, CatalogOptions};
use crate::gf3::{parse_field, FieldCtx};
use crate::poly::multi::MultiPoly;
use crate::poly::parse::{parse_element, parse_poly};
use crate::report::{analyze, AnalyzeError, AnalyzeOptions, LineMethod, Report, Source, Status};
use crate::surface::coordinate_names;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_K3: i32 = 2;
pub const EXIT_AUDIT_FAIL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "k3lines", version, about = "Lines on quartic K3 surfaces in characteristic 3")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Analyze one surface: singular points, lines, line profiles, line graph, bound audits.
    Analyze(AnalyzeArgs),
    /// Check every catalog surface against its recorded facts.
    VerifyBattery(BatteryArgs),
    /// Catalog of named surfaces.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    /// Names, parameter domains and recorded facts.
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Line enumeration: brute:k, exact, or both[:k] (exact checked against brute force over GF(3^k)).
    #[arg(long, default_value = "exact", value_parser = parse_method)]
    pub lines: LineMethod,
    /// Largest extension degree used for work fields.
    #[arg(long, default_value_t = crate::gf3::MAX_DEGREE, value_parser = clap::value_parser!(u32).range(1..=8))]
    pub max_ext: u32,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Seed of every randomized step.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Quartic form in x0..x3, a JSON object {"field","terms":[{"exps":[..],"coeff"}]}, or `-` for stdin.
    pub surface: Option<String>,
    /// Field of the coefficients and catalog parameters, e.g. 3^2.
    #[arg(long)]
    pub field: Option<String>,
    /// Named catalog surface.
    #[arg(long, conflicts_with = "surface")]
    pub catalog: Option<String>,
    /// Catalog parameter, e.g. a=g+1.
    #[arg(long = "param", value_name = "NAME=EXPR")]
    pub params: Vec<String>,
    /// Build catalog surfaces at degenerate parameters.
    #[arg(long)]
    pub allow_degenerate: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct BatteryArgs {
    /// Brute force over GF(9) only; facts that need the full line list are skipped.
    #[arg(long)]
    pub quick: bool,
    /// Only entries with this name.
    #[arg(long)]
    pub only: Option<String>,
    /// Self-test: perturb one coefficient of the named entry; the battery must flag it.
    #[arg(long, value_name = "NAME")]
    pub corrupt: Option<String>,
    #[arg(long, default_value_t = crate::gf3::MAX_DEGREE, value_parser = clap::value_parser!(u32).range(1..=8))]
    pub max_ext: u32,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

fn parse_method(s: &str) -> Result<LineMethod, String> {
    s.parse()
}

/// Parses `args` (including the program name) and runs the command,
/// writing the output to `out`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let jobs = match &cli.command {
        Command::Analyze(a) => a.common.jobs,
        Command::VerifyBattery(b) => b.jobs,
        Command::Catalog { .. } => None,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ERROR;
        }
    };
    let (code, o, e) = pool.install(|| {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = match cli.command {
            Command::Analyze(a) => run_analyze(&a, &mut o, &mut e),
            Command::VerifyBattery(b) => run_battery(&b, &mut o, &mut e),
            Command::Catalog {
                action: CatalogAction::List { format },
            } => run_catalog(format, &mut o),
        };
        (code, o, e)
    });
    let _ = out.write_all(&o);
    let _ = err.write_all(&e);
    code
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Deserialize)]
struct SurfaceJson {
    field: String,
    terms: Vec<TermJson>,
}

#[derive(Deserialize)]
struct TermJson {
    exps: [u16; 4],
    coeff: String,
}

/// Reads a form from polynomial text or the JSON term list.
pub fn read_form(text: &str, field: Option<&FieldCtx>) -> Result<MultiPoly, String> {
    let vars = coordinate_names();
    if text.trim_start().starts_with('{') {
        let s: SurfaceJson = serde_json::from_str(text).map_err(|e| format!("JSON error at line {}, column {}: {e}", e.line(), e.column()))?;
        let ctx = parse_field(&s.field).map_err(|e| e.to_string())?;
        let mut terms = Vec::new();
        for t in &s.terms {
            let c = parse_element(&ctx, &t.coeff).map_err(|e| format!("coefficient `{}`: {e}", t.coeff))?;
            terms.push((t.exps.to_vec(), c));
        }
        return Ok(families::shrink_field(&MultiPoly::from_terms(&ctx, vars, terms)));
    }
    let ctx = match field {
        Some(f) => f.clone(),
        None => CatalogOptions::default().field,
    };
    let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
    let f = parse_poly(&ctx, text, &refs).map_err(|e| e.to_string())?;
    Ok(families::shrink_field(&f))
}

fn emit(report: &Report, format: Format, out: &mut dyn Write) {
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    let _ = out.write_all(text.as_bytes());
}

fn analyze_options(c: &Common) -> AnalyzeOptions {
    AnalyzeOptions {
        lines: c.lines,
        max_ext: c.max_ext,
        seed: c.seed,
    }
}

fn run_analyze(a: &AnalyzeArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let field = match a.field.as_deref().map(parse_field).transpose() {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: --field: {e}");
            return EXIT_ERROR;
        }
    };
    let opts = analyze_options(&a.common);
    let literal_field = field.clone().unwrap_or_else(|| CatalogOptions::default().field);
    let result = if let Some(name) = &a.catalog {
        let mut params = Vec::new();
        for p in &a.params {
            match p.split_once('=') {
                Some((k, v)) => params.push((k.trim(), v)),
                None => {
                    let _ = writeln!(err, "error: --param `{p}`: expected NAME=EXPR");
                    return EXIT_ERROR;
                }
            }
        }
        let copts = CatalogOptions {
            field: literal_field.clone(),
            allow_degenerate: a.allow_degenerate,
        };
        let (form, entry) = match instantiate(name, &params, &copts) {
            Ok(v) => v,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_ERROR;
            }
        };
        if let Some(reason) = &entry.degenerate {
            if !a.allow_degenerate {
                let _ = writeln!(err, "error: degenerate parameter: {reason} (use --allow-degenerate to analyze it)");
                return EXIT_ERROR;
            }
        }
        let source = Source {
            entry: Some(&entry),
            literal_field,
        };
        analyze(&form, &source, &opts)
    } else {
        let text = match a.surface.as_deref() {
            None => {
                let _ = writeln!(err, "error: give a surface or --catalog NAME");
                return EXIT_ERROR;
            }
            Some("-") => {
                let mut s = String::new();
                if let Err(e) = std::io::stdin().read_to_string(&mut s) {
                    let _ = writeln!(err, "error: stdin: {e}");
                    return EXIT_ERROR;
                }
                s
            }
            Some(s) => s.to_string(),
        };
        let form = match read_form(&text, field.as_ref()) {
            Ok(f) => f,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_ERROR;
            }
        };
        let source = Source { entry: None, literal_field };
        analyze(&form, &source, &opts)
    };
    match result {
        Ok(r) => {
            emit(&r, a.common.format, out);
            if r.audit_failed() {
                EXIT_AUDIT_FAIL
            } else {
                EXIT_OK
            }
        }
        Err(AnalyzeError::NotK3(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_NOT_K3
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

// ---------------------------------------------------------------------------
// verification battery

#[derive(Clone, Debug, Serialize)]
pub struct BatteryRow {
    pub source: &'static str,
    pub entry: String,
    pub params: String,
    pub subject: String,
    pub claim: String,
    pub expected: String,
    pub observed: String,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatteryReport {
    pub schema: &'static str,
    pub mode: &'static str,
    pub rows: Vec<BatteryRow>,
    pub pass: usize,
    pub fail: usize,
    pub undecided: usize,
    pub audit_failures: usize,
}

const CORRUPTION: &str = "x0*x1*x2*x3";

/// Runs the battery; `corrupt` names an entry whose form is perturbed.
pub fn battery(quick: bool, only: Option<&str>, corrupt: Option<&str>, max_ext: u32, seed: u64) -> BatteryReport {
    let opts = AnalyzeOptions {
        lines: if quick { LineMethod::Brute(2) } else { LineMethod::Both(2) },
        max_ext,
        seed,
    };
    let copts = CatalogOptions::default();
    let mut rows = Vec::new();
    let mut audit_failures = 0;
    for (name, params) in battery_cases() {
        if only.is_some_and(|o| o != name) {
            continue;
        }
        let shown = params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",");
        let row = |source, subject: &str, claim: &str, expected: String, observed: String, status| BatteryRow {
            source,
            entry: name.to_string(),
            params: shown.clone(),
            subject: subject.to_string(),
            claim: claim.to_string(),
            expected,
            observed,
            status,
        };
        let (mut form, entry) = match instantiate(name, &params, &copts) {
            Ok(v) => v,
            Err(e) => {
                rows.push(row("", "entry", "instantiates", "surface".into(), e.to_string(), Status::Fail));
                continue;
            }
        };
        if corrupt == Some(name) {
            let vars = coordinate_names();
            let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
            let bump = parse_poly(form.ctx(), CORRUPTION, &refs).expect("fixed literal");
            form = form.add(&bump);
        }
        let source = Source {
            entry: Some(&entry),
            literal_field: copts.field.clone(),
        };
        match analyze(&form, &source, &opts) {
            Ok(r) => {
                audit_failures += r.summary.audit_failures;
                for c in r.audits.checks.iter().filter(|c| c.status == Status::Fail) {
                    rows.push(row(c.source, &c.scope, &format!("bound audit: {}", c.rule), format!("<= {}", c.bound), c.value.to_string(), Status::Fail));
                }
                if let Some(o) = &r.lines.oracle {
                    let status = if o.agree { Status::Pass } else { Status::Fail };
                    rows.push(row(
                        entry.expected.source,
                        "surface",
                        "exact GF(9)-rational lines equal brute force over GF(9)",
                        format!("{}", o.brute_force),
                        format!("{}", o.exact_rational),
                        status,
                    ));
                }
                for c in r.claims.into_iter().flatten() {
                    if quick && c.status == Status::Undecided {
                        continue;
                    }
                    rows.push(row(c.source, &c.subject, &c.claim, c.expected, c.observed, c.status));
                }
            }
            Err(e) => rows.push(row(entry.expected.source, "surface", "analysis runs", "report".into(), e.to_string(), Status::Fail)),
        }
    }
    let count = |s: Status| rows.iter().filter(|r| r.status == s).count();
    BatteryReport {
        schema: "k3lines.battery/1",
        mode: if quick { "quick" } else { "full" },
        pass: count(Status::Pass),
        fail: count(Status::Fail),
        undecided: count(Status::Undecided),
        audit_failures,
        rows,
    }
}

impl BatteryReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let params = if r.params.is_empty() { String::new() } else { format!(" [{}]", r.params) };
            s.push_str(&format!(
                "{:<9} {:<9} {}{} | {}: {} | expected {} | observed {}\n",
                r.status.to_string(),
                r.source,
                r.entry,
                params,
                r.subject,
                r.claim,
                r.expected,
                r.observed
            ));
        }
        s.push_str(&format!(
            "{} mode: {} pass, {} fail, {} undecided, {} audit failures\n",
            self.mode, self.pass, self.fail, self.undecided, self.audit_failures
        ));
        s
    }

    pub fn exit_code(&self) -> i32 {
        if self.audit_failures > 0 {
            EXIT_AUDIT_FAIL
        } else if self.fail > 0 || (self.mode == "full" && self.undecided > 0) {
            EXIT_ERROR
        } else {
            EXIT_OK
        }
    }
}

fn run_battery(b: &BatteryArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Some(n) = b.only.as_deref().or(b.corrupt.as_deref()) {
        if !families::catalog_names().contains(&n) {
            let _ = writeln!(err, "error: unknown catalog entry `{n}`");
            return EXIT_ERROR;
        }
    }
    let r = battery(b.quick, b.only.as_deref(), b.corrupt.as_deref(), b.max_ext, b.seed);
    let text = match b.format {
        Format::Json => serde_json::to_string_pretty(&r).expect("battery serializes") + "\n",
        Format::Text => r.to_text(),
    };
    let _ = out.write_all(text.as_bytes());
    r.exit_code()
}

// ---------------------------------------------------------------------------
// catalog

#[derive(Serialize)]
struct CatalogRow {
    #[serde(flatten)]
    info: families::CatalogInfo,
    default_form: String,
    expected: families::Expected,
}

fn run_catalog(format: Format, out: &mut dyn Write) -> i32 {
    let copts = CatalogOptions::default();
    let rows: Vec<CatalogRow> = catalog()
        .into_iter()
        .map(|info| {
            let (_, entry) = instantiate(info.name, &[], &copts).expect("defaults instantiate");
            CatalogRow {
                default_form: entry.form,
                expected: entry.expected,
                info,
            }
        })
        .collect();
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&rows).expect("catalog serializes") + "\n",
        Format::Text => {
            let mut s = String::new();
            for r in &rows {
                s.push_str(&format!("{} ({}): {}\n", r.info.name, r.info.source, r.info.description));
                for p in &r.info.params {
                    s.push_str(&format!("  param {}: {} (default {})\n", p.name, p.domain, p.default));
                }
                s.push_str(&format!("  equation: {}\n", r.info.equation));
                let v = serde_json::to_value(&r.expected).expect("serializes");
                let mut e = String::new();
                crate::report::render_text(&strip_empty(v), 2, &mut e);
                if !e.is_empty() {
                    s.push_str("  expected:\n");
                    s.push_str(&e);
                }
            }
            s
        }
    };
    let _ = out.write_all(text.as_bytes());
    EXIT_OK
}

/// Drops nulls and empty arrays from an object.
fn strip_empty(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match v {
        Value::Object(m) => Value::Object(
            m.into_iter()
                .filter(|(_, x)| !x.is_null() && !x.as_array().is_some_and(|a| a.is_empty()))
                .map(|(k, x)| (k, strip_empty(x)))
                .collect(),
        ),
        Value::Array(a) => Value::Array(a.into_iter().map(strip_empty).collect()),
        other => other,
    }
}
