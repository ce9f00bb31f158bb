//! Command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::body::BodySpec;
use crate::certify::{sandwich, witness_certificate, Sandwich};
use crate::error::VeinError;
use crate::lower::spherical::{g_domain, h_case_n5};
use crate::lower::{
    cap_area_bound, g_case_c, h_min, jensen2d_bound, lemma_func_checks, simplex_bound, BoundCertificate, LemmaReport,
};
use crate::mvee::VolumeOptions;
use crate::search::{vein_upper, SearchConfig, SearchResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

pub const CONSTANT_TOL: f64 = 5e-4;
pub const DEFAULT_GRID_STEP: f64 = 0.01;

/// Published values, as printed (four decimals).
const PUBLISHED_G: [((usize, usize), f64); 14] = [
    ((0, 7), 10.9168),
    ((1, 7), 10.8422),
    ((2, 7), 10.8426),
    ((3, 7), 11.0201),
    ((4, 7), 11.7828),
    ((5, 7), 18.3370),
    ((0, 6), 10.3923),
    ((1, 6), 10.4034),
    ((2, 6), 10.6206),
    ((3, 6), 11.5561),
    ((4, 6), 21.2948),
    ((1, 5), 10.6302),
    ((2, 5), 11.8680),
    ((3, 5), 28.1356),
];
const PUBLISHED_H_MIN: f64 = 10.5618;
const PUBLISHED_JENSEN_4: f64 = 5.6568;
const PUBLISHED_SIMPLEX_3: f64 = 12.0;
const PUBLISHED_CAP_8: f64 = 10.6667;
const PUBLISHED_ARCCOS_EIGHTH: f64 = 1.4454;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "vein", version, about = "Bounds and certificates for the vertex index of symmetric convex bodies")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Tolerance for the command's checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Root directory for run records.
    #[arg(long, global = true, default_value = "runs")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recompute the tabulated constants and compare with the published values.
    VerifyConstants,
    /// All applicable lower bounds plus the closed-form witness.
    Bounds { body_file: PathBuf },
    /// Constrained search for an upper bound.
    Search {
        body_file: PathBuf,
        /// Vertex count (lower end of the range with --n-max).
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        max_iters: usize,
    },
    /// Grid checks of the monotonicity and convexity claims on f.
    LemmaChecks {
        #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
        grid_step: f64,
    },
    /// Numeric tables: g(m, n), h(a), polygon and cap bounds.
    Tables,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyConstants => "verify-constants",
            Command::Bounds { .. } => "bounds",
            Command::Search { .. } => "search",
            Command::LemmaChecks { .. } => "lemma-checks",
            Command::Tables => "tables",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub body: Option<BodySpec>,
    pub seed: u64,
    pub certificates: Vec<BoundCertificate>,
    pub search: Option<SearchResult>,
    pub timestamp: String,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub name: String,
    pub computed: f64,
    pub paper_value: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub artifact: Option<PathBuf>,
}

impl Outcome {
    fn input_error(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            artifact: None,
        }
    }
}

pub fn constant_rows() -> Vec<ConstantRow> {
    let mut rows = Vec::new();
    let mut push = |name: String, computed: f64, paper_value: f64| {
        rows.push(ConstantRow {
            name,
            computed,
            paper_value,
            abs_error: (computed - paper_value).abs(),
        })
    };
    for ((m, n), v) in PUBLISHED_G {
        push(format!("g({m},{n})"), g_case_c(m, n).expect("tabulated pair"), v);
    }
    push("h_min".into(), h_min().value, PUBLISHED_H_MIN);
    push("jensen2d(4)".into(), jensen2d_bound(4).unwrap(), PUBLISHED_JENSEN_4);
    push("simplex_bound(3)".into(), simplex_bound(3).unwrap(), PUBLISHED_SIMPLEX_3);
    push("cap_area_bound(8)".into(), cap_area_bound(8).unwrap(), PUBLISHED_CAP_8);
    push("arccos(1/8)".into(), (1.0f64 / 8.0).acos(), PUBLISHED_ARCCOS_EIGHTH);
    rows
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn record(cli: &Cli, body: Option<BodySpec>, certificates: Vec<BoundCertificate>, search: Option<SearchResult>) -> RunRecord {
    RunRecord {
        command: cli.command.name().to_string(),
        body,
        seed: cli.seed,
        certificates,
        search,
        timestamp: timestamp(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn persist(out: &Path, command: &str, seed: u64, ext: &str, payload: &str) -> std::io::Result<PathBuf> {
    let dir = out.join(chrono::Utc::now().format("%Y-%m-%d").to_string());
    fs::create_dir_all(&dir)?;
    let path = dir.join(format!("{command}-{seed}.{ext}"));
    fs::write(&path, payload)?;
    Ok(path)
}

fn read_body(path: &Path) -> Result<BodySpec, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let body: BodySpec =
        serde_json::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", path.display()))?;
    body.validate().map_err(|e| e.to_string())?;
    Ok(body)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn body_label(body: &BodySpec) -> String {
    match body {
        BodySpec::LpBall { p, dim } => {
            if p.is_infinite() {
                format!("B_inf^{dim}")
            } else {
                format!("B_{}^{dim}", p.value())
            }
        }
        BodySpec::Ellipsoid { matrix } => format!("ellipsoid^{}", matrix.len()),
        BodySpec::SymPolytope { generators } => {
            format!("sym_polytope({} generators)^{}", generators.len(), body.dim())
        }
    }
}

/// Runs a parsed command. Files are written under `cli.out`.
pub fn run(cli: &Cli) -> Outcome {
    let tol = cli.tol;
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Outcome::input_error(format!("--tol must be positive, got {t}"));
        }
    }
    let result = match &cli.command {
        Command::VerifyConstants => verify_constants(cli, tol.unwrap_or(CONSTANT_TOL)),
        Command::Bounds { body_file } => bounds(cli, body_file, tol.unwrap_or(1e-6)),
        Command::Search {
            body_file,
            n,
            n_max,
            restarts,
            max_iters,
        } => search(cli, body_file, *n, n_max.unwrap_or(*n), *restarts, *max_iters, tol.unwrap_or(1e-9)),
        Command::LemmaChecks { grid_step } => lemma_checks(cli, *grid_step),
        Command::Tables => tables(cli),
    };
    result.unwrap_or_else(Outcome::input_error)
}

fn finish(cli: &Cli, code: i32, stdout: String, stderr: String, ext: &str, payload: &str) -> Result<Outcome, String> {
    let path = persist(&cli.out, cli.command.name(), cli.seed, ext, payload)
        .map_err(|e| format!("cannot write run record under {}: {e}", cli.out.display()))?;
    Ok(Outcome {
        code,
        stdout,
        stderr,
        artifact: Some(path),
    })
}

fn verify_constants(cli: &Cli, tol: f64) -> Result<Outcome, String> {
    let rows = constant_rows();
    let failed: Vec<&ConstantRow> = rows.iter().filter(|r| !(r.abs_error < tol)).collect();
    let payload = match cli.format {
        Format::Csv => {
            let mut s = String::from("name,computed,paper_value,abs_error\n");
            for r in &rows {
                writeln!(s, "{},{},{},{}", csv_field(&r.name), r.computed, r.paper_value, r.abs_error).unwrap();
            }
            s
        }
        Format::Json => to_json(&rows),
    };
    let mut stderr = String::new();
    for r in &failed {
        writeln!(stderr, "mismatch: {} computed {} published {}", r.name, r.computed, r.paper_value).unwrap();
    }
    let code = if failed.is_empty() { EXIT_OK } else { EXIT_MISMATCH };
    let ext = if cli.format == Format::Csv { "csv" } else { "json" };
    finish(cli, code, payload.clone(), stderr, ext, &payload)
}

fn certificate_csv(certs: &[BoundCertificate]) -> String {
    let mut s = String::from("kind,side,value,checked\n");
    for c in certs {
        let kind = serde_json::to_value(c.kind).unwrap();
        let side = serde_json::to_value(c.side).unwrap();
        writeln!(s, "{},{},{},{}", kind.as_str().unwrap(), side.as_str().unwrap(), c.value, c.checked).unwrap();
    }
    s
}

fn bounds(cli: &Cli, body_file: &Path, tol: f64) -> Result<Outcome, String> {
    let body = read_body(body_file)?;
    let opts = VolumeOptions {
        seed: cli.seed,
        ..VolumeOptions::default()
    };
    let Sandwich {
        certificates,
        lower_max,
        upper_min,
        notices,
    } = sandwich(&body, &opts).map_err(|e| e.to_string())?;
    let rec = record(cli, Some(body.clone()), certificates, None);
    let json_payload = to_json(&rec);
    let stdout = match cli.format {
        Format::Csv => {
            let mut s = certificate_csv(&rec.certificates);
            writeln!(s, "# {} ≤ vein({}) ≤ {}", lower_max, body_label(&body), upper_min).unwrap();
            s
        }
        Format::Json => json_payload.clone(),
    };
    let mut stderr: String = notices.iter().map(|n| format!("note: {n}\n")).collect();
    let code = if lower_max <= upper_min + tol {
        EXIT_OK
    } else {
        writeln!(stderr, "inconsistent sandwich: lower {lower_max} > upper {upper_min}").unwrap();
        EXIT_MISMATCH
    };
    finish(cli, code, stdout, stderr, "json", &json_payload)
}

/// CSV row `body,n,objective,margin,seed` for a search result.
pub fn search_csv(body: &BodySpec, r: &SearchResult, seed: u64) -> String {
    format!(
        "body,n,objective,margin,seed\n{},{},{},{},{}\n",
        csv_field(&body_label(body)),
        r.n_vertices(),
        r.objective,
        r.feasibility_margin,
        seed
    )
}

fn search(
    cli: &Cli,
    body_file: &Path,
    n: usize,
    n_max: usize,
    restarts: usize,
    max_iters: usize,
    tol: f64,
) -> Result<Outcome, String> {
    let body = read_body(body_file)?;
    let cfg = SearchConfig {
        restarts,
        max_iters,
        seed: cli.seed,
        containment_tol: tol,
        ..SearchConfig::new(n)
    };
    let r = vein_upper(&body, (n, n_max), &cfg).map_err(|e: VeinError| e.to_string())?;
    let rec = record(cli, Some(body.clone()), vec![witness_certificate(&r)], Some(r.clone()));
    let json_payload = to_json(&rec);
    let stdout = match cli.format {
        Format::Csv => search_csv(&body, &r, cli.seed),
        Format::Json => json_payload.clone(),
    };
    let mode = serde_json::to_value(r.mode).unwrap();
    let mut stderr = format!(
        "objective {} ({}, {}, {} vertices)\n",
        r.objective,
        mode.as_str().unwrap(),
        r.source,
        r.n_vertices()
    );
    if r.budget_exhausted {
        stderr.push_str("note: restart budget exhausted before convergence\n");
    }
    finish(cli, EXIT_OK, stdout, stderr, "json", &json_payload)
}

fn lemma_csv(report: &LemmaReport) -> String {
    let mut s = String::from("item,passed,worst_value,worst_x,worst_y,checked_points\n");
    for it in &report.items {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            csv_field(&it.item),
            it.passed,
            it.worst_value,
            it.worst_point.0,
            it.worst_point.1,
            it.checked_points
        )
        .unwrap();
    }
    s
}

fn lemma_checks(cli: &Cli, grid_step: f64) -> Result<Outcome, String> {
    let report = lemma_func_checks(grid_step).map_err(|e| e.to_string())?;
    let payload = match cli.format {
        Format::Csv => lemma_csv(&report),
        Format::Json => to_json(&report),
    };
    let mut stderr = String::new();
    for it in report.items.iter().filter(|it| !it.passed) {
        writeln!(
            stderr,
            "item ({}) fails: {} = {} at (x, y) = ({}, {})",
            it.item, it.description, it.worst_value, it.worst_point.0, it.worst_point.1
        )
        .unwrap();
    }
    let code = if report.all_passed() { EXIT_OK } else { EXIT_MISMATCH };
    let ext = if cli.format == Format::Csv { "csv" } else { "json" };
    finish(cli, code, payload.clone(), stderr, ext, &payload)
}

/// `(table, label, value)` rows.
pub fn table_rows() -> Vec<(String, String, f64)> {
    let mut rows = Vec::new();
    for (m, n) in g_domain() {
        rows.push(("g".into(), format!("m={m} n={n}"), g_case_c(m, n).unwrap()));
    }
    for k in 0..=11 {
        let a = 0.5 * k as f64;
        rows.push(("h".into(), format!("a={a}"), h_case_n5(a).unwrap()));
    }
    let hm = h_min();
    rows.push(("h_min".into(), format!("a={}", hm.argmin), hm.value));
    for n in 3..=10 {
        rows.push(("jensen2d".into(), format!("n={n}"), jensen2d_bound(n).unwrap()));
    }
    for d in 2..=6 {
        rows.push(("simplex".into(), format!("d={d}"), simplex_bound(d).unwrap()));
    }
    for n in 8..=12 {
        rows.push(("cap_area".into(), format!("n={n}"), cap_area_bound(n).unwrap()));
    }
    rows.push(("exact".into(), "vein(B_2^2)".into(), 4.0 * 2f64.sqrt()));
    rows.push(("exact".into(), "vein(B_2^3)".into(), 6.0 * 3f64.sqrt()));
    for d in 2..=6 {
        rows.push(("exact".into(), format!("vein(B_1^{d})"), 2.0 * d as f64));
    }
    rows
}

fn tables(cli: &Cli) -> Result<Outcome, String> {
    let rows = table_rows();
    let payload = match cli.format {
        Format::Csv => {
            let mut s = String::from("table,label,value\n");
            for (t, l, v) in &rows {
                writeln!(s, "{},{},{}", t, csv_field(l), v).unwrap();
            }
            s
        }
        Format::Json => to_json(
            &rows
                .iter()
                .map(|(t, l, v)| json!({ "table": t, "label": l, "value": v }))
                .collect::<Vec<_>>(),
        ),
    };
    let ext = if cli.format == Format::Csv { "csv" } else { "json" };
    finish(cli, EXIT_OK, payload.clone(), String::new(), ext, &payload)
}

/// Parses `args`, runs the command and prints its output. Returns the exit code.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let out = run(&cli);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match() {
        let rows = constant_rows();
        assert_eq!(rows.len(), 19);
        for r in &rows {
            assert!(r.abs_error < CONSTANT_TOL, "{r:?}");
        }
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("g(0,7)"), "\"g(0,7)\"");
        assert_eq!(csv_field("h_min"), "h_min");
    }
}
