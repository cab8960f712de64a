use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nonlocal_core::chsh::{bisect_violation_root, tsirelson_settings, violation_threshold};
use nonlocal_core::lhv::{
    is_local_facets, is_local_lp, DeterministicStrategy, LocalityVerdict, DEFAULT_TOLERANCE,
};
use nonlocal_core::scan::{noise_grid, GapInterval, ScanRecord};
use nonlocal_core::sequential::{condition_on_first, SequentialJointDistribution, IN};
use nonlocal_core::Error as ModelError;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::format::{render, sig12, to_json, CsvRow, Format};
use crate::sampling::{sample_runs, seeded_rng, PRNG_NAME};
use crate::table_io::{read_table, render_table};

/// Exit code for a nonlocal verdict.
pub const EXIT_NONLOCAL: i32 = 3;

/// Bracket width at which the threshold bisection stops.
pub const BISECTION_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "nonlocal",
    version,
    about = "Noise thresholds, gap regions and local-polytope checks for post-selected CHSH tests"
)]
pub struct RunConfig {
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    /// Feasibility tolerance of the local-polytope test.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Classify every (N, F) grid point.
    Scan(ScanArgs),
    /// Closed-form threshold N/(N+c) next to the bisection root of S = 2.
    Threshold(DimsArgs),
    /// The entangled-but-not-violating interval [N/(N+c), N/(N+1)).
    Gap(DimsArgs),
    /// Decide whether a behavior table file admits a local model.
    LhvCheck(LhvCheckArgs),
    /// Monte Carlo run of the two-stage experiment.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,100")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub f_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub f_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub f_step: f64,
}

#[derive(Debug, Clone, Args)]
pub struct DimsArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,8,16,100")]
    pub dims: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    /// Linear-programming membership with a mixture certificate.
    Lp,
    /// The eight CHSH facets; falls back to LP for signaling tables.
    Facets,
}

#[derive(Debug, Clone, Args)]
pub struct LhvCheckArgs {
    /// Behavior table file.
    pub table: PathBuf,
    #[arg(long, value_enum, default_value = "lp")]
    pub method: Method,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long = "dim", default_value_t = 2)]
    pub n: usize,
    #[arg(long = "noise", default_value_t = 0.0)]
    pub f: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub count: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also write the empirical (in, in) table in behavior-table format.
    #[arg(long, value_name = "PATH")]
    pub table_out: Option<PathBuf>,
}

/// Rendered output plus the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub notices: Vec<String>,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome {
            output,
            notices: Vec::new(),
            exit_code: 0,
        }
    }
}

pub fn execute(config: &RunConfig) -> Result<Outcome> {
    if !(config.tol > 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            config.tol
        )));
    }
    match &config.command {
        Command::Scan(args) => cmd_scan(args, config.format).map(Outcome::ok),
        Command::Threshold(args) => cmd_threshold(args, config.format).map(Outcome::ok),
        Command::Gap(args) => cmd_gap(args, config.format).map(Outcome::ok),
        Command::LhvCheck(args) => cmd_lhv_check(args, config.format, config.tol),
        Command::Sample(args) => cmd_sample(args, config.format),
    }
}

fn usage(e: ModelError) -> CliError {
    CliError::Usage(e.to_string())
}

fn checked_dims(dims: &[usize]) -> Result<Vec<usize>> {
    if dims.is_empty() {
        return Err(CliError::Usage(
            "--dims needs at least one dimension".into(),
        ));
    }
    if let Some(&n) = dims.iter().find(|&&n| n < 2) {
        return Err(usage(ModelError::InvalidDimension(n)));
    }
    Ok(dims.to_vec())
}

#[derive(Debug, Serialize)]
pub struct ScanRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub violates: bool,
    pub threshold: f64,
    pub separable: bool,
    pub gap: bool,
    pub success_prob: f64,
}

impl From<ScanRecord> for ScanRow {
    fn from(r: ScanRecord) -> Self {
        ScanRow {
            n: r.n,
            f: r.f,
            s: r.s,
            violates: r.violates,
            threshold: r.threshold,
            separable: r.separable,
            gap: r.gap,
            success_prob: r.success_prob,
        }
    }
}

impl CsvRow for ScanRow {
    fn header() -> &'static str {
        "N,F,S,violates,threshold,separable,gap,success_prob"
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            sig12(self.f),
            sig12(self.s),
            self.violates.to_string(),
            sig12(self.threshold),
            self.separable.to_string(),
            self.gap.to_string(),
            sig12(self.success_prob),
        ]
    }
}

pub fn scan_records(args: &ScanArgs) -> Result<Vec<ScanRecord>> {
    let mut dims = checked_dims(&args.dims)?;
    dims.sort_unstable();
    dims.dedup();
    let grid = noise_grid(args.f_min, args.f_max, args.f_step).map_err(usage)?;
    let mut records = Vec::with_capacity(dims.len() * grid.len());
    for &n in &dims {
        for &f in &grid {
            records.push(ScanRecord::evaluate(n, f)?);
        }
    }
    Ok(records)
}

pub fn cmd_scan(args: &ScanArgs, format: Format) -> Result<String> {
    let rows: Vec<ScanRow> = scan_records(args)?.into_iter().map(ScanRow::from).collect();
    render(&rows, format, &[])
}

#[derive(Debug, Serialize)]
pub struct ThresholdRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub threshold: f64,
    pub bisection_root: f64,
    pub abs_diff: f64,
}

impl CsvRow for ThresholdRow {
    fn header() -> &'static str {
        "N,threshold,bisection_root,abs_diff"
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            sig12(self.threshold),
            sig12(self.bisection_root),
            sig12(self.abs_diff),
        ]
    }
}

pub fn threshold_rows(args: &DimsArgs) -> Result<Vec<ThresholdRow>> {
    checked_dims(&args.dims)?
        .into_iter()
        .map(|n| {
            let threshold = violation_threshold(n)?;
            let bisection_root = bisect_violation_root(n, BISECTION_TOLERANCE)?;
            Ok(ThresholdRow {
                n,
                threshold,
                bisection_root,
                abs_diff: (threshold - bisection_root).abs(),
            })
        })
        .collect()
}

pub fn cmd_threshold(args: &DimsArgs, format: Format) -> Result<String> {
    let comment = format!("c = 2/(sqrt(2)-1) = {}", sig12(nonlocal_core::CHSH_C));
    render(&threshold_rows(args)?, format, &[comment])
}

#[derive(Debug, Serialize)]
pub struct GapRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
}

impl CsvRow for GapRow {
    fn header() -> &'static str {
        "N,lower,upper,width"
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            sig12(self.lower),
            sig12(self.upper),
            sig12(self.width),
        ]
    }
}

pub fn gap_rows(args: &DimsArgs) -> Result<Vec<GapRow>> {
    checked_dims(&args.dims)?
        .into_iter()
        .map(|n| {
            let g = GapInterval::new(n)?;
            Ok(GapRow {
                n,
                lower: g.lower,
                upper: g.upper,
                width: g.width(),
            })
        })
        .collect()
}

pub fn cmd_gap(args: &DimsArgs, format: Format) -> Result<String> {
    let comment = "entangled but no CHSH violation for lower <= F < upper".to_string();
    render(&gap_rows(args)?, format, &[comment])
}

#[derive(Debug, Serialize)]
struct VerdictReport {
    verdict: &'static str,
    method: &'static str,
    max_facet_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    violated_facet: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<WeightEntry>>,
}

#[derive(Debug, Serialize)]
struct WeightEntry {
    alice: [i8; 2],
    bob: [i8; 2],
    weight: f64,
}

fn signs(outcomes: [usize; 2]) -> [i8; 2] {
    outcomes.map(|o| if o == 0 { 1 } else { -1 })
}

fn lp_report(v: &LocalityVerdict) -> VerdictReport {
    VerdictReport {
        verdict: if v.is_local { "local" } else { "nonlocal" },
        method: "lp",
        max_facet_value: v.max_facet_value,
        violated_facet: v.violated_facet.map(|f| f.to_string()),
        residual: Some(v.residual),
        weights: v.weights.map(|w| {
            DeterministicStrategy::all()
                .iter()
                .zip(w)
                .filter(|(_, q)| *q > 0.0)
                .map(|(s, q)| WeightEntry {
                    alice: signs(s.alice),
                    bob: signs(s.bob),
                    weight: q,
                })
                .collect()
        }),
    }
}

fn render_report(r: &VerdictReport, format: Format) -> Result<String> {
    if format == Format::Json {
        return to_json(r);
    }
    let mut out = String::from("key,value\n");
    out += &format!("verdict,{}\nmethod,{}\n", r.verdict, r.method);
    out += &format!("max_facet_value,{}\n", sig12(r.max_facet_value));
    if let Some(f) = &r.violated_facet {
        out += &format!("violated_facet,{f}\n");
    }
    if let Some(res) = r.residual {
        out += &format!("residual,{}\n", sig12(res));
    }
    for w in r.weights.iter().flatten() {
        out += &format!(
            "weight[a={:+}{:+} b={:+}{:+}],{}\n",
            w.alice[0],
            w.alice[1],
            w.bob[0],
            w.bob[1],
            sig12(w.weight)
        );
    }
    Ok(out)
}

pub fn cmd_lhv_check(args: &LhvCheckArgs, format: Format, tol: f64) -> Result<Outcome> {
    let table = read_table(&args.table)?;
    let mut notices = Vec::new();
    let report = match args.method {
        Method::Facets => match is_local_facets(&table) {
            Ok(local) => VerdictReport {
                verdict: if local { "local" } else { "nonlocal" },
                method: "facets",
                max_facet_value: nonlocal_core::lhv::chsh_facets(&table)
                    .into_iter()
                    .fold(f64::NEG_INFINITY, f64::max),
                violated_facet: None,
                residual: None,
                weights: None,
            },
            Err(e @ ModelError::SignalingTable(_)) => {
                notices.push(format!("{e}; falling back to the LP test"));
                lp_report(&is_local_lp(&table, tol)?)
            }
            Err(e) => return Err(e.into()),
        },
        Method::Lp => lp_report(&is_local_lp(&table, tol)?),
    };
    let exit_code = if report.verdict == "local" {
        0
    } else {
        EXIT_NONLOCAL
    };
    Ok(Outcome {
        output: render_report(&report, format)?,
        notices,
        exit_code,
    })
}

#[derive(Debug, Serialize)]
struct SampleReport {
    prng: &'static str,
    seed: u64,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "F")]
    f: f64,
    count: u64,
    in_in_runs: [u64; 4],
    correlators: [Option<f64>; 4],
    s_empirical: Option<f64>,
    std_error: Option<f64>,
    s_analytic: f64,
    table: [f64; 16],
}

pub fn cmd_sample(args: &SampleArgs, format: Format) -> Result<Outcome> {
    if args.count < 1 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    let settings = tsirelson_settings();
    let joint =
        SequentialJointDistribution::for_noisy_family(args.n, args.f, &settings).map_err(usage)?;
    let s_analytic = condition_on_first(&joint, IN, IN)?.chsh();
    let counts = sample_runs(&joint, args.count, &mut seeded_rng(args.seed));
    let est = counts.chsh_in_in();

    let mut notices = Vec::new();
    if est.s.is_none() {
        notices.push(format!(
            "insufficient data: a setting pair has no (in, in) runs {:?}; S undefined",
            est.branch_runs
        ));
    }
    let report = SampleReport {
        prng: PRNG_NAME,
        seed: args.seed,
        n: args.n,
        f: args.f,
        count: args.count,
        in_in_runs: est.branch_runs,
        correlators: est.correlators,
        s_empirical: est.s,
        std_error: est.std_error,
        s_analytic,
        table: *est.table.as_array(),
    };
    let output = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let opt = |v: Option<f64>| v.map_or("NA".to_string(), sig12);
            let mut out = format!("# prng={} seed={}\n", PRNG_NAME, args.seed);
            for n in &notices {
                out += &format!("# {n}\n");
            }
            out += "N,F,count,in_in_runs,E00,E01,E10,E11,S_empirical,std_error,S_analytic\n";
            out += &format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                args.n,
                sig12(args.f),
                args.count,
                est.branch_runs.iter().sum::<u64>(),
                opt(est.correlators[0]),
                opt(est.correlators[1]),
                opt(est.correlators[2]),
                opt(est.correlators[3]),
                opt(est.s),
                opt(est.std_error),
                sig12(s_analytic),
            );
            out
        }
    };
    if let Some(path) = &args.table_out {
        let text = render_table(est.table.as_array())?;
        std::fs::write(path, text)
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    }
    Ok(Outcome {
        output,
        notices,
        exit_code: 0,
    })
}
