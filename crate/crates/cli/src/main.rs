//! `qensemble`: equivalence curves, trade verdicts, purification regions and
//! tomography simulation from the command line.

mod range;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qensemble::curve::{fmt_sig, CurveValue, EquivalenceCurve, DEFAULT_MARGIN};
use qensemble::purification::{classify_region, purification_curve, RegionVerdict};
use qensemble::qcb::{qcb_curve, DEFAULT_THETA};
use qensemble::qst::qst_curve;
use qensemble::rtp::rtp_curve;
use qensemble::tomography::{
    extract_contour, read_table, simulate_grid, write_table, Metric, SimConfig, SimGrid,
};
use qensemble::verdicts::{all_curves, ambiguity_band, trade_verdict, BandPoint, TradeReport};
use qensemble::Ensemble;

use range::{Pair, Range};

const SCHEMA_VERSION: &str = "1";
const OUT_DIR_VAR: &str = "QENSEMBLE_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "qensemble",
    version,
    about = "Resource equivalence of depolarized ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TaskArg {
    Rtp,
    Qcb,
    Purification,
    Qst,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Infidelity,
    BuresSq,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Infidelity => Metric::Infidelity,
            MetricArg::BuresSq => Metric::BuresSq,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample equivalence curves through a reference ensemble.
    Curve {
        #[arg(long, value_enum)]
        task: TaskArg,
        /// Reference ensemble as N,F.
        #[arg(long = "ref")]
        reference: Pair,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Separation angle of the discrimination pair.
        #[arg(long, default_value_t = DEFAULT_THETA)]
        theta: f64,
        /// Fidelity grid, lo:hi:count[log].
        #[arg(long, default_value = "0.6:1.0:41")]
        g: Range,
        /// Distance kept from singular fidelity boundaries.
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Compare an offered ensemble with a reference on every task.
    Trade {
        #[arg(long = "ref")]
        reference: Pair,
        #[arg(long)]
        offer: Pair,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = DEFAULT_THETA)]
        theta: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Purification region of a query ensemble around a reference.
    Region {
        #[arg(long = "ref")]
        reference: Pair,
        #[arg(long)]
        query: Pair,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Simulate finite-shot tomography over an (n, g) grid.
    Simulate {
        /// Copy counts, rounded to whole numbers.
        #[arg(long)]
        n: Range,
        #[arg(long)]
        g: Range,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Grid file; defaults to grid-<seed>.csv in $QENSEMBLE_OUT_DIR or ".".
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Extract the simulated equivalence curve from a grid file.
    Contour {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long = "ref")]
        reference: Pair,
        #[arg(long, value_enum, default_value = "infidelity")]
        metric: MetricArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

enum Failure {
    Usage(String),
    Io(String),
}

impl Failure {
    fn flag(flag: &str, e: impl std::fmt::Display) -> Self {
        Failure::Usage(format!("{flag}: {e}"))
    }
}

type Outcome = Result<String, Failure>;

#[derive(Serialize)]
struct Record<'a, P: Serialize, T: Serialize> {
    schema_version: &'a str,
    params: P,
    payload: T,
}

fn json<P: Serialize, T: Serialize>(params: P, payload: T) -> Outcome {
    let record = Record {
        schema_version: SCHEMA_VERSION,
        params,
        payload,
    };
    serde_json::to_string_pretty(&record)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Io(e.to_string()))
}

fn metadata<P: Serialize>(command: &str, params: &P) -> Vec<String> {
    vec![
        format!("schema_version={SCHEMA_VERSION}"),
        format!(
            "command={command} params={}",
            serde_json::to_string(params).expect("parameters serialize")
        ),
    ]
}

fn csv_head(lines: &[String]) -> String {
    lines.iter().map(|l| format!("# {l}\n")).collect()
}

fn ensemble(flag: &str, pair: Pair, d: usize) -> Result<Ensemble, Failure> {
    Ensemble::new(pair.n, pair.f, d).map_err(|e| Failure::flag(flag, e))
}

fn value(v: CurveValue) -> String {
    v.to_string()
}

#[derive(Serialize)]
struct CurveParams {
    task: TaskArg,
    reference: Ensemble,
    d: usize,
    theta: f64,
    g: String,
    margin: f64,
}

#[derive(Serialize)]
struct CurvePayload {
    curves: Vec<EquivalenceCurve>,
    #[serde(skip_serializing_if = "Option::is_none")]
    band: Option<Vec<BandPoint>>,
}

fn curve_block(out: &mut String, curve: &EquivalenceCurve) {
    let _ = writeln!(out, "# block={}", curve.task);
    if curve.points.iter().any(|p| p.m == CurveValue::Divergent) {
        let _ = writeln!(
            out,
            "# note: curve truncated within margin {} of the singular boundary; m=inf",
            curve.metadata.margin
        );
    }
    out.push_str("g,m\n");
    for p in &curve.points {
        let _ = writeln!(out, "{},{}", fmt_sig(p.g), value(p.m));
    }
}

fn cmd_curve(
    task: TaskArg,
    reference: Pair,
    d: usize,
    theta: f64,
    g: Range,
    margin: f64,
    format: Format,
) -> Outcome {
    let reference = ensemble("--ref", reference, d)?;
    if !(margin >= 0.0 && margin.is_finite()) {
        return Err(Failure::flag("--margin", "must be a non-negative number"));
    }
    let needs_qubit = !matches!(task, TaskArg::Rtp | TaskArg::Purification);
    if needs_qubit && d != 2 {
        return Err(Failure::flag(
            "--d",
            "this task is defined for qubits only (d = 2)",
        ));
    }
    let grid = g.values();
    let on_g = |e: qensemble::Error| Failure::flag("--g", e);
    let curves = match task {
        TaskArg::Rtp => vec![rtp_curve(&reference, &grid, margin).map_err(on_g)?],
        TaskArg::Qcb => vec![
            qcb_curve(&reference, theta, &grid, margin).map_err(|e| match e {
                qensemble::Error::InvalidAngle(_) | qensemble::Error::DegenerateAngle => {
                    Failure::flag("--theta", e)
                }
                other => on_g(other),
            })?,
        ],
        TaskArg::Purification => vec![purification_curve(&reference, &grid, margin)
            .map_err(|e| Failure::flag("--ref/--g", e))?],
        TaskArg::Qst => vec![qst_curve(&reference, &grid, margin).map_err(on_g)?],
        TaskArg::All => all_curves(&reference, &grid, theta, margin)
            .map_err(|e| Failure::flag("--ref/--g/--theta", e))?,
    };
    let band = if task == TaskArg::All {
        Some(ambiguity_band(&curves).map_err(on_g)?)
    } else {
        None
    };
    let params = CurveParams {
        task,
        reference,
        d,
        theta,
        g: g.to_string(),
        margin,
    };
    match format {
        Format::Json => json(params, CurvePayload { curves, band }),
        Format::Csv => {
            let mut out = csv_head(&metadata("curve", &params));
            for (i, c) in curves.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                curve_block(&mut out, c);
            }
            if let Some(band) = band {
                out.push_str("\n# block=band\ng,m_low,m_high\n");
                for b in band {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        fmt_sig(b.g),
                        value(b.m_low),
                        value(b.m_high)
                    );
                }
            }
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct TradeParams {
    reference: Ensemble,
    offer: Ensemble,
    d: usize,
    theta: f64,
}

fn cmd_trade(reference: Pair, offer: Pair, d: usize, theta: f64, format: Format) -> Outcome {
    let reference = ensemble("--ref", reference, d)?;
    let offer = ensemble("--offer", offer, d)?;
    if d != 2 {
        return Err(Failure::flag(
            "--d",
            "trade compares qubit tasks only (d = 2)",
        ));
    }
    let report: TradeReport = trade_verdict(&reference, &offer, theta)
        .map_err(|e| Failure::flag("--ref/--offer/--theta", e))?;
    let params = TradeParams {
        reference,
        offer,
        d,
        theta,
    };
    match format {
        Format::Json => json(params, report),
        Format::Csv => {
            let mut out = csv_head(&metadata("trade", &params));
            out.push_str("task,verdict,m_required,m_offered\n");
            for (task, c) in &report.per_task {
                let _ = writeln!(
                    out,
                    "{task},{},{},{}",
                    c.verdict,
                    fmt_sig(c.m_required),
                    fmt_sig(c.m_offered)
                );
            }
            out.push_str("\noverall,indifferent,region,strength,purification_copies\n");
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                report.overall,
                report.indifferent,
                report.region.region,
                report.region.strength,
                fmt_sig(report.purification_copies)
            );
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct RegionParams {
    reference: Ensemble,
    query: Ensemble,
}

fn cmd_region(reference: Pair, query: Pair, d: usize, format: Format) -> Outcome {
    let reference = ensemble("--ref", reference, d)?;
    let query = ensemble("--query", query, d)?;
    let verdict: RegionVerdict =
        classify_region(&reference, &query).map_err(|e| Failure::flag("--ref/--query", e))?;
    let params = RegionParams { reference, query };
    match format {
        Format::Json => json(params, verdict),
        Format::Csv => {
            let mut out = csv_head(&metadata("region", &params));
            out.push_str("region,strength,m_equals_n,g_equals_f,on_separation,separation_m\n");
            let b = verdict.on_boundary;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                verdict.region,
                verdict.strength,
                b.m_equals_n,
                b.g_equals_f,
                b.on_separation,
                fmt_sig(verdict.separation_m)
            );
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct SimulateParams {
    n: Vec<u64>,
    g: Vec<f64>,
    trials: usize,
    seed: u64,
    shot_split: &'static str,
}

#[derive(Serialize)]
struct SimulateSummary {
    path: String,
    rows: usize,
    shape: [usize; 2],
    seed: u64,
    runtime_seconds: f64,
}

fn default_out(seed: u64) -> PathBuf {
    let dir = std::env::var_os(OUT_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    dir.join(format!("grid-{seed}.csv"))
}

fn run_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match threads {
        None => Ok(job()),
        Some(0) => Err(Failure::flag("--threads", "must be at least 1")),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map(|pool| pool.install(job))
            .map_err(|e| Failure::flag("--threads", e)),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    n: Range,
    g: Range,
    trials: usize,
    seed: u64,
    out: Option<PathBuf>,
    threads: Option<usize>,
    format: Format,
) -> Outcome {
    let n_grid = n.counts().map_err(|e| Failure::flag("--n", e))?;
    let config = SimConfig::new(n_grid, g.values(), trials, seed);
    config
        .validate()
        .map_err(|e| Failure::flag("--n/--g/--trials", e))?;
    let path = out.unwrap_or_else(|| default_out(seed));
    let params = SimulateParams {
        n: config.n_grid.clone(),
        g: config.g_grid.clone(),
        trials,
        seed,
        shot_split: config.shot_split.name(),
    };

    let start = Instant::now();
    let grid: SimGrid = run_pool(threads, || simulate_grid(&config))?
        .map_err(|e| Failure::flag("--n/--g/--trials", e))?;
    let runtime = start.elapsed().as_secs_f64();

    let mut meta = metadata("simulate", &params);
    meta.push(format!("seed={seed}"));
    std::fs::write(&path, write_table(&grid, &meta))
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;

    let summary = SimulateSummary {
        path: path.display().to_string(),
        rows: grid.cells.len(),
        shape: [grid.n_grid.len(), grid.g_grid.len()],
        seed,
        runtime_seconds: runtime,
    };
    match format {
        Format::Json => json(params, summary),
        Format::Csv => {
            let mut out = csv_head(&metadata("simulate", &params));
            out.push_str("path,rows,n_points,g_points,seed,runtime_seconds\n");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.3}",
                summary.path, summary.rows, summary.shape[0], summary.shape[1], seed, runtime
            );
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct ContourParams {
    grid: String,
    reference: Ensemble,
    metric: &'static str,
}

fn read_grid(path: &Path) -> Result<SimGrid, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    read_table(&text).map_err(|e| Failure::flag("--grid", e))
}

fn cmd_contour(grid_path: PathBuf, reference: Pair, metric: MetricArg, format: Format) -> Outcome {
    let reference = ensemble("--ref", reference, 2)?;
    let grid = read_grid(&grid_path)?;
    let metric = Metric::from(metric);
    let curve =
        extract_contour(&grid, &reference, metric).map_err(|e| Failure::flag("--ref", e))?;
    let params = ContourParams {
        grid: grid_path.display().to_string(),
        reference,
        metric: metric.name(),
    };
    match format {
        Format::Json => json(params, curve),
        Format::Csv => {
            let mut out = csv_head(&metadata("contour", &params));
            curve_block(&mut out, &curve);
            Ok(out)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Curve {
            task,
            reference,
            d,
            theta,
            g,
            margin,
            format,
        } => cmd_curve(task, reference, d, theta, g, margin, format),
        Command::Trade {
            reference,
            offer,
            d,
            theta,
            format,
        } => cmd_trade(reference, offer, d, theta, format),
        Command::Region {
            reference,
            query,
            d,
            format,
        } => cmd_region(reference, query, d, format),
        Command::Simulate {
            n,
            g,
            trials,
            seed,
            out,
            threads,
            format,
        } => cmd_simulate(n, g, trials, seed, out, threads, format),
        Command::Contour {
            grid,
            reference,
            metric,
            format,
        } => cmd_contour(grid, reference, metric, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
