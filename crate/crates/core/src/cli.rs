//! Command-line front end.
//!
//! Reports go to stdout as JSON, tables to `--out` as CSV (or to stdout when
//! `--out` is absent). Errors are a single JSON line on stderr.
//!
//! Exit codes: 0 success, 2 input or computation error, 3 discrepancy under
//! `--strict`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::closed_form::{resonant_peak_frequency, smib_norms, NormResult};
use crate::error::{Error, Result};
use crate::grid::{Grid, Spacing};
use crate::metrics::{eigen_analysis, EigenAnalysis, MetricsReport};
use crate::network::{build_laplacian, parse_network, parse_network_str, spec_hash, spectrum, NetworkSpec};
use crate::oracles::{bode_table, bode_table_modal, BodeRow, DEFAULT_REL_TOL};
use crate::sweeps::{
    combined_sweep, combined_table, configure_threads, norm_sweep, root_locus, root_locus_table, sweep_table,
    SweepParameter, SweepPlan, SweepRow,
};
use crate::system::{OutputKind, SwingModel};
use crate::table::{fmt_num, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DISCREPANCY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "swingbench", version, about = "Stability metrics of linearized swing dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Poles, damping ratios and norms for several outputs.
    Analyze {
        #[command(flatten)]
        net: NetArg,
        /// Output kinds; repeatable.
        #[arg(long = "output", default_values = ["phase", "frequency"])]
        outputs: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
        #[command(flatten)]
        gate: Gate,
    },
    /// Closed-form and oracle norms for one output.
    Norms {
        #[command(flatten)]
        net: NetArg,
        #[arg(long, default_value = "phase")]
        output: String,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
        #[command(flatten)]
        gate: Gate,
    },
    /// Largest singular value over a log frequency grid.
    Bode {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "phase")]
        output: String,
        #[arg(long, default_value_t = 1e-2)]
        omega_min: f64,
        #[arg(long, default_value_t = 1e2)]
        omega_max: f64,
        #[arg(long, default_value_t = 400)]
        points: usize,
        /// Evaluate through the modal subsystems instead of the dense
        /// realization.
        #[arg(long)]
        modal: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form poles as a function of inertia.
    Rootlocus {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1e-2)]
        m_min: f64,
        #[arg(long, default_value_t = 1e2)]
        m_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, value_enum, default_value = "log")]
        spacing: SpacingArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Norms over an inertia or damping grid.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// `M` or `D`.
        #[arg(long, default_value = "M")]
        param: String,
        #[arg(long, default_value_t = 1e-2)]
        min: f64,
        #[arg(long, default_value_t = 1e1)]
        max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, value_enum, default_value = "log")]
        spacing: SpacingArg,
        #[arg(long, default_value = "phase")]
        output: String,
        /// Evaluate oracles on every k-th grid point only.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Do not insert the H-infinity regime boundary into the grid.
        #[arg(long)]
        no_kink: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        gate: Gate,
    },
    /// Oracle norms of the combined phase/frequency output over inertia.
    Combined {
        #[command(flatten)]
        net: NetArg,
        /// Defaults to the network's `kappa`.
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long, default_value_t = 1e-1)]
        m_min: f64,
        #[arg(long, default_value_t = 1e1)]
        m_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single machine against an infinite bus.
    Smib {
        #[arg(long = "M")]
        inertia: f64,
        #[arg(long = "D")]
        damping: f64,
        #[arg(long = "B")]
        b: f64,
        #[arg(long, default_value = "phase")]
        output: String,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
        #[command(flatten)]
        gate: Gate,
    },
    /// Parse and validate a network description.
    Validate {
        #[command(flatten)]
        net: NetArg,
    },
}

#[derive(Debug, Args)]
pub struct NetArg {
    /// Network JSON file, or inline JSON starting with `{`.
    #[arg(long)]
    pub net: String,
}

/// A network (`--net`, optionally overriding `--M`/`--D`) or a single
/// machine (`--M --D --B`).
#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub net: Option<String>,
    #[arg(long = "M")]
    pub inertia: Option<f64>,
    #[arg(long = "D")]
    pub damping: Option<f64>,
    #[arg(long = "B")]
    pub b: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Gate {
    /// Exit 3 if any closed-form value disagrees with its oracle.
    #[arg(long)]
    pub strict: bool,
    /// With `--strict`, ignore the documented phase H2 discrepancy.
    #[arg(long)]
    pub allow_known_discrepancies: bool,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum SpacingArg {
    Log,
    Linear,
}

impl From<SpacingArg> for Spacing {
    fn from(s: SpacingArg) -> Self {
        match s {
            SpacingArg::Log => Spacing::Log,
            SpacingArg::Linear => Spacing::Linear,
        }
    }
}

#[derive(Debug, Serialize)]
struct ErrorLine<'a> {
    kind: &'a str,
    message: String,
}

/// Parameters of the analyzed model, echoed in every report.
#[derive(Debug, Clone, Serialize)]
pub struct InputEcho {
    pub model: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec_hash: Option<String>,
    pub n: usize,
    pub inertia: f64,
    pub damping: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    pub lambda_2: f64,
}

struct Loaded {
    model: SwingModel,
    spec: Option<NetworkSpec>,
    echo: InputEcho,
}

fn load_spec(net: &str) -> Result<NetworkSpec> {
    if net.trim_start().starts_with('{') {
        parse_network_str(net)
    } else {
        parse_network(std::path::Path::new(net))
    }
}

fn network_echo(spec: &NetworkSpec, model: &SwingModel) -> InputEcho {
    InputEcho {
        model: "network",
        spec_hash: Some(spec_hash(spec)),
        n: spec.n(),
        inertia: spec.inertia(),
        damping: spec.damping(),
        kappa: Some(spec.kappa()),
        b: None,
        lambda_2: model.governing_lambda(),
    }
}

fn load_network(net: &str) -> Result<Loaded> {
    let spec = load_spec(net)?;
    let model = SwingModel::from_network(&spec)?;
    Ok(Loaded { echo: network_echo(&spec, &model), model, spec: Some(spec) })
}

fn load_smib(m: f64, d: f64, b: f64) -> Result<Loaded> {
    let model = SwingModel::smib(m, d, b)?;
    let echo = InputEcho {
        model: "smib",
        spec_hash: None,
        n: 1,
        inertia: m,
        damping: d,
        kappa: None,
        b: Some(b),
        lambda_2: b,
    };
    Ok(Loaded { model, spec: None, echo })
}

fn load_model(args: &ModelArgs) -> Result<Loaded> {
    match (&args.net, args.b) {
        (Some(_), Some(_)) => Err(Error::InvalidArgument("--B applies to single-machine models only; drop it or --net".into())),
        (Some(net), None) => {
            let spec = load_spec(net)?;
            let spec = spec.with_params(args.inertia.unwrap_or(spec.inertia()), args.damping.unwrap_or(spec.damping()))?;
            let model = SwingModel::from_network(&spec)?;
            Ok(Loaded { echo: network_echo(&spec, &model), model, spec: Some(spec) })
        }
        (None, Some(b)) => {
            let m = args.inertia.ok_or_else(|| Error::InvalidArgument("single-machine model needs --M".into()))?;
            let d = args.damping.ok_or_else(|| Error::InvalidArgument("single-machine model needs --D".into()))?;
            load_smib(m, d, b)
        }
        (None, None) => Err(Error::InvalidArgument("need --net, or --M/--D/--B for a single machine".into())),
    }
}

/// `combined` without an explicit weight takes the network's `kappa`.
fn parse_output(s: &str, loaded: &Loaded) -> Result<OutputKind> {
    let kind: OutputKind = s.parse()?;
    if s == "combined" {
        if let Some(spec) = &loaded.spec {
            return Ok(OutputKind::Combined { kappa: spec.kappa() });
        }
    }
    if loaded.spec.is_none() && matches!(kind, OutputKind::EdgePhase | OutputKind::Combined { .. }) {
        return Err(Error::InvalidArgument(format!("output `{s}` needs a network model")));
    }
    Ok(kind)
}

#[derive(Debug, Serialize)]
struct NormsReport {
    input: InputEcho,
    #[serde(flatten)]
    metrics: MetricsReport,
    discrepancy: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    artifacts: Vec<String>,
}

#[derive(Debug, Serialize)]
struct SmibSummary {
    h2: f64,
    hinf: f64,
    omega_peak: f64,
    zeta: f64,
    h2_closed: NormResult,
    hinf_closed: NormResult,
}

#[derive(Debug, Serialize)]
struct SmibReport {
    input: InputEcho,
    output: OutputKind,
    #[serde(flatten)]
    summary: SmibSummary,
    eigen: EigenAnalysis,
    norms: MetricsReport,
    discrepancy: bool,
}

#[derive(Debug, Serialize)]
struct TableReport {
    command: &'static str,
    input: InputEcho,
    columns: Vec<&'static str>,
    rows: usize,
    artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepSummary>,
}

/// Closed-form/oracle agreement over the rows of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub rows_with_oracle: usize,
    pub discrepancies: usize,
    pub known_discrepancies: usize,
}

fn summarize_sweep(rows: &[SweepRow]) -> SweepSummary {
    let mut s = SweepSummary { rows_with_oracle: 0, discrepancies: 0, known_discrepancies: 0 };
    let mut check = |closed: Option<f64>, derived: Option<f64>, oracle: Option<f64>, tol: Option<f64>| {
        if let (Some(c), Some(o), Some(t)) = (closed, oracle, tol) {
            if (c - o).abs() > 10.0 * t {
                s.discrepancies += 1;
                if derived.is_some_and(|d| (d - o).abs() <= 10.0 * t) {
                    s.known_discrepancies += 1;
                }
            }
        }
    };
    for r in rows {
        check(r.h2_closed, r.h2_derived, r.h2_oracle, r.h2_oracle_tolerance);
        check(r.hinf_closed, None, r.hinf_oracle, r.hinf_oracle_tolerance);
    }
    s.rows_with_oracle = rows.iter().filter(|r| r.oracle_evaluated).count();
    s
}

fn bode_csv(rows: &[BodeRow]) -> Table {
    let mut t = Table::new(vec!["omega", "sigma_max"]);
    for r in rows {
        t.push(vec![fmt_num(r.omega), fmt_num(r.sigma_max)]);
    }
    t
}

struct Outcome {
    stdout: String,
    exit: i32,
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn gate_exit(gate: &Gate, discrepancy_any: bool, discrepancy_unknown: bool) -> i32 {
    let fires = if gate.allow_known_discrepancies { discrepancy_unknown } else { discrepancy_any };
    if gate.strict && fires {
        EXIT_DISCREPANCY
    } else {
        EXIT_OK
    }
}

fn emit_table(command: &'static str, input: InputEcho, table: Table, out: Option<PathBuf>, sweep: Option<SweepSummary>) -> Result<String> {
    match out {
        Some(path) => {
            table.write_atomic(&path)?;
            Ok(json(&TableReport {
                command,
                input,
                columns: table.header.clone(),
                rows: table.rows.len(),
                artifacts: vec![path.display().to_string()],
                sweep,
            }))
        }
        None => Ok(table.to_csv()),
    }
}

fn execute(command: Command) -> Result<Outcome> {
    configure_threads()?;
    match command {
        Command::Analyze { net, outputs, rel_tol, gate } => {
            let loaded = load_network(&net.net)?;
            let kinds = outputs.iter().map(|o| parse_output(o, &loaded)).collect::<Result<Vec<_>>>()?;
            norms_outcome(loaded, &kinds, rel_tol, &gate)
        }
        Command::Norms { net, output, rel_tol, gate } => {
            let loaded = load_network(&net.net)?;
            let kind = parse_output(&output, &loaded)?;
            norms_outcome(loaded, &[kind], rel_tol, &gate)
        }
        Command::Smib { inertia, damping, b, output, rel_tol, gate } => {
            let loaded = load_smib(inertia, damping, b)?;
            let kind = parse_output(&output, &loaded)?;
            let metrics = MetricsReport::compute(&loaded.model, &[kind], rel_tol)?;
            let (h2_closed, hinf_closed) = match kind {
                OutputKind::Frequency => crate::closed_form::frequency_output_norms(1, inertia, damping),
                _ => smib_norms(inertia, damping, b)?,
            };
            let omega_peak = match kind {
                OutputKind::Frequency => (b / inertia).sqrt(),
                _ => resonant_peak_frequency(inertia, damping, b),
            };
            let summary = SmibSummary {
                h2: h2_closed.value,
                hinf: hinf_closed.value,
                omega_peak,
                zeta: damping / (2.0 * (inertia * b).sqrt()),
                h2_closed,
                hinf_closed,
            };
            let exit = gate_exit(&gate, metrics.has_discrepancy(false), metrics.has_discrepancy(true));
            let report = SmibReport {
                eigen: eigen_analysis(&loaded.model),
                input: loaded.echo,
                output: kind,
                summary,
                discrepancy: metrics.has_discrepancy(false),
                norms: metrics,
            };
            Ok(Outcome { stdout: json(&report), exit })
        }
        Command::Bode { model, output, omega_min, omega_max, points, modal, out } => {
            let loaded = load_model(&model)?;
            let kind = parse_output(&output, &loaded)?;
            let rows = if modal {
                bode_table_modal(&loaded.model, kind, omega_min, omega_max, points)?
            } else {
                bode_table(&loaded.model, kind, omega_min, omega_max, points)?
            };
            Ok(Outcome { stdout: emit_table("bode", loaded.echo, bode_csv(&rows), out, None)?, exit: EXIT_OK })
        }
        Command::Rootlocus { model, m_min, m_max, points, spacing, out } => {
            let loaded = load_model(&model)?;
            let grid = Grid { min: m_min, max: m_max, points, spacing: spacing.into() };
            let rows = root_locus(&loaded.model, &grid)?;
            Ok(Outcome { stdout: emit_table("rootlocus", loaded.echo, root_locus_table(&rows), out, None)?, exit: EXIT_OK })
        }
        Command::Sweep { model, param, min, max, points, spacing, output, stride, no_kink, out, gate } => {
            let loaded = load_model(&model)?;
            let kind = parse_output(&output, &loaded)?;
            let parameter: SweepParameter = param.parse()?;
            let grid = Grid { min, max, points, spacing: spacing.into() };
            let mut plan = SweepPlan::new(loaded.model.clone(), parameter, grid, kind);
            plan.oracle_stride = stride;
            plan.insert_kink = !no_kink;
            let rows = norm_sweep(&plan)?;
            let summary = summarize_sweep(&rows);
            let exit = gate_exit(&gate, summary.discrepancies > 0, summary.discrepancies > summary.known_discrepancies);
            let stdout = emit_table("sweep", loaded.echo, sweep_table(&rows), out, Some(summary))?;
            Ok(Outcome { stdout, exit })
        }
        Command::Combined { net, kappa, m_min, m_max, points, out } => {
            let loaded = load_network(&net.net)?;
            let kappa = kappa.unwrap_or(loaded.echo.kappa.unwrap_or(1.0));
            let grid = Grid::log(m_min, m_max, points)?;
            let rows = combined_sweep(&loaded.model, kappa, &grid)?;
            Ok(Outcome { stdout: emit_table("combined", loaded.echo, combined_table(&rows), out, None)?, exit: EXIT_OK })
        }
        Command::Validate { net } => {
            let spec = load_spec(&net.net)?;
            let s = spectrum(&build_laplacian(&spec))?;
            #[derive(Serialize)]
            struct Valid {
                valid: bool,
                spec_hash: String,
                n: usize,
                edges: usize,
                lambda_2: f64,
                lambda_max: f64,
            }
            let v = Valid {
                valid: true,
                spec_hash: spec_hash(&spec),
                n: spec.n(),
                edges: spec.edges().len(),
                lambda_2: s.lambda2(),
                lambda_max: s.lambda_max(),
            };
            Ok(Outcome { stdout: json(&v), exit: EXIT_OK })
        }
    }
}

fn norms_outcome(loaded: Loaded, kinds: &[OutputKind], rel_tol: f64, gate: &Gate) -> Result<Outcome> {
    let metrics = MetricsReport::compute(&loaded.model, kinds, rel_tol)?;
    let exit = gate_exit(gate, metrics.has_discrepancy(false), metrics.has_discrepancy(true));
    let report = NormsReport {
        input: loaded.echo,
        discrepancy: metrics.has_discrepancy(false),
        metrics,
        artifacts: Vec::new(),
    };
    Ok(Outcome { stdout: json(&report), exit })
}

fn error_line(kind: &str, message: String) -> String {
    let mut s = serde_json::to_string(&ErrorLine { kind, message: message.replace('\n', " ") })
        .expect("error line serializes");
    s.push('\n');
    s
}

/// Runs one command line. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            let _ = stderr.write_all(error_line("UsageError", first).as_bytes());
            return EXIT_INPUT;
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            if outcome.exit == EXIT_DISCREPANCY {
                let _ = stderr.write_all(
                    error_line("Discrepancy", "closed-form value disagrees with oracle beyond 10x tolerance".into())
                        .as_bytes(),
                );
            }
            outcome.exit
        }
        Err(e) => {
            let _ = stderr.write_all(error_line(e.kind(), e.to_string()).as_bytes());
            EXIT_INPUT
        }
    }
}
