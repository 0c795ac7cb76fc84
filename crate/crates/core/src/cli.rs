//! Command-line front end.
//!
//! Exit codes: 0 success, 1 IO failure, 2 invalid configuration,
//! 3 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::measures;
use crate::scrambler::{Placement, ScrambleConfig, ScrambleError, Scrambler, UpdateMode};
use crate::states::{Family, StateError, StateSpec};
use crate::sweep::{
    self, format_sig, CsvOptions, Execution, ParamGrid, Preset, SvgOptions, SweepError, SweepRecord, TimeGrid,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Read { .. } => CliError::Io(e.to_string()),
            ConfigError::Parse { .. } => CliError::Config(e.to_string()),
        }
    }
}

impl From<StateError> for CliError {
    fn from(e: StateError) -> Self {
        match e {
            StateError::InvalidParameter { .. } | StateError::UnknownFamily(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<ScrambleError> for CliError {
    fn from(e: ScrambleError) -> Self {
        match e {
            ScrambleError::InvalidParameter { .. } | ScrambleError::UnknownOption { .. } => {
                CliError::Config(e.to_string())
            }
            ScrambleError::State(inner) => inner.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Io { .. } => CliError::Io(e.to_string()),
            SweepError::State(inner) => inner.into(),
            SweepError::Scramble(inner) => inner.into(),
            ref other if other.is_configuration() => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<crate::linalg::LinalgError> for CliError {
    fn from(e: crate::linalg::LinalgError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "qscramble", version, about = "Scrambling of qutrit bound entangled states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a state's 9x9 density matrix as CSV (re, im per entry).
    State(StateCmd),
    /// Negativity, CCNR and classification of a state, optionally scrambled.
    Measure(PointCmd),
    /// Evaluate the OTOC S(t) once.
    Otoc(PointCmd),
    /// Sweep the scrambling time.
    SweepTime(SweepTimeCmd),
    /// Sweep a state-family parameter.
    SweepParam(SweepParamCmd),
    /// Render a sweep CSV as an SVG plot.
    Render(RenderCmd),
}

#[derive(Debug, Args, Default)]
pub struct StateOpts {
    /// bennett | jurkowski | horodecki1 | horodecki2
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameters, e.g. `eps1=1,eps2=4,eps3=4` or `alpha=3.7`.
    #[arg(long)]
    pub params: Option<String>,
    /// TOML run configuration; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct ScrambleOpts {
    /// DM interaction strength in [0, 1].
    #[arg(long = "d")]
    pub d: Option<f64>,
    /// Where the swap acts: a | b | both.
    #[arg(long)]
    pub placement: Option<String>,
    /// State update: conj (V rho V^dagger) | raw (V rho).
    #[arg(long)]
    pub mode: Option<String>,
    /// In raw mode, keep V rho as is instead of Hermitising it.
    #[arg(long)]
    pub no_hermitize: bool,
}

#[derive(Debug, Args, Default)]
pub struct OutputOpts {
    /// CSV destination (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also render an SVG plot to this path.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Plot title.
    #[arg(long)]
    pub title: Option<String>,
    /// Append ccnr_clipped and realignment columns.
    #[arg(long)]
    pub diagnostics: bool,
    /// Worker threads (0 = all cores, 1 = serial).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StateCmd {
    #[command(flatten)]
    pub state: StateOpts,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointCmd {
    #[command(flatten)]
    pub state: StateOpts,
    #[command(flatten)]
    pub scramble: ScrambleOpts,
    /// Evaluation time.
    #[arg(long = "t", default_value_t = 0.0)]
    pub t: f64,
}

#[derive(Debug, Args)]
pub struct SweepTimeCmd {
    #[command(flatten)]
    pub state: StateOpts,
    #[command(flatten)]
    pub scramble: ScrambleOpts,
    /// Time horizon T.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Debug, Args)]
pub struct SweepParamCmd {
    #[command(flatten)]
    pub state: StateOpts,
    #[command(flatten)]
    pub scramble: ScrambleOpts,
    /// a | b | c for Jurkowski, alpha for the Horodecki states.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Scrambling time applied before measuring (0 = static states).
    #[arg(long)]
    pub at_t: Option<f64>,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Debug, Args)]
pub struct RenderCmd {
    /// Sweep CSV to plot.
    #[arg(long)]
    pub input: PathBuf,
    /// SVG destination.
    #[arg(long, alias = "out")]
    pub svg: PathBuf,
    #[arg(long)]
    pub title: Option<String>,
    /// Label for the horizontal axis.
    #[arg(long, default_value = "t/T")]
    pub x_label: String,
}

fn parse_params(s: &str) -> Result<Vec<(String, f64)>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|kv| !kv.is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("expected key=value in --params, got {kv:?}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("parameter {k} is not a number: {v:?}")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => Ok(RunConfig::load(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn resolve_spec(opts: &StateOpts, cfg: &RunConfig) -> Result<StateSpec, CliError> {
    let family: Family = opts
        .family
        .as_deref()
        .or(cfg.state.family.as_deref())
        .unwrap_or("bennett")
        .parse()?;
    let mut params: Vec<(String, f64)> = cfg.state.params.iter().map(|(k, v)| (k.clone(), *v)).collect();
    if let Some(p) = &opts.params {
        params.extend(parse_params(p)?);
    }
    Ok(StateSpec::from_params(family, &params)?)
}

fn resolve_scramble(opts: &ScrambleOpts, cfg: &RunConfig) -> Result<ScrambleConfig, CliError> {
    let defaults = ScrambleConfig::default();
    let placement: Placement = match opts.placement.as_deref().or(cfg.scramble.placement.as_deref()) {
        Some(p) => p.parse()?,
        None => defaults.placement,
    };
    let update_mode: UpdateMode = match opts.mode.as_deref().or(cfg.scramble.mode.as_deref()) {
        Some(m) => m.parse()?,
        None => defaults.update_mode,
    };
    let hermitize_raw = if opts.no_hermitize {
        false
    } else {
        cfg.scramble.hermitize_raw.unwrap_or(defaults.hermitize_raw)
    };
    let sc = ScrambleConfig {
        d: opts.d.or(cfg.scramble.d).unwrap_or(defaults.d),
        placement,
        update_mode,
        hermitize_raw,
    };
    sc.validate()?;
    Ok(sc)
}

fn resolve_exec(threads: Option<usize>) -> Execution {
    match threads {
        None | Some(0) => Execution::Parallel,
        Some(1) => Execution::Serial,
        Some(k) => Execution::Threads(k),
    }
}

fn write_text(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

struct Emit<'a> {
    out: Option<&'a Path>,
    svg: Option<&'a Path>,
    csv: CsvOptions,
    plot: SvgOptions,
}

/// Writes the CSV and optional SVG. Both documents are rendered before
/// either file is touched.
fn emit(records: &[SweepRecord], e: &Emit<'_>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let csv = sweep::write_csv(records, e.csv)?;
    let svg = match e.svg {
        Some(_) => Some(sweep::svg_document(records, &e.plot)?),
        None => None,
    };
    write_text(e.out, &csv, stdout)?;
    if let (Some(path), Some(doc)) = (e.svg, svg) {
        write_text(Some(path), &doc, stdout)?;
    }
    Ok(())
}

fn cmd_state(cmd: &StateCmd, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(cmd.state.config.as_deref())?;
    let spec = resolve_spec(&cmd.state, &cfg)?;
    let state = spec.build()?;
    let mut text = String::new();
    for i in 0..9 {
        let row: Vec<String> = state
            .rho()
            .row(i)
            .iter()
            .flat_map(|z| [format_sig(z.re), format_sig(z.im)])
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write_text(cmd.out.as_deref(), &text, stdout)
}

fn cmd_measure(cmd: &PointCmd, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(cmd.state.config.as_deref())?;
    let spec = resolve_spec(&cmd.state, &cfg)?;
    let sc = resolve_scramble(&cmd.scramble, &cfg)?;
    check_time(cmd.t)?;
    let state = spec.build()?;
    let evolved = Scrambler::new(sc)?.scrambled_state(&state, cmd.t)?;
    let m = measures::measure(&evolved)?;
    let text = format!(
        "state,t,negativity,ccnr,realignment,class\n{},{},{},{},{},{}\n",
        spec.to_string().replace(',', ";"),
        format_sig(cmd.t),
        format_sig(m.negativity),
        format_sig(m.ccnr),
        format_sig(m.realignment),
        m.classification
    );
    write_text(None, &text, stdout)
}

fn cmd_otoc(cmd: &PointCmd, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(cmd.state.config.as_deref())?;
    let spec = resolve_spec(&cmd.state, &cfg)?;
    let sc = resolve_scramble(&cmd.scramble, &cfg)?;
    check_time(cmd.t)?;
    let sample = Scrambler::new(sc)?.otoc(&spec.build()?, cmd.t);
    let text = format!(
        "t,s_otoc,m_re,m_im\n{},{},{},{}\n",
        format_sig(sample.t),
        format_sig(sample.s),
        format_sig(sample.m.re),
        format_sig(sample.m.im)
    );
    write_text(None, &text, stdout)
}

fn check_time(t: f64) -> Result<(), CliError> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("time must be finite, got {t}")))
    }
}

fn cmd_sweep_time(cmd: &SweepTimeCmd, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(cmd.state.config.as_deref())?;
    let spec = resolve_spec(&cmd.state, &cfg)?;
    let sc = resolve_scramble(&cmd.scramble, &cfg)?;
    let defaults = TimeGrid::default();
    let grid = TimeGrid::new(
        cmd.tmax.or(cfg.time.tmax).unwrap_or(defaults.t_max),
        cmd.samples.or(cfg.time.samples).unwrap_or(defaults.samples),
    )?;
    let exec = resolve_exec(cmd.output.threads.or(cfg.output.threads));
    let records = sweep::run_time_sweep(&spec, &sc, &grid, exec)?;
    let title = cmd
        .output
        .title
        .clone()
        .or(cfg.output.title.clone())
        .unwrap_or_else(|| format!("{spec}, D = {}", sc.d));
    let out = cmd.output.out.as_deref().or(cfg.output.out.as_deref());
    let svg = cmd.output.svg.as_deref().or(cfg.output.svg.as_deref());
    emit(
        &records,
        &Emit {
            out,
            svg,
            csv: CsvOptions {
                diagnostics: cmd.output.diagnostics || cfg.output.diagnostics.unwrap_or(false),
            },
            plot: SvgOptions { title, ..Default::default() },
        },
        stdout,
    )
}

fn default_param_range(family: Family) -> (f64, f64, f64) {
    match family {
        Family::Jurkowski => (0.1, 5.0, 0.1),
        Family::Horodecki1 => (0.0, 1.0, 0.05),
        Family::Horodecki2 | Family::Bennett => (2.0, 5.0, 0.1),
    }
}

fn cmd_sweep_param(cmd: &SweepParamCmd, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(cmd.state.config.as_deref())?;
    let family: Family = cmd
        .state
        .family
        .as_deref()
        .or(cfg.state.family.as_deref())
        .unwrap_or("horodecki2")
        .parse()?;
    let sc = resolve_scramble(&cmd.scramble, &cfg)?;
    let preset = match cmd.preset.as_deref().or(cfg.param.preset.as_deref()) {
        Some(p) => p.parse()?,
        None => Preset::default_for(family)?,
    };
    let (d_start, d_stop, d_step) = default_param_range(family);
    let grid = ParamGrid {
        start: cmd.start.or(cfg.param.start).unwrap_or(d_start),
        stop: cmd.stop.or(cfg.param.stop).unwrap_or(d_stop),
        step: cmd.step.or(cfg.param.step).unwrap_or(d_step),
    };
    let at_t = cmd.at_t.or(cfg.param.at_t).unwrap_or(0.0);
    let exec = resolve_exec(cmd.output.threads.or(cfg.output.threads));
    let records = sweep::run_param_sweep(family, preset, &grid, at_t, &sc, exec)?;
    let x_label = if family == Family::Jurkowski { "epsilon" } else { "alpha" };
    let title = cmd
        .output
        .title
        .clone()
        .or(cfg.output.title.clone())
        .unwrap_or_else(|| format!("{family} vs {x_label}, t = {at_t}"));
    emit(
        &records,
        &Emit {
            out: cmd.output.out.as_deref().or(cfg.output.out.as_deref()),
            svg: cmd.output.svg.as_deref().or(cfg.output.svg.as_deref()),
            csv: CsvOptions {
                diagnostics: cmd.output.diagnostics || cfg.output.diagnostics.unwrap_or(false),
            },
            plot: SvgOptions {
                title,
                x_label: x_label.to_string(),
                ..Default::default()
            },
        },
        stdout,
    )
}

fn cmd_render(cmd: &RenderCmd) -> Result<(), CliError> {
    let text = fs::read_to_string(&cmd.input).map_err(|e| CliError::Io(format!("{}: {e}", cmd.input.display())))?;
    let records = sweep::parse_csv(&text)?;
    let opts = SvgOptions {
        title: cmd.title.clone().unwrap_or_else(|| cmd.input.display().to_string()),
        x_label: cmd.x_label.clone(),
        ..Default::default()
    };
    sweep::render_svg(&records, &cmd.svg, &opts)?;
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::State(c) => cmd_state(c, stdout),
        Command::Measure(c) => cmd_measure(c, stdout),
        Command::Otoc(c) => cmd_otoc(c, stdout),
        Command::SweepTime(c) => cmd_sweep_time(c, stdout),
        Command::SweepParam(c) => cmd_sweep_param(c, stdout),
        Command::Render(c) => cmd_render(c),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 2;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
