//! Time and parameter sweeps over the scrambling circuit.

mod csv;
mod svg;

use std::io;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::LinalgError;
use crate::measures::{self, Classification};
use crate::scrambler::{OtocSample, ScrambleConfig, ScrambleError, Scrambler};
use crate::states::{BipartiteState, Family, StateError, StateSpec};

pub use csv::{emit_csv, format_sig, parse_csv, write_csv, CsvOptions, CSV_HEADER};
pub use svg::{render_svg, svg_document, SvgOptions};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Scramble(#[from] ScrambleError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("sweep produced no records")]
    EmptySweep,
    #[error("malformed CSV at line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl SweepError {
    /// True for errors caused by bad user input rather than numerics or IO.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            SweepError::State(StateError::InvalidParameter { .. } | StateError::UnknownFamily(_))
                | SweepError::Scramble(
                    ScrambleError::InvalidParameter { .. }
                        | ScrambleError::UnknownOption { .. }
                        | ScrambleError::State(StateError::InvalidParameter { .. }),
                )
                | SweepError::InvalidGrid(_)
                | SweepError::MalformedCsv { .. }
        )
    }
}

/// Evenly spaced times `k * t_max / (samples - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub samples: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid { t_max: 10.0, samples: 512 }
    }
}

impl TimeGrid {
    pub fn new(t_max: f64, samples: usize) -> Result<Self, SweepError> {
        let g = TimeGrid { t_max, samples };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(SweepError::InvalidGrid(format!("t_max must be > 0, got {}", self.t_max)));
        }
        if self.samples < 2 {
            return Err(SweepError::InvalidGrid(format!("need at least 2 samples, got {}", self.samples)));
        }
        Ok(())
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.samples {
            self.t_max
        } else {
            k as f64 * self.t_max / (self.samples - 1) as f64
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples).map(|k| self.time(k)).collect()
    }
}

/// One row of sweep output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    /// `t / T` for time sweeps, the swept parameter for parameter sweeps.
    pub x: f64,
    pub s: f64,
    pub m_re: f64,
    pub m_im: f64,
    pub negativity: f64,
    pub ccnr: f64,
    /// Plain realignment `||rho^R|| - 1`; absent when read back from a CSV
    /// written without diagnostic columns.
    pub realignment: Option<f64>,
    pub classification: Classification,
}

impl SweepRecord {
    fn new(x: f64, otoc: &OtocSample, measured: &measures::MeasureRecord) -> Self {
        SweepRecord {
            x,
            s: otoc.s,
            m_re: otoc.m.re,
            m_im: otoc.m.im,
            negativity: measured.negativity,
            ccnr: measured.ccnr,
            realignment: Some(measured.realignment),
            classification: measured.classification,
        }
    }

    pub fn ccnr_clipped(&self) -> f64 {
        self.ccnr.max(0.0)
    }
}

/// How grid points are distributed over threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    /// Rayon's global pool.
    #[default]
    Parallel,
    /// A dedicated pool with this many workers.
    Threads(usize),
}

fn map_grid<T, F>(n: usize, exec: Execution, f: F) -> Result<Vec<T>, SweepError>
where
    T: Send,
    F: Fn(usize) -> Result<T, SweepError> + Sync + Send,
{
    match exec {
        Execution::Serial => (0..n).map(f).collect(),
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        Execution::Threads(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .expect("failed to build worker pool");
            pool.install(|| (0..n).into_par_iter().map(f).collect())
        }
    }
}

fn evaluate_point(scrambler: &Scrambler, state: &BipartiteState, x: f64, t: f64) -> Result<SweepRecord, SweepError> {
    let (otoc, evolved) = scrambler.evaluate(state, t)?;
    let measured = measures::measure(&evolved)?;
    Ok(SweepRecord::new(x, &otoc, &measured))
}

/// Evolves one state over a time grid. Records are in grid order regardless
/// of `exec`.
pub fn run_time_sweep(
    spec: &StateSpec,
    cfg: &ScrambleConfig,
    grid: &TimeGrid,
    exec: Execution,
) -> Result<Vec<SweepRecord>, SweepError> {
    grid.validate()?;
    let state = spec.build()?;
    let scrambler = Scrambler::new(*cfg)?;
    map_grid(grid.samples, exec, |k| {
        let t = grid.time(k);
        evaluate_point(&scrambler, &state, t / grid.t_max, t)
    })
}

/// How a single swept value maps onto a family's parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Jurkowski `eps1 = eps2 = 1, eps3 = eps`.
    JurkowskiA,
    /// Jurkowski `eps1 = 1, eps2 = eps3 = eps`.
    JurkowskiB,
    /// Jurkowski `eps1 = eps2 = eps3 = eps`.
    JurkowskiC,
    /// Horodecki families: the swept value is `alpha`.
    Alpha,
}

impl Preset {
    pub fn default_for(family: Family) -> Result<Self, SweepError> {
        match family {
            Family::Jurkowski => Ok(Preset::JurkowskiB),
            Family::Horodecki1 | Family::Horodecki2 => Ok(Preset::Alpha),
            Family::Bennett => Err(SweepError::InvalidGrid("the Bennett state has no parameter to sweep".into())),
        }
    }

    pub fn spec(self, family: Family, value: f64) -> Result<StateSpec, SweepError> {
        let spec = match (family, self) {
            (Family::Jurkowski, Preset::JurkowskiA) => StateSpec::Jurkowski { eps1: 1.0, eps2: 1.0, eps3: value },
            (Family::Jurkowski, Preset::JurkowskiB) => StateSpec::Jurkowski { eps1: 1.0, eps2: value, eps3: value },
            (Family::Jurkowski, Preset::JurkowskiC) => StateSpec::Jurkowski { eps1: value, eps2: value, eps3: value },
            (Family::Horodecki1, Preset::Alpha) => StateSpec::Horodecki1 { alpha: value },
            (Family::Horodecki2, Preset::Alpha) => StateSpec::Horodecki2 { alpha: value },
            (f, p) => return Err(SweepError::InvalidGrid(format!("preset {p:?} does not apply to {f}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl FromStr for Preset {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Preset::JurkowskiA),
            "b" => Ok(Preset::JurkowskiB),
            "c" => Ok(Preset::JurkowskiC),
            "alpha" => Ok(Preset::Alpha),
            other => Err(SweepError::InvalidGrid(format!("unknown preset {other:?} (a, b, c or alpha)"))),
        }
    }
}

/// Inclusive arithmetic grid `start, start + step, ..., stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl ParamGrid {
    pub fn values(&self) -> Result<Vec<f64>, SweepError> {
        let ParamGrid { start, stop, step } = *self;
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) || stop < start {
            return Err(SweepError::InvalidGrid(format!("bad range {start}..{stop}")));
        }
        if start == stop {
            return Ok(vec![start]);
        }
        if step.is_nan() || step <= 0.0 {
            return Err(SweepError::InvalidGrid(format!("step must be > 0, got {step}")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        Ok((0..=n)
            .map(|k| {
                let v = start + k as f64 * step;
                // snap accumulated rounding back onto the decimal grid
                let snapped = (v * 1e12).round() / 1e12;
                snapped.min(stop)
            })
            .collect())
    }
}

/// Measures a family across a parameter grid, optionally after scrambling
/// for time `at_t`. `at_t = 0` leaves the states untouched.
pub fn run_param_sweep(
    family: Family,
    preset: Preset,
    grid: &ParamGrid,
    at_t: f64,
    cfg: &ScrambleConfig,
    exec: Execution,
) -> Result<Vec<SweepRecord>, SweepError> {
    if !(at_t >= 0.0 && at_t.is_finite()) {
        return Err(SweepError::InvalidGrid(format!("evaluation time must be >= 0, got {at_t}")));
    }
    let values = grid.values()?;
    // validate every grid point before any computation
    let specs = values
        .iter()
        .map(|&v| preset.spec(family, v))
        .collect::<Result<Vec<_>, _>>()?;
    let scrambler = Scrambler::new(*cfg)?;
    map_grid(specs.len(), exec, |k| {
        let state = specs[k].build()?;
        evaluate_point(&scrambler, &state, values[k], at_t)
    })
}

/// Time of the first interior local maximum of `values` above `floor`.
pub fn first_local_max(xs: &[f64], values: &[f64], floor: f64) -> Option<f64> {
    (1..values.len().saturating_sub(1))
        .find(|&k| values[k] > floor && values[k] >= values[k - 1] && values[k] > values[k + 1])
        .map(|k| xs[k])
}
