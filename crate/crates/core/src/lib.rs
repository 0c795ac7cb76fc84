//! Quantum information scrambling of 3x3 bound entangled states.
//!
//! The crate builds the Bennett, Jurkowski and two Horodecki qutrit-pair
//! states, scrambles them with a swap-operator butterfly circuit evolved
//! under a Dzyaloshinskii-Moriya Hamiltonian, and tracks negativity and the
//! CCNR witness along time and parameter sweeps.

pub mod cli;
pub mod config;
pub mod linalg;
pub mod measures;
pub mod scrambler;
pub mod states;
pub mod sweep;

pub use linalg::{BipartiteDims, CMat, LinalgError, Subsystem};
pub use measures::{ccnr, classify, negativity, Classification, MeasureRecord};
pub use scrambler::{OtocSample, Placement, ScrambleConfig, ScrambleError, Scrambler, UpdateMode};
pub use states::{BipartiteState, Family, StateError, StateSpec};
pub use sweep::{Execution, ParamGrid, Preset, SweepError, SweepRecord, TimeGrid};
