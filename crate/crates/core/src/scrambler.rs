//! Butterfly-operator scrambling under the Z-directed DM Hamiltonian.
//!
//! The static operator `O1` is the qutrit swap `|0> <-> |2>` lifted to the
//! pair, and `O2(0) = O1` is evolved in the Heisenberg picture with
//! `U(t) = exp(-i H t)` (hbar = 1).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{c, eig_hermitian, kron, CMat, HermitianEigen, LinalgError, HERMITIAN_TOL};
use crate::states::{BipartiteState, StateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScrambleError {
    #[error("invalid parameter {name} = {value}: {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("unknown {what} {value:?}")]
    UnknownOption { what: &'static str, value: String },
    #[error("operator must be Hermitian and unitary")]
    NotHermitianUnitary,
    #[error("evolved state left the density-matrix manifold: {0}")]
    NonPhysicalResult(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Where the single-qutrit swap acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Placement {
    #[default]
    OnA,
    OnB,
    OnBoth,
}

impl FromStr for Placement {
    type Err = ScrambleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a" | "on_a" | "ona" => Ok(Placement::OnA),
            "b" | "on_b" | "onb" => Ok(Placement::OnB),
            "both" | "ab" | "on_both" => Ok(Placement::OnBoth),
            _ => Err(ScrambleError::UnknownOption {
                what: "placement",
                value: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Placement::OnA => "a",
            Placement::OnB => "b",
            Placement::OnBoth => "both",
        })
    }
}

/// How the state used for the entanglement measures is formed from `V(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateMode {
    /// `V rho V^dagger`.
    #[default]
    Conjugation,
    /// `V rho`, optionally Hermitised and renormalised.
    RawButterfly,
}

impl FromStr for UpdateMode {
    type Err = ScrambleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "conj" | "conjugation" => Ok(UpdateMode::Conjugation),
            "raw" | "raw_butterfly" | "rawbutterfly" => Ok(UpdateMode::RawButterfly),
            _ => Err(ScrambleError::UnknownOption {
                what: "update mode",
                value: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for UpdateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpdateMode::Conjugation => "conj",
            UpdateMode::RawButterfly => "raw",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScrambleConfig {
    /// DM interaction strength, `0 <= d <= 1`.
    pub d: f64,
    pub placement: Placement,
    pub update_mode: UpdateMode,
    pub hermitize_raw: bool,
}

impl Default for ScrambleConfig {
    fn default() -> Self {
        ScrambleConfig {
            d: 0.6,
            placement: Placement::OnA,
            update_mode: UpdateMode::Conjugation,
            hermitize_raw: true,
        }
    }
}

impl ScrambleConfig {
    pub fn validate(&self) -> Result<(), ScrambleError> {
        check_coupling(self.d)
    }
}

fn check_coupling(d: f64) -> Result<(), ScrambleError> {
    if (0.0..=1.0).contains(&d) {
        Ok(())
    } else {
        Err(ScrambleError::InvalidParameter {
            name: "D",
            value: d,
            expected: "must lie in [0, 1]",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OtocSample {
    pub t: f64,
    pub m: Complex64,
    /// `2 (1 - Re m)`.
    pub s: f64,
}

impl OtocSample {
    fn from_m(t: f64, m: Complex64) -> Self {
        OtocSample { t, m, s: 2.0 * (1.0 - m.re) }
    }
}

/// The swap `|0> <-> |2>` on a single qutrit.
pub fn swap02() -> CMat {
    CMat::from_real(3, 3, &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0]).unwrap()
}

/// Spin-1 matrices `(sigma_x, sigma_y)`.
pub fn spin_matrices() -> (CMat, CMat) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let sx = CMat::from_real(3, 3, &[0.0, r, 0.0, r, 0.0, r, 0.0, r, 0.0]).unwrap();
    let sy = CMat::from_vec(
        3,
        3,
        vec![z, c(0.0, -r), z, c(0.0, r), z, c(0.0, -r), z, c(0.0, r), z],
    )
    .unwrap();
    (sx, sy)
}

/// `H_z = D (sigma_x ⊗ sigma_y - sigma_y ⊗ sigma_x)`.
pub fn dm_hamiltonian(d: f64) -> Result<CMat, ScrambleError> {
    check_coupling(d)?;
    let (sx, sy) = spin_matrices();
    Ok((&kron(&sx, &sy) - &kron(&sy, &sx)).scale_real(d))
}

/// Embeds a single-qutrit operator into the pair.
pub fn lift_operator(o: &CMat, placement: Placement) -> Result<CMat, ScrambleError> {
    o.ensure_square(3)?;
    let id = CMat::identity(3);
    Ok(match placement {
        Placement::OnA => kron(o, &id),
        Placement::OnB => kron(&id, o),
        Placement::OnBoth => kron(o, o),
    })
}

/// `U^dagger o2_0 U` with `U = exp(-i H_z(d) t)`.
pub fn evolve_operator(o2_0: &CMat, d: f64, t: f64) -> Result<CMat, ScrambleError> {
    let h = dm_hamiltonian(d)?;
    let eig = eig_hermitian(&h)?;
    o2_0.ensure_square(9)?;
    if !is_hermitian_unitary(o2_0, 1e-10) {
        return Err(ScrambleError::NotHermitianUnitary);
    }
    Ok(heisenberg(&eig, o2_0, t))
}

fn propagator(eig: &HermitianEigen, t: f64) -> CMat {
    if t == 0.0 {
        return CMat::identity(eig.values.len());
    }
    eig.reconstruct_with(|l| Complex64::from_polar(1.0, -l * t))
}

fn heisenberg(eig: &HermitianEigen, o: &CMat, t: f64) -> CMat {
    let u = propagator(eig, t);
    u.adjoint().matmul(o).matmul(&u)
}

/// `V = O2(t) O1 O2(t) O1`.
pub fn butterfly(o1: &CMat, o2_t: &CMat) -> Result<CMat, ScrambleError> {
    o1.ensure_square(9)?;
    o2_t.ensure_square(9)?;
    Ok(o2_t.matmul(o1).matmul(o2_t).matmul(o1))
}

/// Precomputed scrambling setup for one configuration: the lifted swap and
/// the spectral decomposition of the Hamiltonian, reused across time points.
#[derive(Debug, Clone)]
pub struct Scrambler {
    cfg: ScrambleConfig,
    o1: CMat,
    h_eig: HermitianEigen,
}

impl Scrambler {
    pub fn new(cfg: ScrambleConfig) -> Result<Self, ScrambleError> {
        cfg.validate()?;
        let o1 = lift_operator(&swap02(), cfg.placement)?;
        let h_eig = eig_hermitian(&dm_hamiltonian(cfg.d)?)?;
        Ok(Scrambler { cfg, o1, h_eig })
    }

    pub fn config(&self) -> &ScrambleConfig {
        &self.cfg
    }

    /// The static operator `O1 = O2(0)`.
    pub fn o1(&self) -> &CMat {
        &self.o1
    }

    pub fn propagator(&self, t: f64) -> CMat {
        propagator(&self.h_eig, t)
    }

    pub fn evolved_operator(&self, t: f64) -> CMat {
        heisenberg(&self.h_eig, &self.o1, t)
    }

    pub fn butterfly(&self, t: f64) -> CMat {
        let o2 = self.evolved_operator(t);
        o2.matmul(&self.o1).matmul(&o2).matmul(&self.o1)
    }

    pub fn otoc(&self, state: &BipartiteState, t: f64) -> OtocSample {
        otoc_from_butterfly(&self.butterfly(t), state, t)
    }

    pub fn scrambled_state(&self, state: &BipartiteState, t: f64) -> Result<BipartiteState, ScrambleError> {
        apply_butterfly(&self.butterfly(t), state, &self.cfg)
    }

    /// OTOC sample and evolved state from a single butterfly evaluation.
    pub fn evaluate(&self, state: &BipartiteState, t: f64) -> Result<(OtocSample, BipartiteState), ScrambleError> {
        let v = self.butterfly(t);
        Ok((otoc_from_butterfly(&v, state, t), apply_butterfly(&v, state, &self.cfg)?))
    }
}

fn otoc_from_butterfly(v: &CMat, state: &BipartiteState, t: f64) -> OtocSample {
    OtocSample::from_m(t, v.matmul(state.rho()).trace())
}

fn apply_butterfly(v: &CMat, state: &BipartiteState, cfg: &ScrambleConfig) -> Result<BipartiteState, ScrambleError> {
    let rho = state.rho();
    let spec = *state.spec();
    match cfg.update_mode {
        UpdateMode::Conjugation => {
            let out = v.matmul(rho).matmul(&v.adjoint());
            BipartiteState::new(out, spec).map_err(|e| ScrambleError::NonPhysicalResult(e.to_string()))
        }
        UpdateMode::RawButterfly => {
            let raw = v.matmul(rho);
            if !cfg.hermitize_raw {
                return Ok(BipartiteState::unchecked(raw, spec)?);
            }
            let herm = (&raw + &raw.adjoint()).scale_real(0.5);
            let tr = herm.trace().re;
            if tr.abs() < 1e-12 {
                return Err(ScrambleError::NonPhysicalResult(format!(
                    "Hermitised butterfly product has vanishing trace ({tr:e})"
                )));
            }
            Ok(BipartiteState::unchecked(herm.scale_real(1.0 / tr), spec)?)
        }
    }
}

/// `M = Tr(V(t) rho)` and `S(t) = 2 (1 - Re M)`.
pub fn otoc(state: &BipartiteState, cfg: &ScrambleConfig, t: f64) -> Result<OtocSample, ScrambleError> {
    Ok(Scrambler::new(*cfg)?.otoc(state, t))
}

/// The state after the butterfly circuit, formed per `cfg.update_mode`.
pub fn scrambled_state(state: &BipartiteState, cfg: &ScrambleConfig, t: f64) -> Result<BipartiteState, ScrambleError> {
    Scrambler::new(*cfg)?.scrambled_state(state, t)
}

/// Checks that an operator is Hermitian and unitary within kernel tolerance.
pub fn is_hermitian_unitary(o: &CMat, tol: f64) -> bool {
    o.hermitian_deviation() <= tol.max(HERMITIAN_TOL) && o.unitarity_deviation() <= tol
}
