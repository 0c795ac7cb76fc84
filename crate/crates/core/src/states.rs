//! The four families of 3x3 bound entangled states.
//!
//! Kets use the computational basis `|0>, |1>, |2>` with composite index
//! `3 * a + b` for `|a>_A |b>_B`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{c, eig_hermitian, kron, BipartiteDims, CMat, LinalgError};

/// Tolerance for the Hermitian / unit-trace / PSD checks on a density matrix.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("invalid parameter {name} = {value}: {expected}")]
    InvalidParameter {
        name: String,
        value: f64,
        expected: String,
    },
    #[error("unknown state family {0:?} (expected bennett, jurkowski, horodecki1 or horodecki2)")]
    UnknownFamily(String),
    #[error("matrix is not a physical density matrix: {0}")]
    NonPhysical(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Bennett,
    Jurkowski,
    Horodecki1,
    Horodecki2,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Bennett, Family::Jurkowski, Family::Horodecki1, Family::Horodecki2];

    pub fn name(self) -> &'static str {
        match self {
            Family::Bennett => "bennett",
            Family::Jurkowski => "jurkowski",
            Family::Horodecki1 => "horodecki1",
            Family::Horodecki2 => "horodecki2",
        }
    }

    /// Parameter names accepted by [`StateSpec::from_params`].
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Bennett => &[],
            Family::Jurkowski => &["eps1", "eps2", "eps3"],
            Family::Horodecki1 | Family::Horodecki2 => &["alpha"],
        }
    }

    /// The parameter values the figures fix when a family is swept in time.
    pub fn default_spec(self) -> StateSpec {
        match self {
            Family::Bennett => StateSpec::Bennett,
            Family::Jurkowski => StateSpec::Jurkowski { eps1: 1.0, eps2: 4.0, eps3: 4.0 },
            Family::Horodecki1 => StateSpec::Horodecki1 { alpha: 0.5 },
            Family::Horodecki2 => StateSpec::Horodecki2 { alpha: 3.7 },
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bennett" | "upb" => Ok(Family::Bennett),
            "jurkowski" => Ok(Family::Jurkowski),
            "horodecki1" | "h1" => Ok(Family::Horodecki1),
            "horodecki2" | "h2" => Ok(Family::Horodecki2),
            _ => Err(StateError::UnknownFamily(s.to_string())),
        }
    }
}

/// A state family together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Bennett,
    Jurkowski { eps1: f64, eps2: f64, eps3: f64 },
    Horodecki1 { alpha: f64 },
    Horodecki2 { alpha: f64 },
}

impl StateSpec {
    pub fn family(&self) -> Family {
        match self {
            StateSpec::Bennett => Family::Bennett,
            StateSpec::Jurkowski { .. } => Family::Jurkowski,
            StateSpec::Horodecki1 { .. } => Family::Horodecki1,
            StateSpec::Horodecki2 { .. } => Family::Horodecki2,
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            StateSpec::Bennett => vec![],
            StateSpec::Jurkowski { eps1, eps2, eps3 } => vec![("eps1", eps1), ("eps2", eps2), ("eps3", eps3)],
            StateSpec::Horodecki1 { alpha } | StateSpec::Horodecki2 { alpha } => vec![("alpha", alpha)],
        }
    }

    /// Builds a spec from named parameters. Missing names fall back to the
    /// family defaults; unknown names are rejected.
    pub fn from_params(family: Family, params: &[(String, f64)]) -> Result<Self, StateError> {
        let allowed = family.param_names();
        let mut values: Vec<(&str, f64)> = family.default_spec().params();
        for (k, v) in params {
            let key = k.as_str();
            let canonical = match key {
                "e1" | "epsilon1" => "eps1",
                "e2" | "epsilon2" => "eps2",
                "e3" | "epsilon3" => "eps3",
                "a" => "alpha",
                other => other,
            };
            if !allowed.contains(&canonical) {
                return Err(StateError::InvalidParameter {
                    name: key.to_string(),
                    value: *v,
                    expected: format!("{family} accepts {allowed:?}"),
                });
            }
            for slot in values.iter_mut() {
                if slot.0 == canonical {
                    slot.1 = *v;
                }
            }
        }
        let get = |name: &str| values.iter().find(|(k, _)| *k == name).map(|(_, v)| *v).unwrap_or(f64::NAN);
        let spec = match family {
            Family::Bennett => StateSpec::Bennett,
            Family::Jurkowski => StateSpec::Jurkowski {
                eps1: get("eps1"),
                eps2: get("eps2"),
                eps3: get("eps3"),
            },
            Family::Horodecki1 => StateSpec::Horodecki1 { alpha: get("alpha") },
            Family::Horodecki2 => StateSpec::Horodecki2 { alpha: get("alpha") },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), StateError> {
        match *self {
            StateSpec::Bennett => Ok(()),
            StateSpec::Jurkowski { eps1, eps2, eps3 } => {
                for (name, v) in [("eps1", eps1), ("eps2", eps2), ("eps3", eps3)] {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(invalid(name, v, "must be a finite value > 0"));
                    }
                }
                Ok(())
            }
            StateSpec::Horodecki1 { alpha } => check_range("alpha", alpha, 0.0, 1.0),
            StateSpec::Horodecki2 { alpha } => check_range("alpha", alpha, 2.0, 5.0),
        }
    }

    pub fn build(&self) -> Result<BipartiteState, StateError> {
        match *self {
            StateSpec::Bennett => bennett_state(),
            StateSpec::Jurkowski { eps1, eps2, eps3 } => jurkowski_state(eps1, eps2, eps3),
            StateSpec::Horodecki1 { alpha } => horodecki_state1(alpha),
            StateSpec::Horodecki2 { alpha } => horodecki_state2(alpha),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family())?;
        let params = self.params();
        if !params.is_empty() {
            let inner: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", inner.join(","))?;
        }
        Ok(())
    }
}

fn invalid(name: &str, value: f64, expected: &str) -> StateError {
    StateError::InvalidParameter {
        name: name.to_string(),
        value,
        expected: expected.to_string(),
    }
}

fn check_range(name: &str, value: f64, lo: f64, hi: f64) -> Result<(), StateError> {
    if value >= lo && value <= hi {
        Ok(())
    } else {
        Err(invalid(name, value, &format!("must lie in [{lo}, {hi}]")))
    }
}

/// A 9x9 density matrix on a qutrit pair, tagged with the spec it came from.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    rho: CMat,
    dims: BipartiteDims,
    spec: StateSpec,
}

impl BipartiteState {
    /// Wraps `rho` after checking Hermiticity, unit trace and positivity.
    pub fn new(rho: CMat, spec: StateSpec) -> Result<Self, StateError> {
        check_physical(&rho)?;
        Ok(BipartiteState {
            rho,
            dims: BipartiteDims::QUTRITS,
            spec,
        })
    }

    /// Wraps an operator that is not required to be a density matrix, such as
    /// the unsymmetrised product `V rho`.
    pub fn unchecked(rho: CMat, spec: StateSpec) -> Result<Self, StateError> {
        rho.ensure_square(BipartiteDims::QUTRITS.total())?;
        if !rho.is_finite() {
            return Err(StateError::NonPhysical("non-finite entries".into()));
        }
        Ok(BipartiteState {
            rho,
            dims: BipartiteDims::QUTRITS,
            spec,
        })
    }

    pub fn rho(&self) -> &CMat {
        &self.rho
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn spec(&self) -> &StateSpec {
        &self.spec
    }

    pub fn is_physical(&self) -> bool {
        check_physical(&self.rho).is_ok()
    }

    /// Purity `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.rho.matmul(&self.rho).trace().re
    }
}

pub(crate) fn check_physical(rho: &CMat) -> Result<(), StateError> {
    rho.ensure_square(BipartiteDims::QUTRITS.total())?;
    if !rho.is_finite() {
        return Err(StateError::NonPhysical("non-finite entries".into()));
    }
    let dev = rho.hermitian_deviation();
    if dev > STATE_TOL {
        return Err(StateError::NonPhysical(format!("not Hermitian (deviation {dev:e})")));
    }
    let tr = rho.trace();
    if (tr - c(1.0, 0.0)).norm() > STATE_TOL {
        return Err(StateError::NonPhysical(format!("trace {tr} != 1")));
    }
    let min = eig_hermitian(rho)?.values[0];
    if min < -STATE_TOL {
        return Err(StateError::NonPhysical(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

fn basis(i: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0, 0.0); 3];
    v[i] = c(1.0, 0.0);
    v
}

fn combo(coeffs: [f64; 3]) -> Vec<Complex64> {
    coeffs.iter().map(|&x| c(x, 0.0)).collect()
}

fn product_ket(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// The five product vectors of the "tiles" unextendible product basis.
pub fn tiles_upb() -> [Vec<Complex64>; 5] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let third = 1.0 / 3.0;
    [
        product_ket(&basis(0), &combo([r, -r, 0.0])),
        product_ket(&combo([r, -r, 0.0]), &basis(2)),
        product_ket(&basis(2), &combo([0.0, r, -r])),
        product_ket(&combo([0.0, r, -r]), &basis(0)),
        product_ket(&combo([1.0, 1.0, 1.0]), &combo([third, third, third])),
    ]
}

/// `(1/4) [I - sum_i |psi_i><psi_i|]` over the tiles UPB.
pub fn bennett_state() -> Result<BipartiteState, StateError> {
    let mut proj = CMat::zeros(9, 9);
    for psi in tiles_upb() {
        proj = &proj + &CMat::outer(&psi, &psi);
    }
    let rho = (&CMat::identity(9) - &proj).scale_real(0.25);
    BipartiteState::new(rho, StateSpec::Bennett)
}

/// Jurkowski state: the `|00>,|11>,|22>` block of ones plus the
/// `eps1, 1/eps3, 1/eps1, eps2, eps3, 1/eps2` diagonal, normalised by its trace.
pub fn jurkowski_state(eps1: f64, eps2: f64, eps3: f64) -> Result<BipartiteState, StateError> {
    let spec = StateSpec::Jurkowski { eps1, eps2, eps3 };
    spec.validate()?;
    let norm = eps1 + 1.0 / eps3 + 1.0 / eps1 + eps2 + eps3 + 1.0 / eps2 + 3.0;
    let mut m = CMat::zeros(9, 9);
    for &i in &[0, 4, 8] {
        for &j in &[0, 4, 8] {
            m[(i, j)] = c(1.0, 0.0);
        }
    }
    for (idx, v) in [(1, eps1), (2, 1.0 / eps3), (3, 1.0 / eps1), (5, eps2), (6, eps3), (7, 1.0 / eps2)] {
        m[(idx, idx)] = c(v, 0.0);
    }
    BipartiteState::new(m.scale_real(1.0 / norm), spec)
}

/// Horodecki 3x3 state for `0 <= alpha <= 1`.
pub fn horodecki_state1(alpha: f64) -> Result<BipartiteState, StateError> {
    let spec = StateSpec::Horodecki1 { alpha };
    spec.validate()?;
    let n = 8.0 * alpha + 1.0;
    let a = alpha / n;
    let mut m = CMat::diag_real(&[a; 9]);
    for &i in &[0, 4, 8] {
        for &j in &[0, 4, 8] {
            m[(i, j)] = c(a, 0.0);
        }
    }
    let diag = (alpha + 1.0) / (2.0 * n);
    let coh = (1.0 - alpha * alpha).max(0.0).sqrt() / (2.0 * n);
    m[(6, 6)] = c(diag, 0.0);
    m[(8, 8)] = c(diag, 0.0);
    m[(6, 8)] = c(coh, 0.0);
    m[(8, 6)] = c(coh, 0.0);
    BipartiteState::new(m, spec)
}

/// Horodecki state `(2/7) Delta + (alpha/7) delta+ + ((5-alpha)/7) delta-`
/// for `2 <= alpha <= 5`.
pub fn horodecki_state2(alpha: f64) -> Result<BipartiteState, StateError> {
    let spec = StateSpec::Horodecki2 { alpha };
    spec.validate()?;
    let s = 1.0 / 3f64.sqrt();
    let psi: Vec<Complex64> = (0..9).map(|k| if k % 4 == 0 { c(s, 0.0) } else { c(0.0, 0.0) }).collect();
    let delta = CMat::outer(&psi, &psi);
    let diag_proj = |pairs: [(usize, usize); 3]| {
        let mut d = [0.0; 9];
        for (a, b) in pairs {
            d[3 * a + b] = 1.0 / 3.0;
        }
        CMat::diag_real(&d)
    };
    let plus = diag_proj([(0, 1), (1, 2), (2, 0)]);
    let minus = diag_proj([(1, 0), (2, 1), (0, 2)]);
    let rho = &(&delta.scale_real(2.0 / 7.0) + &plus.scale_real(alpha / 7.0)) + &minus.scale_real((5.0 - alpha) / 7.0);
    BipartiteState::new(rho, spec)
}

/// Maximally entangled qutrit pair `(|00> + |11> + |22>)/sqrt(3)`.
pub fn max_entangled_state() -> CMat {
    let s = 1.0 / 3f64.sqrt();
    let psi: Vec<Complex64> = (0..9).map(|k| if k % 4 == 0 { c(s, 0.0) } else { c(0.0, 0.0) }).collect();
    CMat::outer(&psi, &psi)
}

/// `rho_a ⊗ rho_b`.
pub fn product_state(rho_a: &CMat, rho_b: &CMat) -> CMat {
    kron(rho_a, rho_b)
}
