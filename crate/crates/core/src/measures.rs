//! Negativity, the covariance-corrected CCNR witness, and the verdict built
//! from the pair.

use std::fmt;

use crate::linalg::{kron, partial_trace, partial_transpose, realign, trace_norm, CMat, LinalgError, Subsystem};
use crate::states::BipartiteState;

/// Threshold above which a witness is considered to fire.
pub const WITNESS_TOL: f64 = 1e-9;

/// Tiny negative negativities from rounding are reported as zero.
const NEGATIVITY_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// Negativity fires: distillable entanglement.
    Free,
    /// PPT but CCNR fires: bound entanglement.
    Bound,
    /// Neither witness fires.
    Undetected,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Free => "free",
            Classification::Bound => "bound",
            Classification::Undetected => "undetected",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "free" => Some(Classification::Free),
            "bound" => Some(Classification::Bound),
            "undetected" => Some(Classification::Undetected),
            _ => None,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureRecord {
    pub negativity: f64,
    pub ccnr: f64,
    /// Plain realignment value `||rho^R|| - 1`, kept as a cross-check.
    pub realignment: f64,
    pub classification: Classification,
}

/// Negativity of an operator on the qutrit pair, transposing `subsystem`.
pub fn negativity_of(rho: &CMat, subsystem: Subsystem) -> Result<f64, LinalgError> {
    let pt = partial_transpose(rho, crate::linalg::BipartiteDims::QUTRITS, subsystem)?;
    let n = (trace_norm(&pt)? - 1.0) / 2.0;
    Ok(if n < 0.0 && n > -NEGATIVITY_CLAMP { 0.0 } else { n })
}

/// `(||rho^{T_B}|| - 1) / 2`.
pub fn negativity(state: &BipartiteState) -> Result<f64, LinalgError> {
    negativity_of(state.rho(), Subsystem::B)
}

/// `||(rho - rho_A ⊗ rho_B)^R|| - sqrt((1 - Tr rho_A^2)(1 - Tr rho_B^2))`.
pub fn ccnr(state: &BipartiteState) -> Result<f64, LinalgError> {
    let dims = state.dims();
    let rho = state.rho();
    let rho_a = partial_trace(rho, dims, Subsystem::B)?;
    let rho_b = partial_trace(rho, dims, Subsystem::A)?;
    let diff = rho - &kron(&rho_a, &rho_b);
    let norm = trace_norm(&realign(&diff, dims)?)?;
    let deficit_a = 1.0 - rho_a.matmul(&rho_a).trace().re;
    let deficit_b = 1.0 - rho_b.matmul(&rho_b).trace().re;
    Ok(norm - (deficit_a * deficit_b).max(0.0).sqrt())
}

/// `||rho^R|| - 1`; positive values witness entanglement.
pub fn realignment(state: &BipartiteState) -> Result<f64, LinalgError> {
    Ok(trace_norm(&realign(state.rho(), state.dims())?)? - 1.0)
}

pub fn classify(negativity: f64, ccnr: f64) -> Classification {
    if negativity > WITNESS_TOL {
        Classification::Free
    } else if ccnr > WITNESS_TOL {
        Classification::Bound
    } else {
        Classification::Undetected
    }
}

pub fn measure(state: &BipartiteState) -> Result<MeasureRecord, LinalgError> {
    let negativity = negativity(state)?;
    let ccnr = ccnr(state)?;
    Ok(MeasureRecord {
        negativity,
        ccnr,
        realignment: realignment(state)?,
        classification: classify(negativity, ccnr),
    })
}
