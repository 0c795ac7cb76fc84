//! Index reshuffles on operators over a bipartite space `A ⊗ B`.
//!
//! Composite indices are `dim_b * a + b`, i.e. subsystem A is the slow index.

use num_complex::Complex64;

use super::{CMat, LinalgError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteDims {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteDims {
    pub const QUTRITS: BipartiteDims = BipartiteDims { dim_a: 3, dim_b: 3 };

    pub fn new(dim_a: usize, dim_b: usize) -> Self {
        assert!(dim_a > 0 && dim_b > 0, "subsystem dimensions must be positive");
        BipartiteDims { dim_a, dim_b }
    }

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    fn index(&self, a: usize, b: usize) -> usize {
        self.dim_b * a + b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Transposes the indices of one subsystem.
pub fn partial_transpose(m: &CMat, dims: BipartiteDims, subsystem: Subsystem) -> Result<CMat, LinalgError> {
    m.ensure_square(dims.total())?;
    let mut out = CMat::zeros(m.rows(), m.cols());
    for i in 0..dims.dim_a {
        for j in 0..dims.dim_b {
            for k in 0..dims.dim_a {
                for l in 0..dims.dim_b {
                    let v = m[(dims.index(i, j), dims.index(k, l))];
                    let (row, col) = match subsystem {
                        Subsystem::B => (dims.index(i, l), dims.index(k, j)),
                        Subsystem::A => (dims.index(k, j), dims.index(i, l)),
                    };
                    out[(row, col)] = v;
                }
            }
        }
    }
    Ok(out)
}

/// Traces out `traced`, returning the reduced operator on the other factor.
pub fn partial_trace(m: &CMat, dims: BipartiteDims, traced: Subsystem) -> Result<CMat, LinalgError> {
    m.ensure_square(dims.total())?;
    Ok(match traced {
        Subsystem::B => CMat::from_fn(dims.dim_a, dims.dim_a, |i, k| {
            (0..dims.dim_b)
                .map(|j| m[(dims.index(i, j), dims.index(k, j))])
                .sum::<Complex64>()
        }),
        Subsystem::A => CMat::from_fn(dims.dim_b, dims.dim_b, |j, l| {
            (0..dims.dim_a)
                .map(|i| m[(dims.index(i, j), dims.index(i, l))])
                .sum::<Complex64>()
        }),
    })
}

/// Realignment `R[(i,k),(j,l)] = m[(i,j),(k,l)]`, a `dim_a^2 x dim_b^2` matrix.
pub fn realign(m: &CMat, dims: BipartiteDims) -> Result<CMat, LinalgError> {
    m.ensure_square(dims.total())?;
    let (da, db) = (dims.dim_a, dims.dim_b);
    let mut out = CMat::zeros(da * da, db * db);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    out[(i * da + k, j * db + l)] = m[(dims.index(i, j), dims.index(k, l))];
                }
            }
        }
    }
    Ok(out)
}
