use num_complex::Complex64;

use super::{c, CMat, LinalgError, HERMITIAN_TOL};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-13;

/// Eigendecomposition `h = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMat,
}

impl HermitianEigen {
    /// Rebuilds `V f(diag(values)) V^dagger` for a scalar function `f`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> Complex64) -> CMat {
        let n = self.values.len();
        let weights: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        CMat::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * weights[k] * v[(j, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> CMat {
        self.reconstruct_with(|l| c(l, 0.0))
    }
}

fn off_diagonal_norm(a: &CMat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of `a[p][q]` with a diagonal unitary
/// and then applies an ordinary real Jacobi rotation to the resulting real
/// symmetric 2x2 block.
pub fn eig_hermitian(h: &CMat) -> Result<HermitianEigen, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::DimensionMismatch {
            expected: "square matrix".into(),
            actual: format!("{}x{}", h.rows(), h.cols()),
        });
    }
    let deviation = h.hermitian_deviation();
    if deviation.is_nan() || deviation > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { deviation });
    }
    let n = h.rows();
    // exact Hermitian copy: diagonal real, lower triangle mirrored
    let mut a = CMat::from_fn(n, n, |i, j| {
        if i == j {
            c(h[(i, i)].re, 0.0)
        } else {
            (h[(i, j)] + h[(j, i)].conj()) * 0.5
        }
    });
    let mut v = CMat::identity(n);
    let scale = a.frobenius_norm();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= OFF_DIAGONAL_TOL * scale {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(LinalgError::ConvergenceFailure { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = CMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

fn rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // tan(theta) with |theta| <= pi/4
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;

    // G acts on the (p, q) plane: [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    let g_pp = c(cs, 0.0);
    let g_pq = c(sn, 0.0);
    let g_qp = -phase.conj() * sn;
    let g_qq = phase.conj() * cs;

    let n = a.rows();
    // A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A <- G^dagger A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = c(0.0, 0.0);
    a[(q, p)] = c(0.0, 0.0);
    a[(p, p)] = c(a[(p, p)].re, 0.0);
    a[(q, q)] = c(a[(q, q)].re, 0.0);
    // V <- V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Singular values of `m` in descending order.
///
/// Computed from the Hermitian dilation `[[0, m], [m^dagger, 0]]`, whose
/// spectrum is `±sigma_k` padded with zeros. Unlike the square roots of the
/// eigenvalues of `m^dagger m`, this keeps vanishing singular values at the
/// level of machine epsilon instead of its square root.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>, LinalgError> {
    let (r, cols) = m.shape();
    let n = r + cols;
    let dilation = CMat::from_fn(n, n, |i, j| {
        if i < r && j >= r {
            m[(i, j - r)]
        } else if i >= r && j < r {
            m[(j, i - r)].conj()
        } else {
            c(0.0, 0.0)
        }
    });
    let eig = eig_hermitian(&dilation)?;
    Ok(eig
        .values
        .iter()
        .rev()
        .take(r.min(cols))
        .map(|&s| s.max(0.0))
        .collect())
}

/// Trace (nuclear) norm: the sum of singular values.
pub fn trace_norm(m: &CMat) -> Result<f64, LinalgError> {
    Ok(singular_values(m)?.iter().sum())
}

/// Sign of the exponent in [`expm_unitary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpSign {
    Plus,
    Minus,
}

impl ExpSign {
    fn factor(self) -> f64 {
        match self {
            ExpSign::Plus => 1.0,
            ExpSign::Minus => -1.0,
        }
    }
}

/// `exp(sign * i * h * t)` for Hermitian `h`, via its eigendecomposition.
pub fn expm_unitary(h: &CMat, t: f64, sign: ExpSign) -> Result<CMat, LinalgError> {
    let eig = eig_hermitian(h)?;
    let s = sign.factor();
    Ok(eig.reconstruct_with(|l| Complex64::from_polar(1.0, s * l * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;

    fn spin_x() -> CMat {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        CMat::from_real(3, 3, &[0.0, r, 0.0, r, 0.0, r, 0.0, r, 0.0]).unwrap()
    }

    fn spin_y() -> CMat {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        CMat::from_vec(
            3,
            3,
            vec![z, c(0.0, -r), z, c(0.0, r), z, c(0.0, -r), z, c(0.0, r), z],
        )
        .unwrap()
    }

    fn dm(d: f64) -> CMat {
        (&kron(&spin_x(), &spin_y()) - &kron(&spin_y(), &spin_x())).scale_real(d)
    }

    /// Independent oracle: Taylor series with scaling and squaring.
    fn taylor_expm(h: &CMat, t: f64) -> CMat {
        let n = h.rows();
        let a = h.scale(c(0.0, -t / 1024.0));
        let mut sum = CMat::identity(n);
        let mut term = CMat::identity(n);
        for k in 1..=20 {
            term = term.matmul(&a).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        for _ in 0..10 {
            sum = sum.matmul(&sum);
        }
        sum
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let e = eig_hermitian(&CMat::diag_real(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn spin_x_spectrum() {
        // characteristic polynomial l^3 - l = 0
        let e = eig_hermitian(&spin_x()).unwrap();
        for (got, want) in e.values.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn dm_spectrum_symmetric() {
        let h = dm(0.6);
        let plus = eig_hermitian(&h).unwrap().values;
        let minus = eig_hermitian(&h.scale_real(-1.0)).unwrap().values;
        for (a, b) in plus.iter().zip(minus.iter().rev()) {
            assert!((a + b).abs() < 1e-12, "{plus:?} vs {minus:?}");
        }
    }

    #[test]
    fn reconstruction_and_unitarity() {
        let h = dm(0.6);
        let e = eig_hermitian(&h).unwrap();
        assert!((&e.reconstruct() - &h).frobenius_norm() < 1e-10);
        assert!(e.vectors.unitarity_deviation() < 1e-10);
        let sum: f64 = e.values.iter().sum();
        assert!((sum - h.trace().re).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMat::identity(3);
        m[(0, 2)] = c(1.0, 0.0);
        assert!(matches!(eig_hermitian(&m), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn zero_matrix_decomposes() {
        let e = eig_hermitian(&CMat::zeros(4, 4)).unwrap();
        assert_eq!(e.values, vec![0.0; 4]);
        assert_eq!(e.vectors, CMat::identity(4));
    }

    #[test]
    fn trace_norm_identity_and_projector() {
        assert!((trace_norm(&CMat::identity(3)).unwrap() - 3.0).abs() < 1e-12);
        let psi = [c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let p = CMat::outer(&psi, &psi);
        assert!((trace_norm(&p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_values_of_rectangular() {
        // rows orthogonal with norms 2 and 3
        let m = CMat::from_real(2, 3, &[2.0, 0.0, 0.0, 0.0, 0.0, 3.0]).unwrap();
        let s = singular_values(&m).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s[0] - 3.0).abs() < 1e-12 && (s[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn expm_trivial_cases() {
        let h = dm(0.6);
        assert!(expm_unitary(&h, 0.0, ExpSign::Minus).unwrap().max_abs_diff(&CMat::identity(9)) < 1e-14);
        let zero = CMat::zeros(9, 9);
        assert_eq!(expm_unitary(&zero, 3.0, ExpSign::Minus).unwrap(), CMat::identity(9));
    }

    #[test]
    fn expm_matches_taylor_oracle() {
        let h = dm(0.6);
        let u = expm_unitary(&h, 1.3, ExpSign::Minus).unwrap();
        assert!((&u - &taylor_expm(&h, 1.3)).frobenius_norm() < 1e-9);
        assert!(u.unitarity_deviation() < 1e-10);
    }

    #[test]
    fn expm_group_inverse() {
        let h = dm(0.8);
        let fwd = expm_unitary(&h, 2.1, ExpSign::Minus).unwrap();
        let back = expm_unitary(&h, -2.1, ExpSign::Minus).unwrap();
        assert!(fwd.matmul(&back).max_abs_diff(&CMat::identity(9)) < 1e-10);
    }
}
