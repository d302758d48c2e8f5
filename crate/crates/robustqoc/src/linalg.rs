//! Dense complex matrix algebra: Kronecker products, matrix exponentials,
//! eigendecomposition of unitaries, and the row-stacking vectorization
//! convention used by every downstream module.
//!
//! The vectorization convention is fixed crate-wide: `vec(A rho B) =
//! (A (x) B^T) vec(rho)`, i.e. the matrix is flattened row by row. The
//! coherent part of a vectorized generator then reads
//! `-i (H (x) I - I (x) H^T)` and the sandwich term `F rho F^dag` becomes
//! `F (x) F^*`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::Error;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const HERMITICITY_TOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

/// Maximum entrywise deviation from Hermiticity, `max |A - A^dag|`.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMat) -> bool {
    m.is_square() && hermiticity_defect(m) < HERMITICITY_TOL
}

/// Frobenius norm, `sqrt(sum |m_ij|^2)`.
pub fn frobenius_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hilbert-Schmidt inner product `Tr(A^dag B)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Kronecker product. Dimensions multiply.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Row-stacking vectorization: the rows of `m` are concatenated into a
/// single column vector, so that `vectorize(A m B) = kron(A, B^T) * vectorize(m)`.
pub fn vectorize(m: &CMat) -> CVec {
    let n = m.nrows();
    let mut v = CVec::zeros(n * m.ncols());
    for i in 0..n {
        for j in 0..m.ncols() {
            v[i * m.ncols() + j] = m[(i, j)];
        }
    }
    v
}

/// Inverse of [`vectorize`] for square matrices.
pub fn devectorize(v: &CVec, n: usize) -> CMat {
    assert_eq!(v.len(), n * n, "vector length must be n^2");
    CMat::from_fn(n, n, |i, j| v[i * n + j])
}

/// The superoperator implementing `rho -> U rho U^dag` on vectorized
/// operators: `U (x) U^*` under row-stacking.
pub fn conjugation_superop(u: &CMat) -> CMat {
    kron(u, &u.map(|z| z.conj()))
}

/// Matrix exponential of a general square complex matrix.
pub fn expm(m: &CMat) -> Result<CMat, Error> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("expm input"));
    }
    Ok(m.clone().exp())
}

/// `exp(scale * H)` for Hermitian `H` via eigendecomposition. Exact
/// unitarity when `scale` is purely imaginary.
pub fn expm_hermitian(h: &CMat, scale: Complex64) -> CMat {
    let n = h.nrows();
    let se = SymmetricEigen::new(h.clone());
    let phases: Vec<Complex64> =
        se.eigenvalues.iter().map(|&e| (scale * e).exp()).collect();
    let v = &se.eigenvectors;
    let mut out = CMat::zeros(n, n);
    for k in 0..n {
        let col = v.column(k);
        for i in 0..n {
            let a = phases[k] * col[i];
            for j in 0..n {
                out[(i, j)] += a * col[j].conj();
            }
        }
    }
    out
}

/// Eigendecomposition of a unitary (normal) matrix.
///
/// Returns `(eigenvalues, eigenvectors)` with `U v_k = lambda_k v_k`,
/// eigenvectors orthonormal. Works by simultaneously diagonalizing the
/// commuting Hermitian parts `(U + U^dag)/2` and `(U - U^dag)/(2i)`:
/// a generic linear combination is diagonalized first and degenerate
/// clusters are resolved with the orthogonal combination.
pub fn eig_unitary(u: &CMat) -> Result<(Vec<Complex64>, Vec<CVec>), Error> {
    // Two mixing angles; the second is a fallback for the measure-zero
    // coincidence cos(e_i - t) = cos(e_j - t) with e_i != e_j.
    for &t in &[0.587_401_051_968_2_f64, 1.128_374_209_331_7] {
        if let Some(res) = try_eig_unitary(u, t) {
            return Ok(res);
        }
    }
    Err(Error::EigFailure)
}

fn try_eig_unitary(u: &CMat, t: f64) -> Option<(Vec<Complex64>, Vec<CVec>)> {
    let n = u.nrows();
    let udag = u.adjoint();
    let re = (u + &udag).map(|z| z * 0.5);
    let im = (u - &udag).map(|z| z * c(0.0, -0.5));
    let b = re.map(|z| z * t.cos()) + im.map(|z| z * t.sin());
    let cm = re.map(|z| z * (-t.sin())) + im.map(|z| z * t.cos());
    let se = SymmetricEigen::new(b);
    if se.eigenvalues.iter().any(|v| !v.is_finite()) {
        return None;
    }
    // Sort for stable clustering.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b2| se.eigenvalues[a].total_cmp(&se.eigenvalues[b2]));
    let mut vecs: Vec<CVec> = idx
        .iter()
        .map(|&k| se.eigenvectors.column(k).into_owned())
        .collect();
    let vals: Vec<f64> = idx.iter().map(|&k| se.eigenvalues[k]).collect();

    // Resolve clusters of the first combination with the second.
    let ctol = 1e-7 * (1.0 + vals.iter().fold(0.0_f64, |a, &v| a.max(v.abs())));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (vals[end] - vals[end - 1]).abs() < ctol {
            end += 1;
        }
        let d = end - start;
        if d > 1 {
            let w = CMat::from_columns(
                &vecs[start..end].iter().map(|v| v.as_slice().into()).collect::<Vec<_>>(),
            );
            let m = w.adjoint() * &cm * &w;
            let sub = SymmetricEigen::new(m);
            let rot = &w * &sub.eigenvectors;
            for (k, col) in (start..end).zip(rot.column_iter()) {
                vecs[k] = col.into_owned();
            }
        }
        start = end;
    }

    let mut lambdas = Vec::with_capacity(n);
    for v in &vecs {
        let uv = u * v;
        let lam = v.dotc(&uv);
        // Residual check guards against an unlucky mixing angle.
        let resid = (&uv - v.map(|z| z * lam)).norm();
        if resid > 1e-8 {
            return None;
        }
        // Project onto the unit circle; U is unitary.
        lambdas.push(lam / lam.norm());
    }
    Some((lambdas, vecs))
}

/// A density matrix: Hermitian, unit trace, positive semidefinite
/// (within tolerance).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-10;
    pub const EIG_TOL: f64 = -1e-8;

    pub fn new(mat: CMat) -> Result<Self, Error> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        let hd = hermiticity_defect(&mat);
        if hd >= HERMITICITY_TOL {
            return Err(Error::NotHermitian(hd));
        }
        let tr = mat.trace();
        if (tr - c(1.0, 0.0)).norm() >= Self::TRACE_TOL {
            return Err(Error::TraceDeviation((tr - c(1.0, 0.0)).norm()));
        }
        let min_eig = SymmetricEigen::new(mat.clone())
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        if min_eig <= Self::EIG_TOL {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(Self { mat })
    }

    /// Construct with relaxed tolerances, as appropriate for the output
    /// of a numerical integrator.
    pub fn new_relaxed(mat: CMat, herm_tol: f64, trace_tol: f64, eig_floor: f64) -> Result<Self, Error> {
        let hd = hermiticity_defect(&mat);
        if hd >= herm_tol {
            return Err(Error::NotHermitian(hd));
        }
        let tr = mat.trace();
        if (tr - c(1.0, 0.0)).norm() >= trace_tol {
            return Err(Error::TraceDeviation((tr - c(1.0, 0.0)).norm()));
        }
        let min_eig = SymmetricEigen::new(mat.clone())
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        if min_eig <= eig_floor {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(Self { mat })
    }

    /// Pure state `|psi><psi|` from a (not necessarily normalized) ket.
    pub fn pure(psi: &CVec) -> Self {
        let norm = psi.norm();
        let psi = psi.map(|z| z / norm);
        let n = psi.len();
        let mat = CMat::from_fn(n, n, |i, j| psi[i] * psi[j].conj());
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }
}

// Pauli matrices and friends.

pub fn sigma_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn sigma_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn sigma_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

pub fn sigma_plus() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)])
}

pub fn sigma_minus() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)])
}
