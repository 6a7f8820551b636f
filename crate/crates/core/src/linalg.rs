//! Small dense linear-algebra helpers for phase-space matrices.
//!
//! Complex Hermitian matrices `P + iQ` (P symmetric, Q antisymmetric) are
//! handled through their real embedding `[[P, -Q], [Q, P]]`, which has the
//! same spectrum with every eigenvalue doubled. That keeps every solver on
//! the real symmetric path.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::SN;

/// The symplectic form Ω = ⊕ₖ [[0, 1], [−1, 0]] over `n` modes.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Real embedding of the Hermitian matrix `re + i·im`.
pub fn hermitian_embedding(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<f64> {
    let n = re.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(re);
    out.view_mut((n, n), (n, n)).copy_from(re);
    out.view_mut((0, n), (n, n)).copy_from(&(-im));
    out.view_mut((n, 0), (n, n)).copy_from(im);
    out
}

pub fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Smallest eigenvalue of the Hermitian matrix `re + i·im`.
pub fn min_hermitian_eigenvalue(re: &DMatrix<f64>, im: &DMatrix<f64>) -> f64 {
    min_symmetric_eigenvalue(&hermitian_embedding(re, im))
}

/// Smallest eigenvalue of `m + i·sn·Ω`, the Heisenberg matrix of a CM.
///
/// The spectrum of `m − i·sn·Ω` is identical (complex conjugate), so the sign
/// convention does not matter here.
pub fn heisenberg_min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows() / 2;
    min_hermitian_eigenvalue(m, &(symplectic_form(n) * SN))
}

/// Moore–Penrose inverse of the Hermitian matrix `re + i·im`, returned as
/// `(re', im')` with `(re + i·im)^+ = re' + i·im'`.
///
/// Eigenvalues below `rcond · max|λ|` are treated as zero.
pub fn hermitian_pinv(
    re: &DMatrix<f64>,
    im: &DMatrix<f64>,
    rcond: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = re.nrows();
    let eig = SymmetricEigen::new(hermitian_embedding(re, im));
    let scale = eig.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let cutoff = rcond * scale;
    let inv: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l.abs() > cutoff { 1.0 / l } else { 0.0 })
        .collect();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, w) in inv.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*w);
    }
    let full = scaled * v.transpose();
    let re_inv = full.view((0, 0), (n, n)).into_owned();
    let im_inv = full.view((n, 0), (n, n)).into_owned();
    (re_inv, im_inv)
}

/// Largest singular value.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Symplectic eigenvalues (ascending) of a symmetric positive-definite
/// `2n × 2n` matrix: the moduli of the eigenvalues of `iΩΣ`.
///
/// With `Σ = L Lᵀ`, `ΩΣ` is similar to the antisymmetric `K = Lᵀ Ω L`, whose
/// squared singular values are the `ν²`, each appearing twice.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = cov.nrows();
    if dim == 0 || !dim.is_multiple_of(2) || cov.ncols() != dim {
        return Err(Error::NumericalFailure(format!(
            "symplectic spectrum needs an even square matrix, got {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    let asym = max_asymmetry(cov);
    if asym > crate::SYMMETRY_TOL * max_abs(cov).max(1.0) {
        return Err(Error::NumericalFailure(format!(
            "matrix is not symmetric (asymmetry {asym:e})"
        )));
    }
    let sym = symmetrize(cov);
    let chol = sym
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure("matrix is not positive definite".to_owned()))?;
    let l = chol.l();
    let k = l.transpose() * symplectic_form(dim / 2) * &l;
    let ktk = k.transpose() * &k;
    let mut lambda: Vec<f64> = SymmetricEigen::new(symmetrize(&ktk))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    lambda.sort_by(f64::total_cmp);
    Ok(lambda
        .chunks_exact(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}
