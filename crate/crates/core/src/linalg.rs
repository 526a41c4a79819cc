//! Dense complex-matrix primitives used by the alignment schemes.
//!
//! Everything here works on [`ComplexMatrix`] (an `nalgebra` dynamic matrix of
//! `Complex<f64>`). Row and column indices are 0-based, except for
//! [`submatrix_columns`], which takes the inclusive 1-based column range used
//! when splitting IDFT matrices into precoder blocks.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar, double precision.
pub type C64 = Complex64;

/// Dense complex matrix, column-major storage.
pub type ComplexMatrix = DMatrix<C64>;

/// Dense complex column vector.
pub type ComplexVector = DVector<C64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("column range {first}..={last} out of bounds for {cols} columns")]
    InvalidRange { first: usize, last: usize, cols: usize },
    #[error("matrix is singular or row-rank deficient (rank {rank}, need {needed})")]
    Singular { rank: usize, needed: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// The unitary `n`-point inverse DFT matrix: entry `(a, b)` (0-based) is
/// `exp(j 2π a b / n) / √n`.
pub fn idft_matrix(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(LinalgError::InvalidDimension("IDFT size must be at least 1".into()));
    }
    let scale = 1.0 / (n as f64).sqrt();
    Ok(ComplexMatrix::from_fn(n, n, |a, b| {
        // reduce the exponent first so large products stay exact
        let k = (a * b) % n;
        C64::from_polar(scale, 2.0 * PI * k as f64 / n as f64)
    }))
}

/// Columns `first..=last` (1-based, inclusive) of `m`.
pub fn submatrix_columns(m: &ComplexMatrix, first: usize, last: usize) -> Result<ComplexMatrix> {
    if first == 0 || first > last || last > m.ncols() {
        return Err(LinalgError::InvalidRange { first, last, cols: m.ncols() });
    }
    Ok(m.columns(first - 1, last - first + 1).into_owned())
}

/// Gathers the listed columns (0-based) in the given order.
pub fn select_columns(m: &ComplexMatrix, cols: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}

/// Gathers the listed rows (0-based) in the given order.
pub fn select_rows(m: &ComplexMatrix, rows: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows.len(), m.ncols(), |r, c| m[(rows[r], c)])
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Default rank threshold: `max(rows, cols) · σ_max · ε`.
pub fn default_rank_tolerance(m: &ComplexMatrix) -> f64 {
    let smax = singular_values(m).first().copied().unwrap_or(0.0);
    m.nrows().max(m.ncols()) as f64 * smax * f64::EPSILON
}

/// Number of singular values strictly above `tol` (or the default threshold).
pub fn numerical_rank(m: &ComplexMatrix, tol: Option<f64>) -> usize {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    let tol = tol.unwrap_or(m.nrows().max(m.ncols()) as f64 * smax * f64::EPSILON);
    sv.iter().filter(|&&s| s > tol).count()
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

/// Right inverse `mᴴ (m mᴴ)⁻¹` of a full-row-rank matrix.
///
/// Computed through a thin QR factorisation of `mᴴ` (`mᴴ = Q R`, so the right
/// inverse is `Q R⁻ᴴ`) rather than by forming `m mᴴ`.
pub fn right_pseudoinverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_finite(m)?;
    let (rows, cols) = m.shape();
    if rows == 0 || rows > cols {
        return Err(LinalgError::InvalidDimension(format!(
            "right inverse needs 1 <= rows <= cols, got {rows}x{cols}"
        )));
    }
    let rank = numerical_rank(m, None);
    if rank < rows {
        return Err(LinalgError::Singular { rank, needed: rows });
    }
    let qr = m.adjoint().qr();
    let q = qr.q();
    let r = qr.r();
    let rh = r.adjoint();
    let rh_inv = rh
        .solve_lower_triangular(&ComplexMatrix::identity(rows, rows))
        .ok_or(LinalgError::Singular { rank, needed: rows })?;
    Ok(q * rh_inv)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Block-diagonal assembly; blocks need not be square.
pub fn block_diag(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r0, c0), b.shape()).copy_from(b);
        r0 += b.nrows();
        c0 += b.ncols();
    }
    out
}

/// Stacks matrices with equal column counts on top of each other.
pub fn vstack(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    if blocks.iter().any(|b| b.ncols() != cols) {
        return Err(LinalgError::ShapeMismatch("vstack: column counts differ".into()));
    }
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut r0 = 0;
    for b in blocks {
        out.view_mut((r0, 0), b.shape()).copy_from(b);
        r0 += b.nrows();
    }
    Ok(out)
}

/// Places matrices with equal row counts side by side.
pub fn hstack(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    if blocks.iter().any(|b| b.nrows() != rows) {
        return Err(LinalgError::ShapeMismatch("hstack: row counts differ".into()));
    }
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut c0 = 0;
    for b in blocks {
        out.view_mut((0, c0), b.shape()).copy_from(b);
        c0 += b.ncols();
    }
    Ok(out)
}

/// Diagonal matrix from a slice of entries.
pub fn diag(entries: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&DVector::from_column_slice(entries))
}

/// Minimum-norm least-squares solution of `a x = b` via the SVD, together with
/// the numerical rank of `a` used to truncate it.
pub fn least_squares(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<(ComplexMatrix, usize)> {
    if a.nrows() != b.nrows() {
        return Err(LinalgError::ShapeMismatch(format!(
            "least squares: a has {} rows, b has {}",
            a.nrows(),
            b.nrows()
        )));
    }
    ensure_finite(a)?;
    let rank = numerical_rank(a, None);
    if rank == 0 {
        return Ok((ComplexMatrix::zeros(a.ncols(), b.ncols()), 0));
    }
    let svd = a.clone().svd(true, true);
    let tol = default_rank_tolerance(a);
    let x = svd
        .solve(b, tol)
        .map_err(|e| LinalgError::InvalidDimension(e.to_string()))?;
    Ok((x, rank))
}

/// `log₂ det(m)` for a Hermitian positive-definite matrix.
pub fn log2_det_hpd(m: &ComplexMatrix) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::ShapeMismatch("log-det needs a square matrix".into()));
    }
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let chol = m.clone().cholesky().ok_or(LinalgError::Singular { rank: 0, needed: m.nrows() })?;
    let l = chol.l();
    Ok(2.0 * l.diagonal().iter().map(|d| d.re.log2()).sum::<f64>())
}

/// `log₂ det(I + S Sᴴ N⁻¹)` evaluated as `log₂ det(N + S Sᴴ) − log₂ det(N)` for a
/// Hermitian positive-definite noise covariance `N`.
pub fn log2_det_snr(signal: &ComplexMatrix, noise_cov: &ComplexMatrix) -> Result<f64> {
    if signal.nrows() != noise_cov.nrows() {
        return Err(LinalgError::ShapeMismatch("signal and covariance sizes differ".into()));
    }
    let total = noise_cov + signal * signal.adjoint();
    Ok(log2_det_hpd(&total)? - log2_det_hpd(noise_cov)?)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn idft_small_cases() {
        let o1 = idft_matrix(1).unwrap();
        assert_eq!(o1.shape(), (1, 1));
        assert!((o1[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        let o2 = idft_matrix(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = ComplexMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
        assert!(max_abs_diff(&o2, &want) < 1e-15);

        let o4 = idft_matrix(4).unwrap();
        let col2 = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        for (r, want) in col2.iter().enumerate() {
            assert!((o4[(r, 1)] - want).norm() < 1e-15);
        }
        assert!(matches!(idft_matrix(0), Err(LinalgError::InvalidDimension(_))));
    }

    #[test]
    fn column_slices() {
        let o2 = idft_matrix(2).unwrap();
        let first = submatrix_columns(&o2, 1, 1).unwrap();
        assert_eq!(first.shape(), (2, 1));
        assert!((first[(1, 0)].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);

        let o4 = idft_matrix(4).unwrap();
        let tail = submatrix_columns(&o4, 3, 4).unwrap();
        assert_eq!(tail, o4.columns(2, 2).into_owned());
        assert_eq!(submatrix_columns(&o4, 1, 4).unwrap(), o4);

        assert!(submatrix_columns(&o4, 0, 1).is_err());
        assert!(submatrix_columns(&o4, 3, 2).is_err());
        assert!(submatrix_columns(&o4, 2, 5).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&idft_matrix(4).unwrap(), None), 4);
        let ones = ComplexMatrix::from_element(2, 2, c(1.0, 0.0));
        assert_eq!(numerical_rank(&ones, None), 1);
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(3, 3), None), 0);
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(0, 3), None), 0);
    }

    #[test]
    fn right_inverse_examples() {
        let m = ComplexMatrix::from_row_slice(
            2,
            3,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        );
        let p = right_pseudoinverse(&m).unwrap();
        assert!(max_abs_diff(&p, &m.adjoint()) < 1e-15);

        let two = ComplexMatrix::from_element(1, 1, c(2.0, 0.0));
        let inv = right_pseudoinverse(&two).unwrap();
        assert!((inv[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);

        let deficient = ComplexMatrix::from_element(2, 3, c(1.0, 1.0));
        assert!(matches!(right_pseudoinverse(&deficient), Err(LinalgError::Singular { rank: 1, needed: 2 })));
        let tall = ComplexMatrix::from_element(3, 2, c(1.0, 0.0));
        assert!(right_pseudoinverse(&tall).is_err());
    }

    #[test]
    fn kron_and_block_diag() {
        let three = ComplexMatrix::from_element(1, 1, c(3.0, 0.0));
        let k = kron(&ComplexMatrix::identity(2, 2), &three);
        assert_eq!(k, diag(&[c(3.0, 0.0), c(3.0, 0.0)]));

        let one = ComplexMatrix::from_element(1, 1, c(1.0, 0.0));
        let two = ComplexMatrix::from_element(1, 1, c(2.0, 0.0));
        assert_eq!(block_diag(&[one, two]), diag(&[c(1.0, 0.0), c(2.0, 0.0)]));

        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(3.0, 0.0), c(0.0, -1.0), c(4.0, 4.0)]);
        assert_eq!(kron(&m, &ComplexMatrix::identity(1, 1)), m);
    }

    #[test]
    fn log_det_of_diagonal() {
        let m = diag(&[c(2.0, 0.0), c(8.0, 0.0)]);
        assert!((log2_det_hpd(&m).unwrap() - 4.0).abs() < 1e-12);
        let s = ComplexMatrix::from_element(1, 1, c(0.0, 3.0));
        let n = ComplexMatrix::identity(1, 1);
        assert!((log2_det_snr(&s, &n).unwrap() - 10f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn least_squares_min_norm_on_wide_system() {
        // x1 + x2 = 2 has minimum-norm solution (1, 1)
        let a = ComplexMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(1.0, 0.0)]);
        let b = ComplexMatrix::from_element(1, 1, c(2.0, 0.0));
        let (x, rank) = least_squares(&a, &b).unwrap();
        assert_eq!(rank, 1);
        assert!((x[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((x[(1, 0)] - c(1.0, 0.0)).norm() < 1e-12);
    }
}
