//! Dense complex matrix helpers shared by every module.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

/// Reciprocal condition number below which a matrix is treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-13;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// Frobenius norm.
pub fn frob(m: &CMatrix) -> f64 {
    m.norm()
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Assembles `[[a, b], [c, d]]` from four equally sized square blocks.
pub fn block(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut m = zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}

/// Splits a `2n x 2n` matrix into its `n x n` blocks `(A, B, C, D)`.
pub fn split(m: &CMatrix) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let n = m.nrows() / 2;
    (
        m.view((0, 0), (n, n)).into_owned(),
        m.view((0, n), (n, n)).into_owned(),
        m.view((n, 0), (n, n)).into_owned(),
        m.view((n, n), (n, n)).into_owned(),
    )
}

pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

/// `u^+ v`.
pub fn inner(u: &CVector, v: &CVector) -> C64 {
    u.dotc(v)
}

pub fn stack(upper: &CVector, lower: &CVector) -> CVector {
    let n = upper.len();
    let mut v = CVector::zeros(n + lower.len());
    v.rows_mut(0, n).copy_from(upper);
    v.rows_mut(n, lower.len()).copy_from(lower);
    v
}

pub fn ensure_square(m: &CMatrix, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::dims(
            format!("{n}x{n}"),
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(())
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    frob(&(m - m.adjoint()))
}

pub fn anti_hermitian_residual(m: &CMatrix) -> f64 {
    frob(&(m + m.adjoint()))
}

/// Relative hermiticity test: `||m - m^+|| <= tol (1 + ||m||)`.
pub fn require_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    let residual = hermitian_residual(m);
    if residual > tol * (1.0 + frob(m)) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

pub fn require_anti_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    let residual = anti_hermitian_residual(m);
    if residual > tol * (1.0 + frob(m)) {
        return Err(Error::NotAntiHermitian { residual });
    }
    Ok(())
}

pub fn unitary_residual(m: &CMatrix) -> f64 {
    frob(&(m.adjoint() * m - identity(m.nrows())))
}

pub fn require_unitary(m: &CMatrix, tol: f64) -> Result<()> {
    let residual = unitary_residual(m);
    if residual > tol {
        return Err(Error::NotUnitary { residual });
    }
    Ok(())
}

/// Hermitian part `(m + m^+)/2`, used to remove rounding asymmetry.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn anti_hermitian_part(m: &CMatrix) -> CMatrix {
    (m - m.adjoint()).scale(0.5)
}

pub fn singular_values(m: &CMatrix) -> DVector<f64> {
    m.clone().svd(false, false).singular_values
}

/// Reciprocal 2-norm condition number.
pub fn rcond(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    let max = s.max();
    if max == 0.0 {
        return 0.0;
    }
    s.min() / max
}

/// Inverse with a conditioning guard; `what` names the matrix in the error.
pub fn checked_inverse(m: &CMatrix, what: &'static str) -> Result<CMatrix> {
    if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) || rcond(m) < SINGULAR_RCOND {
        return Err(Error::Singular { what });
    }
    m.clone().try_inverse().ok_or(Error::Singular { what })
}

/// Number of singular values above `tol * max(1, s_max)`.
pub fn numerical_rank(m: &CMatrix, tol: f64) -> usize {
    let s = singular_values(m);
    let cutoff = tol * s.max().max(1.0);
    s.iter().filter(|&&x| x > cutoff).count()
}

/// Matrix exponential (Padé scaling-and-squaring).
pub fn expm(m: &CMatrix) -> CMatrix {
    m.exp()
}

/// Real spectrum of a hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Scalar multiple of the identity.
pub fn scalar(n: usize, z: C64) -> CMatrix {
    identity(n) * z
}
