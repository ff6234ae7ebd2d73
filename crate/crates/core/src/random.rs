//! Seeded samplers for test points. Every sampler draws from a caller-owned
//! [`rand::Rng`]; [`seeded`] gives the crate's deterministic generator.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{self, c, CMatrix, CVector, C64};
use crate::twistor_core::{Realization, TwistorVector};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn complex_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

pub fn complex_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Gaussian hermitian matrix.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    matrix::hermitian_part(&complex_matrix(rng, n, n))
}

/// Hermitian matrix rescaled to spectral norm `norm`.
pub fn hermitian_with_norm<R: Rng + ?Sized>(rng: &mut R, n: usize, norm: f64) -> CMatrix {
    let h = hermitian(rng, n);
    let s = matrix::singular_values(&h).max();
    if s == 0.0 {
        return h;
    }
    h * c(norm / s, 0.0)
}

pub fn anti_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    matrix::anti_hermitian_part(&complex_matrix(rng, n, n))
}

/// Haar-like unitary from the QR factorisation of a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let qr = complex_matrix(rng, n, n).qr();
    let q = qr.q();
    let r = qr.r();
    let phases = CMatrix::from_diagonal(&CVector::from_fn(n, |i, _| {
        let d = r[(i, i)];
        if d.norm() == 0.0 {
            matrix::ONE
        } else {
            d / d.norm()
        }
    }));
    q * phases
}

/// Invertible matrix `U diag(s) V` with singular values log-uniform in
/// `[1, max_condition]`, so its condition number is at most `max_condition`.
pub fn invertible_with_condition<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_condition: f64,
) -> CMatrix {
    let u = unitary(rng, n);
    let v = unitary(rng, n);
    let log_max = max_condition.ln();
    let s = CVector::from_fn(n, |_, _| c((rng.random::<f64>() * log_max).exp(), 0.0));
    u * CMatrix::from_diagonal(&s) * v
}

/// Null twistor in the diagonal realization: `|eta| = |xi|`.
pub fn null_twistor_diagonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> TwistorVector {
    let eta = complex_vector(rng, n);
    let mut xi = complex_vector(rng, n);
    xi *= c(eta.norm() / xi.norm(), 0.0);
    TwistorVector::new(Realization::Diagonal, eta, xi).expect("equal lengths")
}

/// Null twistor in the anti-diagonal realization with `zeta != 0`:
/// `upsilon` is projected so that `zeta^+ upsilon` is real.
pub fn null_twistor_antidiagonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> TwistorVector {
    let zeta = complex_vector(rng, n);
    let mut upsilon = complex_vector(rng, n);
    let overlap = matrix::inner(&zeta, &upsilon);
    let fix = c(0.0, overlap.im / zeta.norm_squared());
    upsilon -= &zeta * fix;
    TwistorVector::new(Realization::AntiDiagonal, upsilon, zeta).expect("equal lengths")
}

/// Random real matrix with entries in `[-1, 1]`.
pub fn real_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Real invertible matrix with condition number at most `max_condition`,
/// built from random orthogonal factors.
pub fn real_invertible_with_condition<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_condition: f64,
) -> DMatrix<f64> {
    let q1 = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal)).qr().q();
    let q2 = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal)).qr().q();
    let log_max = max_condition.ln();
    let s = nalgebra::DVector::from_fn(n, |_, _| (rng.random::<f64>() * log_max).exp());
    q1 * DMatrix::from_diagonal(&s) * q2
}
