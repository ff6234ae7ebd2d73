//! Cayley transform, the Kustaanheimo–Stiefel section and submersion, and the
//! two regularization maps from rank-one data `(Y, X)` to null-twistor
//! classes.
//!
//! The KS route is `k_reg(p) = [R(p)] = [(Y zeta, zeta)]` with
//! `zeta zeta^+ = X`, in the anti-diagonal realization. The Cayley route
//! `c_reg` goes through `T*_C`, the momentum map `J_0` and the inverse of
//! `J_{+-}` on `N_10`; it lands in the diagonal realization and agrees with
//! `C k_reg` up to a global phase.
//!
//! Classes modulo `U(1)` are represented by [`TwistorClass`], canonicalized by
//! rotating the largest-modulus entry of the lower spinor to the positive
//! real axis.

use crate::matrix::{self, c, frob, CMatrix, CVector, C64, I, ONE, ZERO};
use crate::momentum::{self, CotangentHn, CotangentUn};
use crate::twistor_core::{change_realization, Realization, TwistorVector};
use crate::{Error, Result};

/// Default tolerance for rank and nullity preconditions.
pub const RANK_TOL: f64 = 1e-9;

/// `Z = (Y - iE)(-iY + E)^{-1}`.
pub fn cayley(y: &CMatrix) -> Result<CMatrix> {
    let n = y.nrows();
    matrix::ensure_square(y, n)?;
    let e = matrix::identity(n);
    let denom = y * -I + &e;
    Ok((y - &e * I) * matrix::checked_inverse(&denom, "-iY + E")?)
}

/// `Y = (Z + iE)(iZ + E)^{-1}`; fails on the boundary `det(iZ + E) = 0`.
pub fn cayley_inverse(z: &CMatrix) -> Result<CMatrix> {
    let n = z.nrows();
    matrix::ensure_square(z, n)?;
    let e = matrix::identity(n);
    let denom = z * I + &e;
    let y = (z + &e * I) * matrix::checked_inverse(&denom, "iZ + E")?;
    Ok(matrix::hermitian_part(&y))
}

/// Cotangent lift of the Cayley map:
/// `(Y, X) -> (cayley(Y), (i/2)(-iY + E) X (-iY + E)^+)`.
pub fn t_star_c(p: &CotangentHn) -> Result<CotangentUn> {
    let n = p.n();
    let w = &p.y * -I + matrix::identity(n);
    let rho = &w * &p.x * w.adjoint() * c(0.0, 0.5);
    Ok(CotangentUn {
        z: cayley(&p.y)?,
        rho: matrix::anti_hermitian_part(&rho),
    })
}

/// Factor `X = zeta zeta^+` of a rank-one positive semidefinite matrix,
/// taken from the top eigenpair. The first entry with modulus above `tol`
/// is made real and positive.
pub fn rank_one_factor(x: &CMatrix, tol: f64) -> Result<CVector> {
    let n = x.nrows();
    matrix::ensure_square(x, n)?;
    matrix::require_hermitian(x, tol)?;
    let eig = matrix::hermitian_part(x).symmetric_eigen();
    let values = &eig.eigenvalues;
    let scale = values.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol * scale {
        return Err(Error::NegativeEigenvalue { value: min });
    }
    let rank = values.iter().filter(|&&v| v > tol * scale).count();
    if rank != 1 {
        return Err(Error::RankViolation { rank });
    }
    let top = values.imax();
    let mut zeta: CVector = eig.eigenvectors.column(top).into_owned() * c(values[top].sqrt(), 0.0);
    if let Some(z) = zeta.iter().find(|z| z.norm() > tol).copied() {
        zeta *= z.conj() / z.norm();
    }
    Ok(zeta)
}

fn require_null(v: &TwistorVector, tol: f64) -> Result<()> {
    let value = v.null_invariant();
    if value.abs() > tol * (1.0 + v.norm().powi(2)) {
        return Err(Error::NotNull { value });
    }
    Ok(())
}

fn require_spinor(v: &TwistorVector, tol: f64) -> Result<f64> {
    let zz = v.lower.norm_squared();
    if zz <= tol * tol * (1.0 + v.upper.norm_squared()) {
        return Err(Error::ZeroSpinor);
    }
    Ok(zz)
}

/// The KS section
/// `Y = (zeta zeta^+)^{-1}[zeta u^+ + u zeta^+ - (u^+ zeta + zeta^+ u)/2 E]`,
/// `X = zeta zeta^+`, defined on null anti-diagonal twistors with
/// `zeta != 0`. It satisfies `Y zeta = upsilon`.
pub fn ks_section(v: &TwistorVector, tol: f64) -> Result<CotangentHn> {
    v.require(Realization::AntiDiagonal)?;
    require_null(v, tol)?;
    let zz = require_spinor(v, tol)?;
    let (u, z) = (&v.upper, &v.lower);
    let n = v.n();
    let trace_part = (matrix::inner(u, z) + matrix::inner(z, u)) * c(0.5, 0.0);
    let y = (matrix::outer(z, u) + matrix::outer(u, z) - matrix::scalar(n, trace_part)) / c(zz, 0.0);
    Ok(CotangentHn {
        y: matrix::hermitian_part(&y),
        x: matrix::outer(z, z),
    })
}

/// The second section `Y = u u^+ / (zeta^+ zeta)`, `X = zeta zeta^+`, on the
/// domain `u^+ zeta != 0`.
///
/// Here `Y zeta = u (u^+ zeta)/(zeta^+ zeta)`, so `R` of the output
/// recovers the input only where `u^+ zeta = zeta^+ zeta`, or where `u = 0`
/// (see [`ks_section_alt_defect`]). [`k_reg`] uses [`ks_section`].
pub fn ks_section_alt(v: &TwistorVector, tol: f64) -> Result<CotangentHn> {
    v.require(Realization::AntiDiagonal)?;
    require_null(v, tol)?;
    let zz = require_spinor(v, tol)?;
    let (u, z) = (&v.upper, &v.lower);
    if matrix::inner(u, z).norm() <= tol * (1.0 + v.norm().powi(2)) {
        return Err(Error::Constraint {
            what: "upsilon^+ zeta != 0",
            residual: matrix::inner(u, z).norm(),
        });
    }
    Ok(CotangentHn {
        y: matrix::outer(u, u) / c(zz, 0.0),
        x: matrix::outer(z, z),
    })
}

/// `|Y zeta - upsilon|` for the output of [`ks_section_alt`], which equals
/// `|upsilon| |upsilon^+ zeta - zeta^+ zeta| / zeta^+ zeta`.
pub fn ks_section_alt_defect(v: &TwistorVector, tol: f64) -> Result<f64> {
    let p = ks_section_alt(v, tol)?;
    Ok((&p.y * &v.lower - &v.upper).norm())
}

/// The submersion `R(Y, X) = (Y zeta, zeta)` with `zeta zeta^+ = X`.
pub fn submersion_r(p: &CotangentHn, tol: f64) -> Result<TwistorVector> {
    let zeta = rank_one_factor(&p.x, tol)?;
    TwistorVector::new(Realization::AntiDiagonal, &p.y * &zeta, zeta)
}

/// A null-twistor class modulo `v -> e^{it} v`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistorClass {
    representative: TwistorVector,
}

impl TwistorClass {
    pub fn new(v: TwistorVector) -> Self {
        let pick = |w: &CVector| {
            w.iter()
                .copied()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .map(|(_, z)| z)
        };
        let anchor = pick(&v.lower)
            .filter(|z| z.norm() > 0.0)
            .or_else(|| pick(&v.upper).filter(|z| z.norm() > 0.0));
        let representative = match anchor {
            Some(z) => v.scaled(z.conj() / z.norm()),
            None => v,
        };
        TwistorClass { representative }
    }

    pub fn representative(&self) -> &TwistorVector {
        &self.representative
    }

    pub fn realization(&self) -> Realization {
        self.representative.realization
    }

    /// The class of `C v` (or `C^+ v`), i.e. the class in the other realization.
    pub fn change_realization(&self) -> TwistorClass {
        TwistorClass::new(change_realization(&self.representative))
    }
}

/// `min_t |v - e^{it} w|` over the representatives, evaluated at the optimal
/// phase rather than through `|v|^2 + |w|^2 - 2 |<w, v>|`, which cancels.
pub fn class_distance(a: &TwistorClass, b: &TwistorClass) -> Result<f64> {
    if a.realization() != b.realization() {
        return Err(Error::RealizationMismatch {
            expected: a.realization().name(),
        });
    }
    let v = a.representative.stacked();
    let w = b.representative.stacked();
    let overlap = matrix::inner(&w, &v);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    Ok((v - w * phase).norm())
}

/// KS regularization: the class of `R(p)` in the anti-diagonal realization.
pub fn k_reg(p: &CotangentHn, tol: f64) -> Result<TwistorClass> {
    Ok(TwistorClass::new(submersion_r(p, tol)?))
}

/// Inverse of `J_{+-}` on `N_10`: recovers `(eta, xi)` up to phase from
/// `xi xi^+ = -i X_22` and `eta xi^+ = -i X_12`.
pub fn j_pm_inverse(m: &CMatrix, tol: f64) -> Result<TwistorVector> {
    let (_, x12, _, x22) = matrix::split(m);
    let xi = rank_one_factor(&matrix::hermitian_part(&(&x22 * -I)), tol)?;
    let eta = &x12 * -I * &xi / c(xi.norm_squared(), 0.0);
    TwistorVector::new(Realization::Diagonal, eta, xi)
}

/// Cayley regularization: the class of `J_{+-}^{-1}(J_0(T*_C(p)))` in the
/// diagonal realization.
pub fn c_reg(p: &CotangentHn, tol: f64) -> Result<TwistorClass> {
    let q = t_star_c(p)?;
    let m = momentum::j0(&q)?;
    Ok(TwistorClass::new(j_pm_inverse(&m.matrix, tol)?))
}

/// `gamma~_{+-}(dv) = upsilon^+ d zeta - zeta^+ d upsilon` at `v`.
pub fn gamma_pm_tilde(v: &TwistorVector, dv: &TwistorVector) -> C64 {
    matrix::inner(&v.upper, &dv.lower) - matrix::inner(&v.lower, &dv.upper)
}

/// `gamma~_0(dp) = -Tr(X dY)` at `p`.
pub fn gamma0_tilde(p: &CotangentHn, dp: &CotangentHn) -> f64 {
    -(&p.x * &dp.y).trace().re
}

/// Scalar plus 3-vector coordinates of a hermitian `2 x 2` matrix,
/// `A = a0 sigma_0 + a . sigma` with `a0 = Tr A / 2`, `a_k = Tr(A sigma_k) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliVector {
    pub scalar: f64,
    pub vec: [f64; 3],
}

/// `sigma_0, sigma_1, sigma_2, sigma_3` with `sigma_2 = [[0, -i], [i, 0]]`.
pub fn pauli_matrices() -> [CMatrix; 4] {
    [
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

pub fn pauli_decompose(a: &CMatrix) -> Result<PauliVector> {
    matrix::ensure_square(a, 2)?;
    matrix::require_hermitian(a, crate::twistor_core::SYMMETRY_TOL)?;
    let s = pauli_matrices();
    let coef = |k: usize| 0.5 * (a * &s[k]).trace().re;
    Ok(PauliVector {
        scalar: coef(0),
        vec: [coef(1), coef(2), coef(3)],
    })
}

pub fn pauli_compose(p: &PauliVector) -> CMatrix {
    let s = pauli_matrices();
    &s[0] * c(p.scalar, 0.0) + &s[1] * c(p.vec[0], 0.0) + &s[2] * c(p.vec[1], 0.0) + &s[3] * c(p.vec[2], 0.0)
}

/// `(w^+ sigma_k v)_k` for `k = 1, 2, 3`.
fn sigma_sandwich(w: &CVector, v: &CVector) -> [C64; 3] {
    let s = pauli_matrices();
    [1, 2, 3].map(|k| matrix::inner(w, &(&s[k] * v)))
}

/// KS coordinates for `n = 2`:
/// `y = (2 zeta^+ zeta)^{-1} (u^+ sigma zeta + zeta^+ sigma u)`,
/// `x = zeta^+ sigma zeta`, with `|x| = zeta^+ zeta`.
pub fn ks_transform_n2(v: &TwistorVector, tol: f64) -> Result<([f64; 3], [f64; 3])> {
    v.require(Realization::AntiDiagonal)?;
    if v.n() != 2 {
        return Err(Error::dims("n = 2", format!("n = {}", v.n())));
    }
    require_null(v, tol)?;
    let zz = require_spinor(v, tol)?;
    let (u, z) = (&v.upper, &v.lower);
    let uz = sigma_sandwich(u, z);
    let zu = sigma_sandwich(z, u);
    let zz_s = sigma_sandwich(z, z);
    let y = [0, 1, 2].map(|k| 0.5 * (uz[k] + zu[k]).re / zz);
    let x = [0, 1, 2].map(|k| zz_s[k].re);
    Ok((y, x))
}

pub fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Largest distance between the `Y` and `X` components of two points.
pub fn point_distance(a: &CotangentHn, b: &CotangentHn) -> f64 {
    frob(&(&a.y - &b.y)).max(frob(&(&a.x - &b.x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{self, seeded};

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) {
        let r = frob(&(a - b));
        assert!(r <= tol, "residual {r:e}");
    }

    fn anti(u: &[C64], z: &[C64]) -> TwistorVector {
        TwistorVector::new(Realization::AntiDiagonal, CVector::from_row_slice(u), CVector::from_row_slice(z)).unwrap()
    }

    #[test]
    fn cayley_examples() {
        close(&cayley(&matrix::zeros(2, 2)).unwrap(), &matrix::scalar(2, -I), 1e-15);
        close(&cayley(&matrix::identity(1)).unwrap(), &matrix::identity(1), 1e-15);
        close(&cayley_inverse(&matrix::scalar(2, -I)).unwrap(), &matrix::zeros(2, 2), 1e-15);
        close(&cayley_inverse(&matrix::identity(1)).unwrap(), &matrix::identity(1), 1e-15);
        assert!(matches!(cayley_inverse(&matrix::scalar(2, I)), Err(Error::Singular { .. })));

        let mut rng = seeded(3);
        for n in 1..=6 {
            let y = random::hermitian(&mut rng, n);
            let z = cayley(&y).unwrap();
            assert!(matrix::unitary_residual(&z) <= 1e-12);
            close(&cayley_inverse(&z).unwrap(), &y, 1e-10 * (1.0 + frob(&y)));
        }
    }

    #[test]
    fn t_star_examples() {
        let p = t_star_c(&CotangentHn::zeros(2)).unwrap();
        close(&p.z, &matrix::scalar(2, -I), 1e-15);
        assert_eq!(frob(&p.rho), 0.0);
        let mut rng = seeded(4);
        let x = random::hermitian(&mut rng, 2);
        let p = t_star_c(&CotangentHn::new(matrix::zeros(2, 2), x.clone()).unwrap()).unwrap();
        close(&p.rho, &(&x * c(0.0, 0.5)), 1e-15);
    }

    #[test]
    fn rank_one_factor_examples() {
        let mut e1 = matrix::zeros(2, 2);
        e1[(0, 0)] = ONE;
        let z = rank_one_factor(&e1, 1e-12).unwrap();
        assert!((z - CVector::from_vec(vec![ONE, ZERO])).norm() < 1e-15);

        let mut rng = seeded(6);
        let u = random::complex_vector(&mut rng, 3).normalize();
        let x = matrix::outer(&u, &u) * c(2.0, 0.0);
        let z = rank_one_factor(&x, 1e-12).unwrap();
        let phase = u[0].conj() / u[0].norm();
        assert!((z - &u * phase * c(2f64.sqrt(), 0.0)).norm() < 1e-12);

        assert_eq!(rank_one_factor(&matrix::identity(2), 1e-12), Err(Error::RankViolation { rank: 2 }));
        let neg = matrix::outer(&u, &u) * c(-1.0, 0.0);
        assert!(matches!(rank_one_factor(&neg, 1e-12), Err(Error::NegativeEigenvalue { .. })));
    }

    #[test]
    fn ks_section_examples() {
        let p = ks_section(&anti(&[ONE], &[ONE]), 1e-12).unwrap();
        close(&p.y, &matrix::identity(1), 1e-15);
        close(&p.x, &matrix::identity(1), 1e-15);

        let mut rng = seeded(7);
        let z = random::complex_vector(&mut rng, 3);
        let v = TwistorVector::new(Realization::AntiDiagonal, CVector::zeros(3), z.clone()).unwrap();
        let p = ks_section(&v, 1e-12).unwrap();
        assert_eq!(frob(&p.y), 0.0);
        close(&p.x, &matrix::outer(&z, &z), 0.0);

        for n in 1..=4 {
            let v = random::null_twistor_antidiagonal(&mut rng, n);
            let p = ks_section(&v, 1e-10).unwrap();
            assert!((&p.y * &v.lower - &v.upper).norm() <= 1e-12 * (1.0 + v.norm()));
            let rotated = ks_section(&v.scaled(c(0.4_f64.cos(), 0.4_f64.sin())), 1e-10).unwrap();
            assert!(point_distance(&p, &rotated) <= 1e-12 * (1.0 + v.norm().powi(2)));
        }

        assert_eq!(ks_section(&anti(&[ONE], &[ZERO]), 1e-12), Err(Error::ZeroSpinor));
        assert!(matches!(ks_section(&anti(&[I], &[ONE]), 1e-12), Err(Error::NotNull { .. })));
    }

    #[test]
    fn alternative_section_domain() {
        let mut rng = seeded(9);
        for n in 1..=3 {
            let v = random::null_twistor_antidiagonal(&mut rng, n);
            let u = &v.upper;
            let z = &v.lower;
            let defect = ks_section_alt_defect(&v, 1e-10).unwrap();
            let predicted = u.norm() * (matrix::inner(u, z) - c(z.norm_squared(), 0.0)).norm() / z.norm_squared();
            assert!((defect - predicted).abs() <= 1e-12 * (1.0 + predicted));

            // rescale upsilon along zeta so that u^+ zeta = zeta^+ zeta
            let target = z.norm_squared();
            let s = target / matrix::inner(u, z).re;
            let w = TwistorVector::new(Realization::AntiDiagonal, u * c(s, 0.0), z.clone()).unwrap();
            assert!(ks_section_alt_defect(&w, 1e-10).unwrap() <= 1e-12 * (1.0 + w.norm()));
        }
    }

    #[test]
    fn submersion_inverts_section() {
        let p = CotangentHn::new(matrix::identity(1), matrix::identity(1)).unwrap();
        let v = submersion_r(&p, 1e-12).unwrap();
        assert!((v.upper[0] - ONE).norm() < 1e-15 && (v.lower[0] - ONE).norm() < 1e-15);

        let mut rng = seeded(10);
        for n in 1..=4 {
            let v = random::null_twistor_antidiagonal(&mut rng, n);
            let back = submersion_r(&ks_section(&v, 1e-10).unwrap(), 1e-10).unwrap();
            let d = class_distance(&TwistorClass::new(back), &TwistorClass::new(v.clone())).unwrap();
            assert!(d <= 1e-12 * (1.0 + v.norm()), "{d:e}");
        }
    }

    #[test]
    fn regularizations_agree() {
        let mut rng = seeded(13);
        for n in 1..=3 {
            for _ in 0..20 {
                let v = random::null_twistor_antidiagonal(&mut rng, n);
                let p = ks_section(&v, 1e-10).unwrap();
                let k = k_reg(&p, 1e-9).unwrap().change_realization();
                let cc = c_reg(&p, 1e-9).unwrap();
                let d = class_distance(&k, &cc).unwrap();
                assert!(d <= 1e-9 * (1.0 + v.norm()), "{d:e}");
            }
        }
    }

    #[test]
    fn class_canonicalization_is_phase_blind() {
        let mut rng = seeded(15);
        let v = random::null_twistor_antidiagonal(&mut rng, 3);
        let a = TwistorClass::new(v.clone());
        let b = TwistorClass::new(v.scaled(c(2.0_f64.cos(), 2.0_f64.sin())));
        assert!((a.representative().stacked() - b.representative().stacked()).norm() < 1e-14);
        assert!(class_distance(&a, &b).unwrap() < 1e-7);
    }

    #[test]
    fn pauli_examples() {
        let s = pauli_matrices();
        assert_eq!(pauli_decompose(&s[0]).unwrap(), PauliVector { scalar: 1.0, vec: [0.0; 3] });
        assert_eq!(pauli_decompose(&s[3]).unwrap(), PauliVector { scalar: 0.0, vec: [0.0, 0.0, 1.0] });
        for k in 1..4 {
            for l in 1..4 {
                let anti = &s[k] * &s[l] + &s[l] * &s[k];
                let expected = if k == l { matrix::scalar(2, c(2.0, 0.0)) } else { matrix::zeros(2, 2) };
                close(&anti, &expected, 0.0);
            }
        }
        let a = random::hermitian(&mut seeded(2), 2);
        close(&pauli_compose(&pauli_decompose(&a).unwrap()), &a, 1e-14);
        assert!(pauli_decompose(&matrix::identity(3)).is_err());
    }

    #[test]
    fn ks_transform_examples() {
        let (y, x) = ks_transform_n2(&anti(&[ZERO, ZERO], &[ONE, ZERO]), 1e-12).unwrap();
        assert_eq!((y, x), ([0.0; 3], [0.0, 0.0, 1.0]));
        let (_, x) = ks_transform_n2(&anti(&[ZERO, ZERO], &[ZERO, ONE]), 1e-12).unwrap();
        assert_eq!(x, [0.0, 0.0, -1.0]);

        let mut rng = seeded(20);
        for _ in 0..20 {
            let v = random::null_twistor_antidiagonal(&mut rng, 2);
            let (y, x) = ks_transform_n2(&v, 1e-10).unwrap();
            let (y2, x2) = ks_transform_n2(&v.scaled(c(1.0_f64.cos(), 1.0_f64.sin())), 1e-10).unwrap();
            for k in 0..3 {
                assert!((y[k] - y2[k]).abs() < 1e-12 && (x[k] - x2[k]).abs() < 1e-12);
            }
            assert!((norm3(&x) - v.lower.norm_squared()).abs() < 1e-12 * (1.0 + norm3(&x)));
            // KS x is twice the Pauli vector of X; y is the Pauli vector of Y
            let p = ks_section(&v, 1e-10).unwrap();
            let px = pauli_decompose(&p.x).unwrap();
            let py = pauli_decompose(&p.y).unwrap();
            for k in 0..3 {
                assert!((x[k] - 2.0 * px.vec[k]).abs() < 1e-12 * (1.0 + norm3(&x)));
                assert!((y[k] - py.vec[k]).abs() < 1e-12 * (1.0 + norm3(&y)));
            }
        }
    }

    #[test]
    fn vector_helpers() {
        assert_eq!(cross3(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), [0.0, 0.0, 1.0]);
        assert_eq!(dot3(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]), 6.0);
        assert_eq!(norm3(&[3.0, 4.0, 0.0]), 5.0);
    }
}
