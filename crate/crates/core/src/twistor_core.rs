//! Hermitian forms of signature (n, n), twistor vectors and the
//! `U(n,n)` / `u(n,n)` membership predicates.
//!
//! Two realizations of the form are used throughout:
//!
//! ```text
//! diagonal       phi_d = diag(E, -E)             vectors (eta, xi)
//! anti-diagonal  phi_a = i [[0, -E], [E, 0]]     vectors (upsilon, zeta)
//! ```
//!
//! They are intertwined by the unitary `C = (1/sqrt 2) [[E, -iE], [-iE, E]]`,
//! which satisfies `C^+ phi_d C = phi_a`. `C` belongs to neither group; it is
//! returned as a plain matrix by [`cayley_intertwiner`].
//!
//! All predicates use relative Frobenius residuals with explicit tolerances.

use rand::Rng;

use crate::matrix::{self, c, frob, CMatrix, CVector, I, ZERO};
use crate::random;
use crate::{Error, Result};

/// Default tolerance for the membership predicates.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Default tolerance used when validating hermitian / anti-hermitian inputs.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Relative width of the dead band around zero used by [`orbit_label_default`].
pub const SIGNATURE_BAND: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Realization {
    Diagonal,
    AntiDiagonal,
}

impl Realization {
    pub fn other(self) -> Self {
        match self {
            Realization::Diagonal => Realization::AntiDiagonal,
            Realization::AntiDiagonal => Realization::Diagonal,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Realization::Diagonal => "diagonal",
            Realization::AntiDiagonal => "anti-diagonal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm {
    n: usize,
    realization: Realization,
    matrix: CMatrix,
}

impl HermitianForm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn realization(&self) -> Realization {
        self.realization
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `v^+ phi w`.
    pub fn pairing(&self, v: &CVector, w: &CVector) -> nalgebra::Complex<f64> {
        matrix::inner(v, &(&self.matrix * w))
    }
}

pub fn make_form(n: usize, realization: Realization) -> Result<HermitianForm> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let e = matrix::identity(n);
    let z = matrix::zeros(n, n);
    let matrix = match realization {
        Realization::Diagonal => matrix::block(&e, &z, &z, &(-&e)),
        Realization::AntiDiagonal => matrix::block(&z, &(-&e), &e, &z) * I,
    };
    Ok(HermitianForm {
        n,
        realization,
        matrix,
    })
}

/// A point of `C^{2n}` tagged with its realization. The upper block is `eta`
/// or `upsilon`, the lower block `xi` or `zeta`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistorVector {
    pub realization: Realization,
    pub upper: CVector,
    pub lower: CVector,
}

impl TwistorVector {
    pub fn new(realization: Realization, upper: CVector, lower: CVector) -> Result<Self> {
        if upper.len() != lower.len() {
            return Err(Error::dims(upper.len(), lower.len()));
        }
        if upper.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(TwistorVector {
            realization,
            upper,
            lower,
        })
    }

    pub fn zeros(realization: Realization, n: usize) -> Self {
        TwistorVector {
            realization,
            upper: CVector::zeros(n),
            lower: CVector::zeros(n),
        }
    }

    /// Builds from a stacked `2n` vector.
    pub fn from_stacked(realization: Realization, v: &CVector) -> Result<Self> {
        if !v.len().is_multiple_of(2) || v.is_empty() {
            return Err(Error::dims("even positive length", v.len()));
        }
        let n = v.len() / 2;
        Self::new(realization, v.rows(0, n).into_owned(), v.rows(n, n).into_owned())
    }

    pub fn n(&self) -> usize {
        self.upper.len()
    }

    pub fn stacked(&self) -> CVector {
        matrix::stack(&self.upper, &self.lower)
    }

    pub fn norm(&self) -> f64 {
        (self.upper.norm_squared() + self.lower.norm_squared()).sqrt()
    }

    pub fn scaled(&self, z: nalgebra::Complex<f64>) -> Self {
        TwistorVector {
            realization: self.realization,
            upper: &self.upper * z,
            lower: &self.lower * z,
        }
    }

    pub fn require(&self, realization: Realization) -> Result<()> {
        if self.realization != realization {
            return Err(Error::RealizationMismatch {
                expected: realization.name(),
            });
        }
        Ok(())
    }

    /// `I_{+-} = eta^+ eta - xi^+ xi` or `I~_{+-} = i (zeta^+ upsilon - upsilon^+ zeta)`.
    pub fn null_invariant(&self) -> f64 {
        null_invariant(self)
    }
}

/// `v^+ phi v` for the realization of `v`; always real.
pub fn null_invariant(v: &TwistorVector) -> f64 {
    match v.realization {
        Realization::Diagonal => v.upper.norm_squared() - v.lower.norm_squared(),
        Realization::AntiDiagonal => {
            let zu = matrix::inner(&v.lower, &v.upper);
            let uz = matrix::inner(&v.upper, &v.lower);
            (I * (zu - uz)).re
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub form: HermitianForm,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub form: HermitianForm,
    pub matrix: CMatrix,
}

impl GroupElement {
    pub fn identity(form: &HermitianForm) -> Self {
        GroupElement {
            form: form.clone(),
            matrix: matrix::identity(2 * form.n()),
        }
    }

    pub fn blocks(&self) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
        matrix::split(&self.matrix)
    }

    pub fn inverse(&self) -> GroupElement {
        // g^{-1} = phi g^+ phi
        let phi = self.form.matrix();
        GroupElement {
            form: self.form.clone(),
            matrix: phi * self.matrix.adjoint() * phi,
        }
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            form: self.form.clone(),
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// `Ad_g X = g X g^{-1}`.
    pub fn adjoint_action(&self, x: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            form: x.form.clone(),
            matrix: &self.matrix * &x.matrix * self.inverse().matrix,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrbitLabel {
    pub k: usize,
    pub l: usize,
}

impl std::fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

/// `||m^+ phi m - phi|| / (1 + ||m||^2)`.
pub fn group_residual(m: &CMatrix, form: &HermitianForm) -> Result<f64> {
    matrix::ensure_square(m, 2 * form.n())?;
    let phi = form.matrix();
    let r = frob(&(m.adjoint() * phi * m - phi));
    Ok(r / (1.0 + m.norm_squared()))
}

pub fn is_group_element(m: &CMatrix, form: &HermitianForm, tol: f64) -> Result<bool> {
    Ok(group_residual(m, form)? <= tol)
}

/// `||m^+ phi + phi m|| / (1 + ||m||)`; the condition is linear in `m`.
pub fn algebra_residual(m: &CMatrix, form: &HermitianForm) -> Result<f64> {
    matrix::ensure_square(m, 2 * form.n())?;
    let phi = form.matrix();
    let r = frob(&(m.adjoint() * phi + phi * m));
    Ok(r / (1.0 + frob(m)))
}

pub fn is_algebra_element(m: &CMatrix, form: &HermitianForm, tol: f64) -> Result<bool> {
    Ok(algebra_residual(m, form)? <= tol)
}

/// The unitary `C` relating the realizations: `(eta, xi) = C (upsilon, zeta)`.
pub fn cayley_intertwiner(n: usize) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let e = matrix::identity(n);
    let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok(matrix::block(&e, &(&e * -I), &(&e * -I), &e) * s)
}

/// Maps `(upsilon, zeta) -> C (upsilon, zeta)` and `(eta, xi) -> C^+ (eta, xi)`.
pub fn change_realization(v: &TwistorVector) -> TwistorVector {
    let cm = cayley_intertwiner(v.n()).expect("n >= 1");
    let w = match v.realization {
        Realization::AntiDiagonal => &cm * v.stacked(),
        Realization::Diagonal => cm.adjoint() * v.stacked(),
    };
    TwistorVector::from_stacked(v.realization.other(), &w).expect("even length")
}

/// `i diag(1 (k times), -1 (l times), 0, ...)`.
pub fn rho_normal_form(n: usize, k: usize, l: usize) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if k + l > n {
        return Err(Error::InvalidLabel { sum: k + l, n });
    }
    let diag = CVector::from_fn(n, |j, _| {
        if j < k {
            I
        } else if j < k + l {
            -I
        } else {
            ZERO
        }
    });
    Ok(CMatrix::from_diagonal(&diag))
}

/// Signature of the hermitian matrix `-i rho`: eigenvalues above `band` count
/// towards `k`, below `-band` towards `l`.
pub fn orbit_label(rho: &CMatrix, band: f64) -> Result<OrbitLabel> {
    matrix::ensure_square(rho, rho.nrows())?;
    matrix::require_anti_hermitian(rho, SYMMETRY_TOL)?;
    let h = rho * -I;
    let ev = matrix::hermitian_eigenvalues(&h);
    Ok(OrbitLabel {
        k: ev.iter().filter(|&&x| x > band).count(),
        l: ev.iter().filter(|&&x| x < -band).count(),
    })
}

/// [`orbit_label`] with the band `SIGNATURE_BAND * spectral radius`.
pub fn orbit_label_default(rho: &CMatrix) -> Result<OrbitLabel> {
    matrix::require_anti_hermitian(rho, SYMMETRY_TOL)?;
    let radius = matrix::hermitian_eigenvalues(&(rho * -I))
        .iter()
        .fold(0.0_f64, |acc, x| acc.max(x.abs()));
    orbit_label(rho, SIGNATURE_BAND * radius)
}

/// `(||m^2|| <= tol (1 + ||m||^2), numerical rank)`.
pub fn is_square_zero(m: &CMatrix, tol: f64) -> (bool, usize) {
    let sq = frob(&(m * m));
    let ok = sq <= tol * (1.0 + m.norm_squared());
    (ok, matrix::numerical_rank(m, tol))
}

/// Relative residual `||m^2|| / (1 + ||m||^2)`.
pub fn square_zero_residual(m: &CMatrix) -> f64 {
    frob(&(m * m)) / (1.0 + m.norm_squared())
}

/// Element of the stabilizer of `Z = E` under the fractional action,
/// assembled from `F` invertible and `H` with `H F^+ + F H^+ = 0`.
pub fn stabilizer_element(f: &CMatrix, h: &CMatrix, tol: f64) -> Result<GroupElement> {
    let n = f.nrows();
    matrix::ensure_square(f, n)?;
    matrix::ensure_square(h, n)?;
    let form = make_form(n, Realization::Diagonal)?;
    let constraint = frob(&(h * f.adjoint() + f * h.adjoint()));
    if constraint > tol * (1.0 + frob(f) * frob(h)) {
        return Err(Error::Constraint {
            what: "H F^+ + F H^+ = 0",
            residual: constraint,
        });
    }
    let f_inv_dag = matrix::checked_inverse(&f.adjoint(), "F")?;
    let half = c(0.5, 0.0);
    let sym = (&f_inv_dag + f) * half;
    let skew = (f - &f_inv_dag) * half;
    let a = &sym + h;
    let d = &sym - h;
    let b = &skew - h;
    let cc = &skew + h;
    Ok(GroupElement {
        form,
        matrix: matrix::block(&a, &b, &cc, &d),
    })
}

/// Algebra element `phi K` with `K` anti-hermitian, scaled to spectral norm
/// `scale * u` with `u` uniform in `(0, 1]`.
pub fn sample_algebra_element<R: Rng + ?Sized>(
    rng: &mut R,
    form: &HermitianForm,
    scale: f64,
) -> AlgebraElement {
    let k = random::anti_hermitian(rng, 2 * form.n());
    let x = form.matrix() * k;
    let norm = matrix::singular_values(&x).max();
    let target = scale * (1.0 - rng.random::<f64>());
    let matrix = if norm > 0.0 { x * c(target / norm, 0.0) } else { x };
    AlgebraElement {
        form: form.clone(),
        matrix,
    }
}

pub fn sample_group_element<R: Rng + ?Sized>(
    rng: &mut R,
    form: &HermitianForm,
    scale: f64,
) -> GroupElement {
    let x = sample_algebra_element(rng, form, scale);
    GroupElement {
        form: form.clone(),
        matrix: matrix::expm(&x.matrix),
    }
}

pub fn random_algebra_element(
    n: usize,
    form: &HermitianForm,
    seed: u64,
    scale: f64,
) -> Result<AlgebraElement> {
    check_sampler_args(n, form, scale)?;
    Ok(sample_algebra_element(&mut random::seeded(seed), form, scale))
}

pub fn random_group_element(
    n: usize,
    form: &HermitianForm,
    seed: u64,
    scale: f64,
) -> Result<GroupElement> {
    check_sampler_args(n, form, scale)?;
    Ok(sample_group_element(&mut random::seeded(seed), form, scale))
}

fn check_sampler_args(n: usize, form: &HermitianForm, scale: f64) -> Result<()> {
    if n != form.n() {
        return Err(Error::dims(form.n(), n));
    }
    if !(scale > 0.0) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
    }
    Ok(())
}

/// Fractional action `Z -> (A Z + B)(C Z + D)^{-1}` of a `2n x 2n` matrix on
/// an `n x n` matrix.
pub(crate) fn fractional_action(g: &CMatrix, z: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let (a, b, cc, d) = matrix::split(g);
    let denom = cc * z + d;
    let inv = matrix::checked_inverse(&denom, "C Z + D")?;
    Ok(((a * z + b) * inv, denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ONE;
    use crate::random::seeded;

    fn assert_close(a: &CMatrix, b: &CMatrix, tol: f64) {
        let r = frob(&(a - b));
        assert!(r <= tol, "residual {r:e}");
    }

    #[test]
    fn forms_for_n_one() {
        let d = make_form(1, Realization::Diagonal).unwrap();
        let a = make_form(1, Realization::AntiDiagonal).unwrap();
        assert_close(d.matrix(), &CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]), 0.0);
        assert_close(a.matrix(), &CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]), 0.0);
    }

    #[test]
    fn forms_are_hermitian_involutions_with_split_signature() {
        for n in 1..=6 {
            for r in [Realization::Diagonal, Realization::AntiDiagonal] {
                let f = make_form(n, r).unwrap();
                let m = f.matrix();
                assert!(matrix::hermitian_residual(m) <= 1e-12);
                assert_close(&(m * m), &matrix::identity(2 * n), 1e-12);
                let ev = matrix::hermitian_eigenvalues(m);
                assert_eq!(ev.iter().filter(|&&x| x > 0.0).count(), n);
                assert_eq!(ev.iter().filter(|&&x| x < 0.0).count(), n);
            }
        }
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert_eq!(make_form(0, Realization::Diagonal), Err(Error::ZeroDimension));
        assert_eq!(cayley_intertwiner(0), Err(Error::ZeroDimension));
    }

    #[test]
    fn group_membership_examples() {
        let phi = make_form(2, Realization::Diagonal).unwrap();
        assert!(is_group_element(&matrix::identity(4), &phi, 1e-12).unwrap());
        let t = 0.7_f64;
        let e = C64exp(t);
        let diag = CMatrix::from_diagonal(&CVector::from_vec(vec![e, e, e.conj(), e.conj()]));
        assert!(is_group_element(&diag, &phi, 1e-12).unwrap());

        let phi1 = make_form(1, Realization::Diagonal).unwrap();
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2.0, 0.0), ONE]));
        // residual: diag(4,-1) - diag(1,-1) = diag(3,0), ||.|| = 3, 1 + ||m||^2 = 6
        assert!((group_residual(&m, &phi1).unwrap() - 0.5).abs() < 1e-15);
        assert!(!is_group_element(&m, &phi1, 1e-10).unwrap());
        assert!(is_group_element(&matrix::identity(3), &phi1, 1e-10).is_err());
    }

    #[allow(non_snake_case)]
    fn C64exp(t: f64) -> nalgebra::Complex<f64> {
        c(t.cos(), t.sin())
    }

    #[test]
    fn algebra_membership_examples() {
        let phi = make_form(2, Realization::Diagonal).unwrap();
        assert!(is_algebra_element(&matrix::zeros(4, 4), &phi, 1e-12).unwrap());
        let x = CMatrix::from_diagonal(&CVector::from_vec(vec![I, I, -I, -I]));
        assert!(is_algebra_element(&x, &phi, 1e-12).unwrap());

        let mut rng = seeded(11);
        let alpha = random::anti_hermitian(&mut rng, 2);
        let delta = random::anti_hermitian(&mut rng, 2);
        let beta = random::complex_matrix(&mut rng, 2, 2);
        let m = matrix::block(&alpha, &beta, &beta.adjoint(), &delta);
        assert!(is_algebra_element(&m, &phi, 1e-12).unwrap());
        assert!(!is_algebra_element(&matrix::identity(4), &phi, 1e-12).unwrap());
    }

    #[test]
    fn intertwiner_n1_and_properties() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, -s), c(0.0, -s), c(s, 0.0)]);
        assert_close(&cayley_intertwiner(1).unwrap(), &expected, 1e-16);
        for n in 1..=5 {
            let cm = cayley_intertwiner(n).unwrap();
            assert!(matrix::unitary_residual(&cm) <= 1e-14);
            let pd = make_form(n, Realization::Diagonal).unwrap();
            let pa = make_form(n, Realization::AntiDiagonal).unwrap();
            assert_close(&(cm.adjoint() * pd.matrix() * &cm), pa.matrix(), 1e-12);
        }
    }

    #[test]
    fn change_realization_examples() {
        let z = TwistorVector::zeros(Realization::AntiDiagonal, 2);
        let w = change_realization(&z);
        assert_eq!(w.realization, Realization::Diagonal);
        assert_eq!(w.norm(), 0.0);

        let v = TwistorVector::new(
            Realization::AntiDiagonal,
            CVector::from_vec(vec![ONE]),
            CVector::from_vec(vec![ZERO]),
        )
        .unwrap();
        let w = change_realization(&v);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((w.upper[0] - c(s, 0.0)).norm() < 1e-16);
        assert!((w.lower[0] - c(0.0, -s)).norm() < 1e-16);

        let mut rng = seeded(5);
        for n in 1..=4 {
            let v = random::null_twistor_antidiagonal(&mut rng, n);
            let back = change_realization(&change_realization(&v));
            assert!((back.stacked() - v.stacked()).norm() <= 1e-14 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn null_invariant_examples() {
        let v = |a: f64, b: f64| {
            TwistorVector::new(
                Realization::Diagonal,
                CVector::from_vec(vec![c(a, 0.0)]),
                CVector::from_vec(vec![c(b, 0.0)]),
            )
            .unwrap()
        };
        assert_eq!(v(1.5, 1.5).null_invariant(), 0.0);
        assert_eq!(v(2.0, 1.0).null_invariant(), 3.0);
        let mut rng = seeded(9);
        let w = TwistorVector::new(
            Realization::AntiDiagonal,
            random::complex_vector(&mut rng, 3),
            random::complex_vector(&mut rng, 3),
        )
        .unwrap();
        let rotated = w.scaled(c(0.3_f64.cos(), 0.3_f64.sin()));
        assert!((w.null_invariant() - rotated.null_invariant()).abs() < 1e-13);
        // the invariant is the form pairing v^+ phi v
        let phi = make_form(3, Realization::AntiDiagonal).unwrap();
        let p = phi.pairing(&w.stacked(), &w.stacked());
        assert!((p.re - w.null_invariant()).abs() < 1e-12 && p.im.abs() < 1e-12);
    }

    #[test]
    fn rho_normal_form_examples() {
        assert_close(
            &rho_normal_form(2, 1, 0).unwrap(),
            &CMatrix::from_diagonal(&CVector::from_vec(vec![I, ZERO])),
            0.0,
        );
        assert_close(&rho_normal_form(3, 0, 0).unwrap(), &matrix::zeros(3, 3), 0.0);
        assert_close(
            &rho_normal_form(2, 1, 1).unwrap(),
            &CMatrix::from_diagonal(&CVector::from_vec(vec![I, -I])),
            0.0,
        );
        assert_eq!(rho_normal_form(2, 2, 1), Err(Error::InvalidLabel { sum: 3, n: 2 }));
    }

    #[test]
    fn orbit_label_examples() {
        assert_eq!(orbit_label_default(&matrix::zeros(3, 3)).unwrap(), OrbitLabel { k: 0, l: 0 });
        let r = rho_normal_form(2, 1, 1).unwrap();
        assert_eq!(orbit_label_default(&r).unwrap(), OrbitLabel { k: 1, l: 1 });
        let herm = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, ONE]));
        assert!(matches!(orbit_label_default(&herm), Err(Error::NotAntiHermitian { .. })));

        let mut rng = seeded(21);
        let rho = rho_normal_form(2, 1, 0).unwrap();
        for _ in 0..20 {
            let f = random::invertible_with_condition(&mut rng, 2, 1e3);
            let moved = &f * &rho * f.adjoint();
            assert_eq!(orbit_label_default(&moved).unwrap(), OrbitLabel { k: 1, l: 0 });
        }
    }

    #[test]
    fn square_zero_examples() {
        assert_eq!(is_square_zero(&matrix::zeros(2, 2), 1e-12), (true, 0));
        let nil = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert_eq!(is_square_zero(&nil, 1e-12), (true, 1));
        assert_eq!(is_square_zero(&matrix::identity(3), 1e-12), (false, 3));
    }

    #[test]
    fn stabilizer_examples() {
        let e = matrix::identity(2);
        let z = matrix::zeros(2, 2);
        let g = stabilizer_element(&e, &z, 1e-12).unwrap();
        assert_close(&g.matrix, &matrix::identity(4), 1e-15);

        let g = stabilizer_element(&(&e * c(2.0, 0.0)), &z, 1e-12).unwrap();
        let (image, _) = fractional_action(&g.matrix, &e).unwrap();
        assert_close(&image, &e, 1e-14);
        assert!(is_group_element(&g.matrix, &g.form, 1e-12).unwrap());

        let mut rng = seeded(4);
        for n in 1..=4 {
            let f = random::invertible_with_condition(&mut rng, n, 1e2);
            // H = K F^{-+} with K anti-hermitian gives H F^+ = K
            let k = random::anti_hermitian(&mut rng, n);
            let h = &k * matrix::checked_inverse(&f.adjoint(), "F").unwrap();
            let g = stabilizer_element(&f, &h, 1e-10).unwrap();
            assert!(group_residual(&g.matrix, &g.form).unwrap() <= 1e-12);
            let (image, _) = fractional_action(&g.matrix, &matrix::identity(n)).unwrap();
            assert_close(&image, &matrix::identity(n), 1e-10);
        }

        let bad_h = matrix::identity(2);
        assert!(matches!(stabilizer_element(&e, &bad_h, 1e-12), Err(Error::Constraint { .. })));
        assert!(matches!(stabilizer_element(&z, &z, 1e-12), Err(Error::Singular { .. })));
    }

    #[test]
    fn random_elements_are_members_and_deterministic() {
        for n in 1..=6 {
            for r in [Realization::Diagonal, Realization::AntiDiagonal] {
                let phi = make_form(n, r).unwrap();
                for seed in 0..5 {
                    let x = random_algebra_element(n, &phi, seed, 1.0).unwrap();
                    assert!(matrix::singular_values(&x.matrix).max() <= 1.0 + 1e-12);
                    assert!(algebra_residual(&x.matrix, &phi).unwrap() <= 1e-10);
                    let g = random_group_element(n, &phi, seed, 1.0).unwrap();
                    assert!(group_residual(&g.matrix, &phi).unwrap() <= 1e-10);
                    assert_eq!(g, random_group_element(n, &phi, seed, 1.0).unwrap());
                }
            }
        }
        let phi = make_form(2, Realization::Diagonal).unwrap();
        let g = random_group_element(2, &phi, 3, 1e-12).unwrap();
        assert!(frob(&(g.matrix - matrix::identity(4))) < 1e-11);
        assert!(random_group_element(2, &phi, 3, 0.0).is_err());
    }

    #[test]
    fn group_inverse_uses_form() {
        let phi = make_form(3, Realization::AntiDiagonal).unwrap();
        let g = random_group_element(3, &phi, 8, 1.0).unwrap();
        assert_close(&(&g.matrix * g.inverse().matrix), &matrix::identity(6), 1e-12);
    }
}
