//! Momentum maps into `u(n,n)`, the group actions they intertwine, linear
//! functionals on the algebra and the two Poisson brackets used to test them.
//!
//! | map          | source                | form   | formula                                   |
//! |--------------|-----------------------|--------|-------------------------------------------|
//! | [`j_pm`]     | `(eta, xi)`           | `phi_d`| `i [[-eta eta^+, eta xi^+], [-xi eta^+, xi xi^+]]` |
//! | [`j_pm_tilde`]| `(upsilon, zeta)`    | `phi_a`| `[[u z^+, -u u^+], [z z^+, -z u^+]]`       |
//! | [`j0`]       | `(Z, rho)` in `T*U(n)`| `phi_d`| `[[-Z rho Z^+, Z rho], [(Z rho)^+, rho]]`  |
//! | [`j0_tilde`] | `(Y, X)` in `H(n)^2`  | `phi_a`| `[[YX, -YXY], [X, -XY]]`                  |
//!
//! On null twistors both twistor maps land in square-zero matrices; off the
//! null cone they satisfy `J^2 = c I_{+-} J` with
//! [`QUADRATIC_CONSTANT`](crate::conventions::QUADRATIC_CONSTANT) `c = -i`.

use crate::matrix::{self, c, frob, CMatrix, CVector, C64, I};
use crate::twistor_core::{
    self, make_form, AlgebraElement, GroupElement, Realization, TwistorVector,
    SYMMETRY_TOL,
};
use crate::{Error, Result};

/// Tolerance used when validating unitarity of `Z` in [`CotangentUn::new`].
pub const UNITARY_TOL: f64 = 1e-10;

/// A point `(Z, rho)` of `T*U(n)`, `Z` unitary and `rho` anti-hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct CotangentUn {
    pub z: CMatrix,
    pub rho: CMatrix,
}

impl CotangentUn {
    pub fn new(z: CMatrix, rho: CMatrix) -> Result<Self> {
        let n = z.nrows();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        matrix::ensure_square(&z, n)?;
        matrix::ensure_square(&rho, n)?;
        matrix::require_unitary(&z, UNITARY_TOL * (1.0 + n as f64))?;
        matrix::require_anti_hermitian(&rho, SYMMETRY_TOL)?;
        Ok(CotangentUn { z, rho })
    }

    pub fn n(&self) -> usize {
        self.z.nrows()
    }
}

/// A point `(Y, X)` of `H(n) x H(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CotangentHn {
    pub y: CMatrix,
    pub x: CMatrix,
}

impl CotangentHn {
    pub fn new(y: CMatrix, x: CMatrix) -> Result<Self> {
        let n = y.nrows();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        matrix::ensure_square(&y, n)?;
        matrix::ensure_square(&x, n)?;
        matrix::require_hermitian(&y, SYMMETRY_TOL)?;
        matrix::require_hermitian(&x, SYMMETRY_TOL)?;
        Ok(CotangentHn { y, x })
    }

    pub fn zeros(n: usize) -> Self {
        CotangentHn {
            y: matrix::zeros(n, n),
            x: matrix::zeros(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    /// Projects both components onto their hermitian parts.
    pub fn symmetrized(&self) -> Self {
        CotangentHn {
            y: matrix::hermitian_part(&self.y),
            x: matrix::hermitian_part(&self.x),
        }
    }

    /// Largest entrywise Frobenius distance of the two components.
    pub fn distance(&self, other: &CotangentHn) -> f64 {
        frob(&(&self.y - &other.y)).max(frob(&(&self.x - &other.x)))
    }
}

/// `A -> Tr(X A)` for a fixed generator `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctional {
    pub generator: AlgebraElement,
}

impl LinearFunctional {
    pub fn new(generator: AlgebraElement) -> Result<Self> {
        let r = twistor_core::algebra_residual(&generator.matrix, &generator.form)?;
        if r > twistor_core::MEMBERSHIP_TOL {
            return Err(Error::Constraint {
                what: "generator in u(n,n)",
                residual: r,
            });
        }
        Ok(LinearFunctional { generator })
    }

    pub fn eval(&self, a: &AlgebraElement) -> Result<f64> {
        linear_functional_eval(self, a)
    }
}

pub fn j_pm(v: &TwistorVector) -> Result<AlgebraElement> {
    v.require(Realization::Diagonal)?;
    let (eta, xi) = (&v.upper, &v.lower);
    let m = matrix::block(
        &-matrix::outer(eta, eta),
        &matrix::outer(eta, xi),
        &-matrix::outer(xi, eta),
        &matrix::outer(xi, xi),
    ) * I;
    Ok(AlgebraElement {
        form: make_form(v.n(), Realization::Diagonal)?,
        matrix: m,
    })
}

pub fn j_pm_tilde(v: &TwistorVector) -> Result<AlgebraElement> {
    v.require(Realization::AntiDiagonal)?;
    let (u, z) = (&v.upper, &v.lower);
    let m = matrix::block(
        &matrix::outer(u, z),
        &-matrix::outer(u, u),
        &matrix::outer(z, z),
        &-matrix::outer(z, u),
    );
    Ok(AlgebraElement {
        form: make_form(v.n(), Realization::AntiDiagonal)?,
        matrix: m,
    })
}

pub fn j0(p: &CotangentUn) -> Result<AlgebraElement> {
    let zr = &p.z * &p.rho;
    let m = matrix::block(&-(&zr * p.z.adjoint()), &zr, &zr.adjoint(), &p.rho);
    Ok(AlgebraElement {
        form: make_form(p.n(), Realization::Diagonal)?,
        matrix: m,
    })
}

pub fn j0_tilde(p: &CotangentHn) -> Result<AlgebraElement> {
    let yx = &p.y * &p.x;
    let xy = &p.x * &p.y;
    let m = matrix::block(&yx, &-(&yx * &p.y), &p.x, &-xy);
    Ok(AlgebraElement {
        form: make_form(p.n(), Realization::AntiDiagonal)?,
        matrix: m,
    })
}

fn require_form(g: &GroupElement, realization: Realization, n: usize) -> Result<()> {
    if g.form.realization() != realization {
        return Err(Error::RealizationMismatch {
            expected: realization.name(),
        });
    }
    if g.form.n() != n {
        return Err(Error::dims(format!("n = {n}"), format!("n = {}", g.form.n())));
    }
    Ok(())
}

/// `Z -> (AZ + B)(CZ + D)^{-1}`.
pub fn act_on_un(g: &GroupElement, z: &CMatrix) -> Result<CMatrix> {
    require_form(g, Realization::Diagonal, z.nrows())?;
    Ok(twistor_core::fractional_action(&g.matrix, z)?.0)
}

/// `(Z, rho) -> ((AZ + B)(CZ + D)^{-1}, (CZ + D) rho (CZ + D)^+)`.
pub fn act_lambda(g: &GroupElement, p: &CotangentUn) -> Result<CotangentUn> {
    require_form(g, Realization::Diagonal, p.n())?;
    let (z, w) = twistor_core::fractional_action(&g.matrix, &p.z)?;
    let rho = matrix::anti_hermitian_part(&(&w * &p.rho * w.adjoint()));
    Ok(CotangentUn { z, rho })
}

/// `(Y, X) -> ((A~Y + B~)(C~Y + D~)^{-1}, (C~Y + D~) X (C~Y + D~)^+)`.
///
/// Defined only off the locus `det(C~Y + D~) = 0`, where the
/// [`Error::Singular`] error is returned.
pub fn act_sigma_tilde(g: &GroupElement, p: &CotangentHn) -> Result<CotangentHn> {
    require_form(g, Realization::AntiDiagonal, p.n())?;
    let (y, w) = twistor_core::fractional_action(&g.matrix, &p.y)?;
    let x = &w * &p.x * w.adjoint();
    Ok(CotangentHn { y, x }.symmetrized())
}

/// `Tr(X A)`. For `X, A` in the same `u(n,n)` the trace is real; the
/// imaginary part is discarded.
pub fn linear_functional_eval(l: &LinearFunctional, a: &AlgebraElement) -> Result<f64> {
    let m = &l.generator.matrix;
    if m.shape() != a.matrix.shape() {
        return Err(Error::dims(
            format!("{}x{}", m.nrows(), m.ncols()),
            format!("{}x{}", a.matrix.nrows(), a.matrix.ncols()),
        ));
    }
    Ok((m * &a.matrix).trace().re)
}

/// The functional with generator `[X1, X2]`.
pub fn bracket_of_linear(l1: &LinearFunctional, l2: &LinearFunctional) -> Result<LinearFunctional> {
    if l1.generator.form != l2.generator.form {
        return Err(Error::RealizationMismatch {
            expected: l1.generator.form.realization().name(),
        });
    }
    Ok(LinearFunctional {
        generator: AlgebraElement {
            form: l1.generator.form.clone(),
            matrix: matrix::commutator(&l1.generator.matrix, &l2.generator.matrix),
        },
    })
}

/// Block form of the Lie–Poisson bracket of two linear functionals at `A`.
///
/// The block partials of `L_X` with `X = [[a, b], [b', d]]` are
/// `df/dalpha = a`, `df/dbeta = b`, `df/dbeta^+ = b'`, `df/ddelta = d`, and
/// `A = [[alpha, beta], [beta', delta]]`:
///
/// ```text
/// {f, g}(A) = Tr( alpha [f_a, g_a] + alpha (f_b g_b' - g_b f_b')
///               + beta  (f_b' g_a + f_d g_b' - g_b' f_a - g_d f_b')
///               + beta' (f_a g_b + f_b g_d - g_a f_b - g_b f_d)
///               + delta [f_d, g_d] + delta (f_b' g_b - g_b' f_b) )
/// ```
///
/// For linear functionals this equals `Tr([X1, X2] A)`.
pub fn lie_poisson_linear(
    l1: &LinearFunctional,
    l2: &LinearFunctional,
    a: &AlgebraElement,
) -> Result<f64> {
    let (fa, fb, fbp, fd) = matrix::split(&l1.generator.matrix);
    let (ga, gb, gbp, gd) = matrix::split(&l2.generator.matrix);
    if l2.generator.matrix.shape() != a.matrix.shape() || l1.generator.matrix.shape() != a.matrix.shape() {
        return Err(Error::dims("equal generator and argument sizes", "mismatch"));
    }
    let (al, be, bep, de) = matrix::split(&a.matrix);
    let t = &al * (matrix::commutator(&fa, &ga) + &fb * &gbp - &gb * &fbp)
        + &be * (&fbp * &ga + &fd * &gbp - &gbp * &fa - &gd * &fbp)
        + &bep * (&fa * &gb + &fb * &gd - &ga * &fb - &gb * &fd)
        + &de * (matrix::commutator(&fd, &gd) + &fbp * &gb - &gbp * &fb);
    Ok(t.trace().re)
}

/// `X_{++} = i * identity` in the diagonal realization; `L o J_{+-} = I_{+-}`.
pub fn generator_pp(n: usize) -> Result<AlgebraElement> {
    Ok(AlgebraElement {
        form: make_form(n, Realization::Diagonal)?,
        matrix: matrix::scalar(2 * n, I),
    })
}

/// `X_{+-} = i diag(E, -E)`; `L o J_{+-} = I_{++}` and `L o J_0 = I_0`.
pub fn generator_pm(n: usize) -> Result<AlgebraElement> {
    let form = make_form(n, Realization::Diagonal)?;
    let matrix = form.matrix() * I;
    Ok(AlgebraElement { form, matrix })
}

/// `C^+ X C` in the anti-diagonal realization.
pub fn pull_back_generator(x: &AlgebraElement) -> Result<AlgebraElement> {
    if x.form.realization() != Realization::Diagonal {
        return Err(Error::RealizationMismatch { expected: "diagonal" });
    }
    let cm = twistor_core::cayley_intertwiner(x.form.n())?;
    Ok(AlgebraElement {
        form: make_form(x.form.n(), Realization::AntiDiagonal)?,
        matrix: cm.adjoint() * &x.matrix * cm,
    })
}

/// `X~_{+-} = C^+ X_{+-} C = [[0, E], [-E, 0]]`; `L o J~_0 = I~_0`.
pub fn generator_pm_tilde(n: usize) -> Result<AlgebraElement> {
    pull_back_generator(&generator_pm(n)?)
}

/// `X~_{++} = C^+ X_{++} C = i * identity`.
pub fn generator_pp_tilde(n: usize) -> Result<AlgebraElement> {
    pull_back_generator(&generator_pp(n)?)
}

/// `I_{++} = eta^+ eta + xi^+ xi`.
pub fn i_pp(v: &TwistorVector) -> Result<f64> {
    v.require(Realization::Diagonal)?;
    Ok(v.upper.norm_squared() + v.lower.norm_squared())
}

/// `I_{+-} = eta^+ eta - xi^+ xi`.
pub fn i_pm(v: &TwistorVector) -> Result<f64> {
    v.require(Realization::Diagonal)?;
    Ok(v.null_invariant())
}

/// `I_0 = -2i Tr rho`.
pub fn i0(p: &CotangentUn) -> f64 {
    (p.rho.trace() * c(0.0, -2.0)).re
}

/// `I~_{++} = upsilon^+ upsilon + zeta^+ zeta`.
pub fn i_pp_tilde(v: &TwistorVector) -> Result<f64> {
    v.require(Realization::AntiDiagonal)?;
    Ok(v.upper.norm_squared() + v.lower.norm_squared())
}

/// `I~_{+-} = i (zeta^+ upsilon - upsilon^+ zeta)`.
pub fn i_pm_tilde(v: &TwistorVector) -> Result<f64> {
    v.require(Realization::AntiDiagonal)?;
    Ok(v.null_invariant())
}

/// `I~_0 = Tr(X (E + Y^2))`, the regularized Kepler Hamiltonian.
pub fn i0_tilde(p: &CotangentHn) -> f64 {
    let n = p.n();
    (&p.x * (matrix::identity(n) + &p.y * &p.y)).trace().re
}

/// Default finite-difference step `1e-6 (1 + |v|)`.
pub fn default_step(v: &TwistorVector) -> f64 {
    1e-6 * (1.0 + v.norm())
}

/// Conjugate Wirtinger gradient `df/d(conj z_j) = (d_x + i d_y) f / 2` of a
/// real function, by central differences in the real coordinates of the
/// stacked vector.
pub fn wirtinger_gradient<F>(f: F, v: &TwistorVector, h: f64) -> CVector
where
    F: Fn(&TwistorVector) -> f64,
{
    let base = v.stacked();
    let dim = base.len();
    let mut grad = CVector::zeros(dim);
    let mut probe = base.clone();
    let eval = |w: &CVector| f(&TwistorVector::from_stacked(v.realization, w).expect("even length"));
    for j in 0..dim {
        let z0 = base[j];
        probe[j] = z0 + c(h, 0.0);
        let fxp = eval(&probe);
        probe[j] = z0 - c(h, 0.0);
        let fxm = eval(&probe);
        probe[j] = z0 + c(0.0, h);
        let fyp = eval(&probe);
        probe[j] = z0 - c(0.0, h);
        let fym = eval(&probe);
        probe[j] = z0;
        let dx = (fxp - fxm) / (2.0 * h);
        let dy = (fyp - fym) / (2.0 * h);
        grad[j] = c(0.5 * dx, 0.5 * dy);
    }
    grad
}

/// Flat Poisson bracket on `C^{2n}` for the symplectic form `d gamma_{+-}`:
///
/// ```text
/// {f, g} = i sum_eta (df/d(conj eta) dg/deta - dg/d(conj eta) df/deta)
///        - i sum_xi  (df/d(conj xi)  dg/dxi  - dg/d(conj xi)  df/dxi)
/// ```
///
/// With this sign the flow of `H` is `f' = {H, f}`. The same formula is used
/// for anti-diagonal vectors after mapping them to the diagonal realization.
pub fn poisson_bracket_flat<F, G>(f: F, g: G, v: &TwistorVector, h: f64) -> f64
where
    F: Fn(&TwistorVector) -> f64,
    G: Fn(&TwistorVector) -> f64,
{
    let n = v.n();
    let gf = wirtinger_gradient(&f, v, h);
    let gg = wirtinger_gradient(&g, v, h);
    if v.realization == Realization::AntiDiagonal {
        // pull both gradients back through C: d/d(conj w) = C d/d(conj v)
        let cm = twistor_core::cayley_intertwiner(n).expect("n >= 1");
        return flat_bracket_from_gradients(&(&cm * gf), &(&cm * gg), n);
    }
    flat_bracket_from_gradients(&gf, &gg, n)
}

fn flat_bracket_from_gradients(gf: &CVector, gg: &CVector, n: usize) -> f64 {
    // for real f, df/dz = conj(df/d(conj z)); each pair contributes 2 Im(...)
    let mut total = 0.0;
    for j in 0..2 * n {
        let sign = if j < n { 1.0 } else { -1.0 };
        let term = gf[j] * gg[j].conj() - gg[j] * gf[j].conj();
        total += sign * (I * term).re;
    }
    total
}

/// Hamiltonian vector field of `H` for `d gamma_{+-}`:
/// `eta' = i dH/d(conj eta)`, `xi' = -i dH/d(conj xi)`.
pub fn flat_hamiltonian_field<F>(hamiltonian: F, v: &TwistorVector, h: f64) -> Result<TwistorVector>
where
    F: Fn(&TwistorVector) -> f64,
{
    v.require(Realization::Diagonal)?;
    let n = v.n();
    let grad = wirtinger_gradient(hamiltonian, v, h);
    let w = CVector::from_fn(2 * n, |j, _| if j < n { I * grad[j] } else { -I * grad[j] });
    TwistorVector::from_stacked(Realization::Diagonal, &w)
}

/// `||J^2 - c I_{+-} J||_F` for the twistor momentum map of `v`, using the
/// pinned constant.
pub fn quadratic_identity_residual(v: &TwistorVector) -> Result<f64> {
    let j = match v.realization {
        Realization::Diagonal => j_pm(v)?,
        Realization::AntiDiagonal => j_pm_tilde(v)?,
    };
    let coeff: C64 = crate::conventions::QUADRATIC_CONSTANT * c(v.null_invariant(), 0.0);
    Ok(frob(&(&j.matrix * &j.matrix - &j.matrix * coeff)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ONE;
    use crate::random::{self, seeded};
    use crate::twistor_core::{
        algebra_residual, change_realization, is_square_zero, orbit_label_default,
        rho_normal_form, sample_group_element, stabilizer_element,
    };

    fn tv(r: Realization, up: &[C64], lo: &[C64]) -> TwistorVector {
        TwistorVector::new(r, CVector::from_row_slice(up), CVector::from_row_slice(lo)).unwrap()
    }

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) {
        let r = frob(&(a - b));
        assert!(r <= tol, "residual {r:e}");
    }

    #[test]
    fn j_pm_examples() {
        let zero = TwistorVector::zeros(Realization::Diagonal, 2);
        assert_eq!(frob(&j_pm(&zero).unwrap().matrix), 0.0);
        let v = tv(Realization::Diagonal, &[ONE], &[ONE]);
        let j = j_pm(&v).unwrap().matrix;
        close(&j, &CMatrix::from_row_slice(2, 2, &[-I, I, -I, I]), 0.0);
        close(&(&j * &j), &matrix::zeros(2, 2), 0.0);
        assert!(j_pm(&TwistorVector::zeros(Realization::AntiDiagonal, 1)).is_err());
    }

    #[test]
    fn j_pm_tilde_examples() {
        let v = tv(Realization::AntiDiagonal, &[matrix::ZERO], &[ONE]);
        let j = j_pm_tilde(&v).unwrap().matrix;
        close(&j, &CMatrix::from_row_slice(2, 2, &[matrix::ZERO, matrix::ZERO, ONE, matrix::ZERO]), 0.0);
        assert!(j_pm_tilde(&TwistorVector::zeros(Realization::Diagonal, 1)).is_err());
    }

    #[test]
    fn quadratic_identity_off_the_null_cone() {
        let mut rng = seeded(31);
        for n in 1..=4 {
            for r in [Realization::Diagonal, Realization::AntiDiagonal] {
                let v = TwistorVector::new(
                    r,
                    random::complex_vector(&mut rng, n),
                    random::complex_vector(&mut rng, n),
                )
                .unwrap();
                let scale = v.norm().powi(4);
                assert!(quadratic_identity_residual(&v).unwrap() <= 1e-12 * (1.0 + scale));
            }
        }
    }

    #[test]
    fn j0_examples() {
        let e = matrix::identity(2);
        let p = CotangentUn::new(e.clone(), matrix::zeros(2, 2)).unwrap();
        assert_eq!(frob(&j0(&p).unwrap().matrix), 0.0);

        let p = CotangentUn::new(matrix::identity(1), matrix::scalar(1, I)).unwrap();
        let j = j0(&p).unwrap().matrix;
        close(&j, &CMatrix::from_row_slice(2, 2, &[-I, I, -I, I]), 0.0);
        assert_eq!(is_square_zero(&j, 1e-14), (true, 1));

        let mut rng = seeded(3);
        for (k, l) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1)] {
            let rho = rho_normal_form(3, k, l).unwrap();
            let f = random::invertible_with_condition(&mut rng, 3, 10.0);
            let rho = &f * rho * f.adjoint();
            let z = random::unitary(&mut rng, 3);
            let p = CotangentUn::new(z, rho.clone()).unwrap();
            let j = j0(&p).unwrap();
            let label = orbit_label_default(&rho).unwrap();
            assert_eq!(matrix::numerical_rank(&j.matrix, 1e-9), label.k + label.l);
            assert!(algebra_residual(&j.matrix, &j.form).unwrap() <= 1e-13);
        }
    }

    #[test]
    fn cotangent_validation() {
        let bad = CMatrix::from_row_slice(1, 1, &[c(2.0, 0.0)]);
        assert!(matches!(
            CotangentUn::new(bad.clone(), matrix::zeros(1, 1)),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            CotangentUn::new(matrix::identity(1), bad.clone()),
            Err(Error::NotAntiHermitian { .. })
        ));
        assert!(matches!(
            CotangentHn::new(matrix::scalar(1, I), bad),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn j0_tilde_examples() {
        let mut rng = seeded(8);
        let x = random::hermitian(&mut rng, 2);
        let p = CotangentHn::new(matrix::zeros(2, 2), x.clone()).unwrap();
        let z = matrix::zeros(2, 2);
        close(&j0_tilde(&p).unwrap().matrix, &matrix::block(&z, &z, &x, &z), 0.0);
        let y = random::hermitian(&mut rng, 2);
        let p = CotangentHn::new(y, z.clone()).unwrap();
        assert_eq!(frob(&j0_tilde(&p).unwrap().matrix), 0.0);
    }

    #[test]
    fn actions_fix_the_identity_point() {
        let phi = make_form(2, Realization::Diagonal).unwrap();
        let id = GroupElement::identity(&phi);
        let mut rng = seeded(12);
        let z = random::unitary(&mut rng, 2);
        close(&act_on_un(&id, &z).unwrap(), &z, 1e-14);

        let f = random::invertible_with_condition(&mut rng, 2, 5.0);
        let g = stabilizer_element(&f, &matrix::zeros(2, 2), 1e-12).unwrap();
        close(&act_on_un(&g, &matrix::identity(2)).unwrap(), &matrix::identity(2), 1e-12);
        let rho = random::anti_hermitian(&mut rng, 2);
        let p = CotangentUn::new(matrix::identity(2), rho.clone()).unwrap();
        let moved = act_lambda(&g, &p).unwrap();
        close(&moved.z, &matrix::identity(2), 1e-12);
        close(&moved.rho, &(&f * rho * f.adjoint()), 1e-12);

        let g = sample_group_element(&mut rng, &phi, 1.0);
        let z2 = act_on_un(&g, &z).unwrap();
        assert!(matrix::unitary_residual(&z2) <= 1e-10);

        let phi_a = make_form(2, Realization::AntiDiagonal).unwrap();
        assert!(act_on_un(&GroupElement::identity(&phi_a), &z).is_err());
    }

    #[test]
    fn equivariance_of_j0_and_j0_tilde() {
        let mut rng = seeded(17);
        let n = 3;
        let phi_d = make_form(n, Realization::Diagonal).unwrap();
        let phi_a = make_form(n, Realization::AntiDiagonal).unwrap();
        for _ in 0..20 {
            let g = sample_group_element(&mut rng, &phi_d, 1.0);
            let p = CotangentUn::new(random::unitary(&mut rng, n), random::anti_hermitian(&mut rng, n)).unwrap();
            let lhs = j0(&act_lambda(&g, &p).unwrap()).unwrap();
            let rhs = g.adjoint_action(&j0(&p).unwrap());
            close(&lhs.matrix, &rhs.matrix, 1e-9 * (1.0 + frob(&rhs.matrix)));

            let gt = sample_group_element(&mut rng, &phi_a, 1.0);
            let q = CotangentHn::new(random::hermitian(&mut rng, n), random::hermitian(&mut rng, n)).unwrap();
            let lhs = j0_tilde(&act_sigma_tilde(&gt, &q).unwrap()).unwrap();
            let rhs = gt.adjoint_action(&j0_tilde(&q).unwrap());
            close(&lhs.matrix, &rhs.matrix, 1e-9 * (1.0 + frob(&rhs.matrix)));

            let v = TwistorVector::new(
                Realization::AntiDiagonal,
                random::complex_vector(&mut rng, n),
                random::complex_vector(&mut rng, n),
            )
            .unwrap();
            let cm = twistor_core::cayley_intertwiner(n).unwrap();
            let lhs = &cm * j_pm_tilde(&v).unwrap().matrix * cm.adjoint();
            let rhs = j_pm(&change_realization(&v)).unwrap().matrix;
            close(&lhs, &rhs, 1e-12 * (1.0 + frob(&rhs)));
        }
    }

    #[test]
    fn pairings_match_conventions_table() {
        let mut rng = seeded(5);
        let n = 3;
        let v = TwistorVector::new(
            Realization::Diagonal,
            random::complex_vector(&mut rng, n),
            random::complex_vector(&mut rng, n),
        )
        .unwrap();
        let j = j_pm(&v).unwrap();
        let lpp = LinearFunctional::new(generator_pp(n).unwrap()).unwrap();
        let lpm = LinearFunctional::new(generator_pm(n).unwrap()).unwrap();
        assert!((lpp.eval(&j).unwrap() - i_pm(&v).unwrap()).abs() < 1e-12);
        assert!((lpm.eval(&j).unwrap() - i_pp(&v).unwrap()).abs() < 1e-12);

        let p = CotangentUn::new(random::unitary(&mut rng, n), random::anti_hermitian(&mut rng, n)).unwrap();
        assert!((lpm.eval(&j0(&p).unwrap()).unwrap() - i0(&p)).abs() < 1e-12);

        let q = CotangentHn::new(random::hermitian(&mut rng, n), random::hermitian(&mut rng, n)).unwrap();
        let lt = LinearFunctional::new(generator_pm_tilde(n).unwrap()).unwrap();
        assert!((lt.eval(&j0_tilde(&q).unwrap()).unwrap() - i0_tilde(&q)).abs() < 1e-11);
        let ltpp = LinearFunctional::new(generator_pp_tilde(n).unwrap()).unwrap();
        assert!(ltpp.eval(&j0_tilde(&q).unwrap()).unwrap().abs() < 1e-11);

        let e = matrix::identity(n);
        let z = matrix::zeros(n, n);
        close(&generator_pm_tilde(n).unwrap().matrix, &matrix::block(&z, &e, &-&e, &z), 1e-15);
        close(&generator_pp_tilde(n).unwrap().matrix, &matrix::scalar(2 * n, I), 1e-15);
    }

    #[test]
    fn observable_examples() {
        let zero = TwistorVector::zeros(Realization::Diagonal, 2);
        assert_eq!(i_pp(&zero).unwrap(), 0.0);
        assert_eq!(i_pp_tilde(&TwistorVector::zeros(Realization::AntiDiagonal, 2)).unwrap(), 0.0);
        let x = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)]);
        assert_eq!(i0_tilde(&CotangentHn::new(matrix::zeros(2, 2), x).unwrap()), 5.0);
        assert_eq!(i0_tilde(&CotangentHn::new(matrix::zeros(2, 2), matrix::identity(2)).unwrap()), 2.0);
        let p = CotangentUn::new(matrix::identity(2), rho_normal_form(2, 1, 0).unwrap()).unwrap();
        assert_eq!(i0(&p), 2.0);
    }

    #[test]
    fn linear_bracket_examples() {
        let n = 2;
        let lpp = LinearFunctional::new(generator_pp(n).unwrap()).unwrap();
        let lpm = LinearFunctional::new(generator_pm(n).unwrap()).unwrap();
        assert_eq!(frob(&bracket_of_linear(&lpp, &lpm).unwrap().generator.matrix), 0.0);
        assert_eq!(frob(&bracket_of_linear(&lpm, &lpm).unwrap().generator.matrix), 0.0);

        let phi = make_form(n, Realization::Diagonal).unwrap();
        let mut rng = seeded(2);
        for _ in 0..10 {
            let l1 = LinearFunctional::new(twistor_core::sample_algebra_element(&mut rng, &phi, 1.0)).unwrap();
            let l2 = LinearFunctional::new(twistor_core::sample_algebra_element(&mut rng, &phi, 1.0)).unwrap();
            let a = twistor_core::sample_algebra_element(&mut rng, &phi, 1.0);
            let lhs = lie_poisson_linear(&l1, &l2, &a).unwrap();
            let rhs = bracket_of_linear(&l1, &l2).unwrap().eval(&a).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12);
        }
        let phi_a = make_form(n, Realization::AntiDiagonal).unwrap();
        let la = LinearFunctional::new(twistor_core::sample_algebra_element(&mut rng, &phi_a, 1.0)).unwrap();
        assert!(bracket_of_linear(&lpp, &la).is_err());
    }

    #[test]
    fn flat_bracket_examples() {
        let mut rng = seeded(44);
        let v = TwistorVector::new(
            Realization::Diagonal,
            random::complex_vector(&mut rng, 2),
            random::complex_vector(&mut rng, 2),
        )
        .unwrap();
        let h = default_step(&v);
        let b = poisson_bracket_flat(|w| w.upper[0].norm_sqr(), |w| w.lower[0].norm_sqr(), &v, h);
        assert!(b.abs() < 1e-8);
        let b = poisson_bracket_flat(|w| w.upper[0].re, |w| w.upper[0].im, &v, h);
        assert!((b - 0.5).abs() < 1e-8);
        let b = poisson_bracket_flat(|w| i_pm(w).unwrap(), |w| i_pp(w).unwrap(), &v, h);
        assert!(b.abs() < 1e-7);
        // xi carries the opposite sign
        let b = poisson_bracket_flat(|w| w.lower[1].re, |w| w.lower[1].im, &v, h);
        assert!((b + 0.5).abs() < 1e-8);
    }

    #[test]
    fn flat_field_generates_phase_rotation() {
        // H = I_{++} generates (eta, xi) -> (e^{it} eta, e^{-it} xi)
        let mut rng = seeded(1);
        let v = random::null_twistor_diagonal(&mut rng, 2);
        let f = flat_hamiltonian_field(|w| i_pp(w).unwrap(), &v, default_step(&v)).unwrap();
        assert!((&f.upper - &v.upper * I).norm() < 1e-8);
        assert!((&f.lower + &v.lower * I).norm() < 1e-8);
    }
}
