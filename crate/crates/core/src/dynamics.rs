//! The regularized Kepler flow on `H(n) x H(n)` and on null twistors.
//!
//! The Hamiltonian `I~_0 = Tr(X (E + Y^2))` with `omega = d gamma~_0`,
//! `gamma~_0 = -Tr(X dY)`, generates the matrix Riccati system
//!
//! ```text
//! Y' = E + Y^2
//! X' = -(X Y + Y X)
//! ```
//!
//! whose solution is the fractional action of
//! `g~(t) = C^+ diag(e^{it} E, e^{-it} E) C = [[cos t E, sin t E], [-sin t E, cos t E]]`.
//! The eigenvalues of `Y` follow `tan(t + arctan lambda)`, so every orbit
//! leaves the chart once per half period. Long integrations are therefore
//! done on the twistor side, where the same flow is the linear rotation
//! `upsilon' = zeta`, `zeta' = -upsilon`.

use crate::matrix::{self, c, frob, CMatrix, C64, I};
use crate::momentum::{self, CotangentHn};
use crate::regularize::{self, cross3, dot3, norm3, PauliVector};
use crate::twistor_core::{make_form, GroupElement, Realization, TwistorVector};
use crate::{Error, Result};

/// `(Y', X') = (E + Y^2, -(XY + YX))`.
pub fn hamiltonian_field(p: &CotangentHn) -> CotangentHn {
    let n = p.n();
    let yy = &p.y * &p.y;
    CotangentHn {
        y: matrix::identity(n) + yy,
        x: -(&p.x * &p.y + &p.y * &p.x),
    }
}

/// `g~(t)` in the anti-diagonal realization.
pub fn tilde_g(n: usize, t: f64) -> Result<GroupElement> {
    let form = make_form(n, Realization::AntiDiagonal)?;
    let e = matrix::identity(n);
    let (s, co) = t.sin_cos();
    let m = matrix::block(&(&e * c(co, 0.0)), &(&e * c(s, 0.0)), &(&e * c(-s, 0.0)), &(&e * c(co, 0.0)));
    Ok(GroupElement { form, matrix: m })
}

/// `sigma~_{g~(t)}(p)`; fails where `cos t E - sin t Y` is singular.
pub fn flow_closed_form(p: &CotangentHn, t: f64) -> Result<CotangentHn> {
    momentum::act_sigma_tilde(&tilde_g(p.n(), t)?, p)
}

/// `(eta, xi) -> (e^{it} eta, e^{-it} xi)`, the flow of `I_{++}`.
pub fn flow_linear(v: &TwistorVector, t: f64) -> Result<TwistorVector> {
    v.require(Realization::Diagonal)?;
    let ph = C64::new(t.cos(), t.sin());
    TwistorVector::new(Realization::Diagonal, &v.upper * ph, &v.lower * ph.conj())
}

/// `(upsilon', zeta') = (zeta, -upsilon)`: the regularized Kepler flow on
/// anti-diagonal twistors, intertwined with [`hamiltonian_field`] by the
/// submersion.
pub fn twistor_field(v: &TwistorVector) -> TwistorVector {
    TwistorVector {
        realization: v.realization,
        upper: v.lower.clone(),
        lower: -&v.upper,
    }
}

/// `g~(t) v`.
pub fn twistor_flow(v: &TwistorVector, t: f64) -> Result<TwistorVector> {
    v.require(Realization::AntiDiagonal)?;
    let (s, co) = t.sin_cos();
    TwistorVector::new(
        Realization::AntiDiagonal,
        &v.upper * c(co, 0.0) + &v.lower * c(s, 0.0),
        &v.upper * c(-s, 0.0) + &v.lower * c(co, 0.0),
    )
}

/// `M = i[X, Y]`, `R = X + Y X Y`.
pub fn integrals_mr(p: &CotangentHn) -> (CMatrix, CMatrix) {
    let m = matrix::commutator(&p.x, &p.y) * I;
    let r = &p.x + &p.y * &p.x * &p.y;
    (matrix::hermitian_part(&m), matrix::hermitian_part(&r))
}

/// `N+ = (R + M)/2`, `N- = (R - M)/2`. Through `(eta, xi) = C (Y zeta, zeta)`
/// they equal `xi xi^+` and `eta eta^+`.
pub fn n_plus_minus(p: &CotangentHn) -> (CMatrix, CMatrix) {
    let (m, r) = integrals_mr(p);
    ((&r + &m).scale(0.5), (&r - &m).scale(0.5))
}

/// A state that can be advanced by a fixed-step integrator.
pub trait OdeState: Clone {
    /// `self + a * other`.
    fn axpy(&self, a: f64, other: &Self) -> Self;
    fn is_finite(&self) -> bool;
}

impl OdeState for CotangentHn {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        CotangentHn {
            y: &self.y + &other.y * c(a, 0.0),
            x: &self.x + &other.x * c(a, 0.0),
        }
    }

    fn is_finite(&self) -> bool {
        matrix::is_finite(&self.y) && matrix::is_finite(&self.x)
    }
}

impl OdeState for TwistorVector {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        TwistorVector {
            realization: self.realization,
            upper: &self.upper + &other.upper * c(a, 0.0),
            lower: &self.lower + &other.lower * c(a, 0.0),
        }
    }

    fn is_finite(&self) -> bool {
        self.upper.iter().chain(self.lower.iter()).all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl OdeState for Vec<f64> {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        self.iter().zip(other).map(|(x, y)| x + a * y).collect()
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }
}

/// One classic fourth-order Runge–Kutta step.
pub fn rk4_step<S, F>(field: &F, state: &S, dt: f64) -> S
where
    S: OdeState,
    F: Fn(&S) -> S,
{
    let k1 = field(state);
    let k2 = field(&state.axpy(0.5 * dt, &k1));
    let k3 = field(&state.axpy(0.5 * dt, &k2));
    let k4 = field(&state.axpy(dt, &k3));
    state
        .axpy(dt / 6.0, &k1)
        .axpy(dt / 3.0, &k2)
        .axpy(dt / 3.0, &k3)
        .axpy(dt / 6.0, &k4)
}

/// Sampled solution with a per-sample invariant log.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub invariants: Vec<Vec<f64>>,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&S> {
        self.states.last()
    }

    /// Largest deviation of any logged invariant from its initial value.
    pub fn invariant_drift(&self) -> f64 {
        let Some(first) = self.invariants.first() else {
            return 0.0;
        };
        self.invariants
            .iter()
            .flat_map(|row| row.iter().zip(first).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

/// Fixed-step RK4 from `t = 0` to `t_end`; the final step is shortened to
/// land on `t_end`. `log` is evaluated at every sample.
pub fn integrate_rk4<S, F, L>(field: F, state: S, t_end: f64, dt: f64, log: L) -> Result<Trajectory<S>>
where
    S: OdeState,
    F: Fn(&S) -> S,
    L: Fn(&S) -> Vec<f64>,
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("t_end must be nonnegative, got {t_end}")));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        invariants: Vec::with_capacity(steps + 1),
    };
    let mut t = 0.0;
    let mut s = state;
    traj.invariants.push(log(&s));
    traj.times.push(t);
    traj.states.push(s.clone());
    for step in 1..=steps {
        let next_t = if step == steps { t_end } else { step as f64 * dt };
        s = rk4_step(&field, &s, next_t - t);
        if !s.is_finite() {
            return Err(Error::NonFinite { step });
        }
        t = next_t;
        traj.invariants.push(log(&s));
        traj.times.push(t);
        traj.states.push(s.clone());
    }
    Ok(traj)
}

/// Real coordinates of a hermitian matrix: diagonal entries followed by real
/// and imaginary parts of the strict upper triangle.
pub fn hermitian_coordinates(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut out: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    for i in 0..n {
        for j in i + 1..n {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
    out
}

/// `[I~_0, M coordinates..., R coordinates...]`.
pub fn riccati_invariants(p: &CotangentHn) -> Vec<f64> {
    let (m, r) = integrals_mr(p);
    let mut out = vec![momentum::i0_tilde(p)];
    out.extend(hermitian_coordinates(&m));
    out.extend(hermitian_coordinates(&r));
    out
}

/// [`riccati_invariants`] of the KS section of a null twistor.
pub fn twistor_invariants(v: &TwistorVector) -> Vec<f64> {
    match regularize::ks_section(v, regularize::RANK_TOL) {
        Ok(p) => riccati_invariants(&p),
        Err(_) => vec![f64::NAN],
    }
}

/// RK4 of the Riccati system, logging `I~_0`, `M` and `R`. Only meaningful
/// on windows free of poles of `Y`.
pub fn integrate_riccati(p: &CotangentHn, t_end: f64, dt: f64) -> Result<Trajectory<CotangentHn>> {
    integrate_rk4(hamiltonian_field, p.clone(), t_end, dt, riccati_invariants)
}

/// RK4 of the twistor rotation from a null anti-diagonal twistor, logging the
/// invariants of the corresponding `(Y, X)` point.
pub fn integrate_regularized(v: &TwistorVector, t_end: f64, dt: f64) -> Result<Trajectory<TwistorVector>> {
    v.require(Realization::AntiDiagonal)?;
    integrate_rk4(twistor_field, v.clone(), t_end, dt, twistor_invariants)
}

/// `H_0 = |x| (1 + y^2)`.
pub fn kepler_h0_n2(y: &[f64; 3], x: &[f64; 3]) -> Result<f64> {
    let r = norm3(x);
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("x must be nonzero".into()));
    }
    Ok(r * (1.0 + dot3(y, y)))
}

/// Physical time `t(s) = int_0^s |x(sigma)| d sigma` by the trapezoid rule.
pub fn fictitious_to_physical(s: &[f64], x_norm: &[f64]) -> Result<Vec<f64>> {
    if s.len() != x_norm.len() {
        return Err(Error::dims(s.len(), x_norm.len()));
    }
    if let Some((i, v)) = x_norm.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::DomainViolation { index: i, value: *v });
    }
    let mut out = Vec::with_capacity(s.len());
    let mut acc = 0.0;
    for i in 0..s.len() {
        if i > 0 {
            let ds = s[i] - s[i - 1];
            if !(ds > 0.0) {
                return Err(Error::InvalidArgument("fictitious times must increase".into()));
            }
            acc += 0.5 * ds * (x_norm[i] + x_norm[i - 1]);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Angular momentum and Runge–Lenz data for `n = 2` in KS coordinates.
///
/// `m = 2 y x x`, `r = (1 - y^2) x + 2 y (x . y)`, `m0 = 0` and
/// `r0 = |x| (1 + y^2) / 2`. The matrices of [`integrals_mr`] carry half the
/// vector parts; see [`MrVectors::pauli_components`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MrVectors {
    pub m: [f64; 3],
    pub r: [f64; 3],
    pub m0: f64,
    pub r0: f64,
}

impl MrVectors {
    /// Pauli coordinates of the matrices `M` and `R`.
    pub fn pauli_components(&self) -> (PauliVector, PauliVector) {
        (
            PauliVector {
                scalar: self.m0,
                vec: self.m.map(|v| 0.5 * v),
            },
            PauliVector {
                scalar: self.r0,
                vec: self.r.map(|v| 0.5 * v),
            },
        )
    }
}

pub fn mr_vectors_n2(y: &[f64; 3], x: &[f64; 3]) -> MrVectors {
    let yy = dot3(y, y);
    let xy = dot3(x, y);
    let cr = cross3(y, x);
    MrVectors {
        m: cr.map(|v| 2.0 * v),
        r: [0, 1, 2].map(|k| (1.0 - yy) * x[k] + 2.0 * y[k] * xy),
        m0: 0.0,
        r0: 0.5 * norm3(x) * (1.0 + yy),
    }
}

/// Relative deviation `|a - b| / (1 + |b|)` of two points of `H(n) x H(n)`.
pub fn relative_distance(a: &CotangentHn, b: &CotangentHn) -> f64 {
    a.distance(b) / (1.0 + frob(&b.y).max(frob(&b.x)))
}
