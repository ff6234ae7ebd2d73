//! Integrable perturbations of the twistor Kepler Hamiltonian.
//!
//! For exponents `m = (k_1..k_n, l_1..l_n)` and smooth `h0`, `g0` of the
//! squared moduli `(|eta_1|^2, .., |eta_n|^2, |xi_1|^2, .., |xi_n|^2)`:
//!
//! ```text
//! H = h0 + g0 (P + conj P),   P = prod eta_j^{k_j} xi_j^{l_j}
//! ```
//!
//! where a negative power means a power of the conjugate. The canonical
//! actions of `d gamma_{+-}` are `a = (|eta|^2, -|xi|^2)` with the phases as
//! conjugate angles, so a chart `rho` gives `I = rho a` and `psi = kappa^T phi`
//! with `{I_r, psi_s} = delta_rs`. Since `arg P = m . phi = (rho m) . psi`, the
//! perturbation depends on `psi_1` alone exactly when
//!
//! ```text
//! sum_j rho_{r,j} k_j + rho_{r,n+j} l_j = delta_{r1}
//! ```
//!
//! which is what [`check_integrability`] tests. On a level set of the torus
//! momenta `(I_2, .., I_2n) = c` the reduced Hamiltonian is
//! `H_red = H0(I_1) + 2 S0(I_1) cos psi_1` with `S0 = g0 prod |z_j|^{|m_j|}`
//! and `G0 = S0^2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::dynamics::{self, Trajectory};
use crate::expr::Expr;
use crate::matrix::{self, C64};
use crate::momentum::{self, CotangentHn};
use crate::regularize::{self, norm3};
use crate::twistor_core::{Realization, TwistorVector};
use crate::{Error, Result};

/// Tolerance of the exact-integer integrability test.
pub const INTEGRABILITY_TOL: f64 = 1e-12;

/// Reconstructed squared moduli above `-DOMAIN_TOL (1 + |I|)` are clamped to
/// zero instead of being reported as domain violations.
pub const DOMAIN_TOL: f64 = 1e-12;

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Invertible real `2n x 2n` matrix `rho` with inverse `kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionAngleChart {
    n: usize,
    rho: DMatrix<f64>,
    kappa: DMatrix<f64>,
}

impl ActionAngleChart {
    pub fn new(rho: DMatrix<f64>) -> Result<Self> {
        let dim = rho.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || rho.ncols() != dim {
            return Err(Error::dims("2n x 2n with n >= 1", format!("{}x{}", rho.nrows(), rho.ncols())));
        }
        let sv = rho.clone().svd(false, false).singular_values;
        if !(sv.min() > matrix::SINGULAR_RCOND * sv.max()) {
            return Err(Error::Singular { what: "chart rho" });
        }
        let kappa = rho.clone().try_inverse().ok_or(Error::Singular { what: "chart rho" })?;
        Ok(ActionAngleChart { n: dim / 2, rho, kappa })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::dims(format!("{dim} columns per row"), "ragged rows"));
        }
        Self::new(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(2 * n, 2 * n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> &DMatrix<f64> {
        &self.rho
    }

    pub fn kappa(&self) -> &DMatrix<f64> {
        &self.kappa
    }

    /// `||kappa rho - 1||_F`.
    pub fn inverse_residual(&self) -> f64 {
        (&self.kappa * &self.rho - DMatrix::<f64>::identity(2 * self.n, 2 * self.n)).norm()
    }
}

/// Signed exponents `(k, l)` of the perturbing monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVector {
    pub k: Vec<i32>,
    pub l: Vec<i32>,
}

impl ExponentVector {
    pub fn new(k: Vec<i32>, l: Vec<i32>) -> Result<Self> {
        if k.len() != l.len() {
            return Err(Error::dims(k.len(), l.len()));
        }
        if k.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(ExponentVector { k, l })
    }

    pub fn zeros(n: usize) -> Self {
        ExponentVector {
            k: vec![0; n],
            l: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.k.len()
    }

    /// `(k_1, .., k_n, l_1, .., l_n)`.
    pub fn stacked(&self) -> Vec<i32> {
        self.k.iter().chain(&self.l).copied().collect()
    }
}

/// `h0`, `g0` and the exponents of a perturbed Hamiltonian.
#[derive(Clone)]
pub struct PerturbedSpec {
    pub n: usize,
    pub h0: ScalarFn,
    pub g0: ScalarFn,
    pub exponents: ExponentVector,
}

impl fmt::Debug for PerturbedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerturbedSpec")
            .field("n", &self.n)
            .field("exponents", &self.exponents)
            .finish_non_exhaustive()
    }
}

impl PerturbedSpec {
    pub fn new(n: usize, h0: ScalarFn, g0: ScalarFn, exponents: ExponentVector) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if exponents.n() != n {
            return Err(Error::dims(n, exponents.n()));
        }
        Ok(PerturbedSpec { n, h0, g0, exponents })
    }

    /// Builds `h0`, `g0` from expressions in `a1 .. a{2n}`; see [`crate::expr`].
    pub fn from_exprs(n: usize, h0: &str, g0: &str, exponents: ExponentVector) -> Result<Self> {
        let h = Expr::parse(h0, 2 * n)?;
        let g = Expr::parse(g0, 2 * n)?;
        Self::new(n, Arc::new(move |a| h.eval(a)), Arc::new(move |a| g.eval(a)), exponents)
    }

    pub fn h0(&self, moduli: &[f64]) -> f64 {
        (self.h0)(moduli)
    }

    pub fn g0(&self, moduli: &[f64]) -> f64 {
        (self.g0)(moduli)
    }
}

/// `(|eta_1|^2, .., |eta_n|^2, |xi_1|^2, .., |xi_n|^2)`.
pub fn squared_moduli(v: &TwistorVector) -> Vec<f64> {
    v.upper.iter().chain(v.lower.iter()).map(|z| z.norm_sqr()).collect()
}

/// `z^k` for `k >= 0`, `conj(z)^{-k}` for `k < 0`.
fn signed_power(z: C64, k: i32) -> C64 {
    if k >= 0 {
        z.powi(k)
    } else {
        z.conj().powi(-k)
    }
}

/// `P = prod eta_j^{k_j} xi_j^{l_j}` with the conjugate convention.
pub fn monomial(exponents: &ExponentVector, v: &TwistorVector) -> C64 {
    let mut p = matrix::ONE;
    for (z, &e) in v.upper.iter().chain(v.lower.iter()).zip(exponents.stacked().iter()) {
        p *= signed_power(*z, e);
    }
    p
}

/// `H(v) = h0 + g0 (P + conj P)`; real by construction.
pub fn eval_h(spec: &PerturbedSpec, v: &TwistorVector) -> Result<f64> {
    v.require(Realization::Diagonal)?;
    if v.n() != spec.n {
        return Err(Error::dims(spec.n, v.n()));
    }
    let m = squared_moduli(v);
    let p = monomial(&spec.exponents, v);
    let h0 = spec.h0(&m);
    let g0 = spec.g0(&m);
    if g0 == 0.0 {
        return Ok(h0);
    }
    Ok(h0 + 2.0 * g0 * p.re)
}

fn require_chart(chart: &ActionAngleChart, n: usize) -> Result<()> {
    if chart.n != n {
        return Err(Error::dims(format!("chart for n = {n}"), format!("n = {}", chart.n)));
    }
    Ok(())
}

/// Canonical actions `a = (|eta|^2, -|xi|^2)`.
pub fn canonical_actions(v: &TwistorVector) -> DVector<f64> {
    let n = v.n();
    DVector::from_fn(2 * n, |j, _| {
        if j < n {
            v.upper[j].norm_sqr()
        } else {
            -v.lower[j - n].norm_sqr()
        }
    })
}

/// `I_r = sum_j rho_{r,j} |eta_j|^2 - rho_{r,n+j} |xi_j|^2`.
pub fn actions(chart: &ActionAngleChart, v: &TwistorVector) -> Result<Vec<f64>> {
    v.require(Realization::Diagonal)?;
    require_chart(chart, v.n())?;
    Ok((&chart.rho * canonical_actions(v)).iter().copied().collect())
}

/// `psi_r = sum_j kappa_{j,r} phi_j`, each reduced to `[0, 2 pi)`.
///
/// The phases `phi_j` are principal arguments, so `psi` is defined modulo
/// `kappa^T (2 pi Z^{2n})`; for integer `kappa` that is modulo `2 pi`.
pub fn angles(chart: &ActionAngleChart, v: &TwistorVector) -> Result<Vec<f64>> {
    v.require(Realization::Diagonal)?;
    require_chart(chart, v.n())?;
    let phases: Vec<f64> = v
        .upper
        .iter()
        .chain(v.lower.iter())
        .enumerate()
        .map(|(j, z)| {
            if z.norm() == 0.0 {
                Err(Error::ZeroModulus { index: j })
            } else {
                Ok(z.arg())
            }
        })
        .collect::<Result<_>>()?;
    let phi = DVector::from_vec(phases);
    Ok((chart.kappa.transpose() * phi).iter().map(|&x| wrap_angle(x)).collect())
}

/// Representative in `[0, 2 pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Distance on the circle.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(2.0 * PI - d)
}

/// `rho m - e_1`, one entry per row.
pub fn integrability_defect(chart: &ActionAngleChart, exponents: &ExponentVector) -> Result<Vec<f64>> {
    require_chart(chart, exponents.n())?;
    let m = DVector::from_iterator(2 * chart.n, exponents.stacked().iter().map(|&e| e as f64));
    let r = &chart.rho * m;
    Ok(r.iter().enumerate().map(|(i, v)| v - if i == 0 { 1.0 } else { 0.0 }).collect())
}

/// Per-row truth of `sum_j rho_{r,j} k_j + rho_{r,n+j} l_j = delta_{r1}`.
pub fn check_integrability(chart: &ActionAngleChart, exponents: &ExponentVector) -> Result<Vec<bool>> {
    Ok(integrability_defect(chart, exponents)?
        .into_iter()
        .map(|d| d.abs() <= INTEGRABILITY_TOL)
        .collect())
}

/// The same rows with the opposite sign on the `l` block, kept for
/// comparison with the literature form; it disagrees with the flow test.
pub fn check_integrability_alt_sign(chart: &ActionAngleChart, exponents: &ExponentVector) -> Result<Vec<bool>> {
    let flipped = ExponentVector {
        k: exponents.k.clone(),
        l: exponents.l.iter().map(|x| -x).collect(),
    };
    check_integrability(chart, &flipped)
}

/// Sum conditions `sum k = 0` and `sum l = 0`, which are what the rows for
/// `I_{++}` and `I_{+-}` reduce to under either sign.
pub fn sums_vanish(exponents: &ExponentVector) -> bool {
    exponents.k.iter().sum::<i32>() == 0 && exponents.l.iter().sum::<i32>() == 0
}

/// `(I_2, .., I_{2n})`.
pub fn torus_momentum(chart: &ActionAngleChart, v: &TwistorVector) -> Result<Vec<f64>> {
    Ok(actions(chart, v)?[1..].to_vec())
}

fn require_integrable(chart: &ActionAngleChart, exponents: &ExponentVector) -> Result<()> {
    let rows: Vec<usize> = check_integrability(chart, exponents)?
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(r, _)| r + 1)
        .collect();
    if rows.is_empty() {
        Ok(())
    } else {
        Err(Error::NotIntegrable { rows })
    }
}

/// Squared moduli at actions `(I_1, c_2, .., c_{2n})`.
pub fn moduli_at(chart: &ActionAngleChart, i1: f64, c: &[f64]) -> Result<Vec<f64>> {
    let n = chart.n;
    if c.len() != 2 * n - 1 {
        return Err(Error::dims(2 * n - 1, c.len()));
    }
    let mut act = Vec::with_capacity(2 * n);
    act.push(i1);
    act.extend_from_slice(c);
    let scale = 1.0 + act.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let a = &chart.kappa * DVector::from_vec(act);
    (0..2 * n)
        .map(|j| {
            let m = if j < n { a[j] } else { -a[j] };
            if m < -DOMAIN_TOL * scale {
                Err(Error::DomainViolation { index: j, value: m })
            } else {
                Ok(m.max(0.0))
            }
        })
        .collect()
}

/// `(H0, S0)` at `(I_1, c)` with `S0 = g0 prod m_j^{|e_j|/2}`, so that
/// `G0 = S0^2` and `H_red = H0 + 2 S0 cos psi_1`.
pub fn reduced_parts(spec: &PerturbedSpec, chart: &ActionAngleChart, i1: f64, c: &[f64]) -> Result<(f64, f64)> {
    require_chart(chart, spec.n)?;
    let m = moduli_at(chart, i1, c)?;
    let h0 = spec.h0(&m);
    let g0 = spec.g0(&m);
    let mut s0 = g0;
    for (mj, &e) in m.iter().zip(spec.exponents.stacked().iter()) {
        if e != 0 {
            s0 *= mj.powf(0.5 * e.unsigned_abs() as f64);
        }
    }
    Ok((h0, s0))
}

/// `G0 = (g0 prod |z_j|^{|e_j|})^2`.
pub fn g0_reduced(spec: &PerturbedSpec, chart: &ActionAngleChart, i1: f64, c: &[f64]) -> Result<f64> {
    Ok(reduced_parts(spec, chart, i1, c)?.1.powi(2))
}

/// `H_red = H0 + 2 S0 cos psi_1`. This equals `H0 + 2 sqrt(G0) cos psi_1`
/// when `g0 >= 0`; for negative `g0` the sign of `S0` is kept.
pub fn reduced_h(spec: &PerturbedSpec, chart: &ActionAngleChart, i1: f64, psi1: f64, c: &[f64]) -> Result<f64> {
    require_integrable(chart, &spec.exponents)?;
    let (h0, s0) = reduced_parts(spec, chart, i1, c)?;
    Ok(h0 + 2.0 * s0 * psi1.cos())
}

fn fd_step(i1: f64) -> f64 {
    1e-6 * (1.0 + i1.abs())
}

/// `(I_1', psi_1') = (-dH_red/dpsi_1, dH_red/dI_1) = (2 S0 sin psi_1, dH_red/dI_1)`,
/// the second by central differences.
pub fn reduced_field(
    spec: &PerturbedSpec,
    chart: &ActionAngleChart,
    i1: f64,
    psi1: f64,
    c: &[f64],
) -> Result<(f64, f64)> {
    require_integrable(chart, &spec.exponents)?;
    let (_, s0) = reduced_parts(spec, chart, i1, c)?;
    let h = fd_step(i1);
    let hp = reduced_h(spec, chart, i1 + h, psi1, c)?;
    let hm = reduced_h(spec, chart, i1 - h, psi1, c)?;
    Ok((2.0 * s0 * psi1.sin(), (hp - hm) / (2.0 * h)))
}

/// `dH0/dI_1 + dG0/dI_1 cos psi_1`, the angle rate without the `1/sqrt(G0)`
/// factor that differentiating `H_red` produces. Kept as a comparison case:
/// integrating it does not conserve `H_red`.
pub fn psi_rate_alt(spec: &PerturbedSpec, chart: &ActionAngleChart, i1: f64, psi1: f64, c: &[f64]) -> Result<f64> {
    let h = fd_step(i1);
    let (h0p, s0p) = reduced_parts(spec, chart, i1 + h, c)?;
    let (h0m, s0m) = reduced_parts(spec, chart, i1 - h, c)?;
    Ok((h0p - h0m) / (2.0 * h) + (s0p * s0p - s0m * s0m) / (2.0 * h) * psi1.cos())
}

/// RK4 of [`reduced_field`] from `(I_1, psi_1)`; the log holds `H_red`.
pub fn integrate_reduced(
    spec: &PerturbedSpec,
    chart: &ActionAngleChart,
    i1: f64,
    psi1: f64,
    c: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory<Vec<f64>>> {
    require_integrable(chart, &spec.exponents)?;
    reduced_h(spec, chart, i1, psi1, c)?;
    let field = |s: &Vec<f64>| match reduced_field(spec, chart, s[0], s[1], c) {
        Ok((a, b)) => vec![a, b],
        Err(_) => vec![f64::NAN, f64::NAN],
    };
    let log = |s: &Vec<f64>| vec![reduced_h(spec, chart, s[0], s[1], c).unwrap_or(f64::NAN)];
    dynamics::integrate_rk4(field, vec![i1, psi1], t_end, dt, log)
}

/// Samples of `I_1(t)` from the energy quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSolution {
    pub times: Vec<f64>,
    pub i1: Vec<f64>,
    /// Turning points `a <= b`; equal when `I_1` is constant.
    pub turning_points: (f64, f64),
    /// Libration period, `None` when `I_1` is constant.
    pub period: Option<f64>,
    pub energy: f64,
}

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// 8-point Gauss–Legendre rule on `[a, b]`.
fn gauss8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        s += w * (f(mid + half * x) + f(mid - half * x));
    }
    s * half
}

/// Number of panels of the composite rule over one period in `theta`.
const PANELS: usize = 512;

/// Integrates `(dI_1/dt)^2 = F(I_1) = 4 G0 - (E - H0)^2` by quadrature.
///
/// The turning points `a < b` bracketing `I_1(0)` are located by an outward
/// search followed by bisection on the sign of `F`. With
/// `I_1 = (a + b)/2 - (b - a)/2 cos theta` the equation becomes
/// `theta' = sqrt(F / ((I_1 - a)(b - I_1)))`, which is smooth through the
/// turning points, so `t(theta)` is computed with a composite Gauss–Legendre
/// rule and inverted by Newton's method at each sample time.
pub fn quadrature_solve(
    spec: &PerturbedSpec,
    chart: &ActionAngleChart,
    i1_0: f64,
    psi1_0: f64,
    c: &[f64],
    t_end: f64,
    samples: usize,
) -> Result<QuadratureSolution> {
    if samples < 2 || !(t_end > 0.0) {
        return Err(Error::InvalidArgument("need t_end > 0 and at least two samples".into()));
    }
    let energy = reduced_h(spec, chart, i1_0, psi1_0, c)?;
    let times: Vec<f64> = (0..samples).map(|i| t_end * i as f64 / (samples - 1) as f64).collect();
    let (h0_0, s0_0) = reduced_parts(spec, chart, i1_0, c)?;
    if s0_0 == 0.0 {
        return Ok(QuadratureSolution {
            i1: vec![i1_0; samples],
            times,
            turning_points: (i1_0, i1_0),
            period: None,
            energy,
        });
    }

    let radicand = |i: f64| -> Option<f64> {
        reduced_parts(spec, chart, i, c)
            .ok()
            .map(|(h0, s0)| 4.0 * s0 * s0 - (energy - h0).powi(2))
    };
    let f0 = 4.0 * s0_0 * s0_0 - (energy - h0_0).powi(2);
    let scale = 4.0 * s0_0 * s0_0 + (energy - h0_0).powi(2);
    if f0 < -1e-9 * scale {
        return Err(Error::NegativeRadicand { value: f0 });
    }
    let negative = |i: f64| radicand(i).is_none_or(|f| f < 0.0);

    let turning = |dir: f64| -> Result<f64> {
        let mut step = 1e-3 * (1.0 + i1_0.abs());
        let mut inside = i1_0;
        let mut outside = None;
        for _ in 0..200 {
            let probe = inside + dir * step;
            if negative(probe) {
                outside = Some(probe);
                break;
            }
            inside = probe;
            step *= 1.5;
        }
        let mut out = outside.ok_or(Error::NoTurningPoint { from: i1_0 })?;
        for _ in 0..200 {
            let mid = 0.5 * (inside + out);
            if mid == inside || mid == out {
                break;
            }
            if negative(mid) {
                out = mid;
            } else {
                inside = mid;
            }
        }
        Ok(inside)
    };
    let a = turning(-1.0)?;
    let b = turning(1.0)?;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    if !(half > 0.0) {
        return Ok(QuadratureSolution {
            i1: vec![i1_0; samples],
            times,
            turning_points: (a, b),
            period: None,
            energy,
        });
    }

    let rate = |theta: f64| -> f64 {
        let i = mid - half * theta.cos();
        let gap = (i - a) * (b - i);
        let q = radicand(i).unwrap_or(0.0) / gap;
        1.0 / q.max(0.0).sqrt()
    };
    let panel = 2.0 * PI / PANELS as f64;
    let mut cumulative = vec![0.0; PANELS + 1];
    for k in 0..PANELS {
        cumulative[k + 1] = cumulative[k] + gauss8(&rate, k as f64 * panel, (k + 1) as f64 * panel);
    }
    let period = cumulative[PANELS];
    if !period.is_finite() {
        return Err(Error::NonFinite { step: 0 });
    }
    let tau = |theta: f64| -> f64 {
        let k = ((theta / panel).floor() as usize).min(PANELS - 1);
        cumulative[k] + gauss8(&rate, k as f64 * panel, theta)
    };

    // initial phase: I_1 increases while S0 sin psi_1 > 0
    let cos0 = ((mid - i1_0) / half).clamp(-1.0, 1.0);
    let mut theta0 = cos0.acos();
    if s0_0 * psi1_0.sin() < 0.0 {
        theta0 = 2.0 * PI - theta0;
    }
    let tau0 = tau(theta0);

    let i1 = times
        .iter()
        .map(|&t| {
            let target = (tau0 + t).rem_euclid(period);
            // bracket by panel, then Newton with bisection safeguard
            let k = cumulative.partition_point(|&c| c <= target).saturating_sub(1).min(PANELS - 1);
            let (mut lo, mut hi) = (k as f64 * panel, (k + 1) as f64 * panel);
            let mut theta = 0.5 * (lo + hi);
            for _ in 0..60 {
                let g = tau(theta) - target;
                if g.abs() <= 1e-15 * (1.0 + period) {
                    break;
                }
                if g > 0.0 {
                    hi = theta;
                } else {
                    lo = theta;
                }
                let next = theta - g / rate(theta);
                theta = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            }
            mid - half * theta.cos()
        })
        .collect();
    Ok(QuadratureSolution {
        times,
        i1,
        turning_points: (a, b),
        period: Some(period),
        energy,
    })
}

/// Hamiltonian vector field of [`eval_h`] for `d gamma_{+-}`, by central
/// differences.
pub fn perturbed_field(spec: &PerturbedSpec, v: &TwistorVector) -> Result<TwistorVector> {
    eval_h(spec, v)?;
    let h = momentum::default_step(v);
    momentum::flat_hamiltonian_field(|w| eval_h(spec, w).unwrap_or(f64::NAN), v, h)
}

/// RK4 of [`perturbed_field`]; the log holds `[H, I_1, .., I_{2n}]`.
pub fn integrate_perturbed(
    spec: &PerturbedSpec,
    chart: &ActionAngleChart,
    v: &TwistorVector,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory<TwistorVector>> {
    eval_h(spec, v)?;
    require_chart(chart, v.n())?;
    let field = |w: &TwistorVector| {
        perturbed_field(spec, w).unwrap_or_else(|_| TwistorVector {
            realization: Realization::Diagonal,
            upper: w.upper.map(|_| C64::new(f64::NAN, 0.0)),
            lower: w.lower.clone(),
        })
    };
    let log = |w: &TwistorVector| {
        let mut row = vec![eval_h(spec, w).unwrap_or(f64::NAN)];
        row.extend(actions(chart, w).unwrap_or_default());
        row
    };
    dynamics::integrate_rk4(field, v.clone(), t_end, dt, log)
}

/// Pairs each positive exponent with an index carrying its negative.
fn pair_exponents(e: &[i32], label: &str) -> Result<Vec<(usize, usize, i32)>> {
    let mut used = vec![false; e.len()];
    let mut pairs = Vec::new();
    for i in 0..e.len() {
        if e[i] <= 0 {
            continue;
        }
        let partner = (0..e.len()).find(|&j| !used[j] && e[j] == -e[i]);
        match partner {
            Some(j) => {
                used[j] = true;
                used[i] = true;
                pairs.push((i, j, e[i]));
            }
            None => return Err(Error::UnpairedExponents(format!("{label} = {e:?}"))),
        }
    }
    if let Some(j) = (0..e.len()).find(|&j| e[j] < 0 && !used[j]) {
        return Err(Error::UnpairedExponents(format!("{label}_{} = {} has no partner", j + 1, e[j])));
    }
    Ok(pairs)
}

/// `H~(Y, X)`: `h0`, `g0` on `(diag N-, diag N+)` and the monomial
/// `prod (N-_{ij})^{k_i} prod (N+_{ab})^{l_a}` over pairs `k_i = -k_j > 0`,
/// `l_a = -l_b > 0`, plus its conjugate.
///
/// Through `(eta, xi) = C (Y zeta, zeta)` one has `eta eta^+ = N-` and
/// `xi xi^+ = N+`, so this agrees with [`eval_h`] on the corresponding
/// twistor.
pub fn eval_h_tilde(p: &CotangentHn, spec: &PerturbedSpec) -> Result<f64> {
    if p.n() != spec.n {
        return Err(Error::dims(spec.n, p.n()));
    }
    let k_pairs = pair_exponents(&spec.exponents.k, "k")?;
    let l_pairs = pair_exponents(&spec.exponents.l, "l")?;
    let (np, nm) = dynamics::n_plus_minus(p);
    let n = spec.n;
    let args: Vec<f64> = (0..n).map(|j| nm[(j, j)].re).chain((0..n).map(|j| np[(j, j)].re)).collect();
    let h0 = spec.h0(&args);
    let g0 = spec.g0(&args);
    if g0 == 0.0 {
        return Ok(h0);
    }
    let mut mono = matrix::ONE;
    for (i, j, e) in k_pairs {
        mono *= nm[(i, j)].powi(e);
    }
    for (a, b, e) in l_pairs {
        mono *= np[(a, b)].powi(e);
    }
    Ok(h0 + 2.0 * g0 * mono.re)
}

/// Selects `X_{+} = X_1 + i X_2` or `X_{-} = X_1 - i X_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliSign {
    Plus,
    Minus,
}

impl PauliSign {
    fn flip(self) -> Self {
        match self {
            PauliSign::Plus => PauliSign::Minus,
            PauliSign::Minus => PauliSign::Plus,
        }
    }

    fn combine(self, v: &[f64; 3]) -> C64 {
        match self {
            PauliSign::Plus => C64::new(v[0], v[1]),
            PauliSign::Minus => C64::new(v[0], -v[1]),
        }
    }
}

/// Squared moduli `(|eta_1|^2, |eta_2|^2, |xi_1|^2, |xi_2|^2)` from the
/// Pauli coordinates `(R0, R3, M0, M3)` of the matrices `R`, `M`:
/// the diagonals of `N- = (R - M)/2` and `N+ = (R + M)/2`.
pub fn moduli_from_rm(r0: f64, r3: f64, m0: f64, m3: f64) -> [f64; 4] {
    [
        0.5 * (r0 + r3 - m0 - m3),
        0.5 * (r0 - r3 - m0 + m3),
        0.5 * (r0 + r3 + m0 + m3),
        0.5 * (r0 - r3 + m0 - m3),
    ]
}

pub type PauliFn<'a> = &'a dyn Fn(&[f64; 4]) -> f64;

/// `n = 2` form of [`eval_h_tilde`] in KS coordinates:
///
/// ```text
/// h~0(R0, R3, M0, M3)
///   + g~0(R0, R3, M0, M3) ((R_s - M_s)^k (R_s' + M_s')^l + (R_-s - M_-s)^k (R_-s' + M_-s')^l)
/// ```
///
/// with `R`, `M` the Pauli coordinates of the matrices (half of the vectors
/// of [`dynamics::mr_vectors_n2`]), `M0 = 0` and `R0 = |x| (1 + y^2) / 2`.
/// With `s = s' = -`, `h~0 = h0 o moduli_from_rm` and
/// `g~0 = 2^{-(k+l)} g0 o moduli_from_rm` this is [`eval_h`] for the
/// exponents `k = (k, -k)`, `l = (l, -l)`.
#[allow(clippy::too_many_arguments)]
pub fn eval_h_tilde_n2(
    y: &[f64; 3],
    x: &[f64; 3],
    h0: PauliFn<'_>,
    g0: PauliFn<'_>,
    k: u32,
    l: u32,
    sigma: PauliSign,
    sigma_p: PauliSign,
) -> Result<f64> {
    if !(norm3(x) > 0.0) {
        return Err(Error::InvalidArgument("x must be nonzero".into()));
    }
    let (m, r) = dynamics::mr_vectors_n2(y, x).pauli_components();
    let args = [r.scalar, r.vec[2], m.scalar, m.vec[2]];
    let h = h0(&args);
    let g = g0(&args);
    if g == 0.0 {
        return Ok(h);
    }
    let term = |s: PauliSign, sp: PauliSign| {
        (s.combine(&r.vec) - s.combine(&m.vec)).powu(k) * (sp.combine(&r.vec) + sp.combine(&m.vec)).powu(l)
    };
    let sum = term(sigma, sigma_p) + term(sigma.flip(), sigma_p.flip());
    Ok(h + g * sum.re)
}

/// Squared moduli of `C v` predicted by [`moduli_from_rm`] applied to the
/// Pauli coordinates of `M`, `R` of the KS section of `v` (`n = 2`).
pub fn moduli_via_rm(v: &TwistorVector, tol: f64) -> Result<[f64; 4]> {
    let p = regularize::ks_section(v, tol)?;
    let (m, r) = dynamics::integrals_mr(&p);
    let pm = regularize::pauli_decompose(&m)?;
    let pr = regularize::pauli_decompose(&r)?;
    Ok(moduli_from_rm(pr.scalar, pr.vec[2], pm.scalar, pm.vec[2]))
}
