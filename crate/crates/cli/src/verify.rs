//! Property suites run by `verify`. Each suite draws its samples from a
//! generator seeded by the run seed and the suite index and reports the
//! largest normalized residual it saw.

use std::f64::consts::PI;

use twistor_kepler::dynamics::{self, relative_distance};
use twistor_kepler::integrable::{self, ActionAngleChart, ExponentVector, PerturbedSpec};
use twistor_kepler::matrix::{self, c, frob, CMatrix};
use twistor_kepler::momentum::{self, CotangentHn, CotangentUn, LinearFunctional};
use twistor_kepler::random::{self, seeded, SeededRng};
use twistor_kepler::regularize::{self, TwistorClass};
use twistor_kepler::twistor_core::{
    self, algebra_residual, make_form, orbit_label_default, sample_algebra_element, sample_group_element,
    square_zero_residual, Realization, TwistorVector,
};
use twistor_kepler::Result;

use crate::config::RunConfig;

const SAMPLES: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub error: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.residual <= self.tolerance
    }
}

type SuiteFn = fn(usize, &mut SeededRng) -> Result<f64>;

/// `(name, default tolerance, suite)`.
pub const SUITES: [(&str, f64, SuiteFn); 11] = [
    ("nilpotency", 1e-10, nilpotency),
    ("quadratic_identity", 1e-12, quadratic_identity),
    ("membership", 1e-12, membership),
    ("equivariance", 1e-9, equivariance),
    ("orbit_label", 0.0, orbit_labels),
    ("regularization", 1e-9, regularization),
    ("ks_section", 1e-12, ks_section),
    ("flow", 1e-6, flow),
    ("lie_poisson", 1e-10, lie_poisson),
    ("kepler_n2", 1e-9, kepler_n2),
    ("integrable", 1e-6, integrable_suite),
];

/// Runs every suite, one thread each.
pub fn run(cfg: &RunConfig) -> Vec<SuiteReport> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = SUITES
            .iter()
            .enumerate()
            .map(|(i, (name, default, suite))| {
                let n = cfg.n;
                let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
                let tolerance = cfg.tolerance(name, *default);
                scope.spawn(move || {
                    let outcome = suite(n, &mut seeded(seed));
                    SuiteReport {
                        name,
                        residual: *outcome.as_ref().unwrap_or(&f64::NAN),
                        tolerance,
                        error: outcome.err().map(|e| e.to_string()),
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    })
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    frob(&(a - b)) / (1.0 + frob(b))
}

fn random_twistor(rng: &mut SeededRng, n: usize, r: Realization) -> TwistorVector {
    TwistorVector::new(r, random::complex_vector(rng, n), random::complex_vector(rng, n)).expect("equal lengths")
}

fn random_un(rng: &mut SeededRng, n: usize) -> Result<CotangentUn> {
    CotangentUn::new(random::unitary(rng, n), random::anti_hermitian(rng, n))
}

fn random_hn(rng: &mut SeededRng, n: usize) -> Result<CotangentHn> {
    CotangentHn::new(random::hermitian(rng, n), random::hermitian(rng, n))
}

fn nilpotency(n: usize, rng: &mut SeededRng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let a = momentum::j_pm(&random::null_twistor_diagonal(rng, n))?;
        let b = momentum::j_pm_tilde(&random::null_twistor_antidiagonal(rng, n))?;
        let c0 = momentum::j0(&random_un(rng, n)?)?;
        let c1 = momentum::j0_tilde(&random_hn(rng, n)?)?;
        for m in [&a.matrix, &b.matrix, &c0.matrix, &c1.matrix] {
            worst = worst.max(square_zero_residual(m));
        }
    }
    Ok(worst)
}

fn quadratic_identity(n: usize, rng: &mut SeededRng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        for r in [Realization::Diagonal, Realization::AntiDiagonal] {
            let v = random_twistor(rng, n, r);
            let scale = 1.0 + v.norm().powi(4);
            worst = worst.max(momentum::quadratic_identity_residual(&v)? / scale);
        }
    }
    Ok(worst)
}

fn membership(n: usize, rng: &mut SeededRng) -> Result<f64> {
    let fd = make_form(n, Realization::Diagonal)?;
    let fa = make_form(n, Realization::AntiDiagonal)?;
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let a = momentum::j_pm(&random_twistor(rng, n, Realization::Diagonal))?;
        let b = momentum::j_pm_tilde(&random_twistor(rng, n, Realization::AntiDiagonal))?;
        let c0 = momentum::j0(&random_un(rng, n)?)?;
        let c1 = momentum::j0_tilde(&random_hn(rng, n)?)?;
        worst = worst
            .max(algebra_residual(&a.matrix, &fd)?)
            .max(algebra_residual(&b.matrix, &fa)?)
            .max(algebra_residual(&c0.matrix, &fd)?)
            .max(algebra_residual(&c1.matrix, &fa)?);
    }
    Ok(worst)
}

fn equivariance(n: usize, rng: &mut SeededRng) -> Result<f64> {
    let fd = make_form(n, Realization::Diagonal)?;
    let fa = make_form(n, Realization::AntiDiagonal)?;
    let cm = twistor_core::cayley_intertwiner(n)?;
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let g = sample_group_element(rng, &fd, 0.5);
        let v = random_twistor(rng, n, Realization::Diagonal);
        let gv = TwistorVector::from_stacked(Realization::Diagonal, &(&g.matrix * v.stacked()))?;
        let j = momentum::j_pm(&v)?;
        worst = worst.max(rel(&momentum::j_pm(&gv)?.matrix, &g.adjoint_action(&j).matrix));

        let p = random_un(rng, n)?;
        let q = momentum::act_lambda(&g, &p)?;
        worst = worst.max(rel(&momentum::j0(&q)?.matrix, &g.adjoint_action(&momentum::j0(&p)?).matrix));

        let gt = sample_group_element(rng, &fa, 0.5);
        let p = random_hn(rng, n)?;
        let q = momentum::act_sigma_tilde(&gt, &p)?;
        worst = worst.max(rel(
            &momentum::j0_tilde(&q)?.matrix,
            &gt.adjoint_action(&momentum::j0_tilde(&p)?).matrix,
        ));

        // vertical arrows of the commuting diagram
        let w = random_twistor(rng, n, Realization::AntiDiagonal);
        let lhs = &cm * momentum::j_pm_tilde(&w)?.matrix * cm.adjoint();
        let rhs = momentum::j_pm(&twistor_core::change_realization(&w))?.matrix;
        worst = worst.max(rel(&lhs, &rhs));
        let lhs = &cm * momentum::j0_tilde(&p)?.matrix * cm.adjoint();
        let rhs = momentum::j0(&regularize::t_star_c(&p)?)?.matrix;
        worst = worst.max(rel(&lhs, &rhs));
    }
    Ok(worst)
}

/// Counts label changes under congruence and rank mismatches; passes only at 0.
fn orbit_labels(n: usize, rng: &mut SeededRng) -> Result<f64> {
    let mut failures = 0usize;
    for _ in 0..SAMPLES {
        let k = rng_index(rng, n + 1);
        let l = rng_index(rng, n + 1 - k);
        let rho = twistor_core::rho_normal_form(n, k, l)?;
        let f = random::invertible_with_condition(rng, n, 1e3);
        let moved = matrix::anti_hermitian_part(&(&f * &rho * f.adjoint()));
        let label = orbit_label_default(&moved)?;
        if (label.k, label.l) != (k, l) {
            failures += 1;
        }
        let j = momentum::j0(&CotangentUn::new(random::unitary(rng, n), moved)?)?;
        if matrix::numerical_rank(&j.matrix, 1e-9) != k + l {
            failures += 1;
        }
    }
    Ok(failures as f64)
}

fn rng_index(rng: &mut SeededRng, bound: usize) -> usize {
    use rand::Rng;
    rng.random_range(0..bound)
}

fn regularization(n: usize, rng: &mut SeededRng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let v = random::null_twistor_antidiagonal(rng, n);
        let p = regularize::ks_section(&v, 1e-10)?;
        let k = regularize::k_reg(&p, regularize::RANK_TOL)?.change_realization();
        let cc = regularize::c_reg(&p, regularize::RANK_TOL)?;
        worst = worst.max(regularize::class_distance(&k, &cc)? / (1.0 + v.norm()));
    }
    Ok(worst)
}

fn ks_section(n: usize, rng: &mut SeededRng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let v = random::null_twistor_antidiagonal(rng, n);
        let scale = 1.0 + v.norm();
        let p = regularize::ks_section(&v, 1e-10)?;
        worst = worst.max((&p.y * &v.lower - &v.upper).norm() / scale);
        worst = worst.max(matrix::hermitian_residual(&p.y) / (1.0 + frob(&p.y)));
        let phase = c(0.3_f64.cos(), 0.3_f64.sin());
        let q = regularize::ks_section(&v.scaled(phase), 1e-10)?;
        worst = worst.max(relative_distance(&q, &p));
        let back = regularize::submersion_r(&p, 1e-10)?;
        let d = regularize::class_distance(&TwistorClass::new(back), &TwistorClass::new(v.clone()))?;
        worst = worst.max(d / scale);
    }
    Ok(worst)
}

fn flow(n: usize, rng: &mut SeededRng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..4 {
        let p = CotangentHn::new(random::hermitian_with_norm(rng, n, 0.5), random::hermitian(rng, n))?;
        // ODE residual by central differences
        let (t, h) = (0.4, 1e-4);
        let plus = dynamics::flow_closed_form(&p, t + h)?;
        let minus = dynamics::flow_closed_form(&p, t - h)?;
        let field = dynamics::hamiltonian_field(&dynamics::flow_closed_form(&p, t)?);
        let dy = (&plus.y - &minus.y) / c(2.0 * h, 0.0);
        let dx = (&plus.x - &minus.x) / c(2.0 * h, 0.0);
        let res = (frob(&(dy - &field.y)) + frob(&(dx - &field.x))) / (1.0 + frob(&field.y) + frob(&field.x));
        worst = worst.max(res);
        // period
        worst = worst.max(relative_distance(&dynamics::flow_closed_form(&p, PI)?, &p));
        // RK4 on a pole-free window
        let traj = dynamics::integrate_riccati(&p, 1.0, 1e-3)?;
        let exact = dynamics::flow_closed_form(&p, 1.0)?;
        worst = worst.max(relative_distance(traj.last().expect("nonempty"), &exact));
        // invariants along the regularized flow
        let v = random::null_twistor_antidiagonal(rng, n);
        let traj = dynamics::integrate_regularized(&v, 10.0, 1e-2)?;
        let scale = 1.0 + traj.invariants[0].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        worst = worst.max(traj.invariant_drift() / scale);
    }
    Ok(worst)
}

fn lie_poisson(n: usize, rng: &mut SeededRng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for r in [Realization::Diagonal, Realization::AntiDiagonal] {
        let form = make_form(n, r)?;
        for _ in 0..SAMPLES {
            let l1 = LinearFunctional::new(sample_algebra_element(rng, &form, 1.0))?;
            let l2 = LinearFunctional::new(sample_algebra_element(rng, &form, 1.0))?;
            let a = sample_algebra_element(rng, &form, 1.0);
            let lhs = momentum::lie_poisson_linear(&l1, &l2, &a)?;
            let rhs = momentum::bracket_of_linear(&l1, &l2)?.eval(&a)?;
            worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
        }
    }
    Ok(worst)
}

/// Always runs at `n = 2`.
fn kepler_n2(_n: usize, rng: &mut SeededRng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let v = random::null_twistor_antidiagonal(rng, 2);
        let (y, x) = regularize::ks_transform_n2(&v, 1e-10)?;
        let p = regularize::ks_section(&v, 1e-10)?;
        let h0 = dynamics::kepler_h0_n2(&y, &x)?;
        let i0 = momentum::i0_tilde(&p);
        worst = worst.max((h0 - i0).abs() / (1.0 + i0.abs()));
        let (m, r) = dynamics::integrals_mr(&p);
        let (pm, pr) = dynamics::mr_vectors_n2(&y, &x).pauli_components();
        let scale = 1.0 + frob(&r);
        worst = worst.max(frob(&(regularize::pauli_compose(&pm) - &m)) / scale);
        worst = worst.max(frob(&(regularize::pauli_compose(&pr) - &r)) / scale);
    }
    Ok(worst)
}

fn integrable_suite(n: usize, rng: &mut SeededRng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    // flow of an integrable perturbation keeps the torus momenta
    let params = crate::config::PerturbedParams::default_for(n);
    let spec = PerturbedSpec::from_exprs(n, &params.h0, &params.g0, ExponentVector::new(params.k, params.l)?)?;
    let chart = ActionAngleChart::identity(n)?;
    let v = random_twistor(rng, n, Realization::Diagonal);
    let traj = integrable::integrate_perturbed(&spec, &chart, &v, 2.0, 1e-2)?;
    let first = &traj.invariants[0];
    for row in &traj.invariants {
        for r in 2..first.len() {
            worst = worst.max((row[r] - first[r]).abs() / (1.0 + first[r].abs()));
        }
    }
    // quadrature against RK4 of the reduced system
    let chart = ActionAngleChart::from_rows(&[&[1.0, 0.0], &[1.0, 1.0]])?;
    let spec = PerturbedSpec::from_exprs(
        1,
        "a1 + a2 + 0.3*a1*a2",
        "0.2",
        ExponentVector::new(vec![1], vec![-1])?,
    )?;
    let (i1, psi1, cc) = (1.0, 0.7, [0.0]);
    let sol = integrable::quadrature_solve(&spec, &chart, i1, psi1, &cc, 3.0, 4)?;
    let traj = integrable::integrate_reduced(&spec, &chart, i1, psi1, &cc, 3.0, 1e-3)?;
    for (t, i) in sol.times.iter().zip(&sol.i1) {
        let k = (t / 1e-3).round() as usize;
        worst = worst.max((traj.states[k][0] - i).abs());
    }
    Ok(worst)
}
