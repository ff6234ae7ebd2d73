//! Trajectory scenarios.
//!
//! - `riccati`: the closed-form regularized Kepler flow on `H(n) x H(n)`
//!   sampled on a uniform grid, from a seeded `(Y, X)` with `|Y| = 1/2`.
//! - `kepler3d`: `n = 2` in KS coordinates, integrated with RK4 as a twistor
//!   rotation in fictitious time `s` and mapped back, with physical time
//!   `t = int |x| ds`.
//! - `perturbed`: RK4 of an integrable perturbation on twistor space.

use std::f64::consts::PI;

use twistor_kepler::dynamics::{self, riccati_invariants};
use twistor_kepler::integrable::{self, ActionAngleChart, ExponentVector, PerturbedSpec};
use twistor_kepler::matrix::{CMatrix, CVector};
use twistor_kepler::momentum::{self, CotangentHn};
use twistor_kepler::random::{self, seeded};
use twistor_kepler::regularize::{self, PauliVector};
use twistor_kepler::twistor_core::{Realization, TwistorVector};

use crate::config::{Kepler3dParams, PerturbedParams, RunConfig, Scenario};
use crate::output::{hermitian_columns, matrix_columns, vector_columns, Table};
use crate::CliError;

/// Nullness and spinor tolerance for mapping sampled twistors back to KS
/// coordinates; loose enough to pass close to collisions.
const MAP_TOL: f64 = 1e-12;

pub fn run(cfg: &RunConfig) -> Result<Table, CliError> {
    let scenario = cfg
        .scenario
        .ok_or_else(|| CliError::Usage("simulate needs --scenario".into()))?;
    match scenario {
        Scenario::Riccati => riccati(cfg),
        Scenario::Kepler3d => kepler3d(cfg),
        Scenario::Perturbed => perturbed(cfg),
    }
}

fn push_matrix(row: &mut Vec<f64>, m: &CMatrix) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            row.push(m[(i, j)].re);
            row.push(m[(i, j)].im);
        }
    }
}

fn push_vector(row: &mut Vec<f64>, v: &CVector) {
    for z in v.iter() {
        row.push(z.re);
        row.push(z.im);
    }
}

/// `N + 1` equally spaced times from `0` to `t_end` with spacing close to `dt`.
fn grid(t_end: f64, dt: f64) -> Vec<f64> {
    let steps = ((t_end / dt).round() as usize).max(1);
    (0..=steps).map(|i| t_end * i as f64 / steps as f64).collect()
}

fn riccati(cfg: &RunConfig) -> Result<Table, CliError> {
    let n = cfg.n;
    let t_end = cfg.t_end.unwrap_or(PI);
    let dt = cfg.dt.unwrap_or(PI / 256.0);
    let mut rng = seeded(cfg.seed);
    let p0 = CotangentHn::new(random::hermitian_with_norm(&mut rng, n, 0.5), random::hermitian(&mut rng, n))
        .map_err(CliError::numerical)?;

    let mut columns = vec!["s".to_string()];
    columns.extend(matrix_columns("Y", n));
    columns.extend(matrix_columns("X", n));
    columns.push("Itilde0".into());
    columns.extend(hermitian_columns("M", n));
    columns.extend(hermitian_columns("R", n));
    let mut table = Table::new(columns);
    for t in grid(t_end, dt) {
        let p = if t == 0.0 {
            p0.clone()
        } else {
            dynamics::flow_closed_form(&p0, t).map_err(CliError::numerical)?
        };
        let mut row = vec![t];
        push_matrix(&mut row, &p.y);
        push_matrix(&mut row, &p.x);
        row.extend(riccati_invariants(&p));
        table.push(row);
    }
    Ok(table)
}

/// Null twistor with KS coordinates `(y, x)`: `zeta zeta^+ = (|x| + x . sigma)/2`
/// and `upsilon = (y . sigma) zeta`.
pub fn twistor_from_ks(y: &[f64; 3], x: &[f64; 3]) -> Result<TwistorVector, CliError> {
    let r = regularize::norm3(x);
    if !(r > 0.0) {
        return Err(CliError::Usage("kepler3d x0 must be nonzero".into()));
    }
    let xm = regularize::pauli_compose(&PauliVector {
        scalar: 0.5 * r,
        vec: x.map(|v| 0.5 * v),
    });
    let ym = regularize::pauli_compose(&PauliVector { scalar: 0.0, vec: *y });
    let zeta = regularize::rank_one_factor(&xm, regularize::RANK_TOL).map_err(CliError::numerical)?;
    TwistorVector::new(Realization::AntiDiagonal, &ym * &zeta, zeta).map_err(CliError::numerical)
}

fn kepler3d(cfg: &RunConfig) -> Result<Table, CliError> {
    if cfg.n != 2 {
        return Err(CliError::Usage(format!("kepler3d requires n = 2, got n = {}", cfg.n)));
    }
    let t_end = cfg.t_end.unwrap_or(PI);
    let dt = cfg.dt.unwrap_or(1e-3);
    let v0 = match &cfg.kepler3d {
        Some(Kepler3dParams { y0, x0 }) => twistor_from_ks(y0, x0)?,
        None => random::null_twistor_antidiagonal(&mut seeded(cfg.seed), 2),
    };
    let traj = dynamics::integrate_rk4(dynamics::twistor_field, v0, t_end, dt, |_| Vec::new())
        .map_err(CliError::numerical)?;

    let mut ks = Vec::with_capacity(traj.len());
    for v in &traj.states {
        let (y, x) = regularize::ks_transform_n2(v, MAP_TOL).map_err(CliError::numerical)?;
        let p = regularize::ks_section(v, MAP_TOL).map_err(CliError::numerical)?;
        ks.push((y, x, momentum::i0_tilde(&p)));
    }
    let x_norm: Vec<f64> = ks.iter().map(|(_, x, _)| regularize::norm3(x)).collect();
    let t_phys = dynamics::fictitious_to_physical(&traj.times, &x_norm).map_err(CliError::numerical)?;

    let names = [
        "s", "t_physical", "y1", "y2", "y3", "x1", "x2", "x3", "Itilde0", "M1", "M2", "M3", "R0", "R1", "R2", "R3",
    ];
    let mut table = Table::new(names.iter().map(|s| s.to_string()).collect());
    for (i, (y, x, h)) in ks.iter().enumerate() {
        let mr = dynamics::mr_vectors_n2(y, x);
        let mut row = vec![traj.times[i], t_phys[i]];
        row.extend_from_slice(y);
        row.extend_from_slice(x);
        row.push(*h);
        row.extend_from_slice(&mr.m);
        row.push(mr.r0);
        row.extend_from_slice(&mr.r);
        table.push(row);
    }
    Ok(table)
}

/// Spec, chart and a seeded initial twistor for `perturbed`.
pub fn perturbed_setup(cfg: &RunConfig) -> Result<(PerturbedSpec, ActionAngleChart, TwistorVector), CliError> {
    let n = cfg.n;
    let params = cfg.perturbed.clone().unwrap_or_else(|| PerturbedParams::default_for(n));
    let exps = ExponentVector::new(params.k.clone(), params.l.clone()).map_err(CliError::usage)?;
    let spec = PerturbedSpec::from_exprs(n, &params.h0, &params.g0, exps).map_err(CliError::usage)?;
    let chart = match &params.chart {
        Some(rows) => {
            let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
            ActionAngleChart::from_rows(&refs).map_err(CliError::usage)?
        }
        None => ActionAngleChart::identity(n).map_err(CliError::usage)?,
    };
    if chart.n() != n {
        return Err(CliError::Usage(format!("chart has size {}, expected {}", 2 * chart.n(), 2 * n)));
    }
    let mut rng = seeded(cfg.seed);
    let v = TwistorVector::new(
        Realization::Diagonal,
        random::complex_vector(&mut rng, n),
        random::complex_vector(&mut rng, n),
    )
    .map_err(CliError::numerical)?;
    Ok((spec, chart, v))
}

fn perturbed(cfg: &RunConfig) -> Result<Table, CliError> {
    let n = cfg.n;
    let (spec, chart, v0) = perturbed_setup(cfg)?;
    let rows = integrable::check_integrability(&chart, &spec.exponents).map_err(CliError::usage)?;
    if rows.iter().any(|ok| !ok) {
        eprintln!("warning: chart rows {rows:?} do not all satisfy the integrability condition");
    }
    let traj = integrable::integrate_perturbed(&spec, &chart, &v0, cfg.t_end.unwrap_or(10.0), cfg.dt.unwrap_or(1e-2))
        .map_err(CliError::numerical)?;

    let mut columns = vec!["t".to_string()];
    columns.extend(vector_columns("eta", n));
    columns.extend(vector_columns("xi", n));
    columns.push("H".into());
    columns.extend((1..=2 * n).map(|r| format!("I{r}")));
    let mut table = Table::new(columns);
    for ((t, v), log) in traj.times.iter().zip(&traj.states).zip(&traj.invariants) {
        let mut row = vec![*t];
        push_vector(&mut row, &v.upper);
        push_vector(&mut row, &v.lower);
        row.extend_from_slice(log);
        table.push(row);
    }
    Ok(table)
}
