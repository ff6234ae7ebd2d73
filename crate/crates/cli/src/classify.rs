//! Orbit classification of `j0(E, rho)` from a matrix file.
//!
//! The file holds one matrix row per line with whitespace-separated complex
//! entries such as `0`, `1.5`, `2i`, `-0.5+1e-3i`. Lines that are empty or
//! start with `#` are skipped.

use twistor_kepler::matrix::{self, CMatrix, C64};
use twistor_kepler::momentum::{self, CotangentUn};
use twistor_kepler::twistor_core::{self, OrbitLabel, SYMMETRY_TOL};

use crate::CliError;

/// Relative tolerance for the rank and square-zero tests.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub label: OrbitLabel,
    pub rank: usize,
    pub square_zero: bool,
    pub square_residual: f64,
}

impl Report {
    pub fn consistent(&self) -> bool {
        self.square_zero && self.rank == self.label.k + self.label.l
    }
}

pub fn parse_matrix(text: &str) -> Result<CMatrix, CliError> {
    let rows: Vec<Vec<C64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            line.split_whitespace()
                .map(|tok| tok.parse::<C64>().map_err(|e| CliError::Usage(format!("bad entry {tok:?}: {e}"))))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let n = rows.len();
    if n == 0 {
        return Err(CliError::Usage("empty matrix".into()));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(CliError::Usage(format!("row {} has {} entries, expected {n}", i + 1, r.len())));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Label of `rho`, and rank and square-zero test of `j0(E, rho)`. A
/// non-anti-hermitian `rho` is a usage error.
pub fn classify(rho: &CMatrix) -> Result<Report, CliError> {
    let n = rho.nrows();
    let scale = 1.0 + matrix::frob(rho);
    if matrix::anti_hermitian_residual(rho) > SYMMETRY_TOL * scale {
        return Err(CliError::Usage("input matrix is not anti-hermitian".into()));
    }
    let label = twistor_core::orbit_label_default(rho).map_err(CliError::usage)?;
    let p = CotangentUn::new(matrix::identity(n), rho.clone()).map_err(CliError::usage)?;
    let j = momentum::j0(&p).map_err(CliError::numerical)?;
    let (square_zero, rank) = twistor_core::is_square_zero(&j.matrix, RANK_TOL);
    Ok(Report {
        label,
        rank,
        square_zero,
        square_residual: twistor_core::square_zero_residual(&j.matrix),
    })
}
