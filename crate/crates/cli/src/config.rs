//! Run configuration: JSON file values overridden by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Riccati,
    Kepler3d,
    Perturbed,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Riccati => "riccati",
            Scenario::Kepler3d => "kepler3d",
            Scenario::Perturbed => "perturbed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Parameters of the `perturbed` scenario. Expressions use the variables
/// `a1 .. a{2n}`; `chart` lists the rows of `rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbedParams {
    pub h0: String,
    pub g0: String,
    pub k: Vec<i32>,
    pub l: Vec<i32>,
    pub chart: Option<Vec<Vec<f64>>>,
}

impl PerturbedParams {
    /// Kepler part `sum a_j`, coupling `0.1 Re eta_1` and the identity chart,
    /// for which `rho m = e_1` holds.
    pub fn default_for(n: usize) -> Self {
        let h0 = (1..=2 * n).map(|j| format!("a{j}")).collect::<Vec<_>>().join(" + ");
        let mut k = vec![0; n];
        k[0] = 1;
        PerturbedParams {
            h0,
            g0: "0.1".into(),
            k,
            l: vec![0; n],
            chart: None,
        }
    }
}

/// Initial KS coordinates for `kepler3d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Kepler3dParams {
    pub y0: [f64; 3],
    pub x0: [f64; 3],
}

/// Configuration file schema. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
    pub scenario: Option<Scenario>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub perturbed: Option<PerturbedParams>,
    pub kepler3d: Option<Kepler3dParams>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("malformed config {}: {e}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub tol: BTreeMap<String, f64>,
    pub scenario: Option<Scenario>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub perturbed: Option<PerturbedParams>,
    pub kepler3d: Option<Kepler3dParams>,
}

/// Values given on the command line; `None` defers to the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Vec<(String, f64)>,
    pub scenario: Option<Scenario>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
}

impl RunConfig {
    pub fn resolve(file: FileConfig, flags: Overrides) -> Result<Self, String> {
        let mut tol = file.tol;
        for (k, v) in flags.tol {
            tol.insert(k, v);
        }
        let cfg = RunConfig {
            n: flags.n.or(file.n).unwrap_or(2),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            tol,
            scenario: flags.scenario.or(file.scenario),
            out: flags.out.or(file.out),
            format: flags.format.or(file.format).unwrap_or(Format::Csv),
            t_end: flags.t_end.or(file.t_end),
            dt: flags.dt.or(file.dt),
            perturbed: file.perturbed,
            kepler3d: file.kepler3d,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if self.n == 0 {
            return Err("n must be at least 1".into());
        }
        if let Some((k, v)) = self.tol.iter().find(|(_, v)| !(**v >= 0.0)) {
            return Err(format!("tolerance {k} must be nonnegative, got {v}"));
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("t_end must be positive, got {t}"));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(format!("dt must be positive, got {dt}"));
            }
        }
        Ok(())
    }

    /// Tolerance for `key`: an explicit entry, then `all`, then `default`.
    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tol
            .get(key)
            .or_else(|| self.tol.get("all"))
            .copied()
            .unwrap_or(default)
    }
}

/// Parses `KEY=VAL` for `--tol`.
pub fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VAL, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad tolerance value {v:?}: {e}"))?;
    if k.trim().is_empty() {
        return Err("empty tolerance key".into());
    }
    Ok((k.trim().to_string(), v))
}
