//! JSON run configuration: plants, capacity, schedule parameters,
//! solver and simulation options.
//!
//! Matrices are row-major arrays of arrays; probabilities and grid
//! steps are strings of reduced integer ratios ("1/2"), parsed exactly
//! — no floating-point probability ever enters a file.  Serialization
//! echoes full precision (serde_json emits the shortest round-tripping
//! float form), so parse ∘ serialize is the identity on canonical
//! configurations.

use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use netsched_core::certify::StabilityCertificate;
use netsched_core::model::{NcsConfig, PlantModel};
use netsched_core::rational::Prob;
use netsched_core::scheduler::ScheduleParameters;
use netsched_core::search::{Partition, ProbabilityVector};

/// Top-level configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// The plants, in index order.
    pub plants: Vec<PlantEntry>,
    /// Network capacity M.
    pub capacity: usize,
    /// Scheduling parameters (partition + probabilities), if fixed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleEntry>,
    /// Solver options.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverEntry>,
    /// Simulation options.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationEntry>,
    /// Stability certificates to verify, one per plant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificates: Option<Vec<CertificateEntry>>,
    /// Initial states, one per plant in index order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_states: Option<Vec<Vec<f64>>>,
}

/// One plant: system, input, and optional gain matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantEntry {
    pub index: usize,
    /// d×d system matrix, row-major.
    pub a: Vec<Vec<f64>>,
    /// d×m input matrix, row-major.
    pub b: Vec<Vec<f64>>,
    /// m×d state-feedback gain, row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<Vec<f64>>>,
}

/// Fixed scheduling parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    /// Blocks of plant ids.
    pub partition: Vec<Vec<usize>>,
    /// Exact block probabilities, e.g. "1/2".
    pub probabilities: Vec<String>,
    /// Grid step the probabilities live on, e.g. "1/2".
    pub h: String,
}

/// Solver options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverEntry {
    /// Certificate conditioning band κ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Probability grid step for the search, e.g. "1/10".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
}

/// Simulation options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A stability certificate for one plant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateEntry {
    pub plant: usize,
    /// Activation probability, e.g. "1/2".
    pub p: String,
    pub kappa: f64,
    /// d×d symmetric matrices, row-major.
    pub p_s: Vec<Vec<f64>>,
    pub p_u: Vec<Vec<f64>>,
}

/// Parses a strict integer ratio "a/b" (or a bare integer "a").
pub fn parse_rational(s: &str) -> Result<Prob> {
    let s = s.trim();
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let numer: i64 = numer
        .parse()
        .with_context(|| format!("invalid rational {s:?}: bad numerator"))?;
    let denom: i64 = denom
        .parse()
        .with_context(|| format!("invalid rational {s:?}: bad denominator"))?;
    if denom <= 0 {
        bail!("invalid rational {s:?}: denominator must be positive");
    }
    Ok(Prob::new(numer, denom))
}

/// Formats an exact ratio back to its canonical "a/b" string.
pub fn format_rational(p: Prob) -> String {
    format!("{}/{}", p.numer(), p.denom())
}

/// Converts a row-major array of rows into a matrix, validating that
/// the rows are rectangular.
pub fn parse_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        bail!("{what}: matrix must have at least one row");
    }
    let cols = rows[0].len();
    if cols == 0 {
        bail!("{what}: matrix must have at least one column");
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        bail!(
            "{what}: ragged matrix (row of length {} among rows of length {cols})",
            bad.len()
        );
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), cols, &flat))
}

/// Row-major serialization of a matrix.
pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

impl RunConfig {
    /// Parses the plant list alone; works for single-plant fragments
    /// that do not form a servable network.
    pub fn to_plants(&self) -> Result<Vec<PlantModel>> {
        let mut plants = Vec::with_capacity(self.plants.len());
        for entry in &self.plants {
            let what = format!("plant {}", entry.index);
            let a = parse_matrix(&entry.a, &format!("{what} A"))?;
            let b = parse_matrix(&entry.b, &format!("{what} B"))?;
            let k = entry
                .k
                .as_ref()
                .map(|k| parse_matrix(k, &format!("{what} K")))
                .transpose()?;
            plants.push(
                PlantModel::new(entry.index, a, b, k).with_context(|| format!("{what} invalid"))?,
            );
        }
        Ok(plants)
    }

    /// Builds the validated plant configuration.
    pub fn to_ncs(&self) -> Result<NcsConfig> {
        let plants = self.to_plants()?;
        if self.capacity >= plants.len() || self.capacity == 0 {
            bail!("capacity must satisfy 0 < M < N");
        }
        NcsConfig::new(plants, self.capacity).context("invalid plant configuration")
    }

    /// Builds the scheduling parameters, if the file fixes them.
    pub fn to_params(&self) -> Result<Option<ScheduleParameters>> {
        let Some(entry) = &self.schedule else {
            return Ok(None);
        };
        let partition = Partition::new(entry.partition.clone()).context("invalid partition")?;
        let h = parse_rational(&entry.h).context("schedule.h")?;
        let probs: Vec<Prob> = entry
            .probabilities
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<_>>()
            .context("schedule.probabilities")?;
        let probs = ProbabilityVector::new(probs, h).context("invalid probability vector")?;
        Ok(Some(
            ScheduleParameters::new(partition, probs).context("invalid schedule parameters")?,
        ))
    }

    /// Builds the per-plant certificates listed in the file.
    pub fn to_certificates(&self) -> Result<Vec<(usize, StabilityCertificate)>> {
        let Some(entries) = &self.certificates else {
            return Ok(Vec::new());
        };
        let mut out = Vec::with_capacity(entries.len());
        for entry in entries {
            let what = format!("certificate for plant {}", entry.plant);
            let p = parse_rational(&entry.p).with_context(|| format!("{what}: p"))?;
            let p_s = parse_matrix(&entry.p_s, &format!("{what}: P_s"))?;
            let p_u = parse_matrix(&entry.p_u, &format!("{what}: P_u"))?;
            let cert = StabilityCertificate::new(p, p_s, p_u, entry.kappa)
                .with_context(|| format!("{what} invalid"))?;
            out.push((entry.plant, cert));
        }
        Ok(out)
    }

    /// Initial states, one per plant in index order, if the file fixes
    /// them.
    pub fn to_initial_states(&self, config: &NcsConfig) -> Result<Option<Vec<DVector<f64>>>> {
        let Some(states) = &self.initial_states else {
            return Ok(None);
        };
        if states.len() != config.n() {
            bail!(
                "initial_states: {} vectors for {} plants",
                states.len(),
                config.n()
            );
        }
        let mut out = Vec::with_capacity(states.len());
        for (plant, x0) in config.plants.iter().zip(states) {
            if x0.len() != plant.d() {
                bail!(
                    "initial_states: plant {} expects dimension {}, got {}",
                    plant.index,
                    plant.d(),
                    x0.len()
                );
            }
            out.push(DVector::from_row_slice(x0));
        }
        Ok(Some(out))
    }
}

/// Loads and schema-validates a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let config: RunConfig = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse config {}", path.display()))?;
    // Surface structural problems at load time, with field context.
    config.to_ncs()?;
    config.to_params()?;
    config.to_certificates()?;
    Ok(config)
}

/// Serializes a configuration with stable formatting.
pub fn to_json(config: &RunConfig) -> String {
    let mut out = serde_json::to_string_pretty(config).expect("config serializes");
    out.push('\n');
    out
}
