//! CSV emission and re-validation.
//!
//! Every writer has a matching reader, and the commands re-parse what
//! they emit: a file that does not round-trip or fails its sanity
//! checks (finite states, monotone partial sums, consistent norms) is
//! reported as an error instead of being left on disk silently wrong.

use std::path::Path;

use anyhow::{bail, Context, Result};

use netsched_core::scheduler::{Mode, Schedule, ScheduleParameters};
use netsched_core::sim::Trajectory;

/// Writes a schedule as `t,block_index,plants` where `plants` holds the
/// comma-separated ids of the block granted access at `t`.
pub fn write_schedule(path: &Path, schedule: &Schedule, params: &ScheduleParameters) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(["t", "block_index", "plants"])?;
    for (t, &j) in schedule.seq.iter().enumerate() {
        let ids: Vec<String> = params.partition().blocks()[j - 1]
            .iter()
            .map(|i| i.to_string())
            .collect();
        w.write_record([t.to_string(), j.to_string(), ids.join(",")])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a schedule CSV back: `(block, plants)` per step, validating
/// the time column counts 0..T contiguously.
pub fn read_schedule(path: &Path) -> Result<Vec<(usize, Vec<usize>)>> {
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut out = Vec::new();
    for (row, record) in r.records().enumerate() {
        let record = record?;
        if record.len() != 3 {
            bail!("schedule row {row}: expected 3 fields, got {}", record.len());
        }
        let t: usize = record[0].parse().context("schedule: bad t")?;
        if t != row {
            bail!("schedule row {row}: non-contiguous time {t}");
        }
        let block: usize = record[1].parse().context("schedule: bad block index")?;
        let plants: Vec<usize> = record[2]
            .split(',')
            .map(|s| s.parse().context("schedule: bad plant id"))
            .collect::<Result<_>>()?;
        out.push((block, plants));
    }
    Ok(out)
}

fn mode_str(mode: Mode) -> &'static str {
    match mode {
        Mode::Stable => "stable",
        Mode::Unstable => "unstable",
    }
}

/// Writes one plant's trajectory as
/// `t,plant,mode,norm_sq,x_1,…,x_d` (the final state has no mode; its
/// mode field is empty).
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let d = traj.states[0].len();
    let mut header = vec!["t".to_string(), "plant".into(), "mode".into(), "norm_sq".into()];
    header.extend((1..=d).map(|i| format!("x_{i}")));
    w.write_record(&header)?;
    for (t, x) in traj.states.iter().enumerate() {
        let mode = traj
            .modes
            .get(t)
            .map(|&m| mode_str(m).to_string())
            .unwrap_or_default();
        let mut record = vec![
            t.to_string(),
            traj.plant.to_string(),
            mode,
            format!("{:?}", x.norm_squared()),
        ];
        record.extend(x.iter().map(|v| format!("{v:?}")));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trajectory CSV back and sanity-checks it: finite states and
/// the norm column consistent with the state columns.
pub fn read_trajectory(path: &Path) -> Result<Vec<(usize, f64, Vec<f64>)>> {
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut out = Vec::new();
    for (row, record) in r.records().enumerate() {
        let record = record?;
        let t: usize = record[0].parse().context("trajectory: bad t")?;
        if t != row {
            bail!("trajectory row {row}: non-contiguous time {t}");
        }
        if !matches!(&record[2], "stable" | "unstable" | "") {
            bail!("trajectory row {row}: bad mode {:?}", &record[2]);
        }
        let norm_sq: f64 = record[3].parse().context("trajectory: bad norm")?;
        let state: Vec<f64> = record
            .iter()
            .skip(4)
            .map(|s| s.parse().context("trajectory: bad state entry"))
            .collect::<Result<_>>()?;
        if !norm_sq.is_finite() || !state.iter().all(|v| v.is_finite()) {
            bail!("trajectory row {row}: non-finite values");
        }
        let check: f64 = state.iter().map(|v| v * v).sum();
        if (check - norm_sq).abs() > 1e-9 * (1.0 + norm_sq) {
            bail!("trajectory row {row}: norm column {norm_sq} does not match state {check}");
        }
        out.push((t, norm_sq, state));
    }
    Ok(out)
}

/// Writes a cumulative cost curve as `t,plant,partial_sum`.
pub fn write_costs(path: &Path, plant: usize, partial_sums: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(["t", "plant", "partial_sum"])?;
    for (t, sum) in partial_sums.iter().enumerate() {
        w.write_record([t.to_string(), plant.to_string(), format!("{sum:?}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a cost CSV back, checking monotonicity of the partial sums.
pub fn read_costs(path: &Path) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut out: Vec<f64> = Vec::new();
    for (row, record) in r.records().enumerate() {
        let record = record?;
        let t: usize = record[0].parse().context("costs: bad t")?;
        if t != row {
            bail!("costs row {row}: non-contiguous time {t}");
        }
        let sum: f64 = record[2].parse().context("costs: bad partial sum")?;
        if !sum.is_finite() {
            bail!("costs row {row}: non-finite partial sum");
        }
        if let Some(&prev) = out.last() {
            if sum < prev {
                bail!("costs row {row}: partial sums not monotone ({prev} then {sum})");
            }
        }
        out.push(sum);
    }
    Ok(out)
}
