use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{CurveRow, ExperimentResult, SummaryStats, TrialRecord};
use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// One JSON object per line, in record order.
pub fn write_trials_jsonl(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SummaryCsvRow {
    n: usize,
    completed: u64,
    failures: u64,
    epsilon: f64,
    hall_rate: f64,
    hall_rate_lower: f64,
    hall_rate_upper: f64,
    mean_hall: f64,
    se_hall: f64,
    feasible: u64,
    dominance_rate: f64,
    dominance_lower: f64,
    dominance_upper: f64,
    relaxed: u64,
}

pub fn write_summary_csv(path: &Path, summary: &SummaryStats) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in &summary.rows {
        w.serialize(SummaryCsvRow {
            n: r.n,
            completed: r.completed,
            failures: r.failures,
            epsilon: summary.epsilon,
            hall_rate: r.hall_rate.estimate,
            hall_rate_lower: r.hall_rate.lower,
            hall_rate_upper: r.hall_rate.upper,
            mean_hall: r.mean_hall,
            se_hall: r.se_hall,
            feasible: r.feasible,
            dominance_rate: r.dominance.estimate,
            dominance_lower: r.dominance.lower,
            dominance_upper: r.dominance.upper,
            relaxed: r.relaxed,
        })
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve(path: &Path, rows: &[CurveRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn write_dat(path: &Path, header: &str, rows: impl IntoIterator<Item = (usize, f64)>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# {header}")?;
    for (x, y) in rows {
        writeln!(w, "{x} {y}")?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `trials.jsonl`, `summary.csv` and the `plot/` data files into `dir`.
pub fn write_outputs(dir: &Path, result: &ExperimentResult) -> Result<()> {
    let plot = dir.join("plot");
    fs::create_dir_all(&plot)?;
    write_trials_jsonl(&dir.join("trials.jsonl"), &result.records)?;
    write_summary_csv(&dir.join("summary.csv"), &result.summary)?;
    let rows = &result.summary.rows;
    write_dat(
        &plot.join("hall_rate.dat"),
        "n Pr[hall >= eps]",
        rows.iter().map(|r| (r.n, r.hall_rate.estimate)),
    )?;
    write_dat(&plot.join("hall_rate_upper.dat"), "n wilson_upper", rows.iter().map(|r| (r.n, r.hall_rate.upper)))?;
    write_dat(&plot.join("mean_hall.dat"), "n mean_hall", rows.iter().map(|r| (r.n, r.mean_hall)))?;
    write_dat(&plot.join("dominance.dat"), "n dominance_rate", rows.iter().map(|r| (r.n, r.dominance.estimate)))?;
    Ok(())
}
