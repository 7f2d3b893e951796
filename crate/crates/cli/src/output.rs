//! CSV and JSON-lines writers. Numbers use the shortest decimal form that
//! round-trips.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use mhd1d_core::functionals::REPORT_COLUMNS;
use mhd1d_core::solver::{StepReport, TruncationWarning};
use mhd1d_core::{Grid, State};

use crate::harness::{HarnessSummary, SeriesRow, CHECK_NAMES};

pub const SNAPSHOT_COLUMNS: [&str; 9] = ["t", "x", "v", "u", "w1", "w2", "b1", "b2", "theta"];

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn series_header() -> Vec<&'static str> {
    let mut cols: Vec<&str> = REPORT_COLUMNS.to_vec();
    cols.push("entropy_budget");
    cols.push("reconstruct_error");
    cols.extend(CHECK_NAMES);
    cols
}

pub fn write_series(path: &Path, rows: &[SeriesRow]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", series_header().join(","))?;
    for row in rows {
        let mut fields: Vec<String> = row.report.values().iter().map(|&x| num(x)).collect();
        fields.push(num(row.entropy_budget));
        fields.push(if row.reconstruct_error.is_nan() {
            String::new()
        } else {
            num(row.reconstruct_error)
        });
        fields.extend(row.verdicts.all().iter().map(|v| v.as_str().to_string()));
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()
}

/// One row per cell and record; node fields are averaged to the cell
/// centre.
pub fn write_snapshots(path: &Path, grid: &Grid, records: &[State]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", SNAPSHOT_COLUMNS.join(","))?;
    let mid = |f: &[f64], i: usize| 0.5 * (f[i] + f[i + 1]);
    for s in records {
        for (i, &x) in grid.cell_centers.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                num(s.t),
                num(x),
                num(s.v[i]),
                num(mid(&s.u, i)),
                num(mid(&s.w[0], i)),
                num(mid(&s.w[1], i)),
                num(s.b[0][i]),
                num(s.b[1][i]),
                num(s.theta[i]),
            )?;
        }
    }
    out.flush()
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line<'a> {
    Step(&'a StepReport),
    Warning(&'a TruncationWarning),
    Summary(&'a HarnessSummary),
}

/// Step reports, truncation warnings and the final check summary, one JSON
/// object per line.
pub fn write_reports(
    path: &Path,
    steps: &[StepReport],
    warnings: &[TruncationWarning],
    summary: &HarnessSummary,
) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let mut emit = |line: Line| -> std::io::Result<()> {
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")
    };
    for s in steps {
        emit(Line::Step(s))?;
    }
    for w in warnings {
        emit(Line::Warning(w))?;
    }
    emit(Line::Summary(summary))?;
    out.flush()
}
