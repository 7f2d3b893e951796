use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use mhd1d_core::functionals::{entropy_roots, measure_bound, reconstruct_profile};
use mhd1d_core::run;
use mhd1d_core::verify::{convergence_order, ConvergenceTable, FIELD_NAMES};

use crate::config::{parse_config, RunConfig};
use crate::harness::{evaluate, HarnessSummary, CHECK_NAMES};
use crate::output::{num, write_reports, write_series, write_snapshots};
use crate::CliError;

/// Spatial order every field must reach on the finest pair of levels.
pub const MMS_ORDER_THRESHOLD: f64 = 1.8;

fn output_dir(cfg: &RunConfig, out: Option<&Path>) -> Result<PathBuf, CliError> {
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output_dir.clone());
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Runs the configured problem and writes `series.csv`, `snapshots.csv` and
/// `reports.jsonl`; fails when a harness check fails.
pub fn cmd_run(config: &Path, out: Option<&Path>, quiet: bool) -> Result<HarnessSummary, CliError> {
    let cfg = parse_config(config)?;
    let initial = cfg.initial_state()?;
    let dir = output_dir(&cfg, out)?;
    log::info!(
        "running {:?} on {} cells to t = {}",
        cfg.problem,
        cfg.grid.n_cells,
        cfg.scheme.t_end
    );
    let traj = run(
        &initial,
        &cfg.grid,
        cfg.problem,
        &cfg.params,
        &cfg.scheme,
        &cfg.probes,
    )?;
    let (rows, summary) = evaluate(&traj, &cfg.grid, cfg.problem, &cfg.params, &cfg.checks)?;
    write_series(&dir.join("series.csv"), &rows)?;
    write_snapshots(&dir.join("snapshots.csv"), &cfg.grid, &traj.records)?;
    write_reports(
        &dir.join("reports.jsonl"),
        &traj.reports,
        &traj.warnings,
        &summary,
    )?;

    if !quiet {
        println!(
            "{} steps to t = {}; e0 = {}",
            traj.reports.len(),
            traj.last().t,
            num(summary.e0)
        );
        for (name, v) in CHECK_NAMES.iter().zip(summary.verdicts.all()) {
            println!("  {name:<12} {v}");
        }
        println!("wrote {}", dir.display());
    }
    if summary.verdicts.any_failed() {
        let failed: Vec<&str> = CHECK_NAMES
            .iter()
            .zip(summary.verdicts.all())
            .filter(|(_, v)| v.failed())
            .map(|(n, _)| *n)
            .collect();
        return Err(CliError::ChecksFailed(failed.join(", ")));
    }
    Ok(summary)
}

fn render_table(table: &ConvergenceTable) -> String {
    let mut s = String::new();
    s.push_str("n_cells,dx,dt,steps");
    for f in FIELD_NAMES {
        s.push_str(&format!(",err_{f}"));
    }
    for f in FIELD_NAMES {
        s.push_str(&format!(",order_{f}"));
    }
    s.push('\n');
    for (k, l) in table.levels.iter().enumerate() {
        s.push_str(&format!("{},{},{},{}", l.n_cells, num(l.dx), num(l.dt), l.steps));
        for e in l.errors {
            s.push_str(&format!(",{}", num(e)));
        }
        // orders compare each level with the coarser one before it
        for f in 0..FIELD_NAMES.len() {
            let o = if k == 0 { None } else { table.orders[k - 1][f] };
            s.push(',');
            if let Some(o) = o {
                s.push_str(&num(o));
            } else if k > 0 {
                s.push_str("exact");
            }
        }
        s.push('\n');
    }
    s
}

/// Runs the configured manufactured case on `levels` nested grids starting
/// at `grid.n_cells`; writes `convergence.csv`.
pub fn cmd_mms(
    config: &Path,
    levels: usize,
    out: Option<&Path>,
    quiet: bool,
) -> Result<ConvergenceTable, CliError> {
    let cfg = parse_config(config)?;
    let setup = cfg
        .mms
        .ok_or_else(|| CliError::Config("mms: section required by the mms command".into()))?;
    if levels < 2 {
        return Err(CliError::Usage(format!("--levels must be at least 2, got {levels}")));
    }
    let grids: Vec<usize> = (0..levels).map(|k| cfg.grid.n_cells << k).collect();
    let table = convergence_order(&grids, &setup)?;
    let dir = output_dir(&cfg, out)?;
    let text = render_table(&table);
    fs::write(dir.join("convergence.csv"), &text)?;

    if !quiet {
        print!("{text}");
    }
    if table.exact() {
        if !quiet {
            println!("exact at all levels");
        }
        return Ok(table);
    }
    if !table.meets(MMS_ORDER_THRESHOLD) {
        return Err(CliError::ChecksFailed(format!(
            "finest-pair order below {MMS_ORDER_THRESHOLD}"
        )));
    }
    Ok(table)
}

/// The line printed by `roots`: both roots to 12 decimals and the measure
/// bound rounded to 12 decimals.
pub fn roots_line(e0: f64) -> Result<String, CliError> {
    if !(e0 >= 0.0 && e0.is_finite()) {
        return Err(CliError::Usage(format!("e0 must be a finite number >= 0, got {e0}")));
    }
    let (a1, a2) = entropy_roots(e0);
    let bound = (measure_bound(e0) * 1e12).round() / 1e12;
    Ok(format!("{a1:.12} {a2:.12} {bound}"))
}

pub fn cmd_roots(e0: f64) -> Result<(), CliError> {
    println!("{}", roots_line(e0)?);
    Ok(())
}

/// Runs to `at` with a probe at `probe` and prints the reconstructed and
/// computed volume on every cell; returns the relative sup error.
pub fn cmd_reconstruct(
    config: &Path,
    probe: f64,
    at: f64,
    quiet: bool,
) -> Result<f64, CliError> {
    let cfg = parse_config(config)?;
    if !(probe >= cfg.grid.x_left() && probe <= cfg.grid.x_right()) {
        return Err(CliError::Usage(format!(
            "--probe {probe} lies outside [{}, {}]",
            cfg.grid.x_left(),
            cfg.grid.x_right()
        )));
    }
    if !(at > 0.0 && at <= cfg.scheme.t_end) {
        return Err(CliError::Usage(format!(
            "--at must lie in (0, {}], got {at}",
            cfg.scheme.t_end
        )));
    }
    let initial = cfg.initial_state()?;
    let scheme = mhd1d_core::SchemeConfig {
        t_end: at,
        ..cfg.scheme
    };
    let traj = run(&initial, &cfg.grid, cfg.problem, &cfg.params, &scheme, &[probe])?;
    let history = &traj.probes[0];
    let rec = reconstruct_profile(history, history.snapshots.len() - 1);
    let v = &traj.last().v;
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let err = rec
        .iter()
        .zip(v)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        / scale;

    if !quiet {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        writeln!(out, "x,v,v_rec")?;
        for (i, &x) in cfg.grid.cell_centers.iter().enumerate() {
            writeln!(out, "{},{},{}", num(x), num(v[i]), num(rec[i]))?;
        }
        writeln!(
            out,
            "# probe node x = {}, t = {}, relative sup error {}",
            num(cfg.grid.node_positions[history.node]),
            num(traj.last().t),
            num(err)
        )?;
    }
    Ok(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_output() {
        assert_eq!(roots_line(0.0).unwrap(), "1.000000000000 1.000000000000 0");
        assert_eq!(
            roots_line(0.5).unwrap(),
            "0.301709562684 2.357676673946 2.588699449562"
        );
        assert!(matches!(roots_line(-1.0), Err(CliError::Usage(_))));
        assert!(roots_line(f64::NAN).is_err());
    }
}
