//! Executes a resolved [`RunConfig`] and writes its artifacts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rcd_core::cases::{vortex_errors, Case};
use rcd_core::solver::{Clock, RunSummary};
use rcd_core::{CellField, Solver, SolverConfig};

use crate::config::{ModeLabel, RunConfig};
use crate::output::{
    write_field_file, write_residuals, write_table, write_timing, write_to, TableRow, TimingReport,
};
use crate::CliError;

/// Seconds since construction, from the monotonic clock.
#[derive(Debug, Clone, Copy)]
pub struct WallClock(Instant);

impl WallClock {
    pub fn new() -> Self {
        Self(Instant::now())
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn now(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Result of one solver run.
#[derive(Debug, Clone)]
pub struct CaseRun {
    pub field: CellField,
    pub summary: RunSummary,
}

/// Sets up `case` on an `nx` x `ny` grid and integrates it to `config.t_end`.
///
/// `observer` sees every accepted step; its cost is not timed.
pub fn run_case(
    case: Case,
    nx: usize,
    ny: usize,
    config: SolverConfig,
    mut observer: impl FnMut(&rcd_core::solver::ResidualSample, &CellField),
) -> Result<CaseRun, CliError> {
    let setup = case.setup(nx, ny, &config.gas)?;
    let mut field = setup.field;
    let mut solver = Solver::new(setup.grid, setup.boundary, config)?;
    let summary = solver.advance(&mut field, &WallClock::new(), |s, f| observer(s, f))?;
    Ok(CaseRun { field, summary })
}

/// Paths written by [`run`].
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub dumps: Vec<PathBuf>,
    pub residuals: Vec<PathBuf>,
    pub timings: Vec<PathBuf>,
    pub table: Option<PathBuf>,
}

fn single(config: &RunConfig, nx: usize, ny: usize, out: &Path, artifacts: &mut Artifacts) -> Result<CaseRun, CliError> {
    let case = config.case.name();
    let mode = ModeLabel(config.solver.mode).to_string();
    let stem = format!("{case}_{mode}_{nx}x{ny}");
    let gas = config.solver.gas;

    let mut dump_error = None;
    let mut dumps = Vec::new();
    if config.dump_every.is_some() {
        let setup = config.case.setup(nx, ny, &gas)?;
        let path = out.join(format!("{stem}_step000000.dat"));
        write_field_file(&path, &setup.field, case, &mode, 0.0, &gas)?;
        dumps.push(path);
    }
    let every = config.dump_every;
    let run = run_case(config.case, nx, ny, config.solver, |s, f| {
        if dump_error.is_some() {
            return;
        }
        if let Some(k) = every {
            if s.step % k == 0 {
                let path = out.join(format!("{stem}_step{:06}.dat", s.step));
                match write_field_file(&path, f, case, &mode, s.time, &gas) {
                    Ok(()) => dumps.push(path),
                    Err(e) => dump_error = Some(e),
                }
            }
        }
    })?;
    if let Some(e) = dump_error {
        return Err(e);
    }

    let path = out.join(format!("{stem}.dat"));
    write_field_file(&path, &run.field, case, &mode, run.summary.final_time, &gas)?;
    dumps.push(path);
    artifacts.dumps.extend(dumps);

    let path = out.join(format!("{stem}_residuals.csv"));
    write_to(&path, |f| write_residuals(f, &run.summary.history))?;
    artifacts.residuals.push(path);

    let report = TimingReport {
        case: case.to_string(),
        mode,
        cells: nx * ny,
        steps: run.summary.steps,
        cpu_seconds: run.summary.wall_seconds,
    };
    let path = out.join(format!("{stem}_timing.json"));
    write_to(&path, |f| write_timing(f, &report))?;
    artifacts.timings.push(path);
    Ok(run)
}

/// Runs the configuration, writing every artifact under `config.out`.
pub fn run(config: &RunConfig) -> Result<Artifacts, CliError> {
    let out = config.out.as_path();
    std::fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let mut artifacts = Artifacts::default();
    match &config.grid_seq {
        None => {
            single(config, config.nx, config.ny, out, &mut artifacts)?;
        }
        Some(seq) => {
            let mut rows = Vec::with_capacity(seq.len());
            for &n in seq {
                let run = single(config, n, n, out, &mut artifacts)?;
                let e = vortex_errors(&run.field, run.summary.final_time, &config.solver.gas);
                rows.push(TableRow {
                    n,
                    l1: e.l1,
                    linf: e.linf,
                    cpu_seconds: run.summary.wall_seconds,
                });
            }
            let mode = ModeLabel(config.solver.mode);
            let path = out.join(format!("{}_{mode}_convergence.csv", config.case.name()));
            write_to(&path, |f| write_table(f, &rows))?;
            artifacts.table = Some(path);
        }
    }
    Ok(artifacts)
}
