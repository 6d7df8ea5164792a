//! Semi-discrete finite-volume right-hand side with local Lax-Friedrichs
//! face fluxes, three-stage TVD Runge-Kutta stepping, CFL control and
//! residual tracking.

use alloc::vec;
use alloc::vec::Vec;

use crate::gas::{flux_x, flux_y, normal_flux_from, Conserved, Flux, GasModel, Primitive};
use crate::grid::{fill_ghosts, BoundarySpec, CartesianGrid, CellField, GradientScalar};
use crate::weno::{
    limit_positivity, reconstruct_cell, DecompositionMode, FaceTraces, ReconstructionSettings, ReconstructionStats,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    pub t_end: f64,
    pub mode: DecompositionMode,
    pub gas: GasModel,
    pub settings: ReconstructionSettings,
    pub gradient: GradientScalar,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.8,
            t_end: 1.0,
            mode: DecompositionMode::Rcd,
            gas: GasModel::default(),
            settings: ReconstructionSettings::default(),
            gradient: GradientScalar::Density,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidParameter("cfl must lie in (0, 1]"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter("t_end must be finite and non-negative"));
        }
        self.settings.validate()
    }
}

/// Two-point Gauss-Legendre rule on a face, in local offsets along the face.
pub struct FaceQuadrature;

impl FaceQuadrature {
    pub const POINTS: [f64; 2] = [-crate::weno::GAUSS_OFFSET, crate::weno::GAUSS_OFFSET];
    pub const WEIGHTS: [f64; 2] = [0.5, 0.5];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSample {
    pub step: usize,
    pub time: f64,
    /// Max over cells and components of `|U^n - U^{n-1}|`.
    pub rmax: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResidualHistory {
    pub samples: Vec<ResidualSample>,
}

impl ResidualHistory {
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }
}

/// Monotonic time source, in seconds.
pub trait Clock {
    fn now(&self) -> f64;
}

/// A clock that never advances.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub final_time: f64,
    pub history: ResidualHistory,
    /// Time spent inside the integration loop, observer callbacks excluded.
    pub wall_seconds: f64,
    pub stats: ReconstructionStats,
}

/// Local Lax-Friedrichs flux through a face with unit normal `(nx, ny)`.
pub fn llf_flux(ul: &Conserved, ur: &Conserved, nx: f64, ny: f64, gas: &GasModel) -> Result<Flux> {
    let wl = gas.primitive_from_conserved(ul)?;
    let wr = gas.primitive_from_conserved(ur)?;
    let fl = normal_flux_from(ul, &wl, nx, ny);
    let fr = normal_flux_from(ur, &wr, nx, ny);
    let sl = libm::fabs(wl.u * nx + wl.v * ny) + gas.sound_speed(&wl);
    let sr = libm::fabs(wr.u * nx + wr.v * ny) + gas.sound_speed(&wr);
    Ok(combine(&fl, &fr, ul, ur, sl.max(sr)))
}

/// [`llf_flux`] with the normal given by its angle.
pub fn llf_flux_angle(ul: &Conserved, ur: &Conserved, theta: f64, gas: &GasModel) -> Result<Flux> {
    let (s, c) = libm::sincos(theta);
    llf_flux(ul, ur, c, s, gas)
}

#[inline]
fn combine(fl: &Flux, fr: &Flux, ul: &Conserved, ur: &Conserved, s: f64) -> Flux {
    let mut f = [0.0; 4];
    for k in 0..4 {
        f[k] = 0.5 * (fl[k] + fr[k] - s * (ur[k] - ul[k]));
    }
    Flux(f)
}

/// A non-physical face trace: which side (`true` = right/upper) and its state.
struct BadTrace {
    right: bool,
    error: Error,
}

/// Axis-aligned LLF flux.
#[inline]
fn llf_axis(ul: &[f64; 4], ur: &[f64; 4], x_axis: bool, gas: &GasModel) -> core::result::Result<Flux, BadTrace> {
    let (ul, ur) = (Conserved(*ul), Conserved(*ur));
    let wl = gas
        .primitive_from_conserved(&ul)
        .map_err(|error| BadTrace { right: false, error })?;
    let wr = gas
        .primitive_from_conserved(&ur)
        .map_err(|error| BadTrace { right: true, error })?;
    let (fl, fr, ql, qr) = if x_axis {
        (flux_x(&ul, &wl), flux_x(&ur, &wr), wl.u, wr.u)
    } else {
        (flux_y(&ul, &wl), flux_y(&ur, &wr), wl.v, wr.v)
    };
    let s = (libm::fabs(ql) + gas.sound_speed(&wl)).max(libm::fabs(qr) + gas.sound_speed(&wr));
    Ok(combine(&fl, &fr, &ul, &ur, s))
}

/// `cfl / max[(|u| + a)/dx + (|v| + a)/dy]` over interior cells.
pub fn compute_dt(field: &CellField, cfl: f64, gas: &GasModel) -> Result<f64> {
    let grid = field.grid();
    let mut rate: f64 = 0.0;
    for (i, j, q) in field.interior() {
        let w = primitive_at(gas, &q, i as isize, j as isize, 0.0)?;
        let a = gas.sound_speed(&w);
        rate = rate.max((libm::fabs(w.u) + a) / grid.dx + (libm::fabs(w.v) + a) / grid.dy);
    }
    Ok(cfl / rate)
}

/// Shortens `dt` so the step lands exactly on `t_end`.
pub fn clip_dt(t: f64, dt: f64, t_end: f64) -> f64 {
    if t + dt >= t_end {
        t_end - t
    } else {
        dt
    }
}

fn primitive_at(gas: &GasModel, q: &Conserved, i: isize, j: isize, time: f64) -> Result<Primitive> {
    gas.primitive_from_conserved(q).map_err(|e| blow_up(e, i, j, time))
}

fn blow_up(e: Error, i: isize, j: isize, time: f64) -> Error {
    match e {
        Error::NonPhysicalState { rho, p } => Error::SolverBlowUp { i, j, step: 0, time, rho, p },
        other => other,
    }
}

/// Shu-Osher stages `(a, b, c)`: `U <- a U^n + b (U + dt L(U, t + c dt))`.
pub const RK3_STAGES: [(f64, f64, f64); 3] = [(0.0, 1.0, 0.0), (0.75, 0.25, 1.0), (1.0 / 3.0, 2.0 / 3.0, 0.5)];

/// One TVD-RK3 step of `u' = l(u, t)` for a small fixed-size system.
pub fn tvd_rk3<const N: usize>(u: [f64; N], t: f64, dt: f64, mut l: impl FnMut(&[f64; N], f64) -> [f64; N]) -> [f64; N] {
    let mut w = u;
    for (a, b, c) in RK3_STAGES {
        let d = l(&w, t + c * dt);
        for k in 0..N {
            w[k] = a * u[k] + b * (w[k] + dt * d[k]);
        }
    }
    w
}

/// Owns the grid, boundary conditions, configuration and scratch storage.
#[derive(Debug, Clone)]
pub struct Solver {
    grid: CartesianGrid,
    bc: BoundarySpec,
    config: SolverConfig,
    traces: Vec<FaceTraces>,
    rhs: Vec<[f64; 4]>,
    start: Vec<Conserved>,
    stats: ReconstructionStats,
}

impl Solver {
    pub fn new(grid: CartesianGrid, bc: BoundarySpec, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        bc.validate()?;
        Ok(Self {
            grid,
            bc,
            config,
            traces: vec![FaceTraces::default(); grid.padded_len()],
            rhs: vec![[0.0; 4]; grid.cell_count()],
            start: Vec::new(),
            stats: ReconstructionStats::default(),
        })
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn boundary(&self) -> &BoundarySpec {
        &self.bc
    }

    /// Decomposition work accumulated since construction or the last reset.
    pub fn stats(&self) -> ReconstructionStats {
        self.stats
    }

    pub fn reset_stats(&mut self) {
        self.stats = ReconstructionStats::default();
    }

    fn reconstruct_into(&mut self, field: &CellField, i: isize, j: isize, t: f64) -> Result<()> {
        let c = &self.config;
        let r = reconstruct_cell(
            field,
            i,
            j,
            c.mode,
            None,
            c.gradient,
            &c.gas,
            &c.settings,
            &mut self.stats,
        )
        .map_err(|e| blow_up(e, i, j, t))?;
        let mut traces = r.traces();
        if c.settings.positivity {
            let mean = field.get(i, j);
            primitive_at(&c.gas, &mean, i, j, t)?;
            if limit_positivity(&mut traces, &mean, &c.gas) {
                self.stats.limited += 1;
            }
        }
        self.traces[self.grid.index(i, j)] = traces;
        Ok(())
    }

    /// Time derivative of the interior cell averages at time `t`, row-major
    /// with x fastest. Fills the ghost cells of `field` first.
    pub fn compute_rhs(&mut self, field: &mut CellField, t: f64) -> Result<&[[f64; 4]]> {
        debug_assert_eq!(field.grid(), &self.grid);
        fill_ghosts(field, &self.bc, t)?;
        let (nx, ny) = (self.grid.nx as isize, self.grid.ny as isize);

        // Interior cells plus the first ghost ring (corners excluded), which
        // supplies the outer traces of boundary faces.
        for j in 0..ny {
            self.reconstruct_into(field, -1, j, t)?;
            for i in 0..nx {
                self.reconstruct_into(field, i, j, t)?;
            }
            self.reconstruct_into(field, nx, j, t)?;
        }
        for i in 0..nx {
            self.reconstruct_into(field, i, -1, t)?;
            self.reconstruct_into(field, i, ny, t)?;
        }

        let gas = self.config.gas;
        let (inv_dx, inv_dy) = (1.0 / self.grid.dx, 1.0 / self.grid.dy);
        let w = FaceQuadrature::WEIGHTS;
        for r in &mut self.rhs {
            *r = [0.0; 4];
        }
        let nxu = self.grid.nx;

        for j in 0..ny {
            for i in 0..=nx {
                let left = &self.traces[self.grid.index(i - 1, j)];
                let right = &self.traces[self.grid.index(i, j)];
                let mut f = [0.0; 4];
                for g in 0..2 {
                    let fg = llf_axis(&left.east[g], &right.west[g], true, &gas).map_err(|b| {
                        let (ci, cj) = if b.right { (i, j) } else { (i - 1, j) };
                        blow_up(b.error, ci, cj, t)
                    })?;
                    for k in 0..4 {
                        f[k] += w[g] * fg[k];
                    }
                }
                if i > 0 {
                    let r = &mut self.rhs[j as usize * nxu + (i - 1) as usize];
                    for k in 0..4 {
                        r[k] -= f[k] * inv_dx;
                    }
                }
                if i < nx {
                    let r = &mut self.rhs[j as usize * nxu + i as usize];
                    for k in 0..4 {
                        r[k] += f[k] * inv_dx;
                    }
                }
            }
        }
        for j in 0..=ny {
            for i in 0..nx {
                let below = &self.traces[self.grid.index(i, j - 1)];
                let above = &self.traces[self.grid.index(i, j)];
                let mut f = [0.0; 4];
                for g in 0..2 {
                    let fg = llf_axis(&below.north[g], &above.south[g], false, &gas).map_err(|b| {
                        let (ci, cj) = if b.right { (i, j) } else { (i, j - 1) };
                        blow_up(b.error, ci, cj, t)
                    })?;
                    for k in 0..4 {
                        f[k] += w[g] * fg[k];
                    }
                }
                if j > 0 {
                    let r = &mut self.rhs[(j - 1) as usize * nxu + i as usize];
                    for k in 0..4 {
                        r[k] -= f[k] * inv_dy;
                    }
                }
                if j < ny {
                    let r = &mut self.rhs[j as usize * nxu + i as usize];
                    for k in 0..4 {
                        r[k] += f[k] * inv_dy;
                    }
                }
            }
        }
        Ok(&self.rhs)
    }

    pub fn compute_dt(&self, field: &CellField) -> Result<f64> {
        compute_dt(field, self.config.cfl, &self.config.gas)
    }

    /// `field <- a * start + b * (field + dt * rhs)` over the interior.
    fn stage_update(&self, field: &mut CellField, a: f64, b: f64, dt: f64) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        for j in 0..ny {
            for i in 0..nx {
                let idx = self.grid.index(i as isize, j as isize);
                let l = &self.rhs[j * nx + i];
                let u0 = self.start[idx];
                let u = &mut field.as_mut_slice()[idx];
                for k in 0..4 {
                    let stage = u[k] + dt * l[k];
                    u[k] = if a == 0.0 { stage } else { a * u0[k] + b * stage };
                }
            }
        }
    }

    /// One Shu-Osher TVD-RK3 step from `t` to `t + dt`.
    pub fn rk3_step(&mut self, field: &mut CellField, t: f64, dt: f64) -> Result<()> {
        self.start.clear();
        self.start.extend_from_slice(field.as_slice());

        for (a, b, c) in RK3_STAGES {
            self.compute_rhs(field, t + c * dt)?;
            self.stage_update(field, a, b, dt);
        }

        for (i, j, q) in field.interior() {
            primitive_at(&self.config.gas, &q, i as isize, j as isize, t + dt)?;
        }
        Ok(())
    }

    /// Max over interior cells and components of `|field - state before the last step|`.
    fn last_change(&self, field: &CellField) -> f64 {
        let mut r: f64 = 0.0;
        for j in 0..self.grid.ny as isize {
            for i in 0..self.grid.nx as isize {
                let idx = self.grid.index(i, j);
                let (a, b) = (field.as_slice()[idx], self.start[idx]);
                for k in 0..4 {
                    r = r.max(libm::fabs(a[k] - b[k]));
                }
            }
        }
        r
    }

    /// Integrates from `t = 0` to the configured end time.
    ///
    /// `observer` runs after every accepted step; its time is excluded from
    /// the reported wall time.
    pub fn advance<C, O>(&mut self, field: &mut CellField, clock: &C, mut observer: O) -> Result<RunSummary>
    where
        C: Clock,
        O: FnMut(&ResidualSample, &CellField),
    {
        let t_end = self.config.t_end;
        let mut t = 0.0;
        let mut history = ResidualHistory::default();
        let mut wall = 0.0;
        let mut steps = 0;
        let mut started = clock.now();
        while t < t_end {
            let dt = clip_dt(t, self.compute_dt(field)?, t_end);
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidParameter("time step collapsed"));
            }
            self.rk3_step(field, t, dt).map_err(|e| match e {
                Error::SolverBlowUp { i, j, time, rho, p, .. } => Error::SolverBlowUp {
                    i,
                    j,
                    step: steps + 1,
                    time,
                    rho,
                    p,
                },
                other => other,
            })?;
            t = if t + dt >= t_end { t_end } else { t + dt };
            steps += 1;
            let sample = ResidualSample {
                step: steps,
                time: t,
                rmax: self.last_change(field),
            };
            history.samples.push(sample);
            let paused = clock.now();
            wall += paused - started;
            observer(&sample, field);
            started = clock.now();
        }
        wall += clock.now() - started;
        Ok(RunSummary {
            steps,
            final_time: t,
            history,
            wall_seconds: wall,
            stats: self.stats,
        })
    }
}
