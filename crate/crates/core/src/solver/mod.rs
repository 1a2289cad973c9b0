//! Time integration: one Lagrange-Remap sweep per direction, X then Y, with
//! a shared time step.

mod pencil;

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::eos::EosSpec;
use crate::error::{CellIndex, Error, Result};
use crate::lagrange::DtLimits;
use crate::remap::{Scheme, SimplexStats};
use crate::state::{fill_pencil_ghosts, FieldSet, GHOST, MOM_X, MOM_Y, PARTIAL};

use pencil::{advance_pencil, pencil_dt_limits, PencilReport, Scratch};

pub use pencil::cell_acoustic_state;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub scheme: Scheme,
    pub cfl: f64,
    /// Upper bound on the time step, used when no wave moves.
    pub dt_max: f64,
}

impl SolverConfig {
    pub fn new(scheme: Scheme, cfl: f64) -> Self {
        SolverConfig {
            scheme,
            cfl,
            dt_max: f64::INFINITY,
        }
    }
}

/// Outcome of one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    /// Whether the volume-factor floor shortened the step.
    pub clipped: bool,
    /// Color-function extremes before clamping.
    pub z: SimplexStats,
    /// Mass-fraction extremes.
    pub y: SimplexStats,
    /// Amount of each conserved quantity `[rho u, rho v, rho E, rho_k Z_k ..]`
    /// that left the domain during the step.
    pub boundary_outflow: Vec<f64>,
}

fn clamp_index(c: usize, n: usize) -> usize {
    c.saturating_sub(GHOST).min(n - 1)
}

fn scratch_pair(len: usize) -> (Scratch, Vec<f64>) {
    (Scratch::default(), vec![0.0; len])
}

/// Copies interior column `i` of a 2D field into a pencil buffer with the
/// momentum slots swapped so that slot 0 is normal to the sweep.
fn gather_column(field: &FieldSet, i: usize, buf: &mut [f64]) {
    let nv = field.nvar();
    for j in 0..field.grid.ny {
        let dst = &mut buf[(j + GHOST) * nv..(j + GHOST + 1) * nv];
        dst.copy_from_slice(field.cell(i, j));
        dst.swap(MOM_X, MOM_Y);
    }
    fill_pencil_ghosts(buf, field.grid.ny, nv, field.bc.y);
}

/// Time-step limits over every pencil of the field.
pub fn dt_limits(field: &FieldSet, eos: &[EosSpec], cfl: f64) -> Result<DtLimits> {
    let (nx, ny, nv, m) = (field.grid.nx, field.grid.ny, field.nvar(), field.materials());
    let row_len = field.row_len();
    let x = (0..ny)
        .into_par_iter()
        .map_init(
            || scratch_pair(row_len * nv),
            |(scratch, buf), j| {
                let start = field.offset(0, j) - GHOST * nv;
                buf.copy_from_slice(&field.data()[start..start + row_len * nv]);
                fill_pencil_ghosts(buf, nx, nv, field.bc.x);
                let locate = |c: usize| CellIndex { i: clamp_index(c, nx), j };
                pencil_dt_limits(buf, nx, m, eos, field.grid.dx, cfl, scratch, &locate)
            },
        )
        .collect::<Result<Vec<_>>>()?;
    let mut limits = x.into_iter().fold(DtLimits::UNBOUNDED, DtLimits::merge);
    if field.grid.dims == 2 {
        let y = (0..nx)
            .into_par_iter()
            .map_init(
                || scratch_pair((ny + 2 * GHOST) * nv),
                |(scratch, buf), i| {
                    gather_column(field, i, buf);
                    let locate = |c: usize| CellIndex { i, j: clamp_index(c, ny) };
                    pencil_dt_limits(buf, ny, m, eos, field.grid.dy, cfl, scratch, &locate)
                },
            )
            .collect::<Result<Vec<_>>>()?;
        limits = y.into_iter().fold(limits, DtLimits::merge);
    }
    Ok(limits)
}

struct SweepTotals {
    z: SimplexStats,
    y: SimplexStats,
    outflow: Vec<f64>,
}

impl SweepTotals {
    fn new(ncons: usize) -> Self {
        SweepTotals {
            z: SimplexStats::default(),
            y: SimplexStats::default(),
            outflow: vec![0.0; ncons],
        }
    }

    fn absorb(&mut self, r: &PencilReport, scale: f64, swapped: bool) {
        self.z = self.z.merge(r.z);
        self.y = self.y.merge(r.y);
        for (s, v) in r.net_flux.iter().enumerate() {
            let slot = match (swapped, s) {
                (true, MOM_X) => MOM_Y,
                (true, MOM_Y) => MOM_X,
                _ => s,
            };
            self.outflow[slot] += scale * v;
        }
    }
}

fn sweep_x(field: &mut FieldSet, eos: &[EosSpec], scheme: Scheme, dt: f64, totals: &mut SweepTotals) -> Result<()> {
    let (nx, ny, nv, m) = (field.grid.nx, field.grid.ny, field.nvar(), field.materials());
    let row_len = field.row_len();
    let lambda = dt / field.grid.dx;
    let bc = field.bc.x;
    let dims = field.grid.dims;
    let first_row = if dims == 1 { 0 } else { GHOST };
    let reports = field
        .data_mut()
        .par_chunks_mut(row_len * nv)
        .skip(first_row)
        .take(ny)
        .enumerate()
        .map_init(
            || scratch_pair(row_len * nv),
            |(scratch, buf), (j, row)| {
                buf.copy_from_slice(row);
                fill_pencil_ghosts(buf, nx, nv, bc);
                let locate = |c: usize| CellIndex { i: clamp_index(c, nx), j };
                let out = &mut row[GHOST * nv..(GHOST + nx) * nv];
                advance_pencil(buf, nx, m, eos, lambda, scheme, scratch, out, &locate)
            },
        )
        .collect::<Result<Vec<_>>>()?;
    let scale = dt * field.grid.dy;
    for r in &reports {
        totals.absorb(r, scale, false);
    }
    Ok(())
}

fn sweep_y(field: &mut FieldSet, eos: &[EosSpec], scheme: Scheme, dt: f64, totals: &mut SweepTotals) -> Result<()> {
    let (nx, ny, nv, m) = (field.grid.nx, field.grid.ny, field.nvar(), field.materials());
    let lambda = dt / field.grid.dy;
    let mut columns = vec![0.0; nx * ny * nv];
    let reports = {
        let src = &*field;
        columns
            .par_chunks_mut(ny * nv)
            .enumerate()
            .map_init(
                || scratch_pair((ny + 2 * GHOST) * nv),
                |(scratch, buf), (i, out)| {
                    gather_column(src, i, buf);
                    let locate = |c: usize| CellIndex { i, j: clamp_index(c, ny) };
                    advance_pencil(buf, ny, m, eos, lambda, scheme, scratch, out, &locate)
                },
            )
            .collect::<Result<Vec<_>>>()?
    };
    for i in 0..nx {
        for j in 0..ny {
            let src = &columns[(i * ny + j) * nv..(i * ny + j + 1) * nv];
            let dst = field.cell_mut(i, j);
            dst.copy_from_slice(src);
            dst.swap(MOM_X, MOM_Y);
        }
    }
    let scale = dt * field.grid.dx;
    for r in &reports {
        totals.absorb(r, scale, true);
    }
    Ok(())
}

/// Advances the field by a prescribed `dt` without any CFL check.
pub fn advance(field: &mut FieldSet, eos: &[EosSpec], scheme: Scheme, dt: f64) -> Result<StepReport> {
    let mut totals = SweepTotals::new(PARTIAL + field.materials());
    sweep_x(field, eos, scheme, dt, &mut totals)?;
    if field.grid.dims == 2 {
        sweep_y(field, eos, scheme, dt, &mut totals)?;
    }
    Ok(StepReport {
        dt,
        clipped: false,
        z: totals.z,
        y: totals.y,
        boundary_outflow: totals.outflow,
    })
}

/// One full time step with the CFL time step, never longer than `dt_cap`.
pub fn step(field: &mut FieldSet, eos: &[EosSpec], cfg: &SolverConfig, dt_cap: f64) -> Result<StepReport> {
    let limits = dt_limits(field, eos, cfg.cfl)?;
    let (dt, clipped) = limits.resolve(cfg.dt_max.min(dt_cap));
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Config(format!(
            "no finite time step (CFL bound {}, cap {})",
            limits.cfl,
            cfg.dt_max.min(dt_cap)
        )));
    }
    let mut report = advance(field, eos, cfg.scheme, dt)?;
    report.clipped = clipped;
    Ok(report)
}

pub fn step_1d(field: &mut FieldSet, eos: &[EosSpec], cfg: &SolverConfig, dt_cap: f64) -> Result<StepReport> {
    if field.grid.dims != 1 {
        return Err(Error::Config("step_1d called on a 2D field".into()));
    }
    step(field, eos, cfg, dt_cap)
}

pub fn step_2d(field: &mut FieldSet, eos: &[EosSpec], cfg: &SolverConfig, dt_cap: f64) -> Result<StepReport> {
    if field.grid.dims != 2 {
        return Err(Error::Config("step_2d called on a 1D field".into()));
    }
    step(field, eos, cfg, dt_cap)
}

/// Simulated time and step bookkeeping.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimClock {
    pub t: f64,
    pub step: usize,
    pub dt_history: Vec<f64>,
}

/// Receives snapshots and per-step reports during a run.
pub trait Observer {
    fn snapshot(&mut self, _field: &FieldSet, _clock: &SimClock) -> Result<()> {
        Ok(())
    }

    fn after_step(&mut self, _field: &FieldSet, _report: &StepReport, _clock: &SimClock) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOptions {
    pub t_end: f64,
    /// Simulated time between snapshots; only `0` and `t_end` when `None`.
    pub snapshot_every: Option<f64>,
    /// Print a progress line to stderr every this many steps.
    pub progress_every: Option<usize>,
    /// Stop early after this many steps.
    pub max_steps: Option<usize>,
}

/// Snapshot times after `t = 0`, always ending with `t_end`.
pub fn snapshot_times(t_end: f64, every: Option<f64>) -> Vec<f64> {
    let mut times = Vec::new();
    if let Some(dt) = every.filter(|d| *d > 0.0) {
        let mut k = 1;
        loop {
            let t = k as f64 * dt;
            if t >= t_end * (1.0 - 1e-12) {
                break;
            }
            times.push(t);
            k += 1;
        }
    }
    if t_end > 0.0 {
        times.push(t_end);
    }
    times
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub clock: SimClock,
    pub clips: usize,
    pub z: SimplexStats,
    pub y: SimplexStats,
    pub initial_totals: Vec<f64>,
    pub final_totals: Vec<f64>,
    /// Cumulative boundary outflow of each conserved quantity.
    pub boundary_outflow: Vec<f64>,
    /// Largest budget error `|total(t) + outflow(t) - total(0)|` over the run,
    /// relative to the initial `sum |W|`.
    pub max_drift: Vec<f64>,
    pub wall_time: Duration,
}

/// Budget error of each conserved quantity, relative to `scale`.
pub fn budget_drift(initial: &[f64], current: &[f64], outflow: &[f64], scale: &[f64]) -> Vec<f64> {
    initial
        .iter()
        .zip(current)
        .zip(outflow)
        .zip(scale)
        .map(|(((i, c), o), s)| {
            let err = (c + o - i).abs();
            if *s > 0.0 {
                err / s
            } else {
                err
            }
        })
        .collect()
}

fn abs_totals(field: &FieldSet) -> Vec<f64> {
    let n = PARTIAL + field.materials();
    let mut sums = vec![0.0; n];
    for w in field.interior_cells() {
        for (s, v) in sums.iter_mut().zip(w) {
            *s += v.abs();
        }
    }
    let vol = field.grid.cell_volume();
    sums.iter_mut().for_each(|s| *s *= vol);
    sums
}

/// Advances `field` to `opts.t_end`, landing exactly on every snapshot time.
pub fn run(
    field: &mut FieldSet,
    eos: &[EosSpec],
    cfg: &SolverConfig,
    opts: &RunOptions,
    observers: &mut [&mut dyn Observer],
) -> Result<RunSummary> {
    let started = Instant::now();
    let mut clock = SimClock::default();
    let initial_totals = field.totals();
    let scale = abs_totals(field);
    let ncons = initial_totals.len();
    let mut outflow = vec![0.0; ncons];
    let mut max_drift = vec![0.0; ncons];
    let (mut z, mut y) = (SimplexStats::default(), SimplexStats::default());
    let mut clips = 0;

    for o in observers.iter_mut() {
        o.snapshot(field, &clock)?;
    }
    'targets: for target in snapshot_times(opts.t_end, opts.snapshot_every) {
        while clock.t < target {
            if opts.max_steps.is_some_and(|n| clock.step >= n) {
                for o in observers.iter_mut() {
                    o.snapshot(field, &clock)?;
                }
                break 'targets;
            }
            let cap = target - clock.t;
            let report = step(field, eos, cfg, cap).map_err(|e| Error::AtStep {
                step: clock.step + 1,
                t: clock.t,
                source: Box::new(e),
            })?;
            clock.t = if report.dt >= cap { target } else { clock.t + report.dt };
            clock.step += 1;
            clock.dt_history.push(report.dt);
            clips += report.clipped as usize;
            z = z.merge(report.z);
            y = y.merge(report.y);
            for (o, v) in outflow.iter_mut().zip(&report.boundary_outflow) {
                *o += v;
            }
            let drift = budget_drift(&initial_totals, &field.totals(), &outflow, &scale);
            for (m, d) in max_drift.iter_mut().zip(&drift) {
                *m = f64::max(*m, *d);
            }
            for o in observers.iter_mut() {
                o.after_step(field, &report, &clock)?;
            }
            if opts.progress_every.is_some_and(|n| n > 0 && clock.step % n == 0) {
                let worst = drift.iter().fold(0.0f64, |a, d| a.max(*d));
                eprintln!(
                    "step {:>7}  t {:.6e}  dt {:.6e}  drift {:.3e}",
                    clock.step, clock.t, report.dt, worst
                );
            }
        }
        for o in observers.iter_mut() {
            o.snapshot(field, &clock)?;
        }
    }

    Ok(RunSummary {
        clock,
        clips,
        z,
        y,
        initial_totals,
        final_totals: field.totals(),
        boundary_outflow: outflow,
        max_drift,
        wall_time: started.elapsed(),
    })
}
