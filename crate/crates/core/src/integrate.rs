//! Fixed-step RK4 time evolution of the master equation with observer
//! sampling, truncation guarding, and state-validity monitoring.
//!
//! The requested step is clamped to the RK4 stability bound of the generator
//! (|z| ≤ 2√2 on the imaginary axis), with the clamp recorded in the run
//! health. Steps land exactly on the sample grid: each sampling interval is
//! subdivided into `ceil(interval/dt)` equal steps, so identical configs
//! produce bit-identical trajectories and halving `dt` exactly doubles the
//! step count.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, ATOM_DIM};
use crate::liouville::{AmplifierModel, Liouvillian};
use crate::thermo::{ThermoCtx, ThermoSample};

/// Safety factor applied to the RK4 imaginary-axis stability limit 2√2.
const STABILITY_SAFETY: f64 = 0.9;

/// Integration control. `dt` is in units of 1/λ; `t_max`, `sample_interval`,
/// and `snapshot_times` are in units of 1/Γ_ref (falling back to 1/λ when the
/// bath rates vanish).
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    pub sample_interval: f64,
    /// Number of top Fock levels monitored by the truncation guard.
    pub guard_levels: usize,
    /// Abort when the monitored tail mass exceeds this.
    pub guard_tol: f64,
    /// Abort when |Tr ρ - 1| exceeds this.
    pub trace_drift_tol: f64,
    /// Joint-state snapshots are taken at these times (must lie on the
    /// sample grid).
    pub snapshot_times: Vec<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 0.02,
            t_max: 10.0,
            sample_interval: 0.05,
            guard_levels: 5,
            guard_tol: 1e-6,
            trace_drift_tol: 1e-8,
            snapshot_times: Vec::new(),
        }
    }
}

/// One observer record.
#[derive(Debug, Clone)]
pub struct SampleRecord {
    /// Sample time (1/Γ_ref units).
    pub t: f64,
    pub thermo: ThermoSample,
    /// |Tr ρ - 1| at this sample.
    pub trace_drift: f64,
    /// Smallest eigenvalue of the joint state.
    pub min_eig: f64,
    /// Population in the guarded top Fock levels.
    pub tail_mass: f64,
    /// ⟨Π_f⟩ = Σ_n (-1)^n ⟨n|ρ_f|n⟩.
    pub field_parity: f64,
    /// Populations of atomic levels 1..3.
    pub atom_populations: [f64; 3],
}

/// Ordered observer records of one trajectory.
#[derive(Debug, Clone, Default)]
pub struct TimeSeries {
    pub records: Vec<SampleRecord>,
}

impl TimeSeries {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn last(&self) -> Option<&SampleRecord> {
        self.records.last()
    }
}

/// A full joint-state snapshot.
#[derive(Debug, Clone)]
pub struct Snapshot {
    /// Snapshot time (1/Γ_ref units).
    pub t: f64,
    pub state: DensityMatrix,
}

/// Run-level health diagnostics.
#[derive(Debug, Clone)]
pub struct HealthSummary {
    /// Step actually used, in internal time units.
    pub dt_internal: f64,
    /// Step requested by the config, in internal time units.
    pub dt_requested_internal: f64,
    pub steps_total: u64,
    pub max_trace_drift: f64,
    pub min_eigenvalue: f64,
    pub max_tail_mass: f64,
    /// Whether the stability clamp reduced the requested step.
    pub dt_clamped: bool,
}

/// Result of [`evolve`].
#[derive(Debug, Clone)]
pub struct EvolveOutput {
    pub series: TimeSeries,
    pub snapshots: Vec<Snapshot>,
    pub final_state: DensityMatrix,
    pub health: HealthSummary,
}

/// Truncation-guard verdict.
#[derive(Debug, Clone, Copy)]
pub struct GuardReport {
    pub tail_mass: f64,
    pub passed: bool,
}

/// Population in the top `guard_levels` Fock levels of a joint state.
pub fn truncation_guard(
    rho: &DensityMatrix,
    guard_levels: usize,
    guard_tol: f64,
) -> Result<GuardReport> {
    let layout = rho
        .space()
        .layout()
        .ok_or_else(|| Error::SpaceMismatch("truncation_guard needs a joint state".into()))?;
    let y = rho
        .matrix()
        .as_slice()
        .expect("states are contiguous row-major");
    let tail = tail_mass_flat(y, layout.joint_dim(), layout.field_dim(), guard_levels);
    Ok(GuardReport {
        tail_mass: tail,
        passed: tail <= guard_tol,
    })
}

fn tail_mass_flat(y: &[C64], dim: usize, nfield: usize, guard_levels: usize) -> f64 {
    let k = guard_levels.min(nfield);
    let mut tail = 0.0;
    for a in 0..ATOM_DIM {
        for m in (nfield - k)..nfield {
            let i = a * nfield + m;
            tail += y[i * dim + i].re;
        }
    }
    tail
}

fn field_parity_flat(y: &[C64], dim: usize, nfield: usize) -> f64 {
    let mut p = 0.0;
    for a in 0..ATOM_DIM {
        for m in 0..nfield {
            let i = a * nfield + m;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            p += sign * y[i * dim + i].re;
        }
    }
    p
}

fn atom_populations_flat(y: &[C64], dim: usize, nfield: usize) -> [f64; 3] {
    let mut pops = [0.0; 3];
    for (a, pop) in pops.iter_mut().enumerate() {
        for m in 0..nfield {
            let i = a * nfield + m;
            *pop += y[i * dim + i].re;
        }
    }
    pops
}

/// RK4 stepper holding the evolving state and its stage buffers.
///
/// Every stage is one row-parallel pass: the stage derivative row is computed
/// and immediately folded into the accumulator and the next stage input, so a
/// step costs four passes plus a re-symmetrization.
pub struct Rk4Stepper {
    l: Liouvillian,
    dim: usize,
    state: Vec<C64>,
    acc: Vec<C64>,
    k: Vec<C64>,
    ya: Vec<C64>,
    yb: Vec<C64>,
    par: bool,
}

impl Rk4Stepper {
    pub fn new(l: Liouvillian, rho0: ArrayView2<C64>) -> Result<Self> {
        let dim = l.dim();
        if rho0.nrows() != dim || rho0.ncols() != dim {
            return Err(Error::SpaceMismatch(format!(
                "initial state is {}x{}, generator expects {dim}",
                rho0.nrows(),
                rho0.ncols()
            )));
        }
        let state: Vec<C64> = rho0.iter().copied().collect();
        let zeros = vec![C64::new(0.0, 0.0); dim * dim];
        let par = l.prefer_parallel();
        Ok(Self {
            l,
            dim,
            state,
            acc: zeros.clone(),
            k: zeros.clone(),
            ya: zeros.clone(),
            yb: zeros,
            par,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn liouvillian(&self) -> &Liouvillian {
        &self.l
    }

    pub fn state_slice(&self) -> &[C64] {
        &self.state
    }

    pub fn state_matrix(&self) -> Array2<C64> {
        Array2::from_shape_vec((self.dim, self.dim), self.state.clone())
            .expect("state buffer has dim² entries")
    }

    /// One classical RK4 update, re-symmetrized as (ρ + ρ†)/2 to suppress
    /// roundoff drift.
    pub fn step(&mut self, dt: f64) {
        let dim = self.dim;
        let par = self.par;
        let l = &self.l;
        let state = &self.state;
        let (w6, w3, h) = (dt / 6.0, dt / 3.0, dt / 2.0);

        // Stage 1: k1 = f(ρ); acc = ρ + dt/6 k1; ya = ρ + dt/2 k1.
        rows3(dim, par, &mut self.k, &mut self.acc, &mut self.ya, |i, k, acc, ya| {
            l.apply_row(state, i, k);
            let s = &state[i * dim..(i + 1) * dim];
            for j in 0..dim {
                acc[j] = s[j] + k[j] * w6;
                ya[j] = s[j] + k[j] * h;
            }
        });

        // Stage 2: k2 = f(ya); acc += dt/3 k2; yb = ρ + dt/2 k2.
        let ya_in = &self.ya;
        rows3(dim, par, &mut self.k, &mut self.acc, &mut self.yb, |i, k, acc, yb| {
            l.apply_row(ya_in, i, k);
            let s = &state[i * dim..(i + 1) * dim];
            for j in 0..dim {
                acc[j] += k[j] * w3;
                yb[j] = s[j] + k[j] * h;
            }
        });

        // Stage 3: k3 = f(yb); acc += dt/3 k3; ya = ρ + dt k3.
        let yb_in = &self.yb;
        rows3(dim, par, &mut self.k, &mut self.acc, &mut self.ya, |i, k, acc, ya| {
            l.apply_row(yb_in, i, k);
            let s = &state[i * dim..(i + 1) * dim];
            for j in 0..dim {
                acc[j] += k[j] * w3;
                ya[j] = s[j] + k[j] * dt;
            }
        });

        // Stage 4: k4 = f(ya); yb = acc + dt/6 k4.
        let ya_in = &self.ya;
        rows3(dim, par, &mut self.k, &mut self.acc, &mut self.yb, |i, k, acc, yb| {
            l.apply_row(ya_in, i, k);
            for j in 0..dim {
                yb[j] = acc[j] + k[j] * w6;
            }
        });

        // Re-symmetrize into the state buffer.
        let yb_in = &self.yb;
        rows1(dim, par, &mut self.state, |i, out| {
            for (j, slot) in out.iter_mut().enumerate() {
                let a = yb_in[i * dim + j];
                let b = yb_in[j * dim + i];
                *slot = C64::new(0.5 * (a.re + b.re), 0.5 * (a.im - b.im));
            }
        });
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.state[i * self.dim + i].re).sum()
    }
}

fn rows3<F>(dim: usize, par: bool, a: &mut [C64], b: &mut [C64], c: &mut [C64], f: F)
where
    F: Fn(usize, &mut [C64], &mut [C64], &mut [C64]) + Sync,
{
    if par {
        a.par_chunks_exact_mut(dim)
            .zip(b.par_chunks_exact_mut(dim))
            .zip(c.par_chunks_exact_mut(dim))
            .enumerate()
            .with_min_len(crate::liouville::PAR_MIN_ROWS)
            .for_each(|(i, ((ra, rb), rc))| f(i, ra, rb, rc));
    } else {
        for (i, ((ra, rb), rc)) in a
            .chunks_exact_mut(dim)
            .zip(b.chunks_exact_mut(dim))
            .zip(c.chunks_exact_mut(dim))
            .enumerate()
        {
            f(i, ra, rb, rc);
        }
    }
}

fn rows1<F>(dim: usize, par: bool, a: &mut [C64], f: F)
where
    F: Fn(usize, &mut [C64]) + Sync,
{
    if par {
        a.par_chunks_exact_mut(dim)
            .enumerate()
            .with_min_len(crate::liouville::PAR_MIN_ROWS)
            .for_each(|(i, row)| f(i, row));
    } else {
        for (i, row) in a.chunks_exact_mut(dim).enumerate() {
            f(i, row);
        }
    }
}

/// One RK4 step of `dt` (internal time units) on a joint state.
pub fn rk4_step(rho: &DensityMatrix, model: &AmplifierModel, dt: f64) -> Result<DensityMatrix> {
    let l = Liouvillian::new(model)?;
    if rho.space().layout() != Some(model.layout) {
        return Err(Error::SpaceMismatch(
            "state and model live on different layouts".into(),
        ));
    }
    let mut stepper = Rk4Stepper::new(l, rho.matrix().view())?;
    stepper.step(dt);
    Ok(DensityMatrix::from_matrix_unchecked(
        rho.space(),
        stepper.state_matrix(),
    ))
}

/// Internal/reported time conversion factors for a model.
fn time_scales(model: &AmplifierModel) -> (f64, f64) {
    // (internal seconds per unit of config.dt, internal seconds per reported
    // time unit)
    let lam = if model.lambda > 0.0 { model.lambda } else { 1.0 };
    let rate = if model.gamma_ref() > 0.0 {
        model.gamma_ref()
    } else {
        lam
    };
    (1.0 / lam, 1.0 / rate)
}

/// Evolve a joint state under the model, sampling thermodynamics at the
/// configured cadence and snapshotting at the requested times.
pub fn evolve(
    rho0: &DensityMatrix,
    model: &AmplifierModel,
    config: &IntegratorConfig,
) -> Result<EvolveOutput> {
    if rho0.space().layout() != Some(model.layout) {
        return Err(Error::SpaceMismatch(
            "initial state and model live on different layouts".into(),
        ));
    }
    if !(config.dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dt must be > 0, got {}",
            config.dt
        )));
    }
    if config.t_max < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "t_max must be >= 0, got {}",
            config.t_max
        )));
    }
    if config.guard_levels < 1 {
        return Err(Error::InvalidParameter(
            "guard_levels must be >= 1".into(),
        ));
    }

    let l = Liouvillian::new(model)?;
    let ctx = ThermoCtx::new(model)?;
    let layout = model.layout;
    let dim = layout.joint_dim();
    let nfield = layout.field_dim();

    let (dt_unit, t_unit) = time_scales(model);
    let dt_requested = config.dt * dt_unit;
    let bound = l.spectral_bound();
    let dt_stab = if bound > 0.0 {
        STABILITY_SAFETY * 2.0 * std::f64::consts::SQRT_2 / bound
    } else {
        f64::INFINITY
    };
    let dt_internal = dt_requested.min(dt_stab);
    let dt_clamped = dt_internal < dt_requested;

    // Sample grid (reported units): multiples of sample_interval, ending
    // exactly at t_max.
    let mut sample_times = vec![0.0];
    if config.t_max > 0.0 {
        if !(config.sample_interval > 0.0) {
            return Err(Error::InvalidParameter(
                "sample_interval must be > 0 for t_max > 0".into(),
            ));
        }
        if config.sample_interval * t_unit < dt_internal {
            return Err(Error::InvalidParameter(format!(
                "sample_interval ({} reported units = {:.3e} internal) is finer than the step {:.3e}",
                config.sample_interval,
                config.sample_interval * t_unit,
                dt_internal
            )));
        }
        let mut k = 1usize;
        loop {
            let t = k as f64 * config.sample_interval;
            if t >= config.t_max - 1e-9 * config.t_max.max(1.0) {
                sample_times.push(config.t_max);
                break;
            }
            sample_times.push(t);
            k += 1;
        }
    }

    // Snapshot times must lie on the sample grid.
    let mut snapshot_idx: Vec<Option<f64>> = vec![None; sample_times.len()];
    for &s in &config.snapshot_times {
        if s < 0.0 || s > config.t_max + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "snapshot time {s} outside [0, t_max]"
            )));
        }
        let pos = sample_times
            .iter()
            .position(|&t| (t - s).abs() <= 1e-9 * s.abs().max(1.0));
        match pos {
            Some(i) => snapshot_idx[i] = Some(s),
            None => {
                return Err(Error::InvalidParameter(format!(
                    "snapshot time {s} does not lie on the sample grid (interval {})",
                    config.sample_interval
                )))
            }
        }
    }

    let mut stepper = Rk4Stepper::new(l, rho0.matrix().view())?;
    let mut series = TimeSeries::default();
    let mut snapshots = Vec::new();
    let mut steps_total = 0u64;
    let mut max_trace_drift = 0.0_f64;
    let mut min_eigenvalue = f64::INFINITY;
    let mut max_tail_mass = 0.0_f64;

    for (si, &t_rep) in sample_times.iter().enumerate() {
        if si > 0 {
            let delta = (sample_times[si] - sample_times[si - 1]) * t_unit;
            let n_sub = (delta / dt_internal - 1e-12).ceil().max(1.0) as u64;
            let dt_step = delta / n_sub as f64;
            for _ in 0..n_sub {
                stepper.step(dt_step);
            }
            steps_total += n_sub;
        }

        let y = stepper.state_slice();
        let trace: f64 = (0..dim).map(|i| y[i * dim + i].re).sum();
        if !trace.is_finite() {
            return Err(Error::IntegratorAbort {
                t: t_rep,
                reason: "non-finite trace (NaN/overflow detected)".into(),
            });
        }
        let drift = (trace - 1.0).abs();
        if drift > config.trace_drift_tol {
            return Err(Error::IntegratorAbort {
                t: t_rep,
                reason: format!(
                    "trace drift {drift:.3e} exceeds tolerance {:.1e}",
                    config.trace_drift_tol
                ),
            });
        }
        let tail = tail_mass_flat(y, dim, nfield, config.guard_levels);
        if tail > config.guard_tol {
            return Err(Error::IntegratorAbort {
                t: t_rep,
                reason: format!(
                    "truncation guard tripped: top-{} tail mass {tail:.3e} exceeds {:.1e}",
                    config.guard_levels, config.guard_tol
                ),
            });
        }

        let out = ctx.sample(y, t_rep)?;
        max_trace_drift = max_trace_drift.max(drift);
        min_eigenvalue = min_eigenvalue.min(out.joint_min_eig);
        max_tail_mass = max_tail_mass.max(tail);

        series.records.push(SampleRecord {
            t: t_rep,
            thermo: out.sample,
            trace_drift: drift,
            min_eig: out.joint_min_eig,
            tail_mass: tail,
            field_parity: field_parity_flat(y, dim, nfield),
            atom_populations: atom_populations_flat(y, dim, nfield),
        });

        if snapshot_idx[si].is_some() {
            snapshots.push(Snapshot {
                t: t_rep,
                state: DensityMatrix::from_matrix_unchecked(
                    rho0.space(),
                    stepper.state_matrix(),
                ),
            });
        }
    }

    let final_state = DensityMatrix::from_matrix_unchecked(rho0.space(), stepper.state_matrix());
    Ok(EvolveOutput {
        series,
        snapshots,
        final_state,
        health: HealthSummary {
            dt_internal,
            dt_requested_internal: dt_requested,
            steps_total,
            max_trace_drift,
            min_eigenvalue,
            max_tail_mass,
            dt_clamped,
        },
    })
}
