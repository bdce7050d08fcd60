//! SSP-RK2 (Heun) driver with per-stage convex limiting.

use rayon::prelude::*;
use serde::Serialize;

use crate::discretization::{floor_dry, Discretization};
use crate::error::{Result, SolverError};
use crate::high_order::flux_matrix_high;
use crate::limiter::{
    apply_limited_update, assemble_correction, cap_velocity, characteristic_speed_bound, check_heights,
    compute_factors, LimiterMode,
};
use crate::low_order::{dt_low_bound, flux_matrix_low, LowOrderDt};
use crate::physics::ConservedState;

pub const DEFAULT_CFL: f64 = 0.125;

/// Fraction of the violated bound used for the retried step.
pub const RETRY_SAFETY: f64 = 0.9;

/// `C_N = (N+1)(N+2)/2`.
pub fn trace_constant(degree: usize) -> f64 {
    ((degree + 1) * (degree + 2)) as f64 / 2.0
}

/// `dt^H = CFL h / C_N`.
pub fn dt_high(mesh_size: f64, degree: usize, cfl: f64) -> f64 {
    cfl * mesh_size / trace_constant(degree)
}

/// Statistics of one limited forward-Euler stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct StageStats {
    pub min_factor: f64,
    pub limited_elements: usize,
    pub min_h: f64,
    /// `min_i m_i / (2 Σ_j d_ij)` at the stage input.
    pub guaranteed_dt: f64,
    /// Largest mismatch between interface entries of the two schemes.
    pub max_cross: f64,
    /// Nodes whose speed was capped after limiting.
    pub capped_nodes: usize,
}

/// One forward-Euler step of the limited scheme (before flooring).
pub fn forward_euler_limited(
    disc: &Discretization,
    state: &[ConservedState],
    dt: f64,
    mode: LimiterMode,
) -> Result<(Vec<ConservedState>, StageStats)> {
    let nq = disc.nq();
    let results: Vec<Result<(Vec<ConservedState>, StageStats)>> = (0..disc.num_elements())
        .into_par_iter()
        .map(|e| {
            let masses = &disc.masses[e * nq..(e + 1) * nq];
            let (fl, dsum) = flux_matrix_low(disc, state, e);
            let rl = fl.residual();
            let ul: Vec<ConservedState> = (0..nq).map(|i| state[e * nq + i] - rl[i] * (dt / masses[i])).collect();
            let guaranteed_dt = masses
                .iter()
                .zip(&dsum)
                .filter(|(_, d)| **d > 0.0)
                .map(|(m, d)| m / (2.0 * d))
                .fold(f64::INFINITY, f64::min);
            let (u, min_factor, max_cross, capped_nodes) = if mode == LimiterMode::Low {
                (ul, 0.0, 0.0, 0)
            } else {
                let fh = flux_matrix_high(disc, state, e);
                let a = assemble_correction(&fh, &fl, dt)?;
                let factors = compute_factors(&ul, &a, masses, mode);
                let mut u = apply_limited_update(&ul, &a, &factors, masses);
                let capped = if mode == LimiterMode::High {
                    0
                } else {
                    // thin films next to a front otherwise pick up unbounded speeds
                    cap_velocity(
                        &mut u,
                        characteristic_speed_bound(&ul, masses, &disc.params),
                        &disc.params,
                    )
                };
                (u, factors.min(), a.max_cross, capped)
            };
            // a step beyond the local bound is retried by the caller
            if mode != LimiterMode::High && dt <= guaranteed_dt {
                check_heights(&u, e)?;
            }
            let min_h = u.iter().map(|u| u.h).fold(f64::INFINITY, f64::min);
            let stats = StageStats {
                min_factor,
                limited_elements: usize::from(min_factor < 1.0),
                min_h,
                guaranteed_dt,
                max_cross,
                capped_nodes,
            };
            Ok((u, stats))
        })
        .collect();
    let mut out = Vec::with_capacity(disc.num_nodes());
    let mut stats = StageStats {
        min_factor: 1.0,
        limited_elements: 0,
        min_h: f64::INFINITY,
        guaranteed_dt: f64::INFINITY,
        max_cross: 0.0,
        capped_nodes: 0,
    };
    for r in results {
        let (u, s) = r?;
        out.extend(u);
        stats.min_factor = stats.min_factor.min(s.min_factor);
        stats.limited_elements += s.limited_elements;
        stats.min_h = stats.min_h.min(s.min_h);
        stats.guaranteed_dt = stats.guaranteed_dt.min(s.guaranteed_dt);
        stats.max_cross = stats.max_cross.max(s.max_cross);
        stats.capped_nodes += s.capped_nodes;
    }
    Ok((out, stats))
}

/// Result of one accepted SSP-RK2 step.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: Vec<ConservedState>,
    pub dt: f64,
    pub stages: [StageStats; 2],
    pub retries: usize,
}

/// Heun step; `dt` is shrunk when it violates the guaranteed low-order bound
/// at the intermediate stage.
pub fn step_ssprk2(disc: &Discretization, state: &[ConservedState], dt: f64, mode: LimiterMode) -> Result<StepOutcome> {
    let mut dt = dt;
    let bounded = mode != LimiterMode::High;
    for retries in 0..30 {
        let (mut u1, s1) = forward_euler_limited(disc, state, dt, mode)?;
        if bounded && dt > s1.guaranteed_dt {
            log::debug!("stage 1 retry: dt {dt:.3e} > {:.3e}", s1.guaranteed_dt);
            dt = RETRY_SAFETY * s1.guaranteed_dt;
            continue;
        }
        floor_dry(&mut u1, &disc.params);
        let (mut u2, s2) = forward_euler_limited(disc, &u1, dt, mode)?;
        if bounded && dt > s2.guaranteed_dt {
            log::debug!("stage 2 retry: dt {dt:.3e} > {:.3e}", s2.guaranteed_dt);
            dt = RETRY_SAFETY * s2.guaranteed_dt;
            continue;
        }
        floor_dry(&mut u2, &disc.params);
        let mut out: Vec<ConservedState> = state.iter().zip(&u2).map(|(a, b)| (*a + *b) * 0.5).collect();
        floor_dry(&mut out, &disc.params);
        return Ok(StepOutcome {
            state: out,
            dt,
            stages: [s1, s2],
            retries,
        });
    }
    Err(SolverError::InvalidState(
        "time step could not satisfy the low-order bound".into(),
    ))
}

/// Per-step diagnostics.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunHistory {
    pub time: Vec<f64>,
    pub mass: Vec<f64>,
    pub entropy: Vec<f64>,
    pub min_h: Vec<f64>,
    pub dt: Vec<f64>,
    pub min_factor: Vec<f64>,
    pub limited_elements: Vec<usize>,
    pub retries: usize,
    /// Node updates whose speed was capped, summed over stages.
    pub capped_nodes: usize,
}

impl RunHistory {
    fn record(&mut self, disc: &Discretization, t: f64, state: &[ConservedState]) {
        self.time.push(t);
        self.mass.push(disc.total(state).h);
        self.entropy.push(disc.total_entropy(state));
        self.min_h.push(state.iter().map(|u| u.h).fold(f64::INFINITY, f64::min));
    }

    pub fn steps(&self) -> usize {
        self.dt.len()
    }
}

/// Time-stepping settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepControl {
    pub cfl: f64,
    pub t_end: f64,
    pub mode: LimiterMode,
}

/// `dt = min(dt^H, dt^L)` for the current state.
pub fn select_dt(disc: &Discretization, state: &[ConservedState], cfl: f64) -> (f64, LowOrderDt) {
    let dth = dt_high(disc.mesh_size(), disc.degree(), cfl);
    let dtl = dt_low_bound(disc, state);
    (dth.min(dtl.value()), dtl)
}

/// Advances `state` to `control.t_end`; the final step lands exactly on it.
/// `on_step` sees every accepted step.
pub fn integrate(
    disc: &Discretization,
    state: &mut Vec<ConservedState>,
    control: &StepControl,
    on_step: impl FnMut(usize, f64, &StepOutcome),
) -> Result<RunHistory> {
    integrate_with_stops(disc, state, control, &[], on_step, |_, _| Ok(()))
}

/// Like `integrate`, but also lands exactly on each time in `stops` (inside
/// `(0, t_end)`) and calls `on_stop` there.
pub fn integrate_with_stops(
    disc: &Discretization,
    state: &mut Vec<ConservedState>,
    control: &StepControl,
    stops: &[f64],
    mut on_step: impl FnMut(usize, f64, &StepOutcome),
    mut on_stop: impl FnMut(f64, &[ConservedState]) -> Result<()>,
) -> Result<RunHistory> {
    let mut targets: Vec<f64> = stops
        .iter()
        .copied()
        .filter(|t| *t > 0.0 && *t < control.t_end)
        .collect();
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    targets.push(control.t_end);

    let mut history = RunHistory::default();
    floor_dry(state, &disc.params);
    let mut t = 0.0;
    history.record(disc, t, state);
    let mut step = 0;
    for (k, &target) in targets.iter().enumerate() {
        while t < target {
            let (dt, _) = select_dt(disc, state, control.cfl);
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(SolverError::InvalidState(format!("time step {dt} at t = {t}")));
            }
            let remaining = target - t;
            let dt = if dt >= remaining || remaining - dt < 1e-12 * control.t_end {
                remaining
            } else {
                dt
            };
            let outcome = step_ssprk2(disc, state, dt, control.mode)?;
            *state = outcome.state.clone();
            t = if outcome.dt == remaining {
                target
            } else {
                t + outcome.dt
            };
            step += 1;
            history.dt.push(outcome.dt);
            history
                .min_factor
                .push(outcome.stages[0].min_factor.min(outcome.stages[1].min_factor));
            history.limited_elements.push(
                outcome.stages[0]
                    .limited_elements
                    .max(outcome.stages[1].limited_elements),
            );
            history.retries += outcome.retries;
            history.capped_nodes += outcome.stages[0].capped_nodes + outcome.stages[1].capped_nodes;
            history.record(disc, t, state);
            on_step(step, t, &outcome);
        }
        if k + 1 < targets.len() {
            on_stop(t, state)?;
        }
    }
    Ok(history)
}
