//! Single runs and convergence studies, with their reports.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::cases::{CaseName, CaseSpec, Resolution, SolverOptions};
use crate::config::SimulationConfig;
use crate::discretization::Discretization;
use crate::error::{Result, SolverError};
use crate::limiter::LimiterMode;
use crate::mesh::WallSegment;
use crate::norms::{l2_distance, l2_error, observed_rates, ErrorQuadrature, L2Error};
use crate::output::{write_json, write_snapshot_csv, write_table_csv, write_vtk, SUMMARY_SCHEMA_VERSION};
use crate::physics::ConservedState;
use crate::time::{integrate_with_stops, RunHistory, StepControl};

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub case: CaseSpec,
    pub config: SimulationConfig,
    /// Graph radius coefficient actually used.
    pub effective_alpha: f64,
    pub elements: usize,
    pub nodes: usize,
    pub mesh_size: f64,
    pub steps: usize,
    pub final_time: f64,
    pub wall_seconds: f64,
    /// Error of the discretized initial data.
    pub initial_error: Option<L2Error>,
    pub error: Option<L2Error>,
    /// Distance to the discrete initial state (steady cases).
    pub steady_state_error: Option<L2Error>,
    pub relative_mass_change: f64,
    pub internal_walls: Vec<WallSegment>,
    pub history: RunHistory,
}

pub struct RunResult {
    pub disc: Discretization,
    pub state: Vec<ConservedState>,
    pub summary: RunSummary,
}

/// Runs one configured case; writes outputs when `config.out` is set.
pub fn run_case(config: &SimulationConfig) -> Result<RunResult> {
    config.validate()?;
    let spec = config.case_spec();
    let start = Instant::now();
    let (disc, mut state) = spec.setup(&config.solver_options())?;
    if spec.name == CaseName::LakeAtRest {
        warn_unfitted_lake(&disc);
    }
    let quad = ErrorQuadrature::new(&disc);
    let initial = state.clone();
    let exact_error = |u: &[ConservedState], t: f64| {
        spec.has_exact().then(|| {
            l2_error(
                &disc,
                &quad,
                u,
                |x| spec.exact(x, t).expect("exact"),
                |x| spec.in_error_region(x, t),
            )
        })
    };
    let initial_error = exact_error(&initial, 0.0);

    let out = config.out.as_deref();
    if let Some(dir) = out {
        write_snapshot(dir, &disc, &initial, 0.0, config.vtk)?;
    }
    let control = StepControl {
        cfl: config.cfl,
        t_end: spec.t_end,
        mode: config.limiter,
    };
    let history = integrate_with_stops(
        &disc,
        &mut state,
        &control,
        &config.snapshots,
        |step, t, o| log::debug!("step {step} t = {t:.6e} dt = {:.3e}", o.dt),
        |t, u| match out {
            Some(dir) => write_snapshot(dir, &disc, u, t, config.vtk),
            None => Ok(()),
        },
    )?;
    let error = exact_error(&state, spec.t_end);
    let steady_state_error = (spec.name == CaseName::LakeAtRest).then(|| l2_distance(&disc, &quad, &state, &initial));
    let m0 = history.mass[0];
    let m1 = *history.mass.last().expect("history has the initial record");
    let summary = RunSummary {
        schema_version: SUMMARY_SCHEMA_VERSION,
        internal_walls: spec.internal_walls(spec.resolution),
        case: spec.clone(),
        config: config.clone(),
        effective_alpha: disc.low.alpha,
        elements: disc.num_elements(),
        nodes: disc.num_nodes(),
        mesh_size: disc.mesh_size(),
        steps: history.steps(),
        final_time: *history.time.last().expect("history has the initial record"),
        wall_seconds: start.elapsed().as_secs_f64(),
        initial_error,
        error,
        steady_state_error,
        relative_mass_change: (m1 - m0).abs() / m0.abs().max(f64::MIN_POSITIVE),
        history,
    };
    if let Some(dir) = out {
        write_snapshot(dir, &disc, &state, spec.t_end, config.vtk)?;
        write_json(&dir.join("summary.json"), &summary)?;
    }
    Ok(RunResult { disc, state, summary })
}

fn write_snapshot(dir: &Path, disc: &Discretization, u: &[ConservedState], t: f64, vtk: bool) -> Result<()> {
    write_snapshot_csv(&dir.join(format!("snapshot_t{t:.6}.csv")), disc, u)?;
    if vtk && disc.dim() == 2 {
        write_vtk(&dir.join(format!("snapshot_t{t:.6}.vtk")), disc, u)?;
    }
    Ok(())
}

fn warn_unfitted_lake(disc: &Discretization) {
    let fitted = |x: f64| {
        disc.mesh
            .element_vertices
            .iter()
            .flatten()
            .any(|v| (v[0] - x).abs() < 1e-12)
    };
    if !fitted(0.125) || !fitted(-0.125) {
        log::warn!("wet/dry interface at ±1/8 is not an element boundary; expect loss of well-balancedness");
    }
}

/// One refinement level of a study.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceLevel {
    pub resolution: Resolution,
    pub mesh_size: f64,
    pub error: L2Error,
    pub steps: usize,
    pub min_h: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub schema_version: u32,
    pub case: CaseName,
    pub degree: usize,
    pub limiter: LimiterMode,
    pub levels: Vec<ConvergenceLevel>,
    /// Pairwise rates on the height error.
    pub rates_h: Vec<f64>,
    pub rates_hu: Vec<f64>,
}

impl ErrorReport {
    pub fn final_rate(&self) -> f64 {
        *self.rates_h.last().unwrap_or(&f64::NAN)
    }
}

/// Runs `config` at each resolution and records errors and rates.
pub fn run_convergence_study(config: &SimulationConfig, resolutions: &[Resolution]) -> Result<ErrorReport> {
    if resolutions.len() < 2 {
        return Err(SolverError::Config(
            "a convergence study needs at least two levels".into(),
        ));
    }
    let spec = config.case_spec();
    if !spec.has_exact() {
        return Err(SolverError::MissingExactSolution {
            case: spec.name.to_string(),
        });
    }
    let mut levels = Vec::new();
    for &r in resolutions {
        let mut c = config.clone();
        c.resolution = Some(r);
        c.out = None;
        let run = run_case(&c)?;
        let s = run.summary;
        log::info!("{} {r}: h-error {:.6e}", spec.name, s.error.expect("exact").h);
        levels.push(ConvergenceLevel {
            resolution: r,
            mesh_size: s.mesh_size,
            error: s.error.expect("exact"),
            steps: s.steps,
            min_h: s.history.min_h.iter().copied().fold(f64::INFINITY, f64::min),
        });
    }
    let sizes: Vec<f64> = levels.iter().map(|l| l.mesh_size).collect();
    let eh: Vec<f64> = levels.iter().map(|l| l.error.h).collect();
    let ehu: Vec<f64> = levels.iter().map(|l| l.error.hu).collect();
    let report = ErrorReport {
        schema_version: SUMMARY_SCHEMA_VERSION,
        case: spec.name,
        degree: spec.degree,
        limiter: config.limiter,
        rates_h: observed_rates(&sizes, &eh),
        rates_hu: observed_rates(&sizes, &ehu),
        levels,
    };
    if let Some(dir) = config.out.as_deref() {
        let rows: Vec<Vec<f64>> = report
            .levels
            .iter()
            .enumerate()
            .map(|(k, l)| {
                let rate = if k == 0 { f64::NAN } else { report.rates_h[k - 1] };
                vec![l.mesh_size, l.error.h, l.error.hu, l.error.hv, rate]
            })
            .collect();
        write_table_csv(
            &dir.join("convergence.csv"),
            &["mesh_size", "err_h", "err_hu", "err_hv", "rate_h"],
            &rows,
        )?;
        write_json(&dir.join("convergence.json"), &report)?;
    }
    Ok(report)
}

/// Reference operator inspection for one `(dim, N, family)`.
#[derive(Clone, Debug, Serialize)]
pub struct OperatorReport {
    pub dim: usize,
    pub degree: usize,
    pub family: crate::reference::NodeFamily,
    pub nodes: usize,
    pub high_order: crate::reference::VerificationReport,
    pub alpha: f64,
    pub p: f64,
    pub edges: usize,
    pub low_order: crate::low_order::LowOrderReport,
}

pub fn inspect_operators(dim: usize, degree: usize, opts: &SolverOptions) -> Result<OperatorReport> {
    let ops = crate::reference::build_reference(dim, degree, opts.family)?;
    let high_order = crate::reference::verify_sbp(&ops);
    let low = crate::low_order::LowOrderOperators::build_connected(&ops, opts.alpha, opts.p)?;
    Ok(OperatorReport {
        dim,
        degree,
        family: opts.family,
        nodes: ops.num_nodes(),
        high_order,
        alpha: low.alpha,
        p: low.p,
        edges: low.graph.edges.len(),
        low_order: low.report(&ops),
    })
}
