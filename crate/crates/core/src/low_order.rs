//! Sparse low-order operators on a node connectivity graph, graph viscosity
//! and the positivity-preserving low-order update.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::discretization::{pair_flux, Discretization, ElementFluxes, NodeVals};
use crate::error::{Result, SolverError};
use crate::physics::{max_wave_speed, ConservedState, PhysParams};
use crate::reference::{QuadratureRule, SbpOperators};

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_P: f64 = 0.25;
pub const ALPHA_STEP: f64 = 0.05;
const MAX_ALPHA_GROWTH: f64 = 10.0;

/// Radius graph on the reference nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectivityGraph {
    pub radii: Vec<f64>,
    /// Sorted neighbor lists.
    pub neighbors: Vec<Vec<usize>>,
    /// Undirected edges `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
}

impl ConnectivityGraph {
    pub fn num_nodes(&self) -> usize {
        self.radii.len()
    }

    pub fn components(&self) -> usize {
        let n = self.num_nodes();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for &j in &self.neighbors[i] {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        count
    }
}

/// Edge `(i, j)` iff `|x_i − x_j| ≤ max(r_i, r_j)` with `r_i = alpha w_i^p`.
pub fn build_connectivity_graph(rule: &QuadratureRule, alpha: f64, p: f64) -> Result<ConnectivityGraph> {
    if !(alpha > 0.0) || !(0.0..=1.0).contains(&p) {
        return Err(SolverError::Config(format!(
            "graph radius parameters need alpha > 0 and 0 <= p <= 1 (got {alpha}, {p})"
        )));
    }
    let n = rule.len();
    let radii: Vec<f64> = rule.weights.iter().map(|w| alpha * w.powf(p)).collect();
    let mut neighbors = vec![Vec::new(); n];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (rule.nodes[i], rule.nodes[j]);
            if (a[0] - b[0]).hypot(a[1] - b[1]) <= radii[i].max(radii[j]) {
                neighbors[i].push(j);
                neighbors[j].push(i);
                edges.push((i, j));
            }
        }
    }
    for nb in neighbors.iter_mut() {
        nb.sort_unstable();
    }
    let graph = ConnectivityGraph {
        radii,
        neighbors,
        edges,
    };
    let components = graph.components();
    if components != 1 {
        return Err(SolverError::DisconnectedGraph { components });
    }
    Ok(graph)
}

/// Solves `L Φ = −½ B 1`, `Φᵀ1 = 0`, with `L` the combinatorial graph
/// Laplacian, through the augmented system.
pub fn solve_graph_laplacian_potential(graph: &ConnectivityGraph, b_diag: &[f64]) -> Result<Vec<f64>> {
    let n = graph.num_nodes();
    let mut a = DMatrix::zeros(n + 1, n + 1);
    for (i, nb) in graph.neighbors.iter().enumerate() {
        a[(i, i)] = nb.len() as f64;
        for &j in nb {
            a[(i, j)] = -1.0;
        }
        a[(i, n)] = 1.0;
        a[(n, i)] = 1.0;
    }
    let mut rhs = DVector::zeros(n + 1);
    for i in 0..n {
        rhs[i] = -0.5 * b_diag[i];
    }
    let x = a.lu().solve(&rhs).ok_or(SolverError::SingularLaplacian)?;
    if !x.iter().all(|v| v.is_finite()) {
        return Err(SolverError::SingularLaplacian);
    }
    Ok(x.iter().take(n).copied().collect())
}

/// One direction of `Q^L = S + ½B` with `S_ij = φ_i − φ_j` on graph edges.
#[derive(Clone, Debug, PartialEq)]
pub struct LowOrderOperator {
    /// `S_ij` per graph edge `(i, j)`, `i < j`.
    pub edge_values: Vec<f64>,
    pub b_diag: Vec<f64>,
}

pub fn assemble_low_order_operator(graph: &ConnectivityGraph, phi: &[f64], b_diag: &[f64]) -> Result<LowOrderOperator> {
    let op = LowOrderOperator {
        edge_values: graph.edges.iter().map(|&(i, j)| phi[i] - phi[j]).collect(),
        b_diag: b_diag.to_vec(),
    };
    let q = op.to_dense(graph);
    let n = graph.num_nodes();
    let mut worst = 0.0f64;
    for i in 0..n {
        worst = worst.max(q.row(i).sum().abs());
    }
    if worst > 1e-12 {
        return Err(SolverError::OperatorResidual {
            what: "low-order row sums",
            residual: worst,
            tolerance: 1e-12,
        });
    }
    Ok(op)
}

impl LowOrderOperator {
    pub fn to_dense(&self, graph: &ConnectivityGraph) -> DMatrix<f64> {
        let n = graph.num_nodes();
        let mut q = DMatrix::zeros(n, n);
        for (&(i, j), &s) in graph.edges.iter().zip(&self.edge_values) {
            q[(i, j)] = s;
            q[(j, i)] = -s;
        }
        for i in 0..n {
            q[(i, i)] = 0.5 * self.b_diag[i];
        }
        q
    }
}

/// Reference low-order operators in both directions.
#[derive(Clone, Debug)]
pub struct LowOrderOperators {
    pub graph: ConnectivityGraph,
    pub alpha: f64,
    pub p: f64,
    pub dirs: [LowOrderOperator; 2],
}

impl LowOrderOperators {
    pub fn build(ops: &SbpOperators, alpha: f64, p: f64) -> Result<Self> {
        let graph = build_connectivity_graph(&ops.rule, alpha, p)?;
        let mut dirs = Vec::with_capacity(2);
        for d in 0..2 {
            let phi = solve_graph_laplacian_potential(&graph, &ops.b[d])?;
            dirs.push(assemble_low_order_operator(&graph, &phi, &ops.b[d])?);
        }
        let [x, y]: [LowOrderOperator; 2] = dirs.try_into().expect("two directions");
        Ok(LowOrderOperators {
            graph,
            alpha,
            p,
            dirs: [x, y],
        })
    }

    /// Like `build`, but raises `alpha` in steps of `ALPHA_STEP` until the
    /// graph is connected. The effective value is stored in `alpha`.
    pub fn build_connected(ops: &SbpOperators, alpha: f64, p: f64) -> Result<Self> {
        let mut a = alpha;
        loop {
            match Self::build(ops, a, p) {
                Err(SolverError::DisconnectedGraph { components }) => {
                    if a > alpha + MAX_ALPHA_GROWTH {
                        return Err(SolverError::DisconnectedGraph { components });
                    }
                    a += ALPHA_STEP;
                }
                other => return other,
            }
        }
    }

    pub fn report(&self, ops: &SbpOperators) -> LowOrderReport {
        let n = self.graph.num_nodes();
        let mut skew = 0.0f64;
        let mut row_sum = 0.0f64;
        let mut sbp = 0.0f64;
        let mut pattern = 0.0f64;
        let mut nnz = 0;
        for d in 0..ops.dim() {
            let q = self.dirs[d].to_dense(&self.graph);
            nnz += q.iter().filter(|v| **v != 0.0).count();
            for i in 0..n {
                row_sum = row_sum.max(q.row(i).sum().abs());
                for j in 0..n {
                    let b = if i == j { ops.b[d][i] } else { 0.0 };
                    sbp = sbp.max((q[(i, j)] + q[(j, i)] - b).abs());
                    if i != j {
                        skew = skew.max((q[(i, j)] + q[(j, i)]).abs());
                        if !self.graph.neighbors[i].contains(&j) {
                            pattern = pattern.max(q[(i, j)].abs());
                        }
                    }
                }
            }
        }
        LowOrderReport {
            degree: ops.degree(),
            family: ops.rule.family.to_string(),
            alpha: self.alpha,
            p: self.p,
            nodes: n,
            edges: self.graph.edges.len(),
            nonzeros: nnz,
            dense_entries: ops.dim() * n * n,
            skew_residual: skew,
            row_sum_residual: row_sum,
            sbp_residual: sbp,
            pattern_residual: pattern,
        }
    }
}

/// Structure and invariant residuals of the low-order operators.
#[derive(Clone, Debug, Serialize)]
pub struct LowOrderReport {
    pub degree: usize,
    pub family: String,
    pub alpha: f64,
    pub p: f64,
    pub nodes: usize,
    pub edges: usize,
    pub nonzeros: usize,
    pub dense_entries: usize,
    pub skew_residual: f64,
    pub row_sum_residual: f64,
    pub sbp_residual: f64,
    pub pattern_residual: f64,
}

impl LowOrderReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.skew_residual <= tol
            && self.row_sum_residual <= tol
            && self.sbp_residual <= tol
            && self.pattern_residual == 0.0
    }

    pub fn worst(&self) -> f64 {
        self.skew_residual
            .max(self.row_sum_residual)
            .max(self.sbp_residual)
            .max(self.pattern_residual)
    }
}

/// `d_ij = |q_ij| λ(u_i, u_j, n_ij)`, with λ floored at `sqrt(g tol)`.
pub fn graph_viscosity(ui: ConservedState, uj: ConservedState, q: [f64; 2], p: &PhysParams) -> f64 {
    let norm = q[0].hypot(q[1]);
    if norm == 0.0 {
        return 0.0;
    }
    let n = [q[0] / norm, q[1] / norm];
    norm * max_wave_speed(ui, uj, n, p).max(p.min_wave_speed())
}

/// Intermediate height `½(h_i + h_j) − (m_j − m_i)·q / (2 d)`.
pub fn bar_state(ui: ConservedState, uj: ConservedState, q: [f64; 2], d: f64) -> f64 {
    let mean = 0.5 * (ui.h + uj.h);
    if d == 0.0 {
        return mean;
    }
    let dm = (uj.hu - ui.hu) * q[0] + (uj.hv - ui.hv) * q[1];
    mean - dm / (2.0 * d)
}

/// Physical low-order edge coefficients `(S_x, S_y)` of element `e`.
pub fn element_edge_coefficients(disc: &Discretization, e: usize) -> Vec<[f64; 2]> {
    let g = &disc.geo[e];
    let cx = g.operator_weights(0);
    let cy = g.operator_weights(1);
    let [ox, oy] = &disc.low.dirs;
    ox.edge_values
        .iter()
        .zip(&oy.edge_values)
        .map(|(&sr, &ss)| [cx[0] * sr + cx[1] * ss, cy[0] * sr + cy[1] * ss])
        .collect()
}

/// Low-order flux matrix of element `e` and per-node viscosity sums
/// `Σ_j d_ij` (interface edges included).
pub fn flux_matrix_low(disc: &Discretization, state: &[ConservedState], e: usize) -> (ElementFluxes, Vec<f64>) {
    let nq = disc.nq();
    let vals = NodeVals::gather(disc, state, e);
    let coeffs = element_edge_coefficients(disc, e);
    let p = &disc.params;
    let mut intra = vec![ConservedState::ZERO; nq * nq];
    let mut dsum = vec![0.0; nq];
    for (&(i, j), q) in disc.low.graph.edges.iter().zip(&coeffs) {
        let (a, c) = (&vals[i], &vals[j]);
        let (fij, fji) = pair_flux(a, c, q[0], q[1], p.g);
        let d = graph_viscosity(a.u, c.u, *q, p);
        let diff = (c.u - a.u) * d;
        intra[i * nq + j] = fij - diff;
        intra[j * nq + i] = fji + diff;
        dsum[i] += d;
        dsum[j] += d;
    }
    let interface = disc.interface_terms(state, e);
    for t in &interface {
        dsum[t.node] += 0.5 * t.weight * t.lambda.max(p.min_wave_speed());
    }
    (ElementFluxes { nq, intra, interface }, dsum)
}

/// Low-order `du/dt`.
pub fn rhs_low(disc: &Discretization, state: &[ConservedState]) -> Vec<ConservedState> {
    let nq = disc.nq();
    let per_elem: Vec<Vec<ConservedState>> = (0..disc.num_elements())
        .into_par_iter()
        .map(|e| {
            let r = flux_matrix_low(disc, state, e).0.residual();
            r.iter()
                .enumerate()
                .map(|(i, r)| *r * (-1.0 / disc.masses[e * nq + i]))
                .collect()
        })
        .collect();
    per_elem.concat()
}

/// Both low-order step bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LowOrderDt {
    /// `min_i m_i / (2 Σ_j d_ij)`: guarantees positivity of a forward-Euler step.
    pub guaranteed: f64,
    /// `min_i w_i J^{1/d} / (2 λ_max)`.
    pub paper: f64,
}

impl LowOrderDt {
    pub fn value(&self) -> f64 {
        self.guaranteed.min(self.paper)
    }
}

pub fn dt_low_bound(disc: &Discretization, state: &[ConservedState]) -> LowOrderDt {
    let nq = disc.nq();
    let p = &disc.params;
    let dim = disc.dim() as f64;
    let (guaranteed, lam_max, len_min) = (0..disc.num_elements())
        .into_par_iter()
        .map(|e| {
            let (_, dsum) = flux_matrix_low(disc, state, e);
            let mut g = f64::INFINITY;
            let mut lam = 0.0f64;
            for i in 0..nq {
                let m = disc.masses[e * nq + i];
                if dsum[i] > 0.0 {
                    g = g.min(m / (2.0 * dsum[i]));
                }
                let u = state[e * nq + i];
                let (vx, vy) = u.velocity(p.dry_tol);
                lam = lam.max(vx.hypot(vy) + (p.g * u.h.max(0.0)).sqrt());
            }
            let wmin = disc.ops.weights().iter().cloned().fold(f64::INFINITY, f64::min);
            (g, lam, wmin * disc.geo[e].jac.powf(1.0 / dim))
        })
        .reduce(
            || (f64::INFINITY, 0.0, f64::INFINITY),
            |a, b| (a.0.min(b.0), a.1.max(b.1), a.2.min(b.2)),
        );
    LowOrderDt {
        guaranteed,
        paper: len_min / (2.0 * lam_max.max(p.min_wave_speed())),
    }
}
