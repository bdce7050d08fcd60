//! Mesh, reference operators and nodal data bundled for the solvers.

use crate::error::{Result, SolverError};
use crate::low_order::LowOrderOperators;
use crate::mesh::{
    build_face_connectivity, compute_geometric_factors, ElementGeometry, Exterior, FaceConnectivity, Mesh,
};
use crate::physics::{interface_flux, max_wave_speed, mirror_state, ConservedState, PhysParams};
use crate::reference::SbpOperators;

#[derive(Clone, Debug)]
pub struct Discretization {
    pub ops: SbpOperators,
    pub low: LowOrderOperators,
    pub mesh: Mesh,
    pub geo: Vec<ElementGeometry>,
    pub conn: FaceConnectivity,
    /// Physical node coordinates, index `e * nq + i`.
    pub coords: Vec<[f64; 2]>,
    pub bathymetry: Vec<f64>,
    /// Lumped masses `J w_i`.
    pub masses: Vec<f64>,
    pub params: PhysParams,
    /// Local Lax-Friedrichs penalty on interface fluxes.
    pub interface_dissipation: bool,
    /// Off-diagonal part of the reference `Q_r`, `Q_s`, row-major.
    pub(crate) s_ref: [Vec<f64>; 2],
}

impl Discretization {
    pub fn new(
        mesh: Mesh,
        ops: SbpOperators,
        low: LowOrderOperators,
        params: PhysParams,
        bathymetry: impl Fn([f64; 2]) -> f64,
    ) -> Result<Self> {
        if mesh.dim != ops.dim() {
            return Err(SolverError::Config(format!(
                "mesh dimension {} does not match operator dimension {}",
                mesh.dim,
                ops.dim()
            )));
        }
        let geo = compute_geometric_factors(&mesh, &ops)?;
        let conn = build_face_connectivity(&mesh, &ops.rule)?;
        let nq = ops.num_nodes();
        let mut coords = Vec::with_capacity(mesh.num_elements() * nq);
        let mut masses = Vec::with_capacity(mesh.num_elements() * nq);
        for (e, g) in geo.iter().enumerate() {
            for (p, w) in ops.rule.nodes.iter().zip(ops.weights()) {
                coords.push(mesh.map_point(e, *p));
                masses.push(g.jac * w);
            }
        }
        let bathymetry = coords.iter().map(|&x| bathymetry(x)).collect();
        let s_ref = [0, 1].map(|d| {
            let mut s = vec![0.0; nq * nq];
            for i in 0..nq {
                for j in 0..nq {
                    if i != j {
                        s[i * nq + j] = ops.q[d][(i, j)];
                    }
                }
            }
            s
        });
        Ok(Discretization {
            ops,
            low,
            mesh,
            geo,
            conn,
            coords,
            bathymetry,
            masses,
            params,
            interface_dissipation: true,
            s_ref,
        })
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim
    }

    pub fn nq(&self) -> usize {
        self.ops.num_nodes()
    }

    pub fn num_elements(&self) -> usize {
        self.mesh.num_elements()
    }

    pub fn num_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn degree(&self) -> usize {
        self.ops.degree()
    }

    /// Samples a nodal field.
    pub fn sample<T>(&self, f: impl Fn([f64; 2]) -> T) -> Vec<T> {
        self.coords.iter().map(|&x| f(x)).collect()
    }

    pub fn total(&self, state: &[ConservedState]) -> ConservedState {
        state
            .iter()
            .zip(&self.masses)
            .fold(ConservedState::ZERO, |acc, (u, m)| acc + *u * *m)
    }

    pub fn total_entropy(&self, state: &[ConservedState]) -> f64 {
        state
            .iter()
            .zip(&self.masses)
            .zip(&self.bathymetry)
            .map(|((u, m), b)| m * crate::physics::entropy_function(*u, *b, &self.params))
            .sum()
    }

    /// Smallest element diameter.
    pub fn mesh_size(&self) -> f64 {
        self.geo.iter().map(|g| g.diameter).fold(f64::INFINITY, f64::min)
    }

    /// Interface fluxes of element `e`, shared verbatim by both schemes.
    pub fn interface_terms(&self, state: &[ConservedState], e: usize) -> Vec<InterfaceTerm> {
        let nq = self.nq();
        let g = &self.geo[e];
        let mut out = Vec::new();
        for (f, face) in self.ops.rule.faces.iter().enumerate() {
            let n = g.face_normal[f];
            for (k, (&node, &w)) in face.nodes.iter().zip(&face.weights).enumerate() {
                let ui = state[e * nq + node];
                let exterior = self.conn.exterior[e][f][k];
                let outer = match exterior {
                    Exterior::Node(j) => state[j],
                    Exterior::Wall => mirror_state(ui, n),
                };
                let weight = w * g.face_scale[f];
                let lambda = max_wave_speed(ui, outer, n, &self.params);
                let flux = interface_flux(ui, outer, n, &self.params, self.interface_dissipation) * weight;
                out.push(InterfaceTerm {
                    node,
                    exterior,
                    weight,
                    normal: n,
                    lambda,
                    flux,
                });
            }
        }
        out
    }
}

/// One face-node contribution `w f*(u_i, u⁺, n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceTerm {
    pub node: usize,
    pub exterior: Exterior,
    pub weight: f64,
    pub normal: [f64; 2],
    pub lambda: f64,
    pub flux: ConservedState,
}

/// Per-element flux exchange: `m_i du_i/dt = −Σ_j F_ij − Σ interface_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementFluxes {
    pub nq: usize,
    /// `F_ij`, row-major, zero diagonal.
    pub intra: Vec<ConservedState>,
    pub interface: Vec<InterfaceTerm>,
}

impl ElementFluxes {
    pub fn get(&self, i: usize, j: usize) -> ConservedState {
        self.intra[i * self.nq + j]
    }

    /// `Σ_j F_ij` plus interface terms, per node.
    pub fn residual(&self) -> Vec<ConservedState> {
        let nq = self.nq;
        let mut r: Vec<ConservedState> = (0..nq)
            .map(|i| {
                self.intra[i * nq..(i + 1) * nq]
                    .iter()
                    .fold(ConservedState::ZERO, |acc, f| acc + *f)
            })
            .collect();
        for t in &self.interface {
            r[t.node] += t.flux;
        }
        r
    }
}

/// Nodal quantities reused across pair loops.
#[derive(Clone, Copy, Debug)]
pub(crate) struct NodeVals {
    pub u: ConservedState,
    pub vx: f64,
    pub vy: f64,
    pub b: f64,
}

impl NodeVals {
    pub fn gather(disc: &Discretization, state: &[ConservedState], e: usize) -> Vec<NodeVals> {
        let nq = disc.nq();
        (0..nq)
            .map(|i| {
                let u = state[e * nq + i];
                let (vx, vy) = u.velocity(disc.params.dry_tol);
                NodeVals {
                    u,
                    vx,
                    vy,
                    b: disc.bathymetry[e * nq + i],
                }
            })
            .collect()
    }
}

/// Volume exchange for the pair `(i, j)` given physical `S_ij = (sx, sy)`:
/// returns `(F_ij, F_ji)` without viscosity.
#[inline]
pub(crate) fn pair_flux(a: &NodeVals, c: &NodeVals, sx: f64, sy: f64, g: f64) -> (ConservedState, ConservedState) {
    let h_avg = 0.5 * (a.u.h + c.u.h);
    let h2_avg = 0.5 * (a.u.h * a.u.h + c.u.h * c.u.h);
    let p = g * h_avg * h_avg - 0.5 * g * h2_avg;
    let hu = 0.5 * (a.u.hu + c.u.hu);
    let hv = 0.5 * (a.u.hv + c.u.hv);
    let u = 0.5 * (a.vx + c.vx);
    let v = 0.5 * (a.vy + c.vy);
    // 2 (sx f_x + sy f_y)
    let f = ConservedState::new(
        2.0 * (sx * hu + sy * hv),
        2.0 * (sx * (hu * u + p) + sy * hv * u),
        2.0 * (sx * hu * v + sy * (hv * v + p)),
    );
    let db = c.b - a.b;
    let src_i = ConservedState::new(0.0, g * a.u.h * sx * db, g * a.u.h * sy * db);
    let src_j = ConservedState::new(0.0, g * c.u.h * sx * db, g * c.u.h * sy * db);
    (f + src_i, -f + src_j)
}

/// Positivity floor applied after each stage: heights below `dry_tol` are
/// raised to it and their momenta cleared.
pub fn floor_dry(state: &mut [ConservedState], p: &PhysParams) {
    for u in state.iter_mut() {
        if u.h <= p.dry_tol {
            *u = ConservedState::new(p.dry_tol, 0.0, 0.0);
        } else if u.h <= p.momentum_cutoff {
            *u = ConservedState::new(u.h, 0.0, 0.0);
        }
    }
}
