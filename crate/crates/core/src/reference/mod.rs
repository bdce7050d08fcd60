//! Diagonal-norm SBP operators on the reference interval and triangle.

pub mod basis;
mod line;
pub mod quadrature;
mod triangle;
mod verify;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};

pub use line::build_lobatto_sbp_1d;
pub use triangle::{build_triangle_sbp_operators, load_triangle_sbp_nodes, parse_node_table};
pub use verify::{verify_sbp, VerificationReport};

/// Face-node distribution on the triangle edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeFamily {
    /// Gauss-Legendre points on each edge (no vertex nodes).
    #[serde(rename = "gl")]
    GaussLegendreEdge,
    /// Gauss-Lobatto points on each edge (vertices shared by two faces).
    #[serde(rename = "glo")]
    GaussLobattoEdge,
}

impl NodeFamily {
    pub fn short_name(self) -> &'static str {
        match self {
            NodeFamily::GaussLegendreEdge => "gl",
            NodeFamily::GaussLobattoEdge => "glo",
        }
    }
}

impl fmt::Display for NodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for NodeFamily {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gl" | "gauss_legendre_edge" => Ok(NodeFamily::GaussLegendreEdge),
            "glo" | "gauss_lobatto_edge" => Ok(NodeFamily::GaussLobattoEdge),
            other => Err(SolverError::Config(format!("unknown node family '{other}'"))),
        }
    }
}

/// Nodes of one reference face.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceNodes {
    /// Volume-node indices, ordered along the face.
    pub nodes: Vec<usize>,
    /// Face quadrature weights in reference arc length.
    pub weights: Vec<f64>,
    /// Outward unit normal (constant along straight faces).
    pub normal: [f64; 2],
}

/// Volume quadrature with embedded face quadratures.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub dim: usize,
    pub degree: usize,
    pub family: NodeFamily,
    pub nodes: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub faces: Vec<FaceNodes>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Diagonal of `B_d`: face weight times normal component, summed over the
    /// faces containing each node.
    pub fn boundary_diagonal(&self, d: usize) -> Vec<f64> {
        let mut b = vec![0.0; self.len()];
        for face in &self.faces {
            for (&k, &w) in face.nodes.iter().zip(&face.weights) {
                b[k] += w * face.normal[d];
            }
        }
        b
    }
}

/// Reference SBP operators. Index 0 is the `r` (x) direction, 1 is `s` (y).
#[derive(Clone, Debug)]
pub struct SbpOperators {
    pub rule: QuadratureRule,
    pub q: [DMatrix<f64>; 2],
    pub b: [Vec<f64>; 2],
    pub d: [DMatrix<f64>; 2],
}

impl SbpOperators {
    pub fn dim(&self) -> usize {
        self.rule.dim
    }

    pub fn degree(&self) -> usize {
        self.rule.degree
    }

    pub fn num_nodes(&self) -> usize {
        self.rule.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.rule.weights
    }

    pub fn b_matrix(&self, d: usize) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.b[d].clone()))
    }

    /// Applies `D_d` to nodal values.
    pub fn differentiate(&self, d: usize, u: &[f64]) -> Vec<f64> {
        let n = self.num_nodes();
        (0..n).map(|i| (0..n).map(|j| self.d[d][(i, j)] * u[j]).sum()).collect()
    }
}

/// Builds the reference operators for a dimension, degree and node family.
pub fn build_reference(dim: usize, degree: usize, family: NodeFamily) -> Result<SbpOperators> {
    match dim {
        1 => build_lobatto_sbp_1d(degree),
        2 => {
            let rule = load_triangle_sbp_nodes(degree, family)?;
            build_triangle_sbp_operators(&rule, degree)
        }
        _ => Err(SolverError::Config(format!("unsupported dimension {dim}"))),
    }
}

/// SBP operators from a rule: an orthonormal modal basis fixes the action of
/// `Q` on `P^N` and a skew completion fills the remaining freedom.
pub(crate) fn sbp_from_rule(rule: QuadratureRule) -> Result<SbpOperators> {
    let nq = rule.len();
    let np = basis::mode_count(rule.dim, rule.degree);
    let mut v = DMatrix::zeros(nq, np);
    let mut vr = [DMatrix::zeros(nq, np), DMatrix::zeros(nq, np)];
    for (i, p) in rule.nodes.iter().enumerate() {
        let (vals, dr, ds) = basis::eval_modes(rule.dim, rule.degree, *p);
        for k in 0..np {
            v[(i, k)] = vals[k];
            vr[0][(i, k)] = dr[k];
            vr[1][(i, k)] = ds[k];
        }
    }
    let sv = v.clone().svd(false, false).singular_values;
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin < 1e-10 {
        return Err(SolverError::RankDeficient(smin));
    }

    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(rule.weights.clone()));
    let gram = v.transpose() * &m * &v;
    let gram_inv = gram.try_inverse().ok_or(SolverError::RankDeficient(0.0))?;
    let l = gram_inv * v.transpose() * &m;

    let mut q = [DMatrix::zeros(nq, nq), DMatrix::zeros(nq, nq)];
    let mut d = [DMatrix::zeros(nq, nq), DMatrix::zeros(nq, nq)];
    let b = [rule.boundary_diagonal(0), rule.boundary_diagonal(1)];
    for dir in 0..rule.dim {
        let bmat = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(b[dir].clone()));
        let g = &m * &vr[dir] - 0.5 * &bmat * &v;
        let vg = v.transpose() * &g;
        let x = 0.5 * (&vg - vg.transpose());
        let gl = &g * &l;
        let s = &gl - gl.transpose() - l.transpose() * x * &l;
        let s = 0.5 * (&s - s.transpose());
        q[dir] = s + 0.5 * bmat;
        let mut dd = q[dir].clone();
        for i in 0..nq {
            for j in 0..nq {
                dd[(i, j)] /= rule.weights[i];
            }
        }
        d[dir] = dd;
    }
    Ok(SbpOperators { rule, q, b, d })
}
