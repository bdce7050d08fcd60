//! L2 errors against exact solutions and observed convergence rates.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::discretization::Discretization;
use crate::physics::ConservedState;
use crate::reference::basis::{eval_modes, mode_count};
use crate::reference::quadrature::{gauss_legendre, triangle_rule};

/// Nodal-to-modal projection and an overintegration rule for one element type.
#[derive(Clone, Debug)]
pub struct ErrorQuadrature {
    /// `(VᵀWV)⁻¹ VᵀW`, modes × nodes.
    pub projection: DMatrix<f64>,
    /// Basis values at the fine points, points × modes.
    pub fine_basis: DMatrix<f64>,
    pub fine_points: Vec<[f64; 2]>,
    pub fine_weights: Vec<f64>,
}

impl ErrorQuadrature {
    /// Fine rule exact to degree `2N + 2`.
    pub fn new(disc: &Discretization) -> Self {
        let dim = disc.dim();
        let n = disc.degree();
        let np = mode_count(dim, n);
        let nodes = &disc.ops.rule.nodes;
        let w = disc.ops.weights();
        let v = DMatrix::from_fn(nodes.len(), np, |i, k| eval_modes(dim, n, nodes[i]).0[k]);
        let vtw = DMatrix::from_fn(np, nodes.len(), |k, i| v[(i, k)] * w[i]);
        let gram = &vtw * &v;
        let projection = gram.try_inverse().expect("nodal set is unisolvent for P^N") * vtw;
        let (fine_points, fine_weights) = if dim == 1 {
            let (x, w) = gauss_legendre(n + 2);
            (x.into_iter().map(|x| [x, 0.0]).collect(), w)
        } else {
            triangle_rule(2 * n + 2)
        };
        let fine_basis = DMatrix::from_fn(fine_points.len(), np, |q, k| eval_modes(dim, n, fine_points[q]).0[k]);
        ErrorQuadrature {
            projection,
            fine_basis,
            fine_points,
            fine_weights,
        }
    }
}

/// Per-variable L2 errors `(h, hu, hv)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct L2Error {
    pub h: f64,
    pub hu: f64,
    pub hv: f64,
}

/// L2 error of the degree-N projection of `state` against `exact`, restricted
/// to points where `region` holds.
pub fn l2_error(
    disc: &Discretization,
    quad: &ErrorQuadrature,
    state: &[ConservedState],
    exact: impl Fn([f64; 2]) -> ConservedState,
    region: impl Fn([f64; 2]) -> bool,
) -> L2Error {
    let nq = disc.nq();
    let mut acc = [0.0; 3];
    let interp = &quad.fine_basis * &quad.projection;
    for e in 0..disc.num_elements() {
        let jac = disc.geo[e].jac;
        for (q, (&r, &w)) in quad.fine_points.iter().zip(&quad.fine_weights).enumerate() {
            let x = disc.mesh.map_point(e, r);
            if !region(x) {
                continue;
            }
            let mut uh = ConservedState::ZERO;
            for i in 0..nq {
                uh += state[e * nq + i] * interp[(q, i)];
            }
            let d = (uh - exact(x)).as_array();
            for c in 0..3 {
                acc[c] += jac * w * d[c] * d[c];
            }
        }
    }
    L2Error {
        h: acc[0].sqrt(),
        hu: acc[1].sqrt(),
        hv: acc[2].sqrt(),
    }
}

/// L2 distance between the degree-N projections of two nodal fields.
pub fn l2_distance(
    disc: &Discretization,
    quad: &ErrorQuadrature,
    a: &[ConservedState],
    b: &[ConservedState],
) -> L2Error {
    let diff: Vec<ConservedState> = a.iter().zip(b).map(|(a, b)| *a - *b).collect();
    l2_error(disc, quad, &diff, |_| ConservedState::ZERO, |_| true)
}

/// `log(e_k / e_{k+1}) / log(h_k / h_{k+1})` for successive levels.
pub fn observed_rates(sizes: &[f64], errors: &[f64]) -> Vec<f64> {
    sizes
        .windows(2)
        .zip(errors.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}
