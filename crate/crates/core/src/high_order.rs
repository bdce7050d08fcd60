//! Entropy-stable DG-SBP right-hand side in flux-exchange form.

use rayon::prelude::*;

use crate::discretization::{pair_flux, Discretization, ElementFluxes, NodeVals};
use crate::physics::ConservedState;

/// High-order flux matrix of element `e`.
///
/// `F_ij = 2 (S_x,ij f_x + S_y,ij f_y)(u_i, u_j) + g h_i S_ij (b_j − b_i)`
/// with `S = Q − ½B`, plus the interface terms at face nodes.
pub fn flux_matrix_high(disc: &Discretization, state: &[ConservedState], e: usize) -> ElementFluxes {
    let nq = disc.nq();
    let vals = NodeVals::gather(disc, state, e);
    let g = &disc.geo[e];
    let cx = g.operator_weights(0);
    let cy = g.operator_weights(1);
    let [sr, ss] = &disc.s_ref;
    let grav = disc.params.g;
    let mut intra = vec![ConservedState::ZERO; nq * nq];
    for i in 0..nq {
        for j in (i + 1)..nq {
            let k = i * nq + j;
            let sx = cx[0] * sr[k] + cx[1] * ss[k];
            let sy = cy[0] * sr[k] + cy[1] * ss[k];
            let (fij, fji) = pair_flux(&vals[i], &vals[j], sx, sy, grav);
            intra[k] = fij;
            intra[j * nq + i] = fji;
        }
    }
    ElementFluxes {
        nq,
        intra,
        interface: disc.interface_terms(state, e),
    }
}

/// High-order `du/dt`.
pub fn rhs_high(disc: &Discretization, state: &[ConservedState]) -> Vec<ConservedState> {
    let nq = disc.nq();
    let per_elem: Vec<Vec<ConservedState>> = (0..disc.num_elements())
        .into_par_iter()
        .map(|e| {
            flux_matrix_high(disc, state, e)
                .residual()
                .iter()
                .enumerate()
                .map(|(i, r)| *r * (-1.0 / disc.masses[e * nq + i]))
                .collect()
        })
        .collect();
    per_elem.concat()
}

/// Semi-discrete entropy rate `Σ_i v_iᵀ m_i du_i/dt`.
pub fn entropy_rate(disc: &Discretization, state: &[ConservedState], dudt: &[ConservedState]) -> f64 {
    state
        .iter()
        .zip(dudt)
        .zip(&disc.masses)
        .zip(&disc.bathymetry)
        .map(|(((u, du), m), b)| m * du.dot(crate::physics::entropy_variables(*u, *b, &disc.params)))
        .sum()
}
