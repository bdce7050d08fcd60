use serde::Serialize;

use super::SbpOperators;

/// Residuals of the SBP operator properties.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    /// Max nodal error of `D_d` on monomials of total degree ≤ N.
    pub exactness: f64,
    /// Max entry of `Q_d + Q_dᵀ − B_d`.
    pub sbp_identity: f64,
    /// Max row sum of `Q_d`.
    pub constants: f64,
    pub tolerance: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.exactness <= self.tolerance && self.sbp_identity <= self.tolerance && self.constants <= self.tolerance
    }

    pub fn worst(&self) -> (&'static str, f64) {
        [
            ("exactness", self.exactness),
            ("sbp identity", self.sbp_identity),
            ("constants", self.constants),
        ]
        .into_iter()
        .fold(
            ("exactness", f64::NEG_INFINITY),
            |acc, x| {
                if x.1 > acc.1 {
                    x
                } else {
                    acc
                }
            },
        )
    }
}

/// Measures exactness, the SBP identity and constant annihilation. Tolerance
/// is 1e-12 relative to the largest mass entry.
pub fn verify_sbp(ops: &SbpOperators) -> VerificationReport {
    let nq = ops.num_nodes();
    let dim = ops.dim();
    let n = ops.degree() as i32;
    let scale = ops.weights().iter().cloned().fold(0.0, f64::max).max(1.0);

    let mut exactness = 0.0f64;
    for a in 0..=n {
        let b_max = if dim == 1 { 0 } else { n - a };
        for b in 0..=b_max {
            let u: Vec<f64> = ops.rule.nodes.iter().map(|p| p[0].powi(a) * p[1].powi(b)).collect();
            for d in 0..dim {
                let du = ops.differentiate(d, &u);
                for (k, p) in ops.rule.nodes.iter().enumerate() {
                    let exact = match d {
                        0 if a > 0 => a as f64 * p[0].powi(a - 1) * p[1].powi(b),
                        1 if b > 0 => b as f64 * p[0].powi(a) * p[1].powi(b - 1),
                        _ => 0.0,
                    };
                    exactness = exactness.max((du[k] - exact).abs());
                }
            }
        }
    }

    let mut sbp_identity = 0.0f64;
    let mut constants = 0.0f64;
    for d in 0..dim {
        for i in 0..nq {
            let mut row = 0.0;
            for j in 0..nq {
                row += ops.q[d][(i, j)];
                let b = if i == j { ops.b[d][i] } else { 0.0 };
                sbp_identity = sbp_identity.max((ops.q[d][(i, j)] + ops.q[d][(j, i)] - b).abs());
            }
            constants = constants.max(row.abs());
        }
    }
    VerificationReport {
        exactness,
        sbp_identity,
        constants,
        tolerance: 1e-12 * scale,
    }
}
