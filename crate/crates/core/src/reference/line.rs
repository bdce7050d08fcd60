use super::quadrature::gauss_lobatto;
use super::{sbp_from_rule, FaceNodes, NodeFamily, QuadratureRule, SbpOperators};
use crate::error::{Result, SolverError};

pub const MAX_DEGREE_1D: usize = 7;

/// Gauss-Lobatto SBP operators on `[-1, 1]`.
pub fn build_lobatto_sbp_1d(degree: usize) -> Result<SbpOperators> {
    if !(1..=MAX_DEGREE_1D).contains(&degree) {
        return Err(SolverError::UnsupportedDegree {
            element: "interval",
            degree,
            min: 1,
            max: MAX_DEGREE_1D,
        });
    }
    let (x, w) = gauss_lobatto(degree + 1);
    let rule = QuadratureRule {
        dim: 1,
        degree,
        family: NodeFamily::GaussLobattoEdge,
        nodes: x.iter().map(|&x| [x, 0.0]).collect(),
        weights: w,
        faces: vec![
            FaceNodes {
                nodes: vec![0],
                weights: vec![1.0],
                normal: [-1.0, 0.0],
            },
            FaceNodes {
                nodes: vec![degree],
                weights: vec![1.0],
                normal: [1.0, 0.0],
            },
        ],
    };
    sbp_from_rule(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_matches_hand_operators() {
        let ops = build_lobatto_sbp_1d(1).unwrap();
        assert_eq!(ops.rule.nodes, vec![[-1.0, 0.0], [1.0, 0.0]]);
        assert_eq!(ops.rule.weights, vec![1.0, 1.0]);
        let expect = [[-0.5, 0.5], [-0.5, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((ops.q[0][(i, j)] - expect[i][j]).abs() < 1e-15);
            }
        }
        assert_eq!(ops.b[0], vec![-1.0, 1.0]);
    }

    #[test]
    fn degree_two_differentiates_square() {
        let ops = build_lobatto_sbp_1d(2).unwrap();
        let u: Vec<f64> = ops.rule.nodes.iter().map(|p| p[0] * p[0]).collect();
        let du = ops.differentiate(0, &u);
        for (p, d) in ops.rule.nodes.iter().zip(&du) {
            assert!((d - 2.0 * p[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn constants_are_annihilated() {
        for n in 1..=MAX_DEGREE_1D {
            let ops = build_lobatto_sbp_1d(n).unwrap();
            for i in 0..=n {
                let row: f64 = (0..=n).map(|j| ops.q[0][(i, j)]).sum();
                assert!(row.abs() < 1e-13, "N={n}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range_degree() {
        assert!(build_lobatto_sbp_1d(0).is_err());
        assert!(build_lobatto_sbp_1d(8).is_err());
    }
}
