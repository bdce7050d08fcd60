use super::quadrature::{gauss_legendre, triangle_monomial_integral};
use super::{sbp_from_rule, verify_sbp, FaceNodes, NodeFamily, QuadratureRule, SbpOperators};
use crate::error::{Result, SolverError};

pub const MAX_DEGREE_TRI: usize = 4;

/// Reference triangle vertices; face `f` runs from vertex `f` to `f + 1`.
pub const TRIANGLE_VERTICES: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]];

fn asset(degree: usize, family: NodeFamily) -> Option<&'static str> {
    use NodeFamily::*;
    Some(match (family, degree) {
        (GaussLegendreEdge, 1) => include_str!("../../assets/tri_gl_n1.txt"),
        (GaussLegendreEdge, 2) => include_str!("../../assets/tri_gl_n2.txt"),
        (GaussLegendreEdge, 3) => include_str!("../../assets/tri_gl_n3.txt"),
        (GaussLegendreEdge, 4) => include_str!("../../assets/tri_gl_n4.txt"),
        (GaussLobattoEdge, 1) => include_str!("../../assets/tri_glo_n1.txt"),
        (GaussLobattoEdge, 2) => include_str!("../../assets/tri_glo_n2.txt"),
        (GaussLobattoEdge, 3) => include_str!("../../assets/tri_glo_n3.txt"),
        (GaussLobattoEdge, 4) => include_str!("../../assets/tri_glo_n4.txt"),
        _ => return None,
    })
}

/// Loads a bundled triangle node table and runs its moment checks.
pub fn load_triangle_sbp_nodes(degree: usize, family: NodeFamily) -> Result<QuadratureRule> {
    if !(1..=MAX_DEGREE_TRI).contains(&degree) {
        return Err(SolverError::UnsupportedDegree {
            element: "triangle",
            degree,
            min: 1,
            max: MAX_DEGREE_TRI,
        });
    }
    let name = format!("tri_{}_n{degree}", family.short_name());
    let text = asset(degree, family).ok_or_else(|| SolverError::NodeTable {
        name: name.clone(),
        reason: "missing".into(),
    })?;
    let rule = parse_node_table(&name, text, family)?;
    if rule.degree != degree {
        return Err(SolverError::NodeTable {
            name,
            reason: format!("header degree {} does not match {degree}", rule.degree),
        });
    }
    check_moments(&rule)?;
    Ok(rule)
}

/// Parses the plain-text node table format.
pub fn parse_node_table(name: &str, text: &str, family: NodeFamily) -> Result<QuadratureRule> {
    let bad = |reason: String| SolverError::NodeTable {
        name: name.to_string(),
        reason,
    };
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let mut numbers = |what: &str| -> Result<Vec<f64>> {
        let line = lines
            .next()
            .ok_or_else(|| bad(format!("unexpected end of file reading {what}")))?;
        line.split_whitespace()
            .filter(|t| *t != "face")
            .map(|t| t.parse::<f64>().map_err(|_| bad(format!("bad number '{t}' in {what}"))))
            .collect()
    };

    let header = numbers("header")?;
    if header.len() != 4 {
        return Err(bad("header must be `N d Nq Nf`".into()));
    }
    let (degree, dim, nq, nf) = (
        header[0] as usize,
        header[1] as usize,
        header[2] as usize,
        header[3] as usize,
    );
    if dim != 2 {
        return Err(bad(format!("expected dimension 2, found {dim}")));
    }
    let mut nodes = Vec::with_capacity(nq);
    let mut weights = Vec::with_capacity(nq);
    for _ in 0..nq {
        let row = numbers("node")?;
        if row.len() != 3 {
            return Err(bad("node lines must be `x y w`".into()));
        }
        nodes.push([row[0], row[1]]);
        weights.push(row[2]);
    }
    let mut faces = Vec::with_capacity(nf);
    for f in 0..nf {
        let count = numbers("face header")?;
        if count.len() != 1 {
            return Err(bad(format!("face {f}: expected `face n`")));
        }
        let n = count[0] as usize;
        let idx = numbers("face indices")?;
        let w = numbers("face weights")?;
        let normal = numbers("face normal")?;
        if idx.len() != n || w.len() != n || normal.len() != 2 {
            return Err(bad(format!("face {f}: inconsistent block sizes")));
        }
        let idx: Vec<usize> = idx.iter().map(|&i| i as usize).collect();
        if idx.iter().any(|&i| i >= nq) {
            return Err(bad(format!("face {f}: node index out of range")));
        }
        faces.push(FaceNodes {
            nodes: idx,
            weights: w,
            normal: [normal[0], normal[1]],
        });
    }
    if let Some(w) = weights
        .iter()
        .chain(faces.iter().flat_map(|f| f.weights.iter()))
        .find(|w| **w <= 0.0)
    {
        return Err(bad(format!("nonpositive weight {w}")));
    }
    Ok(QuadratureRule {
        dim,
        degree,
        family,
        nodes,
        weights,
        faces,
    })
}

fn check_moments(rule: &QuadratureRule) -> Result<()> {
    let n = rule.degree as u32;
    let vol_deg = 2 * n - 1;
    for a in 0..=vol_deg {
        for b in 0..=(vol_deg - a) {
            let q: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                .sum();
            let exact = triangle_monomial_integral(a, b);
            if (q - exact).abs() > 1e-13 {
                return Err(SolverError::MomentCheck(format!(
                    "volume monomial x^{a} y^{b}: {q} vs {exact}"
                )));
            }
        }
    }

    let (t, wt) = gauss_legendre(n as usize + 2);
    for (f, face) in rule.faces.iter().enumerate() {
        let va = TRIANGLE_VERTICES[f];
        let vb = TRIANGLE_VERTICES[(f + 1) % 3];
        let edge = [vb[0] - va[0], vb[1] - va[1]];
        let len = edge[0].hypot(edge[1]);
        let outward = [edge[1] / len, -edge[0] / len];
        if (face.normal[0] - outward[0]).abs() > 1e-14 || (face.normal[1] - outward[1]).abs() > 1e-14 {
            return Err(SolverError::MomentCheck(format!(
                "face {f}: normal is not outward unit"
            )));
        }
        for &k in &face.nodes {
            let p = rule.nodes[k];
            let cross = (p[0] - va[0]) * edge[1] - (p[1] - va[1]) * edge[0];
            if cross.abs() > 1e-14 {
                return Err(SolverError::MomentCheck(format!("face {f}: node {k} is off the edge")));
            }
        }
        for a in 0..=2 * n {
            for b in 0..=(2 * n - a) {
                let mono = |p: [f64; 2]| p[0].powi(a as i32) * p[1].powi(b as i32);
                let exact: f64 = t
                    .iter()
                    .zip(&wt)
                    .map(|(t, w)| {
                        let s = 0.5 * (t + 1.0);
                        w * 0.5 * len * mono([va[0] + s * edge[0], va[1] + s * edge[1]])
                    })
                    .sum();
                let q: f64 = face
                    .nodes
                    .iter()
                    .zip(&face.weights)
                    .map(|(&k, w)| w * mono(rule.nodes[k]))
                    .sum();
                if (q - exact).abs() > 1e-13 {
                    return Err(SolverError::MomentCheck(format!(
                        "face {f} monomial x^{a} y^{b}: {q} vs {exact}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Triangle SBP operators from a verified rule.
pub fn build_triangle_sbp_operators(rule: &QuadratureRule, degree: usize) -> Result<SbpOperators> {
    if rule.dim != 2 || rule.degree != degree {
        return Err(SolverError::NodeTable {
            name: format!("tri_{}_n{degree}", rule.family.short_name()),
            reason: format!("rule has dim {} degree {}", rule.dim, rule.degree),
        });
    }
    let ops = sbp_from_rule(rule.clone())?;
    let report = verify_sbp(&ops);
    if !report.passed() {
        let (what, residual) = report.worst();
        return Err(SolverError::OperatorResidual {
            what,
            residual,
            tolerance: report.tolerance,
        });
    }
    Ok(ops)
}
