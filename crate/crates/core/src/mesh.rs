//! Interval and split-quad triangle meshes, affine geometry and face-node
//! connectivity.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::reference::{QuadratureRule, SbpOperators};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTag {
    Periodic,
    WallReflective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceNeighbor {
    Interior { elem: usize, face: usize },
    Wall,
}

/// Axis-aligned reflective segment inside the domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallSegment {
    pub start: [f64; 2],
    pub end: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub dim: usize,
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub bc: [BoundaryTag; 2],
    pub vertices: Vec<[f64; 2]>,
    pub elements: Vec<Vec<usize>>,
    /// Vertex coordinates per element, unwrapped across periodic seams.
    pub element_vertices: Vec<Vec<[f64; 2]>>,
    pub neighbors: Vec<Vec<FaceNeighbor>>,
    pub internal_walls: Vec<WallSegment>,
}

impl Mesh {
    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_faces(&self) -> usize {
        self.dim + 1
    }

    pub fn period(&self, d: usize) -> Option<f64> {
        (self.bc[d] == BoundaryTag::Periodic && d < self.dim).then(|| self.upper[d] - self.lower[d])
    }

    pub fn domain_measure(&self) -> f64 {
        match self.dim {
            1 => self.upper[0] - self.lower[0],
            _ => (self.upper[0] - self.lower[0]) * (self.upper[1] - self.lower[1]),
        }
    }

    /// Endpoints of face `f` of element `e` in element coordinates.
    pub fn face_vertices(&self, e: usize, f: usize) -> Vec<[f64; 2]> {
        let v = &self.element_vertices[e];
        match self.dim {
            1 => vec![v[f]],
            _ => vec![v[f], v[(f + 1) % 3]],
        }
    }

    /// Maps a reference point into element `e`.
    pub fn map_point(&self, e: usize, r: [f64; 2]) -> [f64; 2] {
        let v = &self.element_vertices[e];
        match self.dim {
            1 => [v[0][0] + 0.5 * (r[0] + 1.0) * (v[1][0] - v[0][0]), 0.0],
            _ => {
                let a = 0.5 * (r[0] + 1.0);
                let b = 0.5 * (r[1] + 1.0);
                [
                    v[0][0] + a * (v[1][0] - v[0][0]) + b * (v[2][0] - v[0][0]),
                    v[0][1] + a * (v[1][1] - v[0][1]) + b * (v[2][1] - v[0][1]),
                ]
            }
        }
    }

    /// Legacy-VTK ASCII dump of the triangulation.
    pub fn to_vtk(&self) -> String {
        let mut s = String::from("# vtk DataFile Version 3.0\nmesh\nASCII\nDATASET UNSTRUCTURED_GRID\n");
        let npts: usize = self.element_vertices.iter().map(Vec::len).sum();
        s += &format!("POINTS {npts} double\n");
        for v in self.element_vertices.iter().flatten() {
            s += &format!("{:.16e} {:.16e} 0\n", v[0], v[1]);
        }
        let nv = self.dim + 1;
        s += &format!("CELLS {} {}\n", self.num_elements(), self.num_elements() * (nv + 1));
        for e in 0..self.num_elements() {
            s += &nv.to_string();
            for k in 0..nv {
                s += &format!(" {}", e * nv + k);
            }
            s.push('\n');
        }
        s += &format!("CELL_TYPES {}\n", self.num_elements());
        let cell_type = if self.dim == 1 { 3 } else { 5 };
        for _ in 0..self.num_elements() {
            s += &format!("{cell_type}\n");
        }
        s
    }
}

/// `K` equal elements on `[a, b]`.
pub fn build_uniform_mesh_1d(k: usize, domain: [f64; 2], bc: BoundaryTag) -> Result<Mesh> {
    let [a, b] = domain;
    if k == 0 || !(b > a) {
        return Err(SolverError::Mesh(format!(
            "need K >= 1 and a < b, got K={k} [{a}, {b}]"
        )));
    }
    let dx = (b - a) / k as f64;
    let periodic = bc == BoundaryTag::Periodic;
    let nverts = if periodic { k } else { k + 1 };
    let vertices = (0..nverts).map(|i| [a + i as f64 * dx, 0.0]).collect();
    let mut elements = Vec::with_capacity(k);
    let mut element_vertices = Vec::with_capacity(k);
    let mut neighbors = Vec::with_capacity(k);
    for e in 0..k {
        let right = if periodic { (e + 1) % k } else { e + 1 };
        elements.push(vec![e, right]);
        let xr = if e + 1 == k { b } else { a + (e + 1) as f64 * dx };
        element_vertices.push(vec![[a + e as f64 * dx, 0.0], [xr, 0.0]]);
        let left_nb = if e > 0 {
            FaceNeighbor::Interior { elem: e - 1, face: 1 }
        } else if periodic {
            FaceNeighbor::Interior { elem: k - 1, face: 1 }
        } else {
            FaceNeighbor::Wall
        };
        let right_nb = if e + 1 < k {
            FaceNeighbor::Interior { elem: e + 1, face: 0 }
        } else if periodic {
            FaceNeighbor::Interior { elem: 0, face: 0 }
        } else {
            FaceNeighbor::Wall
        };
        neighbors.push(vec![left_nb, right_nb]);
    }
    Ok(Mesh {
        dim: 1,
        lower: [a, 0.0],
        upper: [b, 0.0],
        bc: [bc, bc],
        vertices,
        elements,
        element_vertices,
        neighbors,
        internal_walls: Vec::new(),
    })
}

/// `nx × ny` quadrilateral grid, each cell split along its lower-left to
/// upper-right diagonal. `bc` gives the closure in x and y.
pub fn build_split_quad_trimesh(
    nx: usize,
    ny: usize,
    lower: [f64; 2],
    upper: [f64; 2],
    bc: [BoundaryTag; 2],
    internal_walls: &[WallSegment],
) -> Result<Mesh> {
    if nx == 0 || ny == 0 || !(upper[0] > lower[0]) || !(upper[1] > lower[1]) {
        return Err(SolverError::Mesh(format!("bad grid {nx}x{ny} on {lower:?}..{upper:?}")));
    }
    let hx = (upper[0] - lower[0]) / nx as f64;
    let hy = (upper[1] - lower[1]) / ny as f64;
    let px = bc[0] == BoundaryTag::Periodic;
    let py = bc[1] == BoundaryTag::Periodic;
    let vx = if px { nx } else { nx + 1 };
    let vy = if py { ny } else { ny + 1 };
    let xs = |i: usize| if i == nx { upper[0] } else { lower[0] + i as f64 * hx };
    let ys = |j: usize| if j == ny { upper[1] } else { lower[1] + j as f64 * hy };

    let mut vertices = Vec::with_capacity(vx * vy);
    for j in 0..vy {
        for i in 0..vx {
            vertices.push([xs(i), ys(j)]);
        }
    }
    let vid = |i: usize, j: usize| (j % vy) * vx + (i % vx);
    // triangle 0 of cell (i, j): (00, 10, 11); triangle 1: (00, 11, 01)
    let tri = |i: usize, j: usize, t: usize| 2 * (j * nx + i) + t;

    let mut elements = Vec::with_capacity(2 * nx * ny);
    let mut element_vertices = Vec::with_capacity(2 * nx * ny);
    let mut neighbors = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v11, v01) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
            let (p00, p10, p11, p01) = (
                [xs(i), ys(j)],
                [xs(i + 1), ys(j)],
                [xs(i + 1), ys(j + 1)],
                [xs(i), ys(j + 1)],
            );
            elements.push(vec![v00, v10, v11]);
            element_vertices.push(vec![p00, p10, p11]);
            elements.push(vec![v00, v11, v01]);
            element_vertices.push(vec![p00, p11, p01]);

            let below = if j > 0 {
                FaceNeighbor::Interior {
                    elem: tri(i, j - 1, 1),
                    face: 1,
                }
            } else if py {
                FaceNeighbor::Interior {
                    elem: tri(i, ny - 1, 1),
                    face: 1,
                }
            } else {
                FaceNeighbor::Wall
            };
            let right = if i + 1 < nx {
                FaceNeighbor::Interior {
                    elem: tri(i + 1, j, 1),
                    face: 2,
                }
            } else if px {
                FaceNeighbor::Interior {
                    elem: tri(0, j, 1),
                    face: 2,
                }
            } else {
                FaceNeighbor::Wall
            };
            let above = if j + 1 < ny {
                FaceNeighbor::Interior {
                    elem: tri(i, j + 1, 0),
                    face: 0,
                }
            } else if py {
                FaceNeighbor::Interior {
                    elem: tri(i, 0, 0),
                    face: 0,
                }
            } else {
                FaceNeighbor::Wall
            };
            let left = if i > 0 {
                FaceNeighbor::Interior {
                    elem: tri(i - 1, j, 0),
                    face: 1,
                }
            } else if px {
                FaceNeighbor::Interior {
                    elem: tri(nx - 1, j, 0),
                    face: 1,
                }
            } else {
                FaceNeighbor::Wall
            };
            let diag0 = FaceNeighbor::Interior {
                elem: tri(i, j, 1),
                face: 0,
            };
            let diag1 = FaceNeighbor::Interior {
                elem: tri(i, j, 0),
                face: 2,
            };
            neighbors.push(vec![below, right, diag0]);
            neighbors.push(vec![diag1, above, left]);
        }
    }

    let mut mesh = Mesh {
        dim: 2,
        lower,
        upper,
        bc,
        vertices,
        elements,
        element_vertices,
        neighbors,
        internal_walls: internal_walls.to_vec(),
    };
    for wall in internal_walls {
        apply_internal_wall(&mut mesh, wall, hx, hy)?;
    }
    Ok(mesh)
}

fn apply_internal_wall(mesh: &mut Mesh, wall: &WallSegment, hx: f64, hy: f64) -> Result<()> {
    let tol = 1e-10 * hx.min(hy);
    let on_grid = |v: f64, lo: f64, h: f64| {
        let k = ((v - lo) / h).round();
        (v - (lo + k * h)).abs() <= tol
    };
    let vertical = (wall.start[0] - wall.end[0]).abs() <= tol;
    let horizontal = (wall.start[1] - wall.end[1]).abs() <= tol;
    let aligned = (vertical || horizontal)
        && on_grid(wall.start[0], mesh.lower[0], hx)
        && on_grid(wall.end[0], mesh.lower[0], hx)
        && on_grid(wall.start[1], mesh.lower[1], hy)
        && on_grid(wall.end[1], mesh.lower[1], hy);
    if !aligned {
        return Err(SolverError::Mesh(format!(
            "wall segment {:?} -> {:?} is not aligned with mesh lines",
            wall.start, wall.end
        )));
    }
    let within = |p: [f64; 2]| {
        let (lo, hi) = (
            [wall.start[0].min(wall.end[0]), wall.start[1].min(wall.end[1])],
            [wall.start[0].max(wall.end[0]), wall.start[1].max(wall.end[1])],
        );
        p[0] >= lo[0] - tol && p[0] <= hi[0] + tol && p[1] >= lo[1] - tol && p[1] <= hi[1] + tol
    };
    let mut hits = 0;
    for e in 0..mesh.num_elements() {
        for f in 0..3 {
            if !mesh.face_vertices(e, f).into_iter().all(within) {
                continue;
            }
            if let FaceNeighbor::Interior { elem, face } = mesh.neighbors[e][f] {
                mesh.neighbors[e][f] = FaceNeighbor::Wall;
                mesh.neighbors[elem][face] = FaceNeighbor::Wall;
                hits += 1;
            }
        }
    }
    if hits == 0 && (wall.start[0] - wall.end[0]).hypot(wall.start[1] - wall.end[1]) > tol {
        return Err(SolverError::Mesh(format!(
            "wall segment {:?} -> {:?} covers no interior face",
            wall.start, wall.end
        )));
    }
    Ok(())
}

/// Rounds `v` to the nearest grid line `lo + k h`.
pub fn snap_to_grid(v: f64, lo: f64, h: f64) -> f64 {
    lo + ((v - lo) / h).round() * h
}

/// Constant affine factors of one element.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementGeometry {
    /// Area (length) ratio physical / reference.
    pub jac: f64,
    /// `metric[a][d]` = d(reference coordinate a) / d(physical coordinate d).
    pub metric: [[f64; 2]; 2],
    /// Physical / reference face-weight ratio per face.
    pub face_scale: Vec<f64>,
    /// Outward unit normal per face.
    pub face_normal: Vec<[f64; 2]>,
    /// Width in 1D, twice the inradius in 2D.
    pub diameter: f64,
}

impl ElementGeometry {
    /// Physical coefficient multiplying the reference operators `(Q_r, Q_s)`
    /// to give `Q_d`: `J (r_d, s_d)`.
    pub fn operator_weights(&self, d: usize) -> [f64; 2] {
        [self.jac * self.metric[0][d], self.jac * self.metric[1][d]]
    }
}

pub fn compute_geometric_factors(mesh: &Mesh, ops: &SbpOperators) -> Result<Vec<ElementGeometry>> {
    let faces = &ops.rule.faces;
    (0..mesh.num_elements())
        .map(|e| {
            let v = &mesh.element_vertices[e];
            let (jac, metric, diameter) = match mesh.dim {
                1 => {
                    let dx = v[1][0] - v[0][0];
                    (0.5 * dx, [[2.0 / dx, 0.0], [0.0, 0.0]], dx)
                }
                _ => {
                    let (xr, xs) = (0.5 * (v[1][0] - v[0][0]), 0.5 * (v[2][0] - v[0][0]));
                    let (yr, ys) = (0.5 * (v[1][1] - v[0][1]), 0.5 * (v[2][1] - v[0][1]));
                    let jac = xr * ys - xs * yr;
                    let metric = [[ys / jac, -xs / jac], [-yr / jac, xr / jac]];
                    let area = 2.0 * jac;
                    let perim: f64 = (0..3)
                        .map(|k| {
                            let (a, b) = (v[k], v[(k + 1) % 3]);
                            (b[0] - a[0]).hypot(b[1] - a[1])
                        })
                        .sum();
                    (jac, metric, 4.0 * area / perim)
                }
            };
            if !(jac > 0.0) {
                return Err(SolverError::Mesh(format!("element {e} has Jacobian {jac}")));
            }
            let mut face_scale = Vec::with_capacity(faces.len());
            let mut face_normal = Vec::with_capacity(faces.len());
            for face in faces {
                let n = face.normal;
                let scaled = [
                    jac * (metric[0][0] * n[0] + metric[1][0] * n[1]),
                    jac * (metric[0][1] * n[0] + metric[1][1] * n[1]),
                ];
                let len = scaled[0].hypot(scaled[1]);
                face_scale.push(len);
                face_normal.push([scaled[0] / len, scaled[1] / len]);
            }
            Ok(ElementGeometry {
                jac,
                metric,
                face_scale,
                face_normal,
                diameter,
            })
        })
        .collect()
}

/// Exterior trace source for one face node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exterior {
    /// Global index of the matched node.
    Node(usize),
    Wall,
}

/// `exterior[e][f][k]` for face node `k` of face `f` of element `e`.
#[derive(Clone, Debug)]
pub struct FaceConnectivity {
    pub exterior: Vec<Vec<Vec<Exterior>>>,
}

pub fn build_face_connectivity(mesh: &Mesh, rule: &QuadratureRule) -> Result<FaceConnectivity> {
    let nq = rule.len();
    let phys = |e: usize, k: usize| mesh.map_point(e, rule.nodes[k]);
    let mut exterior = Vec::with_capacity(mesh.num_elements());
    for e in 0..mesh.num_elements() {
        let v = &mesh.element_vertices[e];
        let size = match mesh.dim {
            1 => (v[1][0] - v[0][0]).abs(),
            _ => (v[1][0] - v[0][0]).hypot(v[1][1] - v[0][1]),
        };
        let tol = 1e-10 * size;
        let mut per_face = Vec::with_capacity(rule.faces.len());
        for (f, face) in rule.faces.iter().enumerate() {
            let ext = match mesh.neighbors[e][f] {
                FaceNeighbor::Wall => vec![Exterior::Wall; face.nodes.len()],
                FaceNeighbor::Interior { elem, face: nf } => {
                    let other = &rule.faces[nf];
                    face.nodes
                        .iter()
                        .enumerate()
                        .map(|(k, &node)| {
                            let p = phys(e, node);
                            other
                                .nodes
                                .iter()
                                .find(|&&m| periodic_distance(mesh, p, phys(elem, m)) <= tol)
                                .map(|&m| Exterior::Node(elem * nq + m))
                                .ok_or(SolverError::UnmatchedFaceNode {
                                    elem: e,
                                    face: f,
                                    node: k,
                                })
                        })
                        .collect::<Result<Vec<_>>>()?
                }
            };
            per_face.push(ext);
        }
        exterior.push(per_face);
    }
    Ok(FaceConnectivity { exterior })
}

fn periodic_distance(mesh: &Mesh, a: [f64; 2], b: [f64; 2]) -> f64 {
    let mut d = [a[0] - b[0], a[1] - b[1]];
    for (axis, delta) in d.iter_mut().enumerate() {
        if let Some(l) = mesh.period(axis) {
            *delta -= (*delta / l).round() * l;
        }
    }
    d[0].hypot(d[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{build_reference, NodeFamily};

    #[test]
    fn two_periodic_intervals_are_linked() {
        let m = build_uniform_mesh_1d(2, [-1.0, 1.0], BoundaryTag::Periodic).unwrap();
        assert_eq!(m.neighbors[0][1], FaceNeighbor::Interior { elem: 1, face: 0 });
        assert_eq!(m.neighbors[1][1], FaceNeighbor::Interior { elem: 0, face: 0 });
        assert_eq!(m.neighbors[0][0], FaceNeighbor::Interior { elem: 1, face: 1 });
    }

    #[test]
    fn fine_interval_mesh_has_eighth_boundaries() {
        let m = build_uniform_mesh_1d(128, [-1.0, 1.0], BoundaryTag::Periodic).unwrap();
        let dx = m.element_vertices[0][1][0] - m.element_vertices[0][0][0];
        assert!((dx - 1.0 / 64.0).abs() < 1e-15);
        for x in [-0.125, 0.125] {
            assert!(m.element_vertices.iter().any(|v| (v[0][0] - x).abs() < 1e-14));
        }
    }

    #[test]
    fn single_wall_interval() {
        let m = build_uniform_mesh_1d(1, [0.0, 1.0], BoundaryTag::WallReflective).unwrap();
        assert_eq!(m.neighbors[0], vec![FaceNeighbor::Wall, FaceNeighbor::Wall]);
    }

    #[test]
    fn unit_square_splits_into_two() {
        let m = build_split_quad_trimesh(1, 1, [0.0, 0.0], [1.0, 1.0], [BoundaryTag::WallReflective; 2], &[]).unwrap();
        assert_eq!(m.num_elements(), 2);
        assert_eq!(m.neighbors[0][2], FaceNeighbor::Interior { elem: 1, face: 0 });
        assert_eq!(m.neighbors[1][0], FaceNeighbor::Interior { elem: 0, face: 2 });
        let walls = m
            .neighbors
            .iter()
            .flatten()
            .filter(|n| **n == FaceNeighbor::Wall)
            .count();
        assert_eq!(walls, 4);
    }

    #[test]
    fn dam_grid_walls() {
        let gap = snap_to_grid(0.1, -1.0, 2.0 / 32.0);
        let walls = [
            WallSegment {
                start: [0.0, -1.0],
                end: [0.0, -gap],
            },
            WallSegment {
                start: [0.0, gap],
                end: [0.0, 1.0],
            },
        ];
        let m = build_split_quad_trimesh(
            48,
            32,
            [-1.0, -1.0],
            [2.0, 1.0],
            [BoundaryTag::WallReflective; 2],
            &walls,
        )
        .unwrap();
        assert_eq!(m.num_elements(), 3072);
        let mut on_line = 0;
        for e in 0..m.num_elements() {
            for f in 0..3 {
                let fv = m.face_vertices(e, f);
                if fv.iter().all(|p| p[0].abs() < 1e-12) {
                    let ymid = 0.5 * (fv[0][1] + fv[1][1]);
                    let expect_wall = ymid.abs() >= 0.1;
                    assert_eq!(m.neighbors[e][f] == FaceNeighbor::Wall, expect_wall, "y={ymid}");
                    on_line += 1;
                }
            }
        }
        assert_eq!(on_line, 64);
    }

    #[test]
    fn misaligned_wall_is_rejected() {
        let walls = [WallSegment {
            start: [0.05, -1.0],
            end: [0.05, 1.0],
        }];
        let r = build_split_quad_trimesh(4, 4, [-1.0, -1.0], [1.0, 1.0], [BoundaryTag::WallReflective; 2], &walls);
        assert!(r.is_err());
    }

    #[test]
    fn periodic_square_matches_opposite_sides() {
        let m = build_split_quad_trimesh(2, 2, [-1.0, -1.0], [1.0, 1.0], [BoundaryTag::Periodic; 2], &[]).unwrap();
        assert!(m.neighbors.iter().flatten().all(|n| *n != FaceNeighbor::Wall));
        let ops = build_reference(2, 2, NodeFamily::GaussLegendreEdge).unwrap();
        let conn = build_face_connectivity(&m, &ops.rule).unwrap();
        let nq = ops.num_nodes();
        // element 0 face 0 sits on y = -1 and must see nodes on y = +1
        for (k, ext) in conn.exterior[0][0].iter().enumerate() {
            let Exterior::Node(g) = *ext else { panic!("wall") };
            let p = m.map_point(g / nq, ops.rule.nodes[g % nq]);
            let q = m.map_point(0, ops.rule.nodes[ops.rule.faces[0].nodes[k]]);
            assert!((p[1] - 1.0).abs() < 1e-12);
            assert!((p[0] - q[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn reference_element_maps_to_itself() {
        let ops = build_reference(2, 1, NodeFamily::GaussLegendreEdge).unwrap();
        let mut m =
            build_split_quad_trimesh(1, 1, [0.0, 0.0], [1.0, 1.0], [BoundaryTag::WallReflective; 2], &[]).unwrap();
        m.element_vertices[0] = vec![[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]];
        m.element_vertices[1] = vec![[-2.0, -2.0], [2.0, -2.0], [-2.0, 2.0]];
        let geo = compute_geometric_factors(&m, &ops).unwrap();
        assert!((geo[0].jac - 1.0).abs() < 1e-15);
        assert_eq!(geo[0].metric, [[1.0, 0.0], [0.0, 1.0]]);
        assert!((geo[1].jac - 4.0).abs() < 1e-15);
        for f in 0..3 {
            assert!((geo[1].face_normal[f][0] - ops.rule.faces[f].normal[0]).abs() < 1e-15);
            assert!((geo[1].face_normal[f][1] - ops.rule.faces[f].normal[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn interval_masses_scale_with_width() {
        let ops = build_reference(1, 3, NodeFamily::GaussLobattoEdge).unwrap();
        let m = build_uniform_mesh_1d(4, [0.0, 2.0], BoundaryTag::Periodic).unwrap();
        let geo = compute_geometric_factors(&m, &ops).unwrap();
        for g in &geo {
            assert!((g.jac - 0.25).abs() < 1e-15);
        }
    }

    fn meshes() -> Vec<Mesh> {
        vec![
            build_uniform_mesh_1d(5, [-1.0, 2.0], BoundaryTag::Periodic).unwrap(),
            build_split_quad_trimesh(3, 2, [-1.0, 0.0], [2.0, 1.0], [BoundaryTag::Periodic; 2], &[]).unwrap(),
            build_split_quad_trimesh(
                4,
                3,
                [0.0, 0.0],
                [1.0, 3.0],
                [BoundaryTag::WallReflective, BoundaryTag::Periodic],
                &[],
            )
            .unwrap(),
        ]
    }

    #[test]
    fn matching_is_involutive_and_geometric_closure_holds() {
        for mesh in meshes() {
            let dim = mesh.dim;
            for family in [NodeFamily::GaussLegendreEdge, NodeFamily::GaussLobattoEdge] {
                let ops = build_reference(dim, 2, family).unwrap();
                let nq = ops.num_nodes();
                let geo = compute_geometric_factors(&mesh, &ops).unwrap();
                let conn = build_face_connectivity(&mesh, &ops.rule).unwrap();
                let mut area = 0.0;
                for e in 0..mesh.num_elements() {
                    area += geo[e].jac * ops.weights().iter().sum::<f64>();
                    let mut closure = [0.0; 2];
                    for (f, face) in ops.rule.faces.iter().enumerate() {
                        for (k, (&node, w)) in face.nodes.iter().zip(&face.weights).enumerate() {
                            for d in 0..2 {
                                closure[d] += w * geo[e].face_scale[f] * geo[e].face_normal[f][d];
                            }
                            let Exterior::Node(g) = conn.exterior[e][f][k] else {
                                continue;
                            };
                            let (oe, on) = (g / nq, g % nq);
                            let back = (0..ops.rule.faces.len())
                                .flat_map(|of| {
                                    let cf = &conn.exterior[oe][of];
                                    ops.rule.faces[of]
                                        .nodes
                                        .iter()
                                        .zip(cf)
                                        .filter(|(n, _)| **n == on)
                                        .map(|(_, x)| *x)
                                        .collect::<Vec<_>>()
                                })
                                .any(|x| x == Exterior::Node(e * nq + node));
                            assert!(back, "matching not involutive");
                        }
                    }
                    assert!(closure[0].abs() < 1e-12 && closure[1].abs() < 1e-12);
                }
                assert!((area - mesh.domain_measure()).abs() < 1e-12);
            }
        }
    }
}
