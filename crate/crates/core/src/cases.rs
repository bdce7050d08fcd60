//! Benchmark problems: geometry, bathymetry, initial data and exact solutions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::discretization::Discretization;
use crate::error::{Result, SolverError};
use crate::low_order::{LowOrderOperators, DEFAULT_ALPHA, DEFAULT_P};
use crate::mesh::{build_split_quad_trimesh, build_uniform_mesh_1d, BoundaryTag, Mesh, WallSegment};
use crate::physics::{ConservedState, PhysParams};
use crate::reference::{build_reference, NodeFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseName {
    LakeAtRest,
    ParabolicBowl,
    TranslatingVortex,
    DamBreak,
    WaveOverBump,
    SineWave,
}

impl CaseName {
    pub const ALL: [CaseName; 6] = [
        CaseName::LakeAtRest,
        CaseName::ParabolicBowl,
        CaseName::TranslatingVortex,
        CaseName::DamBreak,
        CaseName::WaveOverBump,
        CaseName::SineWave,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseName::LakeAtRest => "lake_at_rest",
            CaseName::ParabolicBowl => "parabolic_bowl",
            CaseName::TranslatingVortex => "translating_vortex",
            CaseName::DamBreak => "dam_break",
            CaseName::WaveOverBump => "wave_over_bump",
            CaseName::SineWave => "sine_wave",
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseName {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        CaseName::ALL
            .into_iter()
            .find(|c| c.name() == key)
            .ok_or_else(|| SolverError::Config(format!("unknown case '{s}'")))
    }
}

/// Mesh resolution: element count in 1D or a quad grid in 2D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    Elements(usize),
    Grid(usize, usize),
}

impl Resolution {
    /// Doubles the resolution `levels` times.
    pub fn refined(self, levels: u32) -> Self {
        let f = 1usize << levels;
        match self {
            Resolution::Elements(k) => Resolution::Elements(k * f),
            Resolution::Grid(nx, ny) => Resolution::Grid(nx * f, ny * f),
        }
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Elements(k) => write!(f, "K={k}"),
            Resolution::Grid(nx, ny) => write!(f, "{nx}x{ny}"),
        }
    }
}

/// Vortex parameters.
pub const VORTEX_H_INF: f64 = 1.0;
pub const VORTEX_BETA: f64 = 5.0;
pub const VORTEX_VEL: [f64; 2] = [1.0, 0.0];

/// Bowl parameters.
pub const BOWL_H0: f64 = 8.0;
pub const BOWL_A: f64 = 2.0;
pub const BOWL_B: f64 = 2.0;

/// Dam gap half-width before snapping to the grid.
pub const DAM_GAP: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseSpec {
    pub name: CaseName,
    pub dim: usize,
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub bc: [BoundaryTag; 2],
    pub g: f64,
    pub t_end: f64,
    pub resolution: Resolution,
    pub degree: usize,
    /// Appendix-style sine wave with a signed height (rejected at validation).
    pub strict_sine: bool,
}

impl CaseSpec {
    pub fn new(name: CaseName) -> Self {
        let base = CaseSpec {
            name,
            dim: 2,
            lower: [-1.0, -1.0],
            upper: [1.0, 1.0],
            bc: [BoundaryTag::Periodic; 2],
            g: 9.81,
            t_end: 1.0,
            resolution: Resolution::Grid(16, 16),
            degree: 3,
            strict_sine: false,
        };
        match name {
            CaseName::LakeAtRest => CaseSpec {
                dim: 1,
                lower: [-1.0, 0.0],
                upper: [1.0, 0.0],
                resolution: Resolution::Elements(128),
                ..base
            },
            CaseName::ParabolicBowl => CaseSpec {
                dim: 1,
                lower: [-5.0, 0.0],
                upper: [5.0, 0.0],
                bc: [BoundaryTag::WallReflective; 2],
                resolution: Resolution::Elements(32),
                ..base
            },
            CaseName::TranslatingVortex => CaseSpec {
                lower: [-10.0, -5.0],
                upper: [10.0, 5.0],
                g: 2.0,
                t_end: 0.5,
                resolution: Resolution::Grid(8, 4),
                ..base
            },
            CaseName::DamBreak => CaseSpec {
                lower: [-1.0, -1.0],
                upper: [2.0, 1.0],
                bc: [BoundaryTag::WallReflective; 2],
                resolution: Resolution::Grid(48, 32),
                ..base
            },
            CaseName::WaveOverBump => CaseSpec {
                resolution: Resolution::Grid(64, 64),
                ..base
            },
            CaseName::SineWave => CaseSpec { t_end: 0.1, ..base },
        }
    }

    pub fn bathymetry(&self, x: [f64; 2]) -> f64 {
        match self.name {
            CaseName::LakeAtRest => lake_bottom(x[0]),
            CaseName::ParabolicBowl => BOWL_H0 * (x[0] / BOWL_A).powi(2),
            CaseName::WaveOverBump => 5.0 * (-25.0 * (x[0] * x[0] + x[1] * x[1])).exp(),
            _ => 0.0,
        }
    }

    /// Initial state at `x` in an element with centroid `centroid`.
    pub fn initial(&self, x: [f64; 2], centroid: [f64; 2]) -> ConservedState {
        match self.name {
            CaseName::DamBreak => {
                let h = if centroid[0] < 0.0 {
                    5.0
                } else {
                    crate::physics::PhysParams::DEFAULT_DRY_TOL
                };
                ConservedState::new(h, 0.0, 0.0)
            }
            CaseName::WaveOverBump => {
                let b = self.bathymetry(x);
                let h = ((-25.0 * (x[0] + 0.5).powi(2)).exp() + 2.0 - b).max(0.0);
                let u = if h > 2.0 { 1.0 } else { 0.0 };
                ConservedState::from_primitive(h, u, 0.0)
            }
            CaseName::SineWave => {
                let shift = if self.strict_sine { 0.0 } else { 2.0 };
                ConservedState::new(shift + (PI * x[0]).sin(), 0.0, 0.0)
            }
            _ => self.exact(x, 0.0).expect("case has an exact solution"),
        }
    }

    pub fn has_exact(&self) -> bool {
        matches!(
            self.name,
            CaseName::LakeAtRest | CaseName::ParabolicBowl | CaseName::TranslatingVortex
        )
    }

    pub fn exact(&self, x: [f64; 2], t: f64) -> Option<ConservedState> {
        match self.name {
            CaseName::LakeAtRest => {
                let b = lake_bottom(x[0]);
                Some(ConservedState::new(2.0f64.max(b) - b, 0.0, 0.0))
            }
            CaseName::ParabolicBowl => {
                let (h, u) = bowl_exact(x[0], t, self.g);
                Some(ConservedState::from_primitive(h, u, 0.0))
            }
            CaseName::TranslatingVortex => Some(vortex_exact(x, t, self.g)),
            _ => None,
        }
    }

    /// Whether `x` is inside the region where the exact solution is compared.
    pub fn in_error_region(&self, x: [f64; 2], t: f64) -> bool {
        match self.name {
            CaseName::ParabolicBowl => bowl_exact(x[0], t, self.g).0 > 0.0,
            _ => true,
        }
    }

    /// Reflective segments inside the domain, snapped to grid lines.
    pub fn internal_walls(&self, resolution: Resolution) -> Vec<WallSegment> {
        match (self.name, resolution) {
            (CaseName::DamBreak, Resolution::Grid(_, ny)) => {
                let gap = dam_gap(self.lower[1], self.upper[1], ny);
                vec![
                    WallSegment {
                        start: [0.0, self.lower[1]],
                        end: [0.0, -gap],
                    },
                    WallSegment {
                        start: [0.0, gap],
                        end: [0.0, self.upper[1]],
                    },
                ]
            }
            _ => Vec::new(),
        }
    }

    /// Rejects signed heights and non-finite data.
    pub fn validate_initial(&self, state: &[ConservedState]) -> Result<()> {
        if let Some((i, u)) = state.iter().enumerate().find(|(_, u)| !u.is_finite() || u.h < 0.0) {
            return Err(SolverError::InvalidState(format!(
                "{}: initial state at node {i} is {u:?}",
                self.name
            )));
        }
        Ok(())
    }
}

/// Discretization choices that are independent of the problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverOptions {
    pub family: NodeFamily,
    pub alpha: f64,
    pub p: f64,
    pub momentum_cutoff: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            family: NodeFamily::GaussLegendreEdge,
            alpha: DEFAULT_ALPHA,
            p: DEFAULT_P,
            momentum_cutoff: PhysParams::DEFAULT_MOMENTUM_CUTOFF,
        }
    }
}

impl CaseSpec {
    pub fn build_mesh(&self) -> Result<Mesh> {
        match (self.dim, self.resolution) {
            (1, Resolution::Elements(k)) => build_uniform_mesh_1d(k, [self.lower[0], self.upper[0]], self.bc[0]),
            (2, Resolution::Grid(nx, ny)) => build_split_quad_trimesh(
                nx,
                ny,
                self.lower,
                self.upper,
                self.bc,
                &self.internal_walls(self.resolution),
            ),
            (d, r) => Err(SolverError::Config(format!("resolution {r} does not fit a {d}D case"))),
        }
    }

    /// Builds the discretization and the validated initial state.
    pub fn setup(&self, opts: &SolverOptions) -> Result<(Discretization, Vec<ConservedState>)> {
        let mesh = self.build_mesh()?;
        let ops = build_reference(self.dim, self.degree, opts.family)?;
        let low = LowOrderOperators::build_connected(&ops, opts.alpha, opts.p)?;
        if low.alpha != opts.alpha {
            log::warn!(
                "graph disconnected at alpha = {}; using alpha = {:.2}",
                opts.alpha,
                low.alpha
            );
        }
        let params = PhysParams {
            momentum_cutoff: opts.momentum_cutoff,
            ..PhysParams::new(self.g)
        };
        let disc = Discretization::new(mesh, ops, low, params, |x| self.bathymetry(x))?;
        let state = self.initial_state(&disc);
        self.validate_initial(&state)?;
        Ok((disc, state))
    }

    pub fn initial_state(&self, disc: &Discretization) -> Vec<ConservedState> {
        let nq = disc.nq();
        let mut out = Vec::with_capacity(disc.num_nodes());
        for e in 0..disc.num_elements() {
            let pts = &disc.coords[e * nq..(e + 1) * nq];
            let c = centroid(&disc.mesh.element_vertices[e]);
            out.extend(pts.iter().map(|&x| self.initial(x, c)));
        }
        out
    }
}

fn centroid(v: &[[f64; 2]]) -> [f64; 2] {
    let n = v.len() as f64;
    let s = v.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
    [s[0] / n, s[1] / n]
}

/// Snapped dam gap half-width for `ny` cells across `[lo, hi]`.
pub fn dam_gap(lo: f64, hi: f64, ny: usize) -> f64 {
    let dy = (hi - lo) / ny as f64;
    crate::mesh::snap_to_grid(DAM_GAP, lo, dy)
}

pub fn lake_bottom(x: f64) -> f64 {
    (-20.0 * (x - 0.125) * (x + 0.125) + 2.0).max(0.0)
}

/// Height and velocity of the oscillating bowl solution.
pub fn bowl_exact(x: f64, t: f64, g: f64) -> (f64, f64) {
    let omega = (2.0 * g * BOWL_H0).sqrt() / BOWL_A;
    let c = BOWL_B * BOWL_B / (4.0 * g);
    let surface = BOWL_H0
        - c * (2.0 * omega * t).cos()
        - c
        - BOWL_B * x / (2.0 * BOWL_A) * (8.0 * BOWL_H0 / g).sqrt() * (omega * t).cos();
    let b = BOWL_H0 * (x / BOWL_A).powi(2);
    let h = (surface - b).max(0.0);
    let u = if h > 0.0 { BOWL_B * (omega * t).sin() } else { 0.0 };
    (h, u)
}

/// Wet/dry front positions of the bowl solution.
pub fn bowl_fronts(t: f64, g: f64) -> [f64; 2] {
    let omega = (2.0 * g * BOWL_H0).sqrt() / BOWL_A;
    let x0 = -BOWL_B * omega * BOWL_A * BOWL_A / (2.0 * g * BOWL_H0) * (omega * t).cos();
    [x0 - BOWL_A, x0 + BOWL_A]
}

pub fn vortex_exact(x: [f64; 2], t: f64, _g: f64) -> ConservedState {
    let xt = x[0] - VORTEX_VEL[0] * t;
    let yt = x[1] - VORTEX_VEL[1] * t;
    let r2 = xt * xt + yt * yt;
    let h = VORTEX_H_INF - VORTEX_BETA * VORTEX_BETA / (32.0 * PI * PI) * (2.0 * (1.0 - r2)).exp();
    let swirl = VORTEX_BETA / (2.0 * PI) * (1.0 - r2).exp();
    ConservedState::from_primitive(h, VORTEX_VEL[0] - swirl * yt, VORTEX_VEL[1] + swirl * xt)
}
