//! Element-local convex limiting between the low- and high-order updates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::discretization::ElementFluxes;
use crate::error::{Result, SolverError};
use crate::physics::{ConservedState, PhysParams};

/// Relative tolerance for mismatched interface entries of `A`.
pub const CROSS_ELEMENT_TOL: f64 = 1e-13;
/// Limited heights down to this value are accepted and later floored.
pub const NEGATIVE_HEIGHT_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimiterMode {
    Nodewise,
    Elementwise,
    /// All factors zero: the low-order update.
    Low,
    /// All factors one: the high-order update.
    High,
}

impl LimiterMode {
    pub const ALL: [LimiterMode; 4] = [
        LimiterMode::Nodewise,
        LimiterMode::Elementwise,
        LimiterMode::Low,
        LimiterMode::High,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LimiterMode::Nodewise => "nodewise",
            LimiterMode::Elementwise => "elementwise",
            LimiterMode::Low => "low",
            LimiterMode::High => "high",
        }
    }
}

impl fmt::Display for LimiterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LimiterMode {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nodewise" => Ok(LimiterMode::Nodewise),
            "elementwise" => Ok(LimiterMode::Elementwise),
            "low" | "zero" => Ok(LimiterMode::Low),
            "high" | "none" => Ok(LimiterMode::High),
            other => Err(SolverError::Config(format!("unknown limiter mode '{other}'"))),
        }
    }
}

/// `A_ij = dt (F^L_ij − F^H_ij)` on one element.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxCorrection {
    pub nq: usize,
    pub a: Vec<ConservedState>,
    /// Largest interface entry difference seen before zeroing.
    pub max_cross: f64,
}

impl FluxCorrection {
    pub fn get(&self, i: usize, j: usize) -> ConservedState {
        self.a[i * self.nq + j]
    }
}

/// Forms `A` and checks that the interface contributions of both schemes
/// agree, which is what makes every cross-element entry vanish.
pub fn assemble_correction(fh: &ElementFluxes, fl: &ElementFluxes, dt: f64) -> Result<FluxCorrection> {
    let nq = fh.nq;
    let mut max_cross = 0.0f64;
    for (h, l) in fh.interface.iter().zip(&fl.interface) {
        let diff = (l.flux - h.flux).max_abs() * dt;
        let scale = dt * (l.flux.max_abs() + h.flux.max_abs()).max(1.0);
        if diff > CROSS_ELEMENT_TOL * scale || h.node != l.node || h.exterior != l.exterior {
            return Err(SolverError::CrossElementCorrection { value: diff });
        }
        max_cross = max_cross.max(diff);
    }
    let a = fl.intra.iter().zip(&fh.intra).map(|(l, h)| (*l - *h) * dt).collect();
    Ok(FluxCorrection { nq, a, max_cross })
}

/// Largest `l ∈ [0, 1]` with `h_L + l P ≥ 0`.
pub fn nodewise_factor(hl: f64, p: f64) -> f64 {
    if hl + p >= 0.0 {
        1.0
    } else {
        (-hl / p).clamp(0.0, 1.0)
    }
}

/// `l_ij = min(l^i_j, l^j_i)` from a row-major matrix of one-sided factors.
pub fn symmetrize_factors(one_sided: &[f64], nq: usize) -> Vec<f64> {
    let mut l = vec![1.0; nq * nq];
    for i in 0..nq {
        for j in 0..nq {
            l[i * nq + j] = one_sided[i * nq + j].min(one_sided[j * nq + i]);
        }
    }
    l
}

/// Constant matrix of the smallest pair factor.
pub fn elementwise_factor(factors: &[f64]) -> Vec<f64> {
    let le = factors.iter().cloned().fold(1.0, f64::min);
    vec![le; factors.len()]
}

/// Symmetric limiting factors for one element.
#[derive(Clone, Debug, PartialEq)]
pub struct LimiterFactors {
    pub nq: usize,
    pub l: Vec<f64>,
}

impl LimiterFactors {
    pub fn uniform(nq: usize, value: f64) -> Self {
        LimiterFactors {
            nq,
            l: vec![value; nq * nq],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.nq + j]
    }

    /// Smallest off-diagonal factor.
    pub fn min(&self) -> f64 {
        let nq = self.nq;
        (0..nq * nq)
            .filter(|k| k / nq != k % nq)
            .map(|k| self.l[k])
            .fold(1.0, f64::min)
    }
}

/// `P_ij = A^h_ij / (m_i λ_j)` with uniform `λ_j = 1/(N_q − 1)`.
fn height_increment(a: &FluxCorrection, masses: &[f64], i: usize, j: usize) -> f64 {
    let lambda = 1.0 / (a.nq as f64 - 1.0);
    a.get(i, j).h / (masses[i] * lambda)
}

/// Node-wise factors from the low-order update. Elements whose unlimited
/// high-order heights are all positive are left unlimited.
pub fn compute_factors(ul: &[ConservedState], a: &FluxCorrection, masses: &[f64], mode: LimiterMode) -> LimiterFactors {
    let nq = a.nq;
    match mode {
        LimiterMode::Low => return LimiterFactors::uniform(nq, 0.0),
        LimiterMode::High => return LimiterFactors::uniform(nq, 1.0),
        _ => {}
    }
    let high_positive = (0..nq).all(|i| {
        let dh: f64 = (0..nq).map(|j| a.get(i, j).h).sum();
        ul[i].h + dh / masses[i] > 0.0
    });
    if high_positive || nq < 2 {
        return LimiterFactors::uniform(nq, 1.0);
    }
    let mut one_sided = vec![1.0; nq * nq];
    for i in 0..nq {
        for j in 0..nq {
            if i != j {
                one_sided[i * nq + j] = nodewise_factor(ul[i].h, height_increment(a, masses, i, j));
            }
        }
    }
    let l = symmetrize_factors(&one_sided, nq);
    match mode {
        LimiterMode::Elementwise => LimiterFactors {
            nq,
            l: elementwise_factor(&l),
        },
        _ => LimiterFactors { nq, l },
    }
}

/// `m_i u_i = m_i uL_i + Σ_{j≠i} l_ij A_ij`.
pub fn apply_limited_update(
    ul: &[ConservedState],
    a: &FluxCorrection,
    factors: &LimiterFactors,
    masses: &[f64],
) -> Vec<ConservedState> {
    let nq = a.nq;
    (0..nq)
        .map(|i| {
            let mut acc = ConservedState::ZERO;
            for j in 0..nq {
                if j != i {
                    acc += a.get(i, j) * factors.get(i, j);
                }
            }
            ul[i] + acc * (1.0 / masses[i])
        })
        .collect()
}

/// Fails on limited heights below `−NEGATIVE_HEIGHT_TOL`.
pub fn check_heights(u: &[ConservedState], elem: usize) -> Result<()> {
    match u.iter().enumerate().find(|(_, u)| !(u.h >= -NEGATIVE_HEIGHT_TOL)) {
        Some((node, u)) => Err(SolverError::NegativeHeight { elem, node, h: u.h }),
        None => Ok(()),
    }
}

/// Mass-weighted mean speed of `states` plus `2 sqrt(g h_max)`.
pub fn characteristic_speed_bound(states: &[ConservedState], masses: &[f64], p: &PhysParams) -> f64 {
    let mut water = 0.0;
    let mut momentum = 0.0;
    let mut h_max = 0.0f64;
    for (u, m) in states.iter().zip(masses) {
        water += m * u.h.max(0.0);
        momentum += m * u.hu.hypot(u.hv);
        h_max = h_max.max(u.h);
    }
    let mean = if water > 0.0 { momentum / water } else { 0.0 };
    mean + 2.0 * (p.g * h_max).sqrt()
}

/// Scales momentum so that no node moves faster than `cap`; returns the
/// number of nodes changed. Heights are untouched.
pub fn cap_velocity(u: &mut [ConservedState], cap: f64, p: &PhysParams) -> usize {
    let mut changed = 0;
    for s in u.iter_mut() {
        let (vx, vy) = s.velocity(p.dry_tol);
        let speed = vx.hypot(vy);
        if speed > cap {
            let r = cap / speed;
            s.hu *= r;
            s.hv *= r;
            changed += 1;
        }
    }
    changed
}

/// Row `i` rewritten as `Σ_j λ_j (uL_i + l_ij P_ij)`, compared against the
/// direct limited update.
pub fn convex_split_check(
    ul: &[ConservedState],
    a: &FluxCorrection,
    factors: &LimiterFactors,
    masses: &[f64],
    i: usize,
    tol: f64,
) -> bool {
    let nq = a.nq;
    let lambda = 1.0 / (nq as f64 - 1.0);
    let mut split = ConservedState::ZERO;
    for j in (0..nq).filter(|&j| j != i) {
        let p = a.get(i, j) * (1.0 / (masses[i] * lambda));
        split += (ul[i] + p * factors.get(i, j)) * lambda;
    }
    let direct = apply_limited_update(ul, a, factors, masses)[i];
    (split - direct).max_abs() <= tol * (1.0 + direct.max_abs())
}
