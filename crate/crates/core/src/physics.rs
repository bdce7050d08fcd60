//! Shallow water state algebra: fluxes, entropy, two-point fluxes and wave speeds.
//!
//! States always carry three components. One-dimensional problems keep
//! `hv = 0` and only ever use normals of the form `(±1, 0)`, which makes every
//! function here valid in both dimensions without special cases.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// Conserved variables `(h, hu, hv)` at a single node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConservedState {
    pub h: f64,
    pub hu: f64,
    pub hv: f64,
}

impl ConservedState {
    pub const ZERO: ConservedState = ConservedState {
        h: 0.0,
        hu: 0.0,
        hv: 0.0,
    };

    pub const fn new(h: f64, hu: f64, hv: f64) -> Self {
        ConservedState { h, hu, hv }
    }

    /// Builds a state from height and velocities.
    pub fn from_primitive(h: f64, u: f64, v: f64) -> Self {
        ConservedState::new(h, h * u, h * v)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.h, self.hu, self.hv]
    }

    pub fn dot(&self, w: [f64; 3]) -> f64 {
        self.h * w[0] + self.hu * w[1] + self.hv * w[2]
    }

    pub fn is_finite(&self) -> bool {
        self.h.is_finite() && self.hu.is_finite() && self.hv.is_finite()
    }

    pub fn max_abs(&self) -> f64 {
        self.h.abs().max(self.hu.abs()).max(self.hv.abs())
    }

    /// Velocities recovered with the height floored at `dry_tol`.
    pub fn velocity(&self, dry_tol: f64) -> (f64, f64) {
        let h = self.h.max(dry_tol);
        (self.hu / h, self.hv / h)
    }
}

impl Add for ConservedState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        ConservedState::new(self.h + o.h, self.hu + o.hu, self.hv + o.hv)
    }
}

impl Sub for ConservedState {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        ConservedState::new(self.h - o.h, self.hu - o.hu, self.hv - o.hv)
    }
}

impl Mul<f64> for ConservedState {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        ConservedState::new(self.h * s, self.hu * s, self.hv * s)
    }
}

impl Mul<ConservedState> for f64 {
    type Output = ConservedState;
    fn mul(self, u: ConservedState) -> ConservedState {
        u * self
    }
}

impl Neg for ConservedState {
    type Output = Self;
    fn neg(self) -> Self {
        ConservedState::new(-self.h, -self.hu, -self.hv)
    }
}

impl AddAssign for ConservedState {
    fn add_assign(&mut self, o: Self) {
        self.h += o.h;
        self.hu += o.hu;
        self.hv += o.hv;
    }
}

impl SubAssign for ConservedState {
    fn sub_assign(&mut self, o: Self) {
        self.h -= o.h;
        self.hu -= o.hu;
        self.hv -= o.hv;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub g: f64,
    pub dry_tol: f64,
    /// Momentum is cleared at nodes with `h` at or below this height.
    pub momentum_cutoff: f64,
}

impl PhysParams {
    pub const DEFAULT_DRY_TOL: f64 = 1e-14;
    pub const DEFAULT_MOMENTUM_CUTOFF: f64 = 1e-8;

    pub fn new(g: f64) -> Self {
        PhysParams {
            g,
            dry_tol: Self::DEFAULT_DRY_TOL,
            momentum_cutoff: Self::DEFAULT_MOMENTUM_CUTOFF,
        }
    }

    /// Smallest wave speed used wherever a strictly positive speed is required.
    pub fn min_wave_speed(&self) -> f64 {
        (self.g * self.dry_tol).sqrt()
    }
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams::new(9.81)
    }
}

/// Physical fluxes `(f_x, f_y)`.
pub fn physical_flux(u: ConservedState, p: &PhysParams) -> [ConservedState; 2] {
    let (vx, vy) = u.velocity(p.dry_tol);
    let pressure = 0.5 * p.g * u.h * u.h;
    [
        ConservedState::new(u.hu, u.hu * vx + pressure, u.hu * vy),
        ConservedState::new(u.hv, u.hv * vx, u.hv * vy + pressure),
    ]
}

/// Total energy `½h(u²+v²) + ½gh² + ghb`.
pub fn entropy_function(u: ConservedState, b: f64, p: &PhysParams) -> f64 {
    let (vx, vy) = u.velocity(p.dry_tol);
    0.5 * u.h * (vx * vx + vy * vy) + 0.5 * p.g * u.h * u.h + p.g * u.h * b
}

pub fn entropy_variables(u: ConservedState, b: f64, p: &PhysParams) -> [f64; 3] {
    let (vx, vy) = u.velocity(p.dry_tol);
    [p.g * (u.h + b) - 0.5 * vx * vx - 0.5 * vy * vy, vx, vy]
}

/// Entropy potentials `ψ_d = v·f_d − F_d` for a flat bottom.
pub fn entropy_potential(u: ConservedState, p: &PhysParams) -> [f64; 2] {
    let (vx, vy) = u.velocity(p.dry_tol);
    let c = 0.5 * p.g * u.h * u.h;
    [c * vx, c * vy]
}

#[inline]
fn avg(a: f64, b: f64) -> f64 {
    0.5 * (a + b)
}

/// Entropy conservative two-point fluxes in both directions.
#[inline]
pub fn ec_flux(ul: ConservedState, ur: ConservedState, p: &PhysParams) -> [ConservedState; 2] {
    let (ul_x, ul_y) = ul.velocity(p.dry_tol);
    let (ur_x, ur_y) = ur.velocity(p.dry_tol);
    let h_avg = avg(ul.h, ur.h);
    let h2_avg = avg(ul.h * ul.h, ur.h * ur.h);
    let pressure = p.g * h_avg * h_avg - 0.5 * p.g * h2_avg;
    let hu_avg = avg(ul.hu, ur.hu);
    let hv_avg = avg(ul.hv, ur.hv);
    let u_avg = avg(ul_x, ur_x);
    let v_avg = avg(ul_y, ur_y);
    [
        ConservedState::new(hu_avg, hu_avg * u_avg + pressure, hu_avg * v_avg),
        ConservedState::new(hv_avg, hv_avg * u_avg, hv_avg * v_avg + pressure),
    ]
}

pub fn ec_flux_x(ul: ConservedState, ur: ConservedState, p: &PhysParams) -> ConservedState {
    ec_flux(ul, ur, p)[0]
}

pub fn ec_flux_y(ul: ConservedState, ur: ConservedState, p: &PhysParams) -> ConservedState {
    ec_flux(ul, ur, p)[1]
}

/// Wave speed bound `max_s |v_s·n| + sqrt(g h_s)` over both states.
#[inline]
pub fn max_wave_speed(ui: ConservedState, uj: ConservedState, n: [f64; 2], p: &PhysParams) -> f64 {
    let one = |u: ConservedState| {
        let (vx, vy) = u.velocity(p.dry_tol);
        (vx * n[0] + vy * n[1]).abs() + (p.g * u.h.max(0.0)).sqrt()
    };
    one(ui).max(one(uj))
}

/// Entropy-conservative flux projected on `n`, with optional local
/// Lax-Friedrichs penalization.
#[inline]
pub fn interface_flux(
    ul: ConservedState,
    ur: ConservedState,
    n: [f64; 2],
    p: &PhysParams,
    dissipation: bool,
) -> ConservedState {
    let [fx, fy] = ec_flux(ul, ur, p);
    let central = fx * n[0] + fy * n[1];
    if dissipation {
        let lambda = max_wave_speed(ul, ur, n, p);
        central - (ur - ul) * (0.5 * lambda)
    } else {
        central
    }
}

/// Reflects the momentum across a wall with unit normal `n`.
pub fn mirror_state(u: ConservedState, n: [f64; 2]) -> ConservedState {
    let mn = u.hu * n[0] + u.hv * n[1];
    ConservedState::new(u.h, u.hu - 2.0 * mn * n[0], u.hv - 2.0 * mn * n[1])
}
