//! Entropy-stable DG for the shallow water equations with positivity-preserving
//! convex limiting.

pub mod cases;
pub mod config;
pub mod discretization;
pub mod error;
pub mod experiments;
pub mod high_order;
pub mod limiter;
pub mod low_order;
pub mod mesh;
pub mod norms;
pub mod output;
pub mod physics;
pub mod reference;
pub mod time;

pub use error::{Result, SolverError};
pub use physics::{ConservedState, PhysParams};
