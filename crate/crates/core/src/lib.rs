//! Simulation and analysis of two uncoupled one-dimensional oscillators
//! confined to a star-shaped right-angled polygon with elastic impacts.
//!
//! The motion on a fixed level set (total energy `E`, partial energy `E1`)
//! is conjugate to a directional billiard at 45 degrees inside a transformed
//! right-angled polygon. This crate builds that polygon, computes the
//! topology of level sets (genus), partitions the energy axis into intervals
//! of constant impact structure, classifies resonant level sets, runs exact
//! event-driven billiard simulations alongside a direct ODE integrator, and
//! measures ergodic statistics (Birkhoff averages, equidistribution,
//! component occupancies).

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the
// out-of-domain sign.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod action_angle;
pub mod ergodic;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod iembd;
pub mod parallel;
pub mod potential;
pub mod quadrature;
pub mod resonance;
pub mod rng;
pub mod svg;

pub use error::Error;
pub use geometry::{BilliardTable, Quadrant, StaircaseData, StarPolygon};
pub use potential::Potential;
pub use quadrature::QuadratureSpec;

/// Convenient result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
