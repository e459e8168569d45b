//! Geometric-stochastic radio channel model with semi-deterministic clusters.
//!
//! A statistical multipath model in the style of 3GPP TR 38.901 is extended
//! with clusters whose positions follow the scene geometry: fixed scatterers,
//! specular reflectors, clusters attached to a moving device, and diffraction
//! edges on a moving obstacle. Channels drift with the device position, are
//! rendered as band-limited correlation profiles, and feed a TOA position
//! solver.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and parallel batch runs live in the `sdcsim` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;

pub mod cluster;
pub mod drifting;
pub mod geometry;
pub mod metrics;
pub mod positioning;
pub mod propagation;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
pub use geometry::{DirectionAngles, RectPlane, Vec3};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
