//! Linear stability analysis of the radially symmetric stationary solution
//! of a free-boundary tumor growth model with nutrient diffusion and
//! pressure-driven boundary motion.
//!
//! Layers, bottom to top: [`special`] functions, the [`stationary`]
//! profile, the [`dispersion`] relation and its roots, the [`evolution`]
//! of individual spherical-harmonic modes, [`recenter`]ing of the mode-1
//! translation, and the [`harness`] that drives it all from configuration
//! files.

pub mod error;
pub mod special;
pub mod stationary;
pub mod dispersion;
pub mod evolution;
pub mod recenter;
pub mod harness;

pub use error::{Error, Result};
