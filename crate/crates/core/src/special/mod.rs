//! Special functions: half-integer Bessel functions, the Bessel order
//! ratio that drives the dispersion relation, Bessel zeros, and spherical
//! harmonics.

pub mod bessel;
pub mod harmonics;
pub mod ratio;

pub use bessel::{bessel_i_half, bessel_i_half_scaled, bessel_zeros, bessel_zeros_upto};
pub use harmonics::{gauss_legendre, project, synthesize, ylm, ModeCoefficients, SphereGrid};
pub use ratio::{p0, p1_prime, p1_prime_closed, ratio, ratio_ladder, ratio_real, ratio_with_derivative};
