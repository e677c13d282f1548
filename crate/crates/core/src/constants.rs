//! Physical constants (exact or CODATA 2018 values).

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K (exact in the 2019 SI).
pub const K_B: f64 = 1.380_649e-23;

/// 2π, for Hz ↔ rad/s conversions.
pub const TWO_PI: f64 = core::f64::consts::TAU;
