//! Semiclassical model of photothermal (bolometric) self-cooling of a
//! cantilever-mounted cavity mirror.
//!
//! The crate is `no_std` with `alloc`. It provides:
//!
//! * [`model`]: closed-form steady-state quantities (cavity population,
//!   photothermal force gradient and shot-noise strength, optical damping
//!   rates, occupation budget, residual absorption heating).
//! * [`spectral`]: the frequency-domain response of the delayed-feedback
//!   Langevin equation and occupancy by quadrature.
//! * [`kernel`] and [`simulator`]: time-domain stochastic integration with the
//!   thermal-diffusion memory kernel realized as a first-order low-pass state.
//! * [`optimizer`]: the noise-floor optimization chain and a penalty
//!   Nelder-Mead search over device parameters.
//! * [`fitting`]: estimation of the deformation coefficient from
//!   mode-temperature versus power data.
//!
//! All quantities are SI; every frequency is angular (rad/s).

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod constants;
mod error;
pub mod fitting;
pub mod kernel;
mod linalg;
pub mod model;
pub mod optimizer;
mod params;
pub mod presets;
pub mod simulator;
pub mod spectral;

pub use error::{Error, Result};
pub use model::DerivedQuantities;
pub use params::{
    hz_to_rad_s, CantileverParams, CavityParams, EnvironmentParams, SystemParams,
    TemperatureReference,
};
