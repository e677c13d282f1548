//! Bundled parameter sets.
//!
//! Published device descriptions omit the effective mass and most cavity
//! parameters. Where a value is not published it is marked `assumed` below;
//! those values are plausible choices, not measurements.

use crate::constants::TWO_PI;
use crate::params::{
    CantileverParams, CavityParams, EnvironmentParams, SystemParams, TemperatureReference,
};

/// Nd:YAG-like cavity resonance (λ ≈ 1064 nm), rad/s.
pub const OMEGA_C_1064: f64 = 1.772e15;

/// Synthetic cooling benchmark used by the oracle cross-checks.
///
/// Deep in the rigid-cantilever regime: ∇F/(mω_m²) ≈ 0.01, ω_mτ = 1,
/// Γ_ph ≈ 500 Γ_m and Γ_ph/ω_m ≈ 5×10⁻³, so the rate equation, the spectral
/// quadrature and the Langevin simulation must all agree. Steady occupation
/// is ≈ 1.6×10³ phonons, of which ≈ 300 are photothermal shot noise.
pub fn benchmark() -> SystemParams {
    let gamma_c = 1.0e10;
    SystemParams {
        cavity: CavityParams {
            omega_c: OMEGA_C_1064,
            length: 0.012,
            gamma_c,
            alpha: gamma_c / 10.0,
            omega_p: OMEGA_C_1064 - 0.5 * gamma_c,
            power: 6.8e-4,
        },
        cantilever: CantileverParams {
            omega_m: 1.0e6,
            mass: 1.0e-12,
            q_m: 1.0e5,
            tau: 1.0e-6,
            chi: 1.0e-5,
            length: 1.0e-4,
            area: 1.0e-11,
            conductivity: 150.0,
            epsilon: 2.0,
        },
        environment: EnvironmentParams { temperature: 4.0 },
        temperature_reference: TemperatureReference::Effective,
    }
}

/// Loss ratio Γ_c/α of [`metzger_like`], chosen so that the noise population
/// at χ = 2×10⁻⁵ s/m is ≈ 1.4×10⁴. The ratio cannot be recovered from
/// mode-temperature data.
pub const METZGER_LOSS_RATIO: f64 = 3430.0;

/// Gold-coated silicon lever, 220 µm, 46 kHz, Q_m = 2.2×10³, τ ≈ 0.5 ms,
/// room temperature.
///
/// Assumed: mass 2 pg, 1064 nm low-finesse cavity of 10 µm with Q_c = 10⁴
/// pumped at Δ = Γ_c/2, the loss ratio [`METZGER_LOSS_RATIO`], a
/// 32 µm × 0.47 µm heat-flow cross-section and silicon conductivity.
pub fn metzger_like() -> SystemParams {
    let gamma_c = OMEGA_C_1064 / 1.0e4;
    SystemParams {
        cavity: CavityParams {
            omega_c: OMEGA_C_1064,
            length: 10.0e-6,
            gamma_c,
            alpha: gamma_c / METZGER_LOSS_RATIO,
            omega_p: OMEGA_C_1064 - 0.5 * gamma_c,
            power: 1.0e-3,
        },
        cantilever: CantileverParams {
            omega_m: TWO_PI * 46.0e3,
            mass: 2.0e-12,
            q_m: 2.2e3,
            tau: 5.0e-4,
            chi: 2.0e-5,
            length: 220.0e-6,
            area: 1.5e-11,
            conductivity: 150.0,
            epsilon: 2.0,
        },
        environment: EnvironmentParams { temperature: 300.0 },
        temperature_reference: TemperatureReference::Effective,
    }
}

/// Stressed silicon resonator, 275 µm, 6.5 MHz, Q_m = 1.5×10⁶, 77 K.
///
/// Assumed: everything except length, frequency, Q_m and temperature
/// (mass 0.1 pg, ω_mτ = 1, the cavity of [`metzger_like`] at 100 µW).
pub fn verbridge_like() -> SystemParams {
    let omega_m = TWO_PI * 6.5e6;
    let mut p = metzger_like();
    p.cavity.power = 1.0e-4;
    p.cantilever = CantileverParams {
        omega_m,
        mass: 1.0e-13,
        q_m: 1.5e6,
        tau: 1.0 / omega_m,
        chi: 2.0e-5,
        length: 275.0e-6,
        area: 1.0e-11,
        conductivity: 150.0,
        epsilon: 2.0,
    };
    p.environment.temperature = 77.0;
    p
}

/// Micro-lever, 3.9 µm, 3.4 MHz, Q_m = 2.9×10³, 77 K.
///
/// Assumed: everything except length, frequency, Q_m and temperature
/// (mass 10 fg, ω_mτ = 1, the cavity of [`metzger_like`] at 100 µW).
pub fn favero_like() -> SystemParams {
    let omega_m = TWO_PI * 3.4e6;
    let mut p = metzger_like();
    p.cavity.power = 1.0e-4;
    p.cantilever = CantileverParams {
        omega_m,
        mass: 1.0e-14,
        q_m: 2.9e3,
        tau: 1.0 / omega_m,
        chi: 2.0e-5,
        length: 3.9e-6,
        area: 1.0e-13,
        conductivity: 150.0,
        epsilon: 2.0,
    };
    p.environment.temperature = 77.0;
    p
}
