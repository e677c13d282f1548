//! Closed-form steady-state quantities.
//!
//! The deformation force is linearized around the equilibrium position,
//! `F_def ≈ ∇F·x + N·η(t)`; the constant term only shifts the origin and is
//! dropped everywhere.

// Float math for toolchains whose `core` lacks inherent f64 methods.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::params::{SystemParams, TemperatureReference};

/// Photothermal force gradient and shot-noise strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceCoefficients {
    /// ∇F, N/m. Positive on the cooling side.
    pub gradient: f64,
    /// N, N·s^½.
    pub noise: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiationPressure {
    /// Γ_rp, rad/s. Has the sign of the detuning.
    pub damping: f64,
    /// n_rp, the occupation radiation pressure alone would impose.
    pub occupation: f64,
}

/// Everything [`occupation_budget`] derives from a [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    /// Pump amplitude E, rad/s.
    pub pump_amplitude: f64,
    /// Equilibrium intracavity photon number.
    pub n_c0: f64,
    /// ∇F, N/m.
    pub grad_f: f64,
    /// N, N·s^½.
    pub noise_strength: f64,
    /// Γ_m, rad/s.
    pub gamma_m: f64,
    /// Γ_rp, rad/s.
    pub gamma_rp: f64,
    pub n_rp: f64,
    /// Γ_ph, rad/s.
    pub gamma_ph: f64,
    /// ω̃_m, rad/s.
    pub omega_m_tilde: f64,
    pub n_ph: f64,
    pub n_th: f64,
    /// Classical population n_C (rewrite valid for Γ_rp ≪ Γ_m ≪ Γ_ph).
    pub n_classical: f64,
    /// Noise population n_N (same regime).
    pub n_noise: f64,
    /// Rate-equation total.
    pub n_tot: f64,
    /// Effective bath temperature T̄, K.
    pub t_bar: f64,
    /// 1 − ∇F/(mω_m²).
    pub stability_margin: f64,
}

impl DerivedQuantities {
    /// Total optical plus intrinsic damping Γ_m + Γ_rp + Γ_ph.
    pub fn total_damping(&self) -> f64 {
        self.gamma_m + self.gamma_rp + self.gamma_ph
    }
}

/// E = √(Γ_c P / 4ħω_p).
pub fn pump_amplitude_from_power(p: &SystemParams) -> Result<f64> {
    let c = &p.cavity;
    if !(c.power.is_finite() && c.power >= 0.0) {
        return Err(Error::param("power", "must be finite and >= 0"));
    }
    if !(c.omega_p > 0.0) {
        return Err(Error::param("omega_p", "must be > 0"));
    }
    if !(c.gamma_c > 0.0) {
        return Err(Error::param("gamma_c", "must be > 0"));
    }
    Ok((c.gamma_c * c.power / (4.0 * HBAR * c.omega_p)).sqrt())
}

/// Instantaneous intracavity photon number at mirror displacement `x`.
pub fn cavity_photon_number(p: &SystemParams, x: f64) -> Result<f64> {
    let c = &p.cavity;
    if !(x.abs() < c.length) {
        return Err(Error::DisplacementOutOfRange { x, length: c.length });
    }
    let e = pump_amplitude_from_power(p)?;
    let shifted = c.omega_c * (1.0 - x / c.length) - c.omega_p;
    Ok(e * e / (shifted * shifted + 0.25 * c.gamma_c * c.gamma_c))
}

/// ∇F and N from the first-order expansion of the deformation force.
pub fn force_gradient_and_noise(p: &SystemParams) -> Result<ForceCoefficients> {
    p.validate()?;
    let c = &p.cavity;
    let chi = p.cantilever.chi;
    let n_c0 = cavity_photon_number(p, 0.0)?;
    let delta = c.detuning();
    let lorentz = delta * delta + 0.25 * c.gamma_c * c.gamma_c;
    let numerator = 2.0 * c.omega_c * delta - delta * delta - 0.25 * c.gamma_c * c.gamma_c;
    let gradient =
        n_c0 * c.alpha * chi * HBAR * c.omega_c / c.length * (numerator / lorentz);
    let noise = chi * HBAR * c.omega_c * (c.alpha * n_c0).sqrt();
    Ok(ForceCoefficients { gradient, noise })
}

/// Bad-cavity radiation-pressure damping Γ_rp and noise occupation n_rp.
pub fn radiation_pressure_terms(p: &SystemParams) -> Result<RadiationPressure> {
    let c = &p.cavity;
    let delta = c.detuning();
    if delta == 0.0 {
        return Err(Error::DegenerateDetuning);
    }
    let n_c0 = cavity_photon_number(p, 0.0)?;
    let lorentz = delta * delta + 0.25 * c.gamma_c * c.gamma_c;
    let damping = 4.0 * n_c0 * HBAR * c.gamma_c * c.omega_c * c.omega_c
        / (p.cantilever.mass * c.length * c.length)
        * delta
        / (lorentz * lorentz);
    let occupation = lorentz / (4.0 * p.cantilever.omega_m * delta);
    Ok(RadiationPressure { damping, occupation })
}

/// Γ_ph = τ∇F / (m(1 + τ²ω_m²)).
pub fn photothermal_damping(p: &SystemParams, grad_f: f64) -> f64 {
    let m = &p.cantilever;
    let wt = m.omega_m * m.tau;
    m.tau * grad_f / (m.mass * (1.0 + wt * wt))
}

/// 1 − ∇F/(mω_m²); the mirror is statically unstable when this is ≤ 0.
pub fn stability_margin(p: &SystemParams, grad_f: f64) -> f64 {
    let m = &p.cantilever;
    1.0 - grad_f / (m.mass * m.omega_m * m.omega_m)
}

/// ω̃_m = √(ω_m² − ∇F/m).
pub fn renormalized_frequency(p: &SystemParams, grad_f: f64) -> Result<f64> {
    let margin = stability_margin(p, grad_f);
    if !(margin > 0.0) {
        return Err(Error::Instability { margin });
    }
    let m = &p.cantilever;
    Ok((m.omega_m * m.omega_m - grad_f / m.mass).sqrt())
}

/// T̄ = T + αn_c0ħω_c L_m/(εsκ): the linear steady heating profile along
/// the lever, averaged with weight ε.
pub fn effective_temperature(p: &SystemParams, n_c0: f64) -> f64 {
    let c = &p.cavity;
    let m = &p.cantilever;
    let absorbed = c.alpha * n_c0 * HBAR * c.omega_c;
    p.environment.temperature + absorbed * m.length / (m.epsilon * m.area * m.conductivity)
}

/// Temperature entering n_th and n_C, per [`TemperatureReference`].
pub fn reference_temperature(p: &SystemParams, n_c0: f64) -> f64 {
    match p.temperature_reference {
        TemperatureReference::Effective => effective_temperature(p, n_c0),
        TemperatureReference::Bath => p.environment.temperature,
    }
}

/// n_ph = N²/(2ħω_mτ∇F), the occupation photothermal shot noise alone imposes.
pub fn photothermal_noise_occupation(p: &SystemParams, forces: &ForceCoefficients) -> f64 {
    let m = &p.cantilever;
    forces.noise * forces.noise / (2.0 * HBAR * m.omega_m * m.tau * forces.gradient)
}

struct CoolingState {
    n_c0: f64,
    forces: ForceCoefficients,
    omega_tilde: f64,
    temperature: f64,
}

fn cooling_state(p: &SystemParams) -> Result<CoolingState> {
    let forces = force_gradient_and_noise(p)?;
    if !(forces.gradient > 0.0) {
        return Err(Error::HeatingRegime {
            grad_f: forces.gradient,
        });
    }
    let omega_tilde = renormalized_frequency(p, forces.gradient)?;
    let n_c0 = cavity_photon_number(p, 0.0)?;
    Ok(CoolingState {
        n_c0,
        forces,
        omega_tilde,
        temperature: reference_temperature(p, n_c0),
    })
}

/// Classical population n_C, evaluated at the reference temperature
/// (T̄ by default).
pub fn classical_population(p: &SystemParams) -> Result<f64> {
    let s = cooling_state(p)?;
    let m = &p.cantilever;
    let wt = m.omega_m * m.tau;
    Ok(K_B * s.temperature * m.mass * m.omega_m * m.omega_m
        / (HBAR * s.omega_tilde * m.q_m * s.forces.gradient)
        * (1.0 + wt * wt)
        / wt)
}

/// Noise population n_N: radiation-pressure term plus photothermal term.
pub fn noise_population(p: &SystemParams) -> Result<f64> {
    cooling_state(p)?;
    let c = &p.cavity;
    let m = &p.cantilever;
    let wt = m.omega_m * m.tau;
    let delta = c.detuning();
    let lorentz = delta * delta + 0.25 * c.gamma_c * c.gamma_c;
    let numerator = 2.0 * c.omega_c * delta - delta * delta - 0.25 * c.gamma_c * c.gamma_c;
    let coupling = m.chi * c.omega_c * c.length;
    let rp = (c.gamma_c / c.alpha) / coupling * (1.0 + wt * wt) / wt * c.omega_c * c.omega_c
        / numerator;
    let ph = coupling / (2.0 * wt) * lorentz / numerator;
    Ok(rp + ph)
}

/// Full steady-state budget.
///
/// With no light (P = 0) the optical terms vanish and the budget reduces to
/// the bath: n_tot = n_C = n_th, n_N = 0. With light, the parameters must be
/// on the cooling side (∇F > 0) and mechanically stable.
pub fn occupation_budget(p: &SystemParams) -> Result<DerivedQuantities> {
    p.validate()?;
    let m = &p.cantilever;
    let gamma_m = m.gamma_m();
    let pump = pump_amplitude_from_power(p)?;
    if p.cavity.power == 0.0 {
        let temperature = p.environment.temperature;
        let n_th = K_B * temperature / (HBAR * m.omega_m);
        let n_rp = radiation_pressure_terms(p).map_or(0.0, |rp| rp.occupation);
        return Ok(DerivedQuantities {
            pump_amplitude: pump,
            n_c0: 0.0,
            grad_f: 0.0,
            noise_strength: 0.0,
            gamma_m,
            gamma_rp: 0.0,
            n_rp,
            gamma_ph: 0.0,
            omega_m_tilde: m.omega_m,
            n_ph: 0.0,
            n_th,
            n_classical: n_th,
            n_noise: 0.0,
            n_tot: n_th,
            t_bar: temperature,
            stability_margin: 1.0,
        });
    }

    let s = cooling_state(p)?;
    let rp = radiation_pressure_terms(p)?;
    let gamma_ph = photothermal_damping(p, s.forces.gradient);
    let n_ph = photothermal_noise_occupation(p, &s.forces);
    let n_th = K_B * s.temperature / (HBAR * s.omega_tilde);
    let n_tot = (gamma_m * n_th + rp.damping * rp.occupation + gamma_ph * n_ph)
        / (gamma_m + rp.damping + gamma_ph);
    Ok(DerivedQuantities {
        pump_amplitude: pump,
        n_c0: s.n_c0,
        grad_f: s.forces.gradient,
        noise_strength: s.forces.noise,
        gamma_m,
        gamma_rp: rp.damping,
        n_rp: rp.occupation,
        gamma_ph,
        omega_m_tilde: s.omega_tilde,
        n_ph,
        n_th,
        n_classical: classical_population(p)?,
        n_noise: noise_population(p)?,
        n_tot,
        t_bar: effective_temperature(p, s.n_c0),
        stability_margin: stability_margin(p, s.forces.gradient),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn resonant(power: f64) -> SystemParams {
        let mut p = presets::benchmark().with_power(power);
        p.cavity.omega_c = 1.772e15;
        p.cavity.omega_p = 1.772e15;
        p.cavity.gamma_c = 1.0e9;
        p.cavity.alpha = 1.0e8;
        p
    }

    #[test]
    fn pump_amplitude_zero_power() {
        assert_eq!(pump_amplitude_from_power(&resonant(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn pump_amplitude_one_milliwatt() {
        // √(10⁹·10⁻³ / (4·1.054571817e-34·1.772e15))
        let e = pump_amplitude_from_power(&resonant(1e-3)).unwrap();
        assert_relative_eq!(e, 1.156_645e12, max_relative = 1e-6);
    }

    #[test]
    fn pump_amplitude_square_root_law() {
        let e1 = pump_amplitude_from_power(&resonant(2.5e-4)).unwrap();
        let e4 = pump_amplitude_from_power(&resonant(1e-3)).unwrap();
        assert_relative_eq!(e4, 2.0 * e1, max_relative = 1e-15);
    }

    #[test]
    fn pump_amplitude_rejects_bad_inputs() {
        assert!(pump_amplitude_from_power(&resonant(-1.0)).is_err());
        let mut p = resonant(1e-3);
        p.cavity.omega_p = 0.0;
        assert!(pump_amplitude_from_power(&p).is_err());
    }

    #[test]
    fn resonant_population_identity() {
        let p = resonant(1e-3);
        let n = cavity_photon_number(&p, 0.0).unwrap();
        let identity = p.cavity.power / (HBAR * p.cavity.omega_p * p.cavity.gamma_c);
        assert_relative_eq!(n, identity, max_relative = 1e-12);
        assert_relative_eq!(n, 5.351e6, max_relative = 1e-3);
    }

    #[test]
    fn half_width_detuning_halves_population() {
        let p = resonant(1e-3);
        let q = p.with_detuning(0.5 * p.cavity.gamma_c);
        let ratio = cavity_photon_number(&q, 0.0).unwrap() / cavity_photon_number(&p, 0.0).unwrap();
        // E² carries 1/ω_p, which moves by Γ_c/(2ω_c).
        assert_relative_eq!(ratio, 0.5, max_relative = 1e-6);
    }

    #[test]
    fn displacement_beyond_cavity_length_is_rejected() {
        let p = resonant(1e-3);
        assert!(matches!(
            cavity_photon_number(&p, p.cavity.length),
            Err(Error::DisplacementOutOfRange { .. })
        ));
    }

    #[test]
    fn population_peaks_where_shifted_detuning_vanishes() {
        let p = presets::benchmark();
        let c = &p.cavity;
        // ω_c(1 − x/L) = ω_p
        let x_peak = c.length * (1.0 - c.omega_p / c.omega_c);
        let peak = cavity_photon_number(&p, x_peak).unwrap();
        for dx in [-1e-9, -1e-10, 1e-10, 1e-9] {
            assert!(cavity_photon_number(&p, x_peak + dx).unwrap() < peak);
        }
        assert_relative_eq!(
            peak,
            4.0 * pump_amplitude_from_power(&p).unwrap().powi(2) / (c.gamma_c * c.gamma_c),
            max_relative = 1e-6
        );
    }

    #[test]
    fn gradient_vanishes_at_numerator_root() {
        let p = presets::benchmark();
        let (wc, g) = (p.cavity.omega_c, p.cavity.gamma_c);
        // smaller root of Δ² − 2ω_cΔ + Γ_c²/4 = 0, written to avoid cancellation
        let delta = 0.25 * g * g / (wc + (wc * wc - 0.25 * g * g).sqrt());
        let f = force_gradient_and_noise(&p.with_detuning(delta)).unwrap();
        let scale = force_gradient_and_noise(&p).unwrap().gradient;
        assert!(f.gradient.abs() < 1e-6 * scale);
    }

    #[test]
    fn blue_detuning_heats() {
        let p = presets::benchmark().with_detuning(-5.0e9);
        let f = force_gradient_and_noise(&p).unwrap();
        assert!(f.gradient < 0.0);
        assert!(f.noise > 0.0);
        assert!(matches!(occupation_budget(&p), Err(Error::HeatingRegime { .. })));
    }

    #[test]
    fn noise_strength_direct_evaluation() {
        // χħω_c√(αn_c0) with n_c0 = 5×10⁶, α = 10⁸ rad/s, χ = 2×10⁻⁵ s/m
        let chi = 2.0e-5;
        let omega_c = 1.772e15;
        let n_c0 = 5.0e6;
        let alpha = 1.0e8;
        let expected = chi * HBAR * omega_c * (alpha * n_c0).sqrt();
        assert_relative_eq!(expected, 8.357e-17, max_relative = 1e-3);

        // Pick the power that yields exactly n_c0 on resonance.
        let mut p = resonant(1.0);
        p.cavity.alpha = alpha;
        p.cantilever.chi = chi;
        p.cavity.power = n_c0 * HBAR * p.cavity.omega_p * p.cavity.gamma_c;
        let f = force_gradient_and_noise(&p).unwrap();
        assert_relative_eq!(f.noise, expected, max_relative = 1e-12);
    }

    #[test]
    fn radiation_pressure_optimum_detuning() {
        let mut p = presets::benchmark();
        p.cavity.gamma_c = 1.0e9;
        p.cavity.alpha = 1.0e8;
        p.cantilever.omega_m = 2.89e5;
        let p = p.with_detuning(0.5e9);
        let rp = radiation_pressure_terms(&p).unwrap();
        assert_relative_eq!(rp.occupation, 1.0e9 / (4.0 * 2.89e5), max_relative = 1e-6);
        assert_relative_eq!(rp.occupation, 865.05, max_relative = 1e-4);
        for f in [0.3, 0.45, 0.55, 1.0, 3.0] {
            let q = radiation_pressure_terms(&p.with_detuning(f * 1.0e9)).unwrap();
            assert!(q.occupation > rp.occupation);
        }
    }

    #[test]
    fn radiation_pressure_degenerate_and_dark() {
        let p = presets::benchmark();
        assert_eq!(
            radiation_pressure_terms(&p.with_detuning(0.0)),
            Err(Error::DegenerateDetuning)
        );
        assert_eq!(radiation_pressure_terms(&p.with_power(0.0)).unwrap().damping, 0.0);
        assert!(radiation_pressure_terms(&p).unwrap().damping > 0.0);
        assert!(radiation_pressure_terms(&p.with_detuning(-1e9)).unwrap().damping < 0.0);
    }

    #[test]
    fn photothermal_damping_cases() {
        let mut p = presets::benchmark();
        p.cantilever.mass = 5.0e-12;
        p.cantilever.omega_m = 2.89e5;
        assert_eq!(photothermal_damping(&p.with_tau(0.0), 1e-3), 0.0);
        let at_one = photothermal_damping(&p.with_tau(1.0 / 2.89e5), 1e-3);
        assert_relative_eq!(at_one, 1e-3 / (2.0 * 5.0e-12 * 2.89e5), max_relative = 1e-12);
        let slow = photothermal_damping(&p.with_tau(5.0e-4), 1e-3);
        assert_relative_eq!(slow, 4.789, max_relative = 1e-3);
        assert!(slow < at_one);
    }

    #[test]
    fn renormalized_frequency_cases() {
        let p = presets::benchmark();
        let m = p.cantilever.mass;
        let w = p.cantilever.omega_m;
        assert_eq!(renormalized_frequency(&p, 0.0).unwrap(), w);
        assert_relative_eq!(
            renormalized_frequency(&p, 0.75 * m * w * w).unwrap(),
            0.5 * w,
            max_relative = 1e-12
        );
        assert!(matches!(
            renormalized_frequency(&p, m * w * w),
            Err(Error::Instability { .. })
        ));
    }

    #[test]
    fn stability_margin_cases() {
        let p = presets::benchmark();
        let k = p.cantilever.mass * p.cantilever.omega_m.powi(2);
        assert_eq!(stability_margin(&p, 0.0), 1.0);
        assert_eq!(stability_margin(&p, k), 0.0);
        assert_eq!(stability_margin(&p, 2.0 * k), -1.0);
    }

    #[test]
    fn unstable_budget_is_an_error() {
        let p = presets::benchmark();
        let grad = force_gradient_and_noise(&p).unwrap().gradient;
        let k = p.cantilever.mass * p.cantilever.omega_m.powi(2);
        let q = p.with_power(p.cavity.power * 1.2 * k / grad);
        assert!(matches!(occupation_budget(&q), Err(Error::Instability { .. })));
    }

    #[test]
    fn effective_temperature_cases() {
        let p = presets::metzger_like();
        assert_eq!(effective_temperature(&p, 0.0), p.environment.temperature);
        // absorbed power 10 µW over 220 µm, s = 1.5e-11 m², κ = 150, ε = 2
        let n_c0 = 1.0e-5 / (p.cavity.alpha * HBAR * p.cavity.omega_c);
        let rise = effective_temperature(&p, n_c0) - p.environment.temperature;
        assert_relative_eq!(rise, 0.48889, max_relative = 1e-4);
        let mut q = p;
        q.cantilever.epsilon = 4.0;
        let half = effective_temperature(&q, n_c0) - p.environment.temperature;
        assert_relative_eq!(half, 0.5 * rise, max_relative = 1e-12);
    }

    #[test]
    fn classical_population_at_optimum() {
        // ω_mτ = 1 and ∇F = (2/3)mω_m² minimize n_C at 3√3·kT/(ħω_mQ_m).
        let mut p = presets::metzger_like();
        p.temperature_reference = TemperatureReference::Bath;
        let w = p.cantilever.omega_m;
        let p = p.with_tau(1.0 / w);
        let per_watt = force_gradient_and_noise(&p.with_power(1.0)).unwrap().gradient;
        let target = 2.0 / 3.0 * p.cantilever.mass * w * w;
        let q = p.with_power(target / per_watt);
        let n_c = classical_population(&q).unwrap();
        let bound = 3.0 * 3f64.sqrt() * K_B * 300.0 / (HBAR * w * p.cantilever.q_m);
        assert_relative_eq!(n_c, bound, max_relative = 1e-9);
        assert_relative_eq!(n_c, 3.2097e5, max_relative = 1e-3);
    }

    #[test]
    fn dark_budget_is_the_bath() {
        let p = presets::benchmark().with_power(0.0);
        let d = occupation_budget(&p).unwrap();
        assert_eq!(d.n_tot, d.n_th);
        assert_eq!(d.gamma_ph, 0.0);
        assert_eq!(d.gamma_rp, 0.0);
        assert_relative_eq!(
            d.n_th,
            K_B * p.environment.temperature / (HBAR * p.cantilever.omega_m),
            max_relative = 1e-15
        );
    }

    #[test]
    fn equal_occupations_average_to_themselves() {
        let d = occupation_budget(&presets::benchmark()).unwrap();
        let n0 = 42.0;
        let n = (d.gamma_m * n0 + d.gamma_rp * n0 + d.gamma_ph * n0) / d.total_damping();
        assert_relative_eq!(n, n0, max_relative = 1e-14);
    }

    #[test]
    fn strong_cooling_limit() {
        let p = presets::benchmark();
        let d = occupation_budget(&p).unwrap();
        assert!(d.gamma_ph > 100.0 * d.gamma_m);
        let classical_only = d.gamma_m * d.n_th / d.gamma_ph;
        assert_relative_eq!(d.n_classical, classical_only, max_relative = 1e-12);
    }

    #[test]
    fn noise_population_is_rate_ratio_plus_photothermal() {
        for p in [presets::benchmark(), presets::metzger_like()] {
            let d = occupation_budget(&p).unwrap();
            let via_rates = d.gamma_rp * d.n_rp / d.gamma_ph + d.n_ph;
            assert_relative_eq!(d.n_noise, via_rates, max_relative = 1e-10);
        }
    }

    #[test]
    fn metzger_like_noise_population() {
        let d = occupation_budget(&presets::metzger_like()).unwrap();
        assert!(d.n_noise > 1.4e4 / 1.5 && d.n_noise < 1.4e4 * 1.5, "{}", d.n_noise);
    }

    #[test]
    fn frequency_identity_is_exact() {
        let p = presets::benchmark();
        let d = occupation_budget(&p).unwrap();
        let w = p.cantilever.omega_m;
        let lhs = d.omega_m_tilde * d.omega_m_tilde + d.grad_f / p.cantilever.mass;
        assert_relative_eq!(lhs, w * w, max_relative = 4.0 * f64::EPSILON);
    }

    proptest! {
        #[test]
        fn sign_rule(delta_over_gamma in -20.0f64..20.0) {
            let p = presets::benchmark();
            let delta = delta_over_gamma * p.cavity.gamma_c;
            prop_assume!(delta != 0.0);
            let q = p.with_detuning(delta);
            let g = q.cavity.gamma_c;
            let wc = q.cavity.omega_c;
            let d = q.detuning();
            let cooling_side = 2.0 * wc * d > d * d + 0.25 * g * g;
            let f = force_gradient_and_noise(&q).unwrap();
            prop_assert_eq!(f.gradient > 0.0, cooling_side);
            prop_assert_eq!(photothermal_damping(&q, f.gradient) > 0.0, cooling_side);
        }

        #[test]
        fn photothermal_noise_occupation_is_power_invariant(scale in 1e-3f64..10.0) {
            let p = presets::benchmark();
            let q = p.with_power(p.cavity.power * scale);
            let a = photothermal_noise_occupation(&p, &force_gradient_and_noise(&p).unwrap());
            let b = photothermal_noise_occupation(&q, &force_gradient_and_noise(&q).unwrap());
            prop_assert!((a / b - 1.0).abs() < 1e-12);
        }

        #[test]
        fn classical_population_monotonicity(q_scale in 1.01f64..10.0, t_scale in 1.01f64..10.0) {
            let p = presets::benchmark();
            let base = classical_population(&p).unwrap();
            let mut hi_q = p;
            hi_q.cantilever.q_m *= q_scale;
            prop_assert!(classical_population(&hi_q).unwrap() < base);
            let mut hot = p;
            hot.environment.temperature *= t_scale;
            prop_assert!(classical_population(&hot).unwrap() > base);
        }

        #[test]
        fn effective_temperature_is_linear_in_absorbed_power(n1 in 0.0f64..1e8, n2 in 0.0f64..1e8) {
            let p = presets::metzger_like();
            let t0 = p.environment.temperature;
            let a = effective_temperature(&p, n1) - t0;
            let b = effective_temperature(&p, n2) - t0;
            let ab = effective_temperature(&p, n1 + n2) - t0;
            prop_assert!((ab - a - b).abs() <= 1e-9 * (1.0 + ab.abs()));
            prop_assert!(a >= 0.0);
        }
    }
}
