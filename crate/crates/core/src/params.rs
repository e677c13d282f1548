use serde::{Deserialize, Serialize};

use crate::constants::TWO_PI;
use crate::error::{Error, Result};

/// Optical cavity and drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Cavity resonance, rad/s.
    pub omega_c: f64,
    /// Equilibrium cavity length, m.
    pub length: f64,
    /// Total photon loss rate, rad/s.
    pub gamma_c: f64,
    /// Photon absorption rate in the moving mirror, rad/s. Part of `gamma_c`.
    pub alpha: f64,
    /// Pump frequency, rad/s.
    pub omega_p: f64,
    /// Input optical power, W.
    pub power: f64,
}

/// The cooled cantilever mode and its thermal properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CantileverParams {
    /// Mode frequency, rad/s.
    pub omega_m: f64,
    /// Effective mode mass, kg.
    pub mass: f64,
    /// Mechanical quality factor.
    pub q_m: f64,
    /// Thermal diffusion delay, s.
    pub tau: f64,
    /// Deformation coefficient, s/m.
    pub chi: f64,
    /// Cantilever length, m.
    pub length: f64,
    /// Cross-section available to heat flow, m².
    pub area: f64,
    /// Thermal conductivity, W/(m·K).
    pub conductivity: f64,
    /// Averaging parameter of the absorption-heating profile (2 = arithmetic mean).
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentParams {
    /// Bath temperature, K.
    pub temperature: f64,
}

/// Which temperature enters the thermal occupation and the classical population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureReference {
    /// Bath temperature raised by steady absorption heating (T̄).
    #[default]
    Effective,
    /// Raw bath temperature, ignoring absorption heating.
    Bath,
}

/// Full physical description of the device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub cavity: CavityParams,
    pub cantilever: CantileverParams,
    pub environment: EnvironmentParams,
    #[serde(default)]
    pub temperature_reference: TemperatureReference,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, alloc::format!("must be finite and > 0, got {v}")))
    }
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        positive("omega_c", self.omega_c)?;
        positive("cavity.length", self.length)?;
        positive("gamma_c", self.gamma_c)?;
        positive("alpha", self.alpha)?;
        positive("omega_p", self.omega_p)?;
        if self.alpha > self.gamma_c {
            return Err(Error::param(
                "alpha",
                alloc::format!(
                    "absorption rate {} exceeds the total loss rate {}",
                    self.alpha,
                    self.gamma_c
                ),
            ));
        }
        if !(self.power.is_finite() && self.power >= 0.0) {
            return Err(Error::param(
                "power",
                alloc::format!("must be finite and >= 0, got {}", self.power),
            ));
        }
        Ok(())
    }

    /// Δ = ω_c − ω_p. Positive (red) detuning is the cooling side.
    pub fn detuning(&self) -> f64 {
        self.omega_c - self.omega_p
    }

    /// Optical quality factor ω_c/Γ_c.
    pub fn q_c(&self) -> f64 {
        self.omega_c / self.gamma_c
    }
}

impl CantileverParams {
    pub fn validate(&self) -> Result<()> {
        positive("omega_m", self.omega_m)?;
        positive("mass", self.mass)?;
        positive("q_m", self.q_m)?;
        positive("tau", self.tau)?;
        positive("chi", self.chi)?;
        positive("cantilever.length", self.length)?;
        positive("area", self.area)?;
        positive("conductivity", self.conductivity)?;
        positive("epsilon", self.epsilon)?;
        Ok(())
    }

    /// Intrinsic mechanical damping Γ_m = ω_m/Q_m.
    pub fn gamma_m(&self) -> f64 {
        self.omega_m / self.q_m
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        self.cavity.validate()?;
        self.cantilever.validate()?;
        positive("temperature", self.environment.temperature)?;
        if !self.detuning().is_finite() {
            return Err(Error::param("omega_p", "detuning is not finite"));
        }
        Ok(())
    }

    pub fn detuning(&self) -> f64 {
        self.cavity.detuning()
    }

    pub fn gamma_m(&self) -> f64 {
        self.cantilever.gamma_m()
    }

    /// Copy with the pump placed at detuning `delta` (rad/s) below the cavity.
    pub fn with_detuning(mut self, delta: f64) -> Self {
        self.cavity.omega_p = self.cavity.omega_c - delta;
        self
    }

    pub fn with_power(mut self, power: f64) -> Self {
        self.cavity.power = power;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.cantilever.tau = tau;
        self
    }

    pub fn with_chi(mut self, chi: f64) -> Self {
        self.cantilever.chi = chi;
        self
    }

    /// Set the absorption rate through the loss ratio Γ_c/α.
    pub fn with_loss_ratio(mut self, gamma_c_over_alpha: f64) -> Self {
        self.cavity.alpha = self.cavity.gamma_c / gamma_c_over_alpha;
        self
    }

    /// Ratio Γ_c/α (≥ 1 for valid parameters).
    pub fn loss_ratio(&self) -> f64 {
        self.cavity.gamma_c / self.cavity.alpha
    }

    /// 64-bit FNV-1a digest of every field, used to tag derived artifacts.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let c = &self.cavity;
        let m = &self.cantilever;
        let fields = [
            c.omega_c,
            c.length,
            c.gamma_c,
            c.alpha,
            c.omega_p,
            c.power,
            m.omega_m,
            m.mass,
            m.q_m,
            m.tau,
            m.chi,
            m.length,
            m.area,
            m.conductivity,
            m.epsilon,
            self.environment.temperature,
        ];
        let mut hash = OFFSET;
        let tag = match self.temperature_reference {
            TemperatureReference::Effective => 0u8,
            TemperatureReference::Bath => 1u8,
        };
        for byte in fields
            .iter()
            .flat_map(|v| v.to_bits().to_le_bytes())
            .chain(core::iter::once(tag))
        {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(PRIME);
        }
        hash
    }
}

/// Hz → rad/s.
pub fn hz_to_rad_s(f: f64) -> f64 {
    TWO_PI * f
}
