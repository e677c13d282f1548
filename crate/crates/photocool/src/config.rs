//! Device configuration files.
//!
//! JSON with an explicit unit suffix on every key. Frequencies come in pairs
//! (`_hz` or `_rad_s`) and exactly one member of each pair must be present.
//! Hz values are converted with ω = 2πf.

use std::path::Path;

use photocool_core::{
    hz_to_rad_s, CantileverParams, CavityParams, EnvironmentParams, SystemParams,
    TemperatureReference,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("`{section}`: exactly one of {keys} is required, found {found}")]
    KeyChoice {
        section: &'static str,
        keys: String,
        found: usize,
    },
    #[error(transparent)]
    Invalid(#[from] photocool_core::Error),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_c_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_c_rad_s: Option<f64>,
    pub length_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_c_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_c_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_rad_s: Option<f64>,
    /// Γ_c/α, dimensionless; alternative to an absolute α.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_c_over_alpha: Option<f64>,
    /// Δ = ω_c − ω_p; alternative to the pump frequency.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_p_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_p_rad_s: Option<f64>,
    pub power_w: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantileverConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_m_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_m_rad_s: Option<f64>,
    pub mass_kg: f64,
    pub q_m: f64,
    pub tau_s: f64,
    pub chi_s_per_m: f64,
    pub length_m: f64,
    pub area_m2: f64,
    pub conductivity_w_per_m_k: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub temperature_k: f64,
}

/// Published figures carried alongside a device for comparison tables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceValues {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_th: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_c_min: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureConvention {
    #[default]
    Effective,
    Bath,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    /// Keys whose values are assumptions rather than measured data.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assumed: Vec<String>,
    pub cavity: CavityConfig,
    pub cantilever: CantileverConfig,
    pub environment: EnvironmentConfig,
    #[serde(default)]
    pub temperature_reference: TemperatureConvention,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceValues>,
}

/// A loaded config with the raw bytes kept for digests.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: DeviceConfig,
    pub params: SystemParams,
    pub bytes: Vec<u8>,
}

fn pick(
    section: &'static str,
    options: &[(&'static str, Option<f64>)],
) -> Result<(usize, f64), ConfigError> {
    let set: Vec<(usize, f64)> = options
        .iter()
        .enumerate()
        .filter_map(|(i, (_, v))| v.map(|v| (i, v)))
        .collect();
    match set.as_slice() {
        [one] => Ok(*one),
        _ => Err(ConfigError::KeyChoice {
            section,
            keys: options.iter().map(|o| format!("`{}`", o.0)).collect::<Vec<_>>().join(", "),
            found: set.len(),
        }),
    }
}

fn angular(
    section: &'static str,
    hz: (&'static str, Option<f64>),
    rad_s: (&'static str, Option<f64>),
) -> Result<f64, ConfigError> {
    match pick(section, &[hz, rad_s])? {
        (0, v) => Ok(hz_to_rad_s(v)),
        (_, v) => Ok(v),
    }
}

impl DeviceConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Resolve unit choices into validated parameters.
    pub fn to_params(&self) -> Result<SystemParams, ConfigError> {
        let c = &self.cavity;
        let omega_c = angular(
            "cavity",
            ("omega_c_hz", c.omega_c_hz),
            ("omega_c_rad_s", c.omega_c_rad_s),
        )?;
        let gamma_c = angular(
            "cavity",
            ("gamma_c_hz", c.gamma_c_hz),
            ("gamma_c_rad_s", c.gamma_c_rad_s),
        )?;
        let alpha = match pick(
            "cavity",
            &[
                ("alpha_hz", c.alpha_hz),
                ("alpha_rad_s", c.alpha_rad_s),
                ("gamma_c_over_alpha", c.gamma_c_over_alpha),
            ],
        )? {
            (0, v) => hz_to_rad_s(v),
            (1, v) => v,
            (_, ratio) => gamma_c / ratio,
        };
        let omega_p = match pick(
            "cavity",
            &[
                ("detuning_hz", c.detuning_hz),
                ("detuning_rad_s", c.detuning_rad_s),
                ("omega_p_hz", c.omega_p_hz),
                ("omega_p_rad_s", c.omega_p_rad_s),
            ],
        )? {
            (0, v) => omega_c - hz_to_rad_s(v),
            (1, v) => omega_c - v,
            (2, v) => hz_to_rad_s(v),
            (_, v) => v,
        };
        let m = &self.cantilever;
        let omega_m = angular(
            "cantilever",
            ("omega_m_hz", m.omega_m_hz),
            ("omega_m_rad_s", m.omega_m_rad_s),
        )?;
        let p = SystemParams {
            cavity: CavityParams {
                omega_c,
                length: c.length_m,
                gamma_c,
                alpha,
                omega_p,
                power: c.power_w,
            },
            cantilever: CantileverParams {
                omega_m,
                mass: m.mass_kg,
                q_m: m.q_m,
                tau: m.tau_s,
                chi: m.chi_s_per_m,
                length: m.length_m,
                area: m.area_m2,
                conductivity: m.conductivity_w_per_m_k,
                epsilon: m.epsilon,
            },
            environment: EnvironmentParams {
                temperature: self.environment.temperature_k,
            },
            temperature_reference: match self.temperature_reference {
                TemperatureConvention::Effective => TemperatureReference::Effective,
                TemperatureConvention::Bath => TemperatureReference::Bath,
            },
        };
        p.validate()?;
        Ok(p)
    }

    /// Config in angular units that resolves to exactly `p`.
    pub fn from_params(p: &SystemParams) -> Self {
        let c = &p.cavity;
        let m = &p.cantilever;
        DeviceConfig {
            cavity: CavityConfig {
                omega_c_rad_s: Some(c.omega_c),
                length_m: c.length,
                gamma_c_rad_s: Some(c.gamma_c),
                alpha_rad_s: Some(c.alpha),
                omega_p_rad_s: Some(c.omega_p),
                power_w: c.power,
                ..Default::default()
            },
            cantilever: CantileverConfig {
                omega_m_rad_s: Some(m.omega_m),
                mass_kg: m.mass,
                q_m: m.q_m,
                tau_s: m.tau,
                chi_s_per_m: m.chi,
                length_m: m.length,
                area_m2: m.area,
                conductivity_w_per_m_k: m.conductivity,
                epsilon: m.epsilon,
                ..Default::default()
            },
            environment: EnvironmentConfig {
                temperature_k: p.environment.temperature,
            },
            temperature_reference: match p.temperature_reference {
                TemperatureReference::Effective => TemperatureConvention::Effective,
                TemperatureReference::Bath => TemperatureConvention::Bath,
            },
            ..Default::default()
        }
    }
}

pub fn load(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let bytes = std::fs::read(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let config = DeviceConfig::from_json(&String::from_utf8_lossy(&bytes))?;
    let params = config.to_params()?;
    Ok(LoadedConfig {
        config,
        params,
        bytes,
    })
}
