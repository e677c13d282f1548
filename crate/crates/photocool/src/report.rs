//! Machine-readable reports.
//!
//! Every number is a [`Quantity`] with a unit string; `"1"` marks a
//! dimensionless value. Values are copied from library outputs untouched and
//! serialized with shortest round-trip formatting.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use photocool_core::model::DerivedQuantities;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: &'static str,
}

// Units are drawn from a fixed vocabulary, so deserializing interns them.
impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            value: f64,
            unit: String,
        }
        let raw = Raw::deserialize(d)?;
        let unit = UNITS
            .iter()
            .copied()
            .find(|u| *u == raw.unit)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown unit `{}`", raw.unit)))?;
        Ok(Quantity {
            value: raw.value,
            unit,
        })
    }
}

pub const UNITS: &[&str] = &["1", "rad/s", "N/m", "N·s^½", "K", "s", "s/m", "W", "kg", "m"];

pub fn q(value: f64, unit: &'static str) -> Quantity {
    debug_assert!(UNITS.contains(&unit));
    Quantity { value, unit }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// SHA-256 of each input file, keyed by role.
    pub inputs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
}

impl Provenance {
    pub fn new() -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: BTreeMap::new(),
            seed: None,
            rng: None,
        }
    }

    pub fn with_input(mut self, role: &str, bytes: &[u8]) -> Self {
        self.inputs.insert(role.to_string(), sha256_hex(bytes));
        self
    }
}

impl Default for Provenance {
    fn default() -> Self {
        Self::new()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<String>,
    pub provenance: Provenance,
    pub quantities: BTreeMap<String, Quantity>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub flags: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Command-specific structured payload.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl Report {
    pub fn new(command: &str, provenance: Provenance) -> Self {
        Report {
            command: command.to_string(),
            device: None,
            provenance,
            quantities: BTreeMap::new(),
            flags: BTreeMap::new(),
            notes: Vec::new(),
            details: serde_json::Value::Null,
        }
    }

    /// Non-finite values are skipped; JSON has no encoding for them.
    pub fn set(&mut self, name: &str, value: f64, unit: &'static str) {
        if value.is_finite() {
            self.quantities.insert(name.to_string(), q(value, unit));
        }
    }

    pub fn flag(&mut self, name: &str, value: bool) {
        self.flags.insert(name.to_string(), value);
    }

    pub fn add_derived(&mut self, d: &DerivedQuantities) {
        self.set("pump_amplitude", d.pump_amplitude, "rad/s");
        self.set("n_c0", d.n_c0, "1");
        self.set("grad_f", d.grad_f, "N/m");
        self.set("noise_strength", d.noise_strength, "N·s^½");
        self.set("gamma_m", d.gamma_m, "rad/s");
        self.set("gamma_rp", d.gamma_rp, "rad/s");
        self.set("n_rp", d.n_rp, "1");
        self.set("gamma_ph", d.gamma_ph, "rad/s");
        self.set("omega_m_tilde", d.omega_m_tilde, "rad/s");
        self.set("n_ph", d.n_ph, "1");
        self.set("n_th", d.n_th, "1");
        self.set("n_classical", d.n_classical, "1");
        self.set("n_noise", d.n_noise, "1");
        self.set("n_tot", d.n_tot, "1");
        self.set("t_bar", d.t_bar, "K");
        self.set("stability_margin", d.stability_margin, "1");
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned plain-text rendering.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.provenance.tool, self.command);
        if let Some(d) = &self.device {
            let _ = writeln!(out, "device: {d}");
        }
        let width = self
            .quantities
            .keys()
            .chain(self.flags.keys())
            .map(|k| k.chars().count())
            .max()
            .unwrap_or(0);
        for (k, v) in &self.quantities {
            let unit = if v.unit == "1" { "" } else { v.unit };
            let _ = writeln!(out, "  {k:<width$}  {:>14.6e} {unit}", v.value);
        }
        for (k, v) in &self.flags {
            let _ = writeln!(out, "  {k:<width$}  {v:>14}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}
