//! Thermal and minimal classical populations of several devices under four
//! (temperature, frequency) conventions.
//!
//! Published comparison tables often list a frequency in Hz next to
//! populations computed as if it were angular. Both readings are evaluated:
//! `angular` uses ω_m = 2πf, `literal` uses ω_m = f numerically.

use photocool_core::constants::TWO_PI;
use photocool_core::model::occupation_budget;
use photocool_core::optimizer::classical_bound;
use photocool_core::{Result, SystemParams, TemperatureReference};
use serde::{Deserialize, Serialize};

/// Published rows are matched to this factor.
pub const AGREEMENT_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyReading {
    Angular,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convention {
    pub temperature_k: f64,
    pub frequency: FrequencyReading,
}

impl Convention {
    pub const ALL: [Convention; 4] = [
        Convention { temperature_k: 77.0, frequency: FrequencyReading::Angular },
        Convention { temperature_k: 77.0, frequency: FrequencyReading::Literal },
        Convention { temperature_k: 300.0, frequency: FrequencyReading::Angular },
        Convention { temperature_k: 300.0, frequency: FrequencyReading::Literal },
    ];

    pub fn label(&self) -> String {
        let f = match self.frequency {
            FrequencyReading::Angular => "ω=2πf",
            FrequencyReading::Literal => "ω=f",
        };
        format!("{} K, {f}", self.temperature_k)
    }

    /// Dark device at this convention's temperature and mode frequency.
    pub fn apply(&self, p: &SystemParams) -> SystemParams {
        let mut q = p.with_power(0.0);
        q.environment.temperature = self.temperature_k;
        q.temperature_reference = TemperatureReference::Bath;
        if self.frequency == FrequencyReading::Literal {
            q.cantilever.omega_m = p.cantilever.omega_m / TWO_PI;
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub convention: Convention,
    pub n_th: f64,
    pub n_c_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub device: String,
    pub length_m: f64,
    pub frequency_hz: f64,
    pub q_m: f64,
    pub cells: Vec<Cell>,
    pub reference_n_th: Option<f64>,
    pub reference_n_c_min: Option<f64>,
}

pub fn row(device: &str, p: &SystemParams, reference: (Option<f64>, Option<f64>)) -> Result<Row> {
    let cells = Convention::ALL
        .iter()
        .map(|c| {
            let q = c.apply(p);
            Ok(Cell {
                convention: *c,
                n_th: occupation_budget(&q)?.n_th,
                n_c_min: classical_bound(&q)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Row {
        device: device.to_string(),
        length_m: p.cantilever.length,
        frequency_hz: p.cantilever.omega_m / TWO_PI,
        q_m: p.cantilever.q_m,
        cells,
        reference_n_th: reference.0,
        reference_n_c_min: reference.1,
    })
}

/// Largest |log ratio| between computed and published values for one
/// convention, over every published entry; `None` without references.
pub fn worst_log_ratio(rows: &[Row], convention: usize) -> Option<f64> {
    let mut worst: Option<f64> = None;
    for r in rows {
        let c = &r.cells[convention];
        for (mine, theirs) in [(c.n_th, r.reference_n_th), (c.n_c_min, r.reference_n_c_min)] {
            if let Some(t) = theirs {
                let v = (mine / t).ln().abs();
                worst = Some(worst.map_or(v, |w: f64| w.max(v)));
            }
        }
    }
    worst
}

/// Index into [`Convention::ALL`] with the smallest worst-case deviation.
pub fn best_convention(rows: &[Row]) -> Option<(usize, f64)> {
    (0..Convention::ALL.len())
        .filter_map(|i| worst_log_ratio(rows, i).map(|w| (i, w.exp())))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

pub fn render(rows: &[Row]) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = write!(out, "{:<14} {:>9} {:>10} {:>9}", "device", "L_m [µm]", "f [Hz]", "Q_m");
    for c in &Convention::ALL {
        let _ = write!(out, " | {:^21}", c.label());
    }
    let _ = writeln!(out, " | {:^21}", "published");
    let _ = write!(out, "{:<14} {:>9} {:>10} {:>9}", "", "", "", "");
    for _ in 0..=Convention::ALL.len() {
        let _ = write!(out, " | {:>10} {:>10}", "n_th", "n_C,min");
    }
    out.push('\n');
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2e}"));
    for r in rows {
        let _ = write!(
            out,
            "{:<14} {:>9.1} {:>10.3e} {:>9.2e}",
            r.device,
            r.length_m * 1e6,
            r.frequency_hz,
            r.q_m
        );
        for c in &r.cells {
            let _ = write!(out, " | {:>10.2e} {:>10.2e}", c.n_th, c.n_c_min);
        }
        let _ = writeln!(out, " | {:>10} {:>10}", opt(r.reference_n_th), opt(r.reference_n_c_min));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use photocool_core::presets;

    fn rows() -> Vec<Row> {
        vec![
            row("verbridge", &presets::verbridge_like(), (Some(1.2e6), Some(5.0))).unwrap(),
            row("metzger", &presets::metzger_like(), (Some(1.7e8), Some(6.4e5))).unwrap(),
            row("favero", &presets::favero_like(), (Some(2.2e6), Some(7.8e3))).unwrap(),
        ]
    }

    #[test]
    fn angular_300k_values() {
        let r = rows();
        // kT/ħω with ω = 2π·46 kHz at 300 K.
        let c = &r[1].cells[2];
        assert!((c.n_th / 1.3590e8 - 1.0).abs() < 1e-3, "{}", c.n_th);
        assert!((c.n_c_min / 3.21e5 - 1.0).abs() < 1e-2);
        assert!((r[0].cells[2].n_c_min / 3.33 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn some_convention_within_factor_three() {
        let (i, factor) = best_convention(&rows()).unwrap();
        assert!(factor < AGREEMENT_FACTOR, "{factor}");
        assert_eq!(Convention::ALL[i].frequency, FrequencyReading::Literal);
        assert_eq!(Convention::ALL[i].temperature_k, 77.0);
    }

    #[test]
    fn single_row_renders_one_line() {
        let r = vec![rows().remove(0)];
        assert_eq!(render(&r).lines().count(), 3);
    }
}
