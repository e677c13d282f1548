//! Averaged-periodogram PSD of simulated displacement.
//!
//! Hann window, 50% overlap, per-segment mean removal. The output follows the
//! library convention: one-sided in angular frequency with
//! ⟨x²⟩ = (1/2π)∫S dω. Measured spectra carry no per-source decomposition, so
//! the component vectors of the returned [`Spectrum`] are empty.

use photocool_core::constants::TWO_PI;
use photocool_core::model::occupation_budget;
use photocool_core::simulator::Trajectory;
use photocool_core::spectral::Spectrum;
use photocool_core::{Error, Result, SystemParams};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

pub const MIN_SEGMENTS: usize = 8;
/// Segments must span at least this many mechanical periods.
pub const MIN_PERIODS_PER_SEGMENT: f64 = 50.0;

fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| 0.5 - 0.5 * (TWO_PI * i as f64 / len as f64).cos())
        .collect()
}

/// Welch estimate over `segments` half-overlapping segments per trajectory,
/// averaged across all trajectories. Trajectories must share their sampling.
pub fn welch_psd(trajs: &[Trajectory], p: &SystemParams, segments: usize) -> Result<Spectrum> {
    if segments < MIN_SEGMENTS {
        return Err(Error::TooFewSegments {
            segments,
            min: MIN_SEGMENTS,
        });
    }
    let first = trajs.first().ok_or_else(|| Error::InsufficientSamples {
        reason: "no trajectories".into(),
    })?;
    let dt = first.sample_interval();
    let n = trajs.iter().map(Trajectory::len).min().unwrap_or(0);
    if trajs.iter().any(|t| t.sample_interval() != dt) {
        return Err(Error::InsufficientSamples {
            reason: "trajectories differ in sample interval".into(),
        });
    }
    // K segments at 50% overlap cover (K + 1)/2 segment lengths.
    let len = 2 * n / (segments + 1);
    let len = len - len % 2;
    if len < 4 {
        return Err(Error::TooFewSegments {
            segments: 0,
            min: MIN_SEGMENTS,
        });
    }
    let omega = occupation_budget(p)?.omega_m_tilde;
    let periods = len as f64 * dt * omega / TWO_PI;
    if periods < MIN_PERIODS_PER_SEGMENT {
        return Err(Error::InsufficientSamples {
            reason: format!(
                "segments span {periods:.1} mechanical periods; need {MIN_PERIODS_PER_SEGMENT}"
            ),
        });
    }

    let window = hann(len);
    let power: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(len);
    let half = len / 2;
    let mut acc = vec![0.0; half + 1];
    let mut count = 0usize;
    let mut buf = vec![Complex::new(0.0, 0.0); len];
    let step = len / 2;
    for t in trajs {
        for s in 0..segments {
            let seg = &t.x[s * step..s * step + len];
            let mean = seg.iter().sum::<f64>() / len as f64;
            for ((b, &v), &w) in buf.iter_mut().zip(seg).zip(&window) {
                *b = Complex::new((v - mean) * w, 0.0);
            }
            fft.process(&mut buf);
            for (a, b) in acc.iter_mut().zip(&buf) {
                *a += b.norm_sqr();
            }
            count += 1;
        }
    }
    let fs = 1.0 / dt;
    let total: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let one_sided = if k == 0 || k == half { 1.0 } else { 2.0 };
            one_sided * a / (count as f64 * fs * power)
        })
        .collect();
    let freqs = (0..=half).map(|k| TWO_PI * k as f64 * fs / len as f64).collect();
    Ok(Spectrum {
        freqs,
        total,
        thermal: Vec::new(),
        radiation_pressure: Vec::new(),
        shot: Vec::new(),
        params_hash: p.fingerprint(),
    })
}

/// ⟨x²⟩ from a Welch spectrum: the bin sum (1/2π)ΣS·Δω.
pub fn variance(spec: &Spectrum) -> f64 {
    if spec.freqs.len() < 2 {
        return 0.0;
    }
    let d_omega = spec.freqs[1] - spec.freqs[0];
    spec.total.iter().sum::<f64>() * d_omega / TWO_PI
}
