//! Frequency-domain solution of the linearized Langevin equation.
//!
//! One-sided convention: ⟨x²⟩ = (1/2π)∫₀^∞ S(ω) dω and
//! n = mω̃⟨x²⟩/ħ − ½. Forces are white with two-sided strength q
//! (⟨F(t)F(t')⟩ = q δ(t − t')), so S(ω) = 2q·filter(ω)/(m²|D(ω)|²).

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;
// Float math for toolchains whose `core` lacks inherent f64 methods.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::model::{occupation_budget, DerivedQuantities};
use crate::params::SystemParams;

/// Minimum samples per linewidth around the resonance.
pub const MIN_POINTS_PER_LINEWIDTH: usize = 20;

/// Occupancies below this are integration failures, not physics.
const NEGATIVE_OCCUPANCY_TOLERANCE: f64 = -1e-3;

/// One-sided displacement PSD with its per-source decomposition, m²·s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Angular frequencies, rad/s, strictly increasing.
    pub freqs: Vec<f64>,
    pub total: Vec<f64>,
    pub thermal: Vec<f64>,
    pub radiation_pressure: Vec<f64>,
    pub shot: Vec<f64>,
    /// [`SystemParams::fingerprint`] of the generating parameters.
    pub params_hash: u64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Trapezoid ∫S dω over the grid, without tails.
    pub fn integrate(&self) -> f64 {
        trapezoid(&self.freqs, &self.total)
    }
}

/// Linear response of the mode and the strengths of the three noise forces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseModel {
    pub omega_m: f64,
    pub mass: f64,
    pub tau: f64,
    /// Γ_m + Γ_rp, rad/s. Photothermal damping enters through the delay term.
    pub viscous_damping: f64,
    pub grad_f: f64,
    /// Two-sided thermal force strength 2mΓ_m kT̄, N²·s.
    pub q_thermal: f64,
    /// Two-sided radiation-pressure force strength 2mΓ_rp ħω̃ n_rp, N²·s.
    pub q_radiation_pressure: f64,
    /// Two-sided shot-noise strength N², before the kernel filter, N²·s.
    pub q_shot: f64,
    pub omega_tilde: f64,
    /// Γ_m + Γ_rp + Γ_ph from the rate equation, rad/s.
    pub total_damping: f64,
}

impl ResponseModel {
    pub fn from_budget(p: &SystemParams, d: &DerivedQuantities) -> Self {
        let m = p.cantilever.mass;
        let quantum = HBAR * d.omega_m_tilde;
        Self {
            omega_m: p.cantilever.omega_m,
            mass: m,
            tau: p.cantilever.tau,
            viscous_damping: d.gamma_m + d.gamma_rp,
            grad_f: d.grad_f,
            q_thermal: 2.0 * m * d.gamma_m * quantum * d.n_th,
            q_radiation_pressure: 2.0 * m * d.gamma_rp * quantum * d.n_rp,
            q_shot: d.noise_strength * d.noise_strength,
            omega_tilde: d.omega_m_tilde,
            total_damping: d.total_damping(),
        }
    }

    pub fn from_params(p: &SystemParams) -> Result<Self> {
        Ok(Self::from_budget(p, &occupation_budget(p)?))
    }

    /// D(ω) = ω_m² − ω² + iω(Γ_m + Γ_rp) − ∇F/(m(1 + iωτ)).
    pub fn denominator(&self, omega: f64) -> Complex64 {
        let delayed = Complex64::new(self.grad_f / self.mass, 0.0)
            / Complex64::new(1.0, omega * self.tau);
        Complex64::new(
            self.omega_m * self.omega_m - omega * omega,
            omega * self.viscous_damping,
        ) - delayed
    }

    /// (S_th, S_rp, S_shot) at `omega`.
    pub fn components(&self, omega: f64) -> (f64, f64, f64) {
        let gain = 2.0 / (self.mass * self.mass * self.denominator(omega).norm_sqr());
        let wt = omega * self.tau;
        (
            gain * self.q_thermal,
            gain * self.q_radiation_pressure,
            gain * self.q_shot / (1.0 + wt * wt),
        )
    }

    pub fn total(&self, omega: f64) -> f64 {
        let (a, b, c) = self.components(omega);
        a + b + c
    }

    /// Location of the minimum of |D(ω)| in the weak-damping limit, from the
    /// fixed point ω² = ω_m² − ∇F/(m(1 + ω²τ²)). Coincides with ω̃ only when
    /// ∇F(ωτ)²/(mω_m²) is small.
    pub fn resonance_peak(&self) -> f64 {
        let w2 = self.omega_m * self.omega_m;
        let g = self.grad_f / self.mass;
        let mut omega = self.omega_tilde;
        for _ in 0..200 {
            let wt = omega * self.tau;
            let next = (w2 - g / (1.0 + wt * wt)).max(0.0).sqrt();
            if (next - omega).abs() <= 1e-15 * omega {
                return next;
            }
            omega = next;
        }
        omega
    }

    /// n = mω̃⟨x²⟩/ħ − ½ for a displacement variance.
    pub fn occupancy_from_variance(&self, variance: f64) -> f64 {
        self.mass * self.omega_tilde * variance / HBAR - 0.5
    }
}

/// D(ω) for the parameters' steady state.
pub fn response_denominator(p: &SystemParams, omega: f64) -> Result<Complex64> {
    Ok(ResponseModel::from_params(p)?.denominator(omega))
}

/// Grid spanning [ω̃/10, 10ω̃] with `points_per_linewidth` uniform samples per
/// total linewidth over ±100 linewidths of the resonance and geometric
/// spacing outside.
pub fn resonance_grid(p: &SystemParams, points_per_linewidth: usize) -> Result<Vec<f64>> {
    let model = ResponseModel::from_params(p)?;
    Ok(grid_for(&model, points_per_linewidth))
}

fn grid_for(model: &ResponseModel, points_per_linewidth: usize) -> Vec<f64> {
    let lo = model.omega_tilde / 10.0;
    let hi = model.omega_tilde * 10.0;
    let peak = model.resonance_peak();
    let width = model.total_damping;
    let step = width / points_per_linewidth.max(1) as f64;
    let dense_lo = (peak - 100.0 * width).max(lo);
    let dense_hi = (peak + 100.0 * width).min(hi);

    let mut grid = Vec::new();
    let geometric = |a: f64, b: f64, grid: &mut Vec<f64>| {
        if b <= a {
            return;
        }
        let n = ((b / a).ln() / 1e-3).ceil().max(1.0) as usize;
        let ratio = (b / a).powf(1.0 / n as f64);
        let mut v = a;
        for _ in 0..n {
            grid.push(v);
            v *= ratio;
        }
    };
    geometric(lo, dense_lo, &mut grid);
    let n_dense = ((dense_hi - dense_lo) / step).ceil() as usize;
    for i in 0..n_dense {
        grid.push(dense_lo + i as f64 * step);
    }
    geometric(dense_hi, hi, &mut grid);
    grid.push(hi);
    grid.dedup_by(|a, b| *a <= *b);
    grid
}

/// Evaluate the PSD and its components on `freqs`.
pub fn displacement_psd(p: &SystemParams, freqs: &[f64]) -> Result<Spectrum> {
    let model = ResponseModel::from_params(p)?;
    check_grid(&model, freqs)?;
    let mut spectrum = Spectrum {
        freqs: freqs.to_vec(),
        total: Vec::with_capacity(freqs.len()),
        thermal: Vec::with_capacity(freqs.len()),
        radiation_pressure: Vec::with_capacity(freqs.len()),
        shot: Vec::with_capacity(freqs.len()),
        params_hash: p.fingerprint(),
    };
    for &omega in freqs {
        let (th, rp, shot) = model.components(omega);
        spectrum.thermal.push(th);
        spectrum.radiation_pressure.push(rp);
        spectrum.shot.push(shot);
        spectrum.total.push(th + rp + shot);
    }
    Ok(spectrum)
}

fn check_grid(model: &ResponseModel, freqs: &[f64]) -> Result<()> {
    let coarse = |reason: alloc::string::String| Err(Error::GridTooCoarse { reason });
    if freqs.len() < 2 {
        return coarse(format!("{} points", freqs.len()));
    }
    if freqs.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return coarse("frequencies must be finite and > 0".into());
    }
    if freqs.windows(2).any(|w| w[1] <= w[0]) {
        return coarse("frequencies must be strictly increasing".into());
    }
    let lo = model.omega_tilde / 10.0;
    let hi = model.omega_tilde * 10.0;
    let slack = 1e-9;
    if freqs[0] > lo * (1.0 + slack) || freqs[freqs.len() - 1] < hi * (1.0 - slack) {
        return coarse(format!(
            "grid [{:e}, {:e}] does not span [{lo:e}, {hi:e}] rad/s",
            freqs[0],
            freqs[freqs.len() - 1]
        ));
    }
    let peak = model.resonance_peak();
    let half = 0.5 * model.total_damping;
    let inside = freqs
        .iter()
        .filter(|&&w| w >= peak - half && w <= peak + half)
        .count();
    if inside < MIN_POINTS_PER_LINEWIDTH {
        return coarse(format!(
            "{inside} points within one linewidth of the resonance, need {MIN_POINTS_PER_LINEWIDTH}"
        ));
    }
    Ok(())
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Occupation from a sampled spectrum.
///
/// Trapezoid over the grid plus two tail estimates: flat below the first
/// point, ω⁻⁴ above the last.
pub fn occupancy_from_psd(spec: &Spectrum, p: &SystemParams) -> Result<f64> {
    let model = ResponseModel::from_params(p)?;
    let (first, last) = match (spec.freqs.first(), spec.freqs.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::GridTooCoarse { reason: "empty spectrum".into() }),
    };
    let n_pts = spec.len();
    let low_tail = first * spec.total[0];
    let high_tail = last * spec.total[n_pts - 1] / 3.0;
    let area = spec.integrate() + low_tail + high_tail;
    let n = model.occupancy_from_variance(area / crate::constants::TWO_PI);
    if n < NEGATIVE_OCCUPANCY_TOLERANCE || !n.is_finite() {
        return Err(Error::NegativeOccupancy { n });
    }
    Ok(n)
}

/// Occupation by adaptive quadrature of the exact PSD over (0, ∞),
/// with breakpoints around the resonance and ω = ω_b/u on the tail.
pub fn quadrature_occupancy(p: &SystemParams, rel_tol: f64) -> Result<f64> {
    let model = ResponseModel::from_params(p)?;
    let area = integrate_psd(&model, rel_tol);
    let n = model.occupancy_from_variance(area / crate::constants::TWO_PI);
    if n < NEGATIVE_OCCUPANCY_TOLERANCE || !n.is_finite() {
        return Err(Error::NegativeOccupancy { n });
    }
    Ok(n)
}

/// ∫₀^∞ S_total dω.
pub fn integrate_psd(model: &ResponseModel, rel_tol: f64) -> f64 {
    let peak = model.resonance_peak();
    let width = model.total_damping.max(1e-12 * peak);
    let top = 10.0 * model.omega_tilde.max(peak);
    let mut breaks = Vec::from([0.0]);
    for k in [-1000.0, -100.0, -10.0, -2.0, -0.5, 0.0, 0.5, 2.0, 10.0, 100.0, 1000.0] {
        let w = peak + k * width;
        if w > 0.0 && w < top {
            breaks.push(w);
        }
    }
    breaks.push(top);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    breaks.dedup();

    // Scale for the absolute tolerance: the Lorentzian area estimate.
    let scale = core::f64::consts::PI * model.total(peak) * width / 2.0;
    let abs_tol = rel_tol * scale.max(f64::MIN_POSITIVE);
    let f = |w: f64| model.total(w);
    let mut area = 0.0;
    for pair in breaks.windows(2) {
        area += adaptive_simpson(&f, pair[0], pair[1], abs_tol / breaks.len() as f64, 50);
    }
    let tail = |u: f64| {
        if u <= 0.0 {
            0.0
        } else {
            let w = top / u;
            model.total(w) * top / (u * u)
        }
    };
    area + adaptive_simpson(&tail, 0.0, 1.0, abs_tol / breaks.len() as f64, 50)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
