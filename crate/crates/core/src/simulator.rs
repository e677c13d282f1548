//! Time-domain Langevin integration with the delayed photothermal force.
//!
//! State (x, p, F_ph). Per step of length dt:
//!
//! ```text
//! p ← p + dt·(−mω_m²x − (Γ_m + Γ_rp)p + F_ph) + √(q_th + q_rp)·√dt·ξ₁
//! x ← x + dt·p/m
//! F_ph ← low-pass of F_def(x) over dt (first-order hold), plus the exact
//!        Ornstein-Uhlenbeck increment of the filtered shot noise N·η
//! ```
//!
//! The (x, p) update is symplectic Euler. Noise draws come from ChaCha8 with
//! one stream per (ensemble member, source), so members are independent and
//! every run is bit-reproducible from its seed.

use alloc::format;
use alloc::vec::Vec;
// Float math for toolchains whose `core` lacks inherent f64 methods.
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B, TWO_PI};
use crate::error::{Error, Result};
use crate::kernel::kernel_lowpass_step_linear;
use crate::model::{
    cavity_photon_number, force_gradient_and_noise, occupation_budget, photothermal_damping,
    pump_amplitude_from_power, radiation_pressure_terms, reference_temperature,
    stability_margin,
};
use crate::params::SystemParams;

/// Name of the generator, echoed in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), seed_from_u64, stream = 4·member + source";

/// Instability threshold in units of the thermal displacement amplitude.
pub const INSTABILITY_FACTOR: f64 = 1.0e3;

const STREAM_THERMAL: u64 = 0;
const STREAM_SHOT: u64 = 1;
const STREAM_RADIATION_PRESSURE: u64 = 2;

/// Integration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Time step, s.
    pub dt: f64,
    /// Total integrated time including burn-in, s.
    pub t_total: f64,
    /// Transient discarded from the record, s.
    pub t_burn_in: f64,
    pub seed: u64,
    /// Evaluate the exact cavity population at x instead of its linearization.
    #[serde(default)]
    pub nonlinear_cavity: bool,
    /// Number of independent trajectories.
    #[serde(default = "one")]
    pub ensemble: usize,
    /// Keep every `record_stride`-th step.
    #[serde(default = "one")]
    pub record_stride: usize,
    #[serde(default = "yes")]
    pub thermal_noise: bool,
    #[serde(default = "yes")]
    pub shot_noise: bool,
    #[serde(default = "yes")]
    pub radiation_pressure_noise: bool,
    /// Initial displacement, m.
    #[serde(default)]
    pub x0: f64,
    /// Initial momentum, kg·m/s.
    #[serde(default)]
    pub p0: f64,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

/// Rates and noise strengths the integrator needs. Defined on both sides of
/// the stability boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimRates {
    pub grad_f: f64,
    pub noise_strength: f64,
    pub gamma_m: f64,
    pub gamma_rp: f64,
    pub n_rp: f64,
    pub gamma_ph: f64,
    /// ω̃ when stable, ω_m otherwise, rad/s.
    pub omega_ref: f64,
    pub n_th: f64,
    /// Two-sided thermal force strength, N²·s.
    pub q_thermal: f64,
    /// Two-sided radiation-pressure force strength, N²·s.
    pub q_radiation_pressure: f64,
    pub stability_margin: f64,
    /// |x| beyond which the run is declared unstable, m.
    pub threshold: f64,
}

impl SimRates {
    pub fn from_params(p: &SystemParams) -> Result<Self> {
        p.validate()?;
        let m = &p.cantilever;
        let forces = force_gradient_and_noise(p)?;
        let (gamma_rp, n_rp) = match radiation_pressure_terms(p) {
            Ok(rp) => (rp.damping, rp.occupation),
            Err(Error::DegenerateDetuning) => (0.0, 0.0),
            Err(e) => return Err(e),
        };
        let margin = stability_margin(p, forces.gradient);
        let omega_ref = if margin > 0.0 {
            (m.omega_m * m.omega_m - forces.gradient / m.mass).sqrt()
        } else {
            m.omega_m
        };
        let n_c0 = cavity_photon_number(p, 0.0)?;
        let temperature = reference_temperature(p, n_c0);
        let n_th = K_B * temperature / (HBAR * omega_ref);
        let zero_point = (HBAR / (2.0 * m.mass * omega_ref)).sqrt();
        Ok(Self {
            grad_f: forces.gradient,
            noise_strength: forces.noise,
            gamma_m: m.gamma_m(),
            gamma_rp,
            n_rp,
            gamma_ph: photothermal_damping(p, forces.gradient),
            omega_ref,
            n_th,
            q_thermal: 2.0 * m.mass * m.gamma_m() * K_B * temperature,
            q_radiation_pressure: (2.0 * m.mass * HBAR * omega_ref * gamma_rp * n_rp).max(0.0),
            stability_margin: margin,
            threshold: INSTABILITY_FACTOR * zero_point * (2.0 * n_th + 1.0).sqrt(),
        })
    }

    /// Γ_m + Γ_rp + Γ_ph, clamped below by Γ_m so heating sets stay usable.
    pub fn relaxation_rate(&self) -> f64 {
        (self.gamma_m + self.gamma_rp + self.gamma_ph).max(self.gamma_m)
    }
}

impl SimConfig {
    /// Settings that satisfy [`SimConfig::validate`] with `relaxation_times`
    /// of recorded steady state after a 10-relaxation-time burn-in.
    pub fn recommended(p: &SystemParams, seed: u64, relaxation_times: f64) -> Result<Self> {
        let r = SimRates::from_params(p)?;
        let rate = r.relaxation_rate();
        let dt = max_dt(p, &r);
        let t_burn_in = 10.0 / rate;
        let period = TWO_PI / r.omega_ref;
        Ok(Self {
            dt,
            t_total: t_burn_in + relaxation_times.max(100.0) / rate,
            t_burn_in,
            seed,
            nonlinear_cavity: false,
            ensemble: 1,
            record_stride: ((period / 8.0) / dt).floor().max(1.0) as usize,
            thermal_noise: true,
            shot_noise: true,
            radiation_pressure_noise: true,
            x0: 0.0,
            p0: 0.0,
        })
    }

    pub fn validate(&self, p: &SystemParams) -> Result<()> {
        let bad = |reason: alloc::string::String| Err(Error::InvalidSimConfig { reason });
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be finite and > 0, got {}", self.dt));
        }
        if !(self.t_burn_in.is_finite() && self.t_burn_in >= 0.0) {
            return bad(format!("t_burn_in must be finite and >= 0, got {}", self.t_burn_in));
        }
        if !(self.t_total.is_finite() && self.t_total > self.t_burn_in) {
            return bad(format!(
                "t_total ({}) must exceed t_burn_in ({})",
                self.t_total, self.t_burn_in
            ));
        }
        if self.ensemble == 0 {
            return bad("ensemble must be >= 1".into());
        }
        if self.record_stride == 0 {
            return bad("record_stride must be >= 1".into());
        }
        if !(self.x0.is_finite() && self.p0.is_finite()) {
            return bad("initial state must be finite".into());
        }
        let r = SimRates::from_params(p)?;
        let limit = max_dt(p, &r);
        if self.dt > limit * (1.0 + 1e-12) {
            return bad(format!(
                "dt = {:e} s exceeds min(2π/ω̃, τ, 1/Γ)/50 = {limit:e} s",
                self.dt
            ));
        }
        let needed = 100.0 / r.relaxation_rate();
        if self.t_total - self.t_burn_in < needed * (1.0 - 1e-12) {
            return bad(format!(
                "recorded span {:e} s is shorter than 100 relaxation times ({needed:e} s)",
                self.t_total - self.t_burn_in
            ));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_total / self.dt).round() as usize
    }

    pub fn burn_in_steps(&self) -> usize {
        (self.t_burn_in / self.dt).round() as usize
    }
}

fn max_dt(p: &SystemParams, r: &SimRates) -> f64 {
    let period = TWO_PI / r.omega_ref;
    period.min(p.cantilever.tau).min(1.0 / r.relaxation_rate()) / 50.0
}

/// Sampled solution of one ensemble member after burn-in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub f_ph: Vec<f64>,
    pub seed: u64,
    pub member: u64,
    pub config: SimConfig,
}

impl Trajectory {
    /// Spacing of the recorded samples, s.
    pub fn sample_interval(&self) -> f64 {
        self.config.dt * self.config.record_stride as f64
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

fn stream(seed: u64, member: u64, source: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(4 * member + source);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Exact deformation force F_def(x) − F_def(0) with the full cavity response.
struct NonlinearForce {
    scale: f64,
    pump_sq: f64,
    omega_c: f64,
    omega_p: f64,
    length: f64,
    half_width_sq: f64,
    offset: f64,
}

impl NonlinearForce {
    fn new(p: &SystemParams) -> Result<Self> {
        let c = &p.cavity;
        let e = pump_amplitude_from_power(p)?;
        let mut f = Self {
            scale: p.cantilever.chi * HBAR * c.omega_c * c.alpha,
            pump_sq: e * e,
            omega_c: c.omega_c,
            omega_p: c.omega_p,
            length: c.length,
            half_width_sq: 0.25 * c.gamma_c * c.gamma_c,
            offset: 0.0,
        };
        f.offset = f.raw(0.0);
        Ok(f)
    }

    fn raw(&self, x: f64) -> f64 {
        let shrink = 1.0 - x / self.length;
        let detuning = self.omega_c * shrink - self.omega_p;
        self.scale * shrink * self.pump_sq / (detuning * detuning + self.half_width_sq)
    }

    fn eval(&self, x: f64) -> f64 {
        self.raw(x) - self.offset
    }
}

/// Integrate one ensemble member.
pub fn simulate(p: &SystemParams, cfg: &SimConfig, member: u64) -> Result<Trajectory> {
    cfg.validate(p)?;
    let r = SimRates::from_params(p)?;
    let m = &p.cantilever;
    let mass = m.mass;
    let spring = mass * m.omega_m * m.omega_m;
    let viscous = r.gamma_m + r.gamma_rp;
    let dt = cfg.dt;
    let tau = m.tau;

    let q_momentum = if cfg.thermal_noise { r.q_thermal } else { 0.0 };
    let q_rp = if cfg.radiation_pressure_noise { r.q_radiation_pressure } else { 0.0 };
    let kick_thermal = (q_momentum * dt).sqrt();
    let kick_rp = (q_rp * dt).sqrt();
    let shot_kick = if cfg.shot_noise {
        r.noise_strength * ((1.0 - (-2.0 * dt / tau).exp()) / (2.0 * tau)).sqrt()
    } else {
        0.0
    };
    let nonlinear = if cfg.nonlinear_cavity {
        Some(NonlinearForce::new(p)?)
    } else {
        None
    };
    let deformation = |x: f64| match &nonlinear {
        Some(f) => f.eval(x),
        None => r.grad_f * x,
    };

    let mut rng_thermal = stream(cfg.seed, member, STREAM_THERMAL);
    let mut rng_shot = stream(cfg.seed, member, STREAM_SHOT);
    let mut rng_rp = stream(cfg.seed, member, STREAM_RADIATION_PRESSURE);

    let steps = cfg.steps();
    let burn = cfg.burn_in_steps();
    let stride = cfg.record_stride;
    let capacity = steps.saturating_sub(burn) / stride + 1;
    let mut traj = Trajectory {
        times: Vec::with_capacity(capacity),
        x: Vec::with_capacity(capacity),
        p: Vec::with_capacity(capacity),
        f_ph: Vec::with_capacity(capacity),
        seed: cfg.seed,
        member,
        config: *cfg,
    };

    let mut x = cfg.x0;
    let mut mom = cfg.p0;
    let mut f_def = deformation(x);
    let mut f_ph = f_def;
    let cavity_length = p.cavity.length;

    for step in 1..=steps {
        let mut kick = 0.0;
        if kick_thermal > 0.0 {
            kick += kick_thermal * normal(&mut rng_thermal);
        }
        if kick_rp > 0.0 {
            kick += kick_rp * normal(&mut rng_rp);
        }
        mom += dt * (-spring * x - viscous * mom + f_ph) + kick;
        x += dt * mom / mass;

        let f_def_next = deformation(x);
        f_ph = kernel_lowpass_step_linear(f_ph, f_def, f_def_next, dt, tau);
        if shot_kick > 0.0 {
            f_ph += shot_kick * normal(&mut rng_shot);
        }
        f_def = f_def_next;

        let t = step as f64 * dt;
        if !(x.is_finite() && mom.is_finite() && f_ph.is_finite()) {
            return Err(Error::NanDetected { time: t });
        }
        if x.abs() > r.threshold || (nonlinear.is_some() && x.abs() >= cavity_length) {
            return Err(Error::InstabilityDetected {
                time: t,
                x,
                threshold: r.threshold,
            });
        }
        if step > burn && (step - burn) % stride == 0 {
            traj.times.push(t);
            traj.x.push(x);
            traj.p.push(mom);
            traj.f_ph.push(f_ph);
        }
    }
    Ok(traj)
}

/// Integrate `cfg.ensemble` members sequentially.
pub fn simulate_ensemble(p: &SystemParams, cfg: &SimConfig) -> Result<Vec<Trajectory>> {
    (0..cfg.ensemble as u64).map(|k| simulate(p, cfg, k)).collect()
}

/// Steady-state occupation estimated from displacement variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OccupancyEstimate {
    pub n_hat: f64,
    pub stderr: f64,
    /// Number of blocks entering the standard error.
    pub blocks: usize,
    /// Estimates from the first and second halves of every record.
    pub first_half: f64,
    pub second_half: f64,
}

/// n̂ = mω̃·var(x)/ħ − ½ with blocking error bars.
///
/// Blocks span 20/(Γ_m + Γ_ph + Γ_rp). Fails when the first-half and
/// second-half estimates differ by more than 3σ.
pub fn estimate_occupancy(trajs: &[Trajectory], p: &SystemParams) -> Result<OccupancyEstimate> {
    let d = occupation_budget(p)?;
    let conversion = p.cantilever.mass * d.omega_m_tilde / HBAR;
    let rate = d.total_damping();

    let mut blocks: Vec<(f64, bool)> = Vec::new();
    for traj in trajs {
        let n = traj.x.len();
        let block_len = ((20.0 / rate) / traj.sample_interval()).ceil().max(1.0) as usize;
        let n_blocks = n / block_len;
        if n_blocks < 2 {
            continue;
        }
        let used = n_blocks * block_len;
        let mean = traj.x[..used].iter().sum::<f64>() / used as f64;
        for b in 0..n_blocks {
            let chunk = &traj.x[b * block_len..(b + 1) * block_len];
            let var = chunk.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / block_len as f64;
            blocks.push((conversion * var - 0.5, 2 * b < n_blocks));
        }
    }
    if blocks.len() < 4 {
        return Err(Error::InsufficientSamples {
            reason: format!(
                "{} blocks of 20 relaxation times; need at least 4",
                blocks.len()
            ),
        });
    }

    let stats = |it: &mut dyn Iterator<Item = f64>| -> (f64, f64, usize) {
        let v: Vec<f64> = it.collect();
        let k = v.len();
        let mean = v.iter().sum::<f64>() / k as f64;
        let var = if k > 1 {
            v.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (k - 1) as f64
        } else {
            0.0
        };
        (mean, (var / k as f64).sqrt(), k)
    };
    let (n_hat, stderr, count) = stats(&mut blocks.iter().map(|b| b.0));
    let (first, se1, _) = stats(&mut blocks.iter().filter(|b| b.1).map(|b| b.0));
    let (second, se2, _) = stats(&mut blocks.iter().filter(|b| !b.1).map(|b| b.0));
    let sigma = (se1 * se1 + se2 * se2).sqrt();
    if (first - second).abs() > 3.0 * sigma {
        return Err(Error::Nonstationary {
            first,
            second,
            sigma,
        });
    }
    Ok(OccupancyEstimate {
        n_hat,
        stderr,
        blocks: count,
        first_half: first,
        second_half: second,
    })
}

/// Counting statistics of absorbed photons in fixed windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountStatistics {
    /// Expected count αn_c(0)·window.
    pub expected_mean: f64,
    pub mean: f64,
    pub variance: f64,
    /// variance/mean; 0 when no photon is absorbed.
    pub fano: f64,
    /// One-sigma sampling uncertainty of the Fano factor.
    pub fano_sigma: f64,
    pub windows: usize,
}

/// Sample the absorbed-photon count n_p = ∫I_c dt over `windows` windows of
/// length `window` with the mirror frozen at x = 0.
pub fn shot_noise_counter(
    p: &SystemParams,
    window: f64,
    windows: usize,
    seed: u64,
) -> Result<CountStatistics> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::param("window", "must be finite and > 0"));
    }
    if windows < 2 {
        return Err(Error::param("windows", "need at least 2 windows"));
    }
    if !(p.cavity.alpha.is_finite() && p.cavity.alpha >= 0.0) {
        return Err(Error::param("alpha", "must be finite and >= 0"));
    }
    let lambda = p.cavity.alpha * cavity_photon_number(p, 0.0)? * window;
    if lambda == 0.0 {
        return Ok(CountStatistics {
            expected_mean: 0.0,
            mean: 0.0,
            variance: 0.0,
            fano: 0.0,
            fano_sigma: 0.0,
            windows,
        });
    }
    let poisson = Poisson::new(lambda)
        .map_err(|e| Error::param("window", format!("count rate unusable: {e}")))?;
    let mut rng = stream(seed, 0, 3);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..windows {
        let c: f64 = poisson.sample(&mut rng);
        let delta = c - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (c - mean);
    }
    let variance = m2 / (windows - 1) as f64;
    let n = windows as f64;
    Ok(CountStatistics {
        expected_mean: lambda,
        mean,
        variance,
        fano: variance / mean,
        fano_sigma: (2.0 / (n - 1.0) + 1.0 / (lambda * n)).sqrt(),
        windows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn quick(p: &SystemParams, seed: u64) -> SimConfig {
        SimConfig::recommended(p, seed, 100.0).unwrap()
    }

    #[test]
    fn recommended_config_validates() {
        for p in [presets::benchmark(), presets::metzger_like()] {
            quick(&p, 1).validate(&p).unwrap();
        }
    }

    #[test]
    fn config_rejects_large_step_and_short_record() {
        let p = presets::benchmark();
        let mut c = quick(&p, 1);
        c.dt *= 2.0;
        assert!(matches!(c.validate(&p), Err(Error::InvalidSimConfig { .. })));
        let mut c = quick(&p, 1);
        c.t_total = c.t_burn_in + 10.0 * c.dt;
        assert!(matches!(c.validate(&p), Err(Error::InvalidSimConfig { .. })));
        let mut c = quick(&p, 1);
        c.ensemble = 0;
        assert!(c.validate(&p).is_err());
    }

    #[test]
    fn same_seed_same_bits() {
        let p = presets::benchmark();
        let c = quick(&p, 7);
        let a = simulate(&p, &c, 0).unwrap();
        let b = simulate(&p, &c, 0).unwrap();
        assert_eq!(a, b);
        let other = simulate(&p, &c, 1).unwrap();
        assert_ne!(a.x, other.x);
    }

    #[test]
    fn recorded_samples_follow_stride() {
        let p = presets::benchmark();
        let c = quick(&p, 3);
        let t = simulate(&p, &c, 0).unwrap();
        let expected = (c.steps() - c.burn_in_steps()) / c.record_stride;
        assert_eq!(t.len(), expected);
        assert!((t.times[1] - t.times[0] - t.sample_interval()).abs() < 1e-12 * t.times[1]);
        assert!(t.times[0] > c.t_burn_in);
    }

    #[test]
    fn variance_conversion_examples() {
        // A record whose variance is exactly ħ/(2mω̃) or 3ħ/(2mω̃).
        let p = presets::benchmark();
        let d = occupation_budget(&p).unwrap();
        let c = quick(&p, 1);
        let block = ((20.0 / d.total_damping()) / (c.dt * c.record_stride as f64)).ceil() as usize;
        for (scale, want) in [(1.0, 0.0), (3.0, 1.0)] {
            let a = (scale * HBAR / (2.0 * p.cantilever.mass * d.omega_m_tilde)).sqrt();
            let x: Vec<f64> = (0..block * 8).map(|i| if i % 2 == 0 { a } else { -a }).collect();
            let n = x.len();
            let t = Trajectory {
                times: (0..n).map(|i| i as f64).collect(),
                x,
                p: alloc::vec![0.0; n],
                f_ph: alloc::vec![0.0; n],
                seed: 0,
                member: 0,
                config: c,
            };
            let est = estimate_occupancy(&[t], &p).unwrap();
            assert!((est.n_hat - want).abs() < 1e-9, "{}", est.n_hat);
        }
    }

    #[test]
    fn shot_counter_mean_and_dark() {
        let p = presets::metzger_like();
        let s = shot_noise_counter(&p, 1e-9, 2000, 5).unwrap();
        assert!((s.mean / s.expected_mean - 1.0).abs() < 0.05);
        let mut q = p;
        q.cavity.alpha = 0.0;
        let z = shot_noise_counter(&q, 1e-9, 10, 5).unwrap();
        assert_eq!((z.mean, z.variance), (0.0, 0.0));
    }

    #[test]
    fn strong_instability_is_flagged() {
        let p = presets::benchmark();
        let grad = force_gradient_and_noise(&p).unwrap().gradient;
        let k = p.cantilever.mass * p.cantilever.omega_m.powi(2);
        let q = p.with_power(p.cavity.power * 1.5 * k / grad);
        let c = SimConfig::recommended(&q, 1, 100.0).unwrap();
        assert!(matches!(simulate(&q, &c, 0), Err(Error::InstabilityDetected { .. })));
    }
}
