//! Noise-floor optimization chain and a penalty Nelder-Mead device search.
//!
//! In the reduced variables r = Γ_c/α, w = ω_mτ, Q_c = ω_c/Γ_c, Δ̃ = Δ/Γ_c
//! and A = ω_mτ/(χω_cL_c) the noise population reads
//!
//! ```text
//! n_N(A) = [r·(1+w²)/w²·Q_c²·A + (Δ̃² + ¼)/(2A)] / (2Q_cΔ̃ − Δ̃² − ¼)
//! ```
//!
//! a + b/A in A, so the optimum equalizes the two terms.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::model::{classical_population, noise_population, occupation_budget};
use crate::params::SystemParams;

/// Relative distance at which a closed-form limit or bound counts as reached.
pub const LIMIT_TOLERANCE: f64 = 1e-2;

/// Reduced variables of the noise-population optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptInputs {
    /// Γ_c/α, ≥ 1.
    pub gamma_c_over_alpha: f64,
    /// ω_mτ.
    pub omega_m_tau: f64,
    /// ω_c/Γ_c.
    pub q_c: f64,
    /// Δ/Γ_c.
    pub delta_tilde: f64,
}

impl OptInputs {
    pub fn new(gamma_c_over_alpha: f64, omega_m_tau: f64, q_c: f64, delta_tilde: f64) -> Self {
        Self {
            gamma_c_over_alpha,
            omega_m_tau,
            q_c,
            delta_tilde,
        }
    }

    pub fn from_params(p: &SystemParams) -> Self {
        Self {
            gamma_c_over_alpha: p.loss_ratio(),
            omega_m_tau: p.cantilever.omega_m * p.cantilever.tau,
            q_c: p.cavity.q_c(),
            delta_tilde: p.detuning() / p.cavity.gamma_c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_c_over_alpha.is_finite() && self.gamma_c_over_alpha >= 1.0) {
            return Err(Error::param("gamma_c_over_alpha", "must be finite and >= 1"));
        }
        if !(self.omega_m_tau.is_finite() && self.omega_m_tau > 0.0) {
            return Err(Error::param("omega_m_tau", "must be finite and > 0"));
        }
        if !(self.q_c.is_finite() && self.q_c > 0.0) {
            return Err(Error::param("q_c", "must be finite and > 0"));
        }
        if !self.delta_tilde.is_finite() {
            return Err(Error::param("delta_tilde", "must be finite"));
        }
        let d = self.denominator();
        if !(d > 0.0) {
            return Err(Error::HeatingDetuning { denominator: d });
        }
        Ok(())
    }

    /// 2Q_cΔ̃ − Δ̃² − ¼; positive on the cooling side.
    pub fn denominator(&self) -> f64 {
        let d = self.delta_tilde;
        2.0 * self.q_c * d - d * d - 0.25
    }

    /// (1 + w²)/w².
    fn delay_factor(&self) -> f64 {
        let w2 = self.omega_m_tau * self.omega_m_tau;
        (1.0 + w2) / w2
    }

    fn lorentz(&self) -> f64 {
        self.delta_tilde * self.delta_tilde + 0.25
    }

    /// The cooling interval of Δ̃ at this Q_c, if any.
    pub fn cooling_detunings(q_c: f64) -> Option<(f64, f64)> {
        let disc = q_c * q_c - 0.25;
        if !(disc > 0.0) {
            return None;
        }
        let root = disc.sqrt();
        // 0.25/(q_c + root) avoids cancellation in q_c − root.
        Some((0.25 / (q_c + root), q_c + root))
    }
}

/// A = ω_mτ/(χω_cL_c) for physical parameters.
pub fn coupling_a(p: &SystemParams) -> f64 {
    p.cantilever.omega_m * p.cantilever.tau
        / (p.cantilever.chi * p.cavity.omega_c * p.cavity.length)
}

/// The two terms of n_N(A).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBreakdown {
    pub radiation_pressure: f64,
    pub photothermal: f64,
}

impl NoiseBreakdown {
    pub fn total(&self) -> f64 {
        self.radiation_pressure + self.photothermal
    }
}

pub fn noise_terms(inp: &OptInputs, a: f64) -> Result<NoiseBreakdown> {
    inp.validate()?;
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::param("A", "must be finite and > 0"));
    }
    let d = inp.denominator();
    Ok(NoiseBreakdown {
        radiation_pressure: inp.gamma_c_over_alpha * inp.delay_factor() * inp.q_c * inp.q_c * a / d,
        photothermal: inp.lorentz() / (2.0 * a * d),
    })
}

/// n_N as a function of A.
pub fn noise_population_a(inp: &OptInputs, a: f64) -> Result<f64> {
    Ok(noise_terms(inp, a)?.total())
}

/// A minimizing [`noise_population_a`].
pub fn optimal_a(inp: &OptInputs) -> Result<f64> {
    inp.validate()?;
    Ok((inp.lorentz() / (2.0 * inp.gamma_c_over_alpha * inp.q_c * inp.q_c) / inp.delay_factor())
        .sqrt())
}

/// n_N at A = A_opt.
pub fn noise_floor(inp: &OptInputs) -> Result<f64> {
    inp.validate()?;
    Ok((2.0 * inp.gamma_c_over_alpha * inp.delay_factor()).sqrt() * inp.q_c * inp.lorentz().sqrt()
        / inp.denominator())
}

/// Limit of [`noise_floor`] as Q_c → ∞ at fixed Δ̃ > 0.
pub fn large_qc_limit(inp: &OptInputs) -> Result<f64> {
    if !(inp.delta_tilde > 0.0) {
        return Err(Error::HeatingDetuning {
            denominator: inp.denominator(),
        });
    }
    let d = inp.delta_tilde;
    Ok(noise_bound(inp.gamma_c_over_alpha, inp.omega_m_tau)? * (1.0 + 0.25 / (d * d)).sqrt())
}

/// √(r(1 + w²)/(2w²)): floor of n_N over A, Q_c and Δ̃.
pub fn noise_bound(gamma_c_over_alpha: f64, omega_m_tau: f64) -> Result<f64> {
    if !(gamma_c_over_alpha.is_finite() && gamma_c_over_alpha >= 1.0) {
        return Err(Error::param("gamma_c_over_alpha", "must be finite and >= 1"));
    }
    if !(omega_m_tau > 0.0) {
        return Err(Error::param("omega_m_tau", "must be > 0"));
    }
    let w2 = omega_m_tau * omega_m_tau;
    Ok((gamma_c_over_alpha * (1.0 + w2) / (2.0 * w2)).sqrt())
}

/// 3√3·kT/(ħω_mQ_m) with the bath temperature T.
pub fn classical_bound(p: &SystemParams) -> Result<f64> {
    let m = &p.cantilever;
    let t = p.environment.temperature;
    if !(t > 0.0 && m.omega_m > 0.0 && m.q_m > 0.0) {
        return Err(Error::param("temperature", "T, omega_m and q_m must be > 0"));
    }
    Ok(3.0 * 3f64.sqrt() * K_B * t / (HBAR * m.omega_m * m.q_m))
}

/// Which closed forms are within [`LIMIT_TOLERANCE`] of the reported value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LimitFlags {
    /// The noise floor sits on its Q_c → ∞ limit.
    pub large_qc: bool,
    /// The noise floor sits on the overall noise bound.
    pub noise_bound: bool,
    /// The classical population sits on the classical bound (device search only).
    pub classical_bound: bool,
}

/// Analytic optimum over A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub n_noise: f64,
    pub a_opt: f64,
    pub breakdown: NoiseBreakdown,
    pub limit_flags: LimitFlags,
}

fn near(value: f64, reference: f64) -> bool {
    (value - reference).abs() <= LIMIT_TOLERANCE * reference.abs()
}

/// Evaluate the chain A_opt → n_N floor → limits for `inp`.
pub fn optimize_noise(inp: &OptInputs) -> Result<OptResult> {
    let a_opt = optimal_a(inp)?;
    let breakdown = noise_terms(inp, a_opt)?;
    let floor = noise_floor(inp)?;
    let limit = large_qc_limit(inp)?;
    let bound = noise_bound(inp.gamma_c_over_alpha, inp.omega_m_tau)?;
    Ok(OptResult {
        n_noise: floor,
        a_opt,
        breakdown,
        limit_flags: LimitFlags {
            large_qc: near(floor, limit),
            noise_bound: near(floor, bound),
            classical_bound: false,
        },
    })
}

/// Detuning minimizing [`noise_floor`] at finite Q_c, by golden-section search
/// in ln Δ̃ over the cooling interval. Returns (Δ̃*, n_N floor).
pub fn optimal_detuning(gamma_c_over_alpha: f64, omega_m_tau: f64, q_c: f64) -> Result<(f64, f64)> {
    let (lo, hi) = OptInputs::cooling_detunings(q_c).ok_or(Error::HeatingDetuning {
        denominator: -0.25,
    })?;
    let floor_at = |ln_d: f64| {
        noise_floor(&OptInputs::new(gamma_c_over_alpha, omega_m_tau, q_c, ln_d.exp()))
            .unwrap_or(f64::INFINITY)
    };
    // Stay strictly inside the open interval where the floor is finite.
    let (a, b) = ((lo * (1.0 + 1e-9)).ln(), (hi * (1.0 - 1e-9)).ln());
    let x = golden_section(floor_at, a, b, 1e-12);
    let d = x.exp();
    Ok((d, noise_floor(&OptInputs::new(gamma_c_over_alpha, omega_m_tau, q_c, d))?))
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..400 {
        if (b - a).abs() <= tol * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Device parameters the search may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeParameter {
    /// τ, s (log coordinate).
    Tau,
    /// χ, s/m (log coordinate). Varies A at fixed τ.
    Chi,
    /// Δ/Γ_c (linear coordinate).
    Detuning,
    /// P, W (log coordinate).
    Power,
    /// α, rad/s (log coordinate).
    Alpha,
}

impl FreeParameter {
    pub const ALL: [FreeParameter; 5] = [
        FreeParameter::Tau,
        FreeParameter::Chi,
        FreeParameter::Detuning,
        FreeParameter::Power,
        FreeParameter::Alpha,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FreeParameter::Tau => "tau",
            FreeParameter::Chi => "chi",
            FreeParameter::Detuning => "detuning",
            FreeParameter::Power => "power",
            FreeParameter::Alpha => "alpha",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    fn logarithmic(self) -> bool {
        !matches!(self, FreeParameter::Detuning)
    }

    fn encode_coord(self, v: f64) -> f64 {
        if self.logarithmic() {
            v.log10()
        } else {
            v
        }
    }

    fn decode_coord(self, c: f64) -> f64 {
        if self.logarithmic() {
            10f64.powf(c)
        } else {
            c
        }
    }

    /// Current value in `p`, in the units of the bounds.
    pub fn get(self, p: &SystemParams) -> f64 {
        match self {
            FreeParameter::Tau => p.cantilever.tau,
            FreeParameter::Chi => p.cantilever.chi,
            FreeParameter::Detuning => p.detuning() / p.cavity.gamma_c,
            FreeParameter::Power => p.cavity.power,
            FreeParameter::Alpha => p.cavity.alpha,
        }
    }

    pub fn set(self, p: SystemParams, v: f64) -> SystemParams {
        match self {
            FreeParameter::Tau => p.with_tau(v),
            FreeParameter::Chi => p.with_chi(v),
            FreeParameter::Detuning => p.with_detuning(v * p.cavity.gamma_c),
            FreeParameter::Power => p.with_power(v),
            FreeParameter::Alpha => {
                let mut q = p;
                q.cavity.alpha = v;
                q
            }
        }
    }
}

/// Quantity minimized by [`joint_optimize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// n_C + n_N.
    #[default]
    Approximate,
    /// n_tot from the rate equation.
    RateEquation,
    /// n_N alone.
    Noise,
}

/// Outcome of [`joint_optimize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointOptimum {
    /// Parameters at the optimum.
    pub params: SystemParams,
    pub free: Vec<FreeParameter>,
    /// Optimal values in the order of `free`.
    pub values: Vec<f64>,
    pub objective: Objective,
    pub objective_value: f64,
    pub n_tot: f64,
    pub n_classical: f64,
    pub n_noise: f64,
    /// A at the optimum and the reduced-variable chain there.
    pub a: f64,
    pub noise: OptResult,
    pub evaluations: usize,
}

const RESTARTS: usize = 5;
const STARTS: usize = 5;

fn evaluate(p: &SystemParams, objective: Objective) -> Option<f64> {
    let v = match objective {
        Objective::Approximate => classical_population(p).ok()? + noise_population(p).ok()?,
        Objective::RateEquation => occupation_budget(p).ok()?.n_tot,
        Objective::Noise => noise_population(p).ok()?,
    };
    (v.is_finite() && v > 0.0).then_some(v)
}

/// Constraint violation ≥ 0 of a candidate; zero means every constraint holds.
fn violation(p: &SystemParams, coords: &[f64], box_lo: &[f64], box_hi: &[f64]) -> f64 {
    let mut v = 0.0;
    for ((&c, &lo), &hi) in coords.iter().zip(box_lo).zip(box_hi) {
        v += (lo - c).max(0.0) + (c - hi).max(0.0);
    }
    if p.validate().is_err() {
        return v + 1.0;
    }
    let inp = OptInputs::from_params(p);
    let d = inp.denominator();
    v += (-d / (1.0 + inp.q_c)).max(0.0);
    if let Ok(f) = crate::model::force_gradient_and_noise(p) {
        let g = f.gradient / (p.cantilever.mass * p.cantilever.omega_m * p.cantilever.omega_m);
        v += (g - 1.0).max(0.0);
    }
    v
}

struct Problem<'a> {
    base: SystemParams,
    free: &'a [FreeParameter],
    lo: Vec<f64>,
    hi: Vec<f64>,
    objective: Objective,
    evaluations: usize,
}

impl Problem<'_> {
    fn params_at(&self, coords: &[f64]) -> SystemParams {
        self.free
            .iter()
            .zip(coords)
            .fold(self.base, |p, (f, &c)| f.set(p, f.decode_coord(c)))
    }

    /// Objective value when feasible.
    fn feasible_value(&mut self, coords: &[f64]) -> Option<f64> {
        self.evaluations += 1;
        let inside = coords
            .iter()
            .zip(&self.lo)
            .zip(&self.hi)
            .all(|((&c, &lo), &hi)| c >= lo && c <= hi);
        if !inside {
            return None;
        }
        evaluate(&self.params_at(coords), self.objective)
    }

    fn penalized(&mut self, coords: &[f64], weight: f64) -> f64 {
        match self.feasible_value(coords) {
            Some(v) => v,
            None => {
                let p = self.params_at(coords);
                weight * (1.0 + violation(&p, coords, &self.lo, &self.hi))
            }
        }
    }
}

/// Minimize the objective over `free` within `bounds` (natural units, Δ̃ for
/// the detuning), by Nelder-Mead with a penalty on infeasible points.
///
/// Five deterministic starts (the initial point clipped to the box, the box
/// center, three Halton points), each restarted up to five times with the
/// penalty weight raised tenfold. Ties within 10⁻¹² relative go to the
/// lexicographically smallest parameter vector.
pub fn joint_optimize(
    p: &SystemParams,
    free: &[FreeParameter],
    bounds: &[(f64, f64)],
    objective: Objective,
) -> Result<JointOptimum> {
    if free.is_empty() {
        return Err(Error::param("free", "at least one free parameter is required"));
    }
    if free.len() != bounds.len() {
        return Err(Error::param("bounds", "one (lo, hi) pair per free parameter"));
    }
    for (i, f) in free.iter().enumerate() {
        if free[..i].contains(f) {
            return Err(Error::param("free", format!("`{}` listed twice", f.name())));
        }
    }
    let mut lo = Vec::with_capacity(free.len());
    let mut hi = Vec::with_capacity(free.len());
    for (&f, &(a, b)) in free.iter().zip(bounds) {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::param("bounds", format!("`{}`: need finite lo < hi", f.name())));
        }
        if f.logarithmic() && !(a > 0.0) {
            return Err(Error::param("bounds", format!("`{}`: bounds must be > 0", f.name())));
        }
        lo.push(f.encode_coord(a));
        hi.push(f.encode_coord(b));
    }

    let mut problem = Problem {
        base: *p,
        free,
        lo: lo.clone(),
        hi: hi.clone(),
        objective,
        evaluations: 0,
    };

    let n = free.len();
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(STARTS);
    starts.push(
        free.iter()
            .enumerate()
            .map(|(i, f)| {
                let c = f.encode_coord(f.get(p));
                if c.is_finite() {
                    c.clamp(lo[i], hi[i])
                } else {
                    0.5 * (lo[i] + hi[i])
                }
            })
            .collect(),
    );
    starts.push((0..n).map(|i| 0.5 * (lo[i] + hi[i])).collect());
    for k in 1..=(STARTS - 2) {
        starts.push(
            (0..n)
                .map(|i| lo[i] + (hi[i] - lo[i]) * halton(k as u32, PRIMES[i % PRIMES.len()]))
                .collect(),
        );
    }

    // Scale the penalty by the best feasible value among the starts.
    let mut scale: f64 = 0.0;
    for s in &starts {
        if let Some(v) = problem.feasible_value(s) {
            scale = scale.max(v);
        }
    }
    let weight0 = if scale > 0.0 { 10.0 * scale } else { 1.0e6 };

    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in &starts {
        let mut x = start.clone();
        let mut weight = weight0;
        for _ in 0..RESTARTS {
            let step: Vec<f64> = (0..n).map(|i| 0.05 * (hi[i] - lo[i]).max(1e-3)).collect();
            x = nelder_mead(|c| problem.penalized(c, weight), &x, &step, 400 * n.max(1));
            weight *= 10.0;
        }
        if let Some(v) = problem.feasible_value(&x) {
            let better = match &best {
                None => true,
                Some((bv, bx)) => {
                    let tie = (v - bv).abs() <= 1e-12 * bv.abs();
                    if tie {
                        x.partial_cmp(bx) == Some(core::cmp::Ordering::Less)
                    } else {
                        v < *bv
                    }
                }
            };
            if better {
                best = Some((v, x));
            }
        }
    }

    let (value, coords) = best.ok_or(Error::NoFeasiblePoint)?;
    let params = problem.params_at(&coords);
    let d = occupation_budget(&params)?;
    let n_classical = classical_population(&params)?;
    let n_noise = noise_population(&params)?;
    let inp = OptInputs::from_params(&params);
    let mut noise = optimize_noise(&inp)?;
    noise.limit_flags.classical_bound = near(n_classical, classical_bound(&params)?);
    Ok(JointOptimum {
        values: free
            .iter()
            .zip(&coords)
            .map(|(f, &c)| f.decode_coord(c))
            .collect(),
        params,
        free: free.to_vec(),
        objective,
        objective_value: value,
        n_tot: d.n_tot,
        n_classical,
        n_noise,
        a: coupling_a(&params),
        noise,
        evaluations: problem.evaluations,
    })
}

const PRIMES: [u32; 5] = [2, 3, 5, 7, 11];

fn halton(mut index: u32, base: u32) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Plain Nelder-Mead (reflection 1, expansion 2, contraction ½, shrink ½).
fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: &[f64],
    max_iter: usize,
) -> Vec<f64> {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = f(x0);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step[i];
        let v = f(&x);
        simplex.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| {
        s.sort_by(|a, b| {
            a.1.partial_cmp(&b.1)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then_with(|| {
                    a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal)
                })
        })
    };
    for _ in 0..max_iter {
        order(&mut simplex);
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let size = (1..=n)
            .map(|i| {
                simplex[i]
                    .0
                    .iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (worst - best).abs() <= 1e-13 * best.abs().max(1e-300) && size < 1e-10 {
            break;
        }
        if size < 1e-13 {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let x = along(0.5);
            let v = f(&x);
            (x, v)
        } else {
            let x = along(-0.5);
            let v = f(&x);
            (x, v)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for item in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = item
                .0
                .iter()
                .zip(&x_best)
                .map(|(a, b)| b + 0.5 * (a - b))
                .collect();
            let v = f(&x);
            *item = (x, v);
        }
    }
    order(&mut simplex);
    simplex.swap_remove(0).0
}
