//! Estimation of χ (optionally ε and Γ_c/α) from mode temperature versus
//! input power.
//!
//! Weighted least squares on ln T_eff with a Levenberg-Marquardt solver and a
//! central-difference Jacobian. Free parameters are mapped to unconstrained
//! coordinates: ln χ, ε = 1 + 3·sigmoid(u) (so ε ∈ (1, 4)), and
//! Γ_c/α = 1 + eᵛ.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{noise_population, occupation_budget};
use crate::params::SystemParams;

pub const MAX_ITERATIONS: usize = 200;
/// Relative step of the central-difference Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-6;
/// |correlation| above which a parameter pair is reported weakly identifiable.
pub const CORRELATION_LIMIT: f64 = 0.95;

const EPSILON_MIN: f64 = 1.0;
const EPSILON_SPAN: f64 = 3.0;

/// One measurement: mode temperature at an input power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataRow {
    /// W.
    pub power: f64,
    /// Mode temperature, K.
    pub temperature: f64,
    /// One-sigma uncertainty of `temperature`, K.
    pub sigma: Option<f64>,
}

/// Validated temperature-versus-power data and the device it was taken on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    rows: Vec<DataRow>,
    device: SystemParams,
}

impl Dataset {
    /// Sorts rows by power. `row` in errors is the 1-based position in `rows`.
    pub fn new(rows: Vec<DataRow>, device: SystemParams) -> Result<Self> {
        device.validate()?;
        for (i, r) in rows.iter().enumerate() {
            validate_row(r).map_err(|reason| Error::InvalidDataset { row: i + 1, reason })?;
        }
        let mut indexed: Vec<(usize, DataRow)> = rows.into_iter().enumerate().collect();
        indexed.sort_by(|a, b| a.1.power.total_cmp(&b.1.power));
        for w in indexed.windows(2) {
            if w[0].1.power == w[1].1.power {
                return Err(Error::InvalidDataset {
                    row: w[0].0.max(w[1].0) + 1,
                    reason: format!("duplicate abscissa: power {} W", w[1].1.power),
                });
            }
        }
        if indexed.len() < 3 {
            return Err(Error::InvalidDataset {
                row: indexed.len(),
                reason: format!("need at least 3 rows, got {}", indexed.len()),
            });
        }
        Ok(Self {
            rows: indexed.into_iter().map(|(_, r)| r).collect(),
            device,
        })
    }

    pub fn rows(&self) -> &[DataRow] {
        &self.rows
    }

    pub fn device(&self) -> &SystemParams {
        &self.device
    }

    pub fn bath_temperature(&self) -> f64 {
        self.device.environment.temperature
    }

    pub fn max_power(&self) -> f64 {
        self.rows[self.rows.len() - 1].power
    }
}

/// Checks one row in isolation.
pub fn validate_row(r: &DataRow) -> core::result::Result<(), alloc::string::String> {
    if !(r.power.is_finite() && r.power >= 0.0) {
        return Err(format!("power must be finite and >= 0, got {}", r.power));
    }
    if !(r.temperature.is_finite() && r.temperature > 0.0) {
        return Err(format!("temperature must be finite and > 0, got {}", r.temperature));
    }
    if let Some(s) = r.sigma {
        if !(s.is_finite() && s > 0.0) {
            return Err(format!("sigma must be finite and > 0, got {s}"));
        }
    }
    Ok(())
}

/// Parameters estimated by [`fit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeSet {
    #[default]
    Chi,
    ChiEpsilon,
    ChiEpsilonLossRatio,
}

impl FreeSet {
    pub fn count(self) -> usize {
        match self {
            FreeSet::Chi => 1,
            FreeSet::ChiEpsilon => 2,
            FreeSet::ChiEpsilonLossRatio => 3,
        }
    }

    pub fn names(self) -> &'static [&'static str] {
        &["chi", "epsilon", "gamma_c_over_alpha"][..self.count()]
    }
}

/// T_eff = n_tot·ħω̃/k at input power `power`.
pub fn predict_mode_temperature(p: &SystemParams, power: f64) -> Result<f64> {
    let d = occupation_budget(&p.with_power(power))?;
    Ok(d.n_tot * HBAR * d.omega_m_tilde / K_B)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub free: FreeSet,
    pub chi_hat: f64,
    /// Fitted when free, otherwise the device value.
    pub epsilon_hat: f64,
    /// Fitted when free, otherwise the device value.
    pub loss_ratio_hat: f64,
    /// Row-major covariance of the free parameters in physical units, in the
    /// order of [`FreeSet::names`]. `None` when the normal matrix is singular.
    pub covariance: Option<Vec<f64>>,
    pub correlation: Option<Vec<f64>>,
    pub std_errors: Option<Vec<f64>>,
    /// Some parameter pair has |correlation| > 0.95, or the normal matrix is
    /// singular.
    pub weakly_identifiable: bool,
    /// T_model − T_obs per row in dataset order, K.
    pub residuals: Vec<f64>,
    /// Noise population at the fitted parameters and the largest power.
    pub n_noise_implied: f64,
    pub chi2_per_dof: f64,
    pub iterations: usize,
}

impl FitResult {
    /// Device parameters with the fitted values substituted.
    pub fn apply(&self, p: &SystemParams) -> SystemParams {
        let mut q = p.with_chi(self.chi_hat).with_loss_ratio(self.loss_ratio_hat);
        q.cantilever.epsilon = self.epsilon_hat;
        q
    }
}

fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

fn logit(s: f64) -> f64 {
    (s / (1.0 - s)).ln()
}

struct Model<'a> {
    data: &'a Dataset,
    free: FreeSet,
    weights: Vec<f64>,
}

impl Model<'_> {
    fn params(&self, u: &[f64]) -> SystemParams {
        let mut p = self.data.device.with_chi(u[0].exp());
        if self.free.count() > 1 {
            p.cantilever.epsilon = EPSILON_MIN + EPSILON_SPAN * sigmoid(u[1]);
        }
        if self.free.count() > 2 {
            p = p.with_loss_ratio(1.0 + u[2].exp());
        }
        p
    }

    /// Weighted log residuals, or `None` if the model is undefined at `u`.
    fn residuals(&self, u: &[f64]) -> Option<Vec<f64>> {
        let p = self.params(u);
        self.data
            .rows
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| {
                let t = predict_mode_temperature(&p, r.power).ok()?;
                (t > 0.0 && t.is_finite()).then(|| (t.ln() - r.temperature.ln()) * w)
            })
            .collect()
    }

    fn jacobian(&self, u: &[f64], rows: usize) -> Option<Vec<f64>> {
        let n = u.len();
        let mut j = vec![0.0; rows * n];
        for k in 0..n {
            let h = JACOBIAN_STEP * u[k].abs().max(1.0);
            let mut up = u.to_vec();
            let mut down = u.to_vec();
            up[k] += h;
            down[k] -= h;
            let (ru, rd) = (self.residuals(&up)?, self.residuals(&down)?);
            for i in 0..rows {
                j[i * n + k] = (ru[i] - rd[i]) / (2.0 * h);
            }
        }
        Some(j)
    }
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Fit the free parameters starting from `initial_chi` (and the device's ε
/// and Γ_c/α).
pub fn fit(data: &Dataset, free: FreeSet, initial_chi: f64) -> Result<FitResult> {
    let rows = data.rows.len();
    let n = free.count();
    if n >= rows {
        return Err(Error::Underdetermined { free: n, rows });
    }
    if !(initial_chi.is_finite() && initial_chi > 0.0) {
        return Err(Error::param("chi", "initial guess must be finite and > 0"));
    }
    let weights: Vec<f64> = data
        .rows
        .iter()
        .map(|r| r.sigma.map_or(1.0, |s| r.temperature / s))
        .collect();
    let model = Model {
        data,
        free,
        weights,
    };

    let mut u = vec![initial_chi.ln()];
    if n > 1 {
        let eps = data.device.cantilever.epsilon;
        let s = ((eps - EPSILON_MIN) / EPSILON_SPAN).clamp(1e-3, 1.0 - 1e-3);
        u.push(logit(s));
    }
    if n > 2 {
        u.push((data.device.loss_ratio() - 1.0).max(1e-6).ln());
    }

    let mut r = match model.residuals(&u) {
        Some(r) => r,
        None => {
            // Surface the model's own error at the starting point.
            let p = model.params(&u);
            for row in &data.rows {
                predict_mode_temperature(&p, row.power)?;
            }
            return Err(Error::FitDiverged { iterations: 0 });
        }
    };
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;
    let mut jac = model.jacobian(&u, rows).ok_or(Error::FitDiverged { iterations: 0 })?;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let jtj = linalg::normal_matrix(&jac, rows, n);
        let g = linalg::transpose_times(&jac, &r, rows, n);
        let grad_norm = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if grad_norm <= 1e-14 * c.max(1e-300).sqrt() || c <= 1e-28 {
            converged = true;
            break;
        }
        let max_diag = (0..n).map(|i| jtj[i * n + i]).fold(0.0f64, f64::max);
        let mut accepted = false;
        while lambda < 1e20 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[i * n + i] += lambda * jtj[i * n + i].max(1e-12 * max_diag).max(1e-300);
            }
            let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
            let step = match linalg::solve(&a, &rhs, n) {
                Some(s) => s,
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, b)| a + b).collect();
            if let Some(rt) = model.residuals(&trial) {
                let ct = cost(&rt);
                if ct < c {
                    let small_step = step
                        .iter()
                        .zip(&u)
                        .all(|(s, x)| s.abs() <= 1e-12 * x.abs().max(1.0));
                    let small_gain = c - ct <= 1e-15 * c;
                    u = trial;
                    r = rt;
                    c = ct;
                    lambda = (lambda / 10.0).max(1e-15);
                    accepted = true;
                    if small_step || small_gain {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No descent direction left at any damping: a minimum to precision.
            converged = true;
            break;
        }
        jac = model
            .jacobian(&u, rows)
            .ok_or(Error::FitDiverged { iterations })?;
        if converged {
            break;
        }
    }
    if !converged {
        return Err(Error::FitDiverged { iterations });
    }

    let p_hat = model.params(&u);
    let dof = (rows - n) as f64;
    let has_sigmas = data.rows.iter().all(|r| r.sigma.is_some());
    let scale = if has_sigmas { 1.0 } else { c / dof };
    let jtj = linalg::normal_matrix(&jac, rows, n);
    // d(physical)/d(internal), diagonal.
    let mut chain = vec![u[0].exp()];
    if n > 1 {
        let s = sigmoid(u[1]);
        chain.push(EPSILON_SPAN * s * (1.0 - s));
    }
    if n > 2 {
        chain.push(u[2].exp());
    }
    let covariance = linalg::inverse(&jtj, n).map(|inv| {
        let mut cov = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                cov[i * n + k] = scale * inv[i * n + k] * chain[i] * chain[k];
            }
        }
        cov
    });
    let covariance = covariance.filter(|c| (0..n).all(|i| c[i * n + i] > 0.0 && c[i * n + i].is_finite()));
    let std_errors = covariance
        .as_ref()
        .map(|c| (0..n).map(|i| c[i * n + i].sqrt()).collect::<Vec<f64>>());
    let correlation = match (&covariance, &std_errors) {
        (Some(c), Some(s)) => {
            let mut out = vec![0.0; n * n];
            for i in 0..n {
                for k in 0..n {
                    out[i * n + k] = c[i * n + k] / (s[i] * s[k]);
                }
            }
            Some(out)
        }
        _ => None,
    };
    let weakly_identifiable = match &correlation {
        None => n > 1,
        Some(corr) => (0..n).any(|i| (0..n).any(|k| i != k && corr[i * n + k].abs() > CORRELATION_LIMIT)),
    };

    let residuals = data
        .rows
        .iter()
        .map(|row| Ok(predict_mode_temperature(&p_hat, row.power)? - row.temperature))
        .collect::<Result<Vec<f64>>>()?;
    let n_noise_implied = noise_population(&p_hat.with_power(data.max_power()))?;

    Ok(FitResult {
        free,
        chi_hat: p_hat.cantilever.chi,
        epsilon_hat: p_hat.cantilever.epsilon,
        loss_ratio_hat: p_hat.loss_ratio(),
        covariance,
        correlation,
        std_errors,
        weakly_identifiable,
        residuals,
        n_noise_implied,
        chi2_per_dof: c / dof,
        iterations,
    })
}

/// Synthetic data from [`predict_mode_temperature`] with multiplicative
/// Gaussian noise T·(1 + `relative_noise`·ξ), ξ ~ N(0, 1).
pub fn synthesize(
    p: &SystemParams,
    powers: &[f64],
    relative_noise: f64,
    seed: u64,
) -> Result<Dataset> {
    if !(relative_noise.is_finite() && relative_noise >= 0.0) {
        return Err(Error::param("relative_noise", "must be finite and >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = powers
        .iter()
        .map(|&power| {
            let t = predict_mode_temperature(p, power)?;
            let xi: f64 = StandardNormal.sample(&mut rng);
            Ok(DataRow {
                power,
                temperature: t * (1.0 + relative_noise * xi),
                sigma: None,
            })
        })
        .collect::<Result<Vec<DataRow>>>()?;
    Dataset::new(rows, *p)
}
