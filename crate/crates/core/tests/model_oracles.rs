use photocool_core::constants::HBAR;
use photocool_core::model::{
    cavity_photon_number, classical_population, force_gradient_and_noise, noise_population,
    occupation_budget,
};
use photocool_core::{presets, SystemParams};
use proptest::prelude::*;

/// F_def(x) = χħω_c(1 − x/L_c)·αn_c(x), evaluated without linearization.
fn deformation_force(p: &SystemParams, x: f64) -> f64 {
    let c = &p.cavity;
    p.cantilever.chi * HBAR * c.omega_c * (1.0 - x / c.length) * c.alpha
        * cavity_photon_number(p, x).unwrap()
}

#[test]
fn gradient_matches_finite_difference_of_exact_force() {
    for p in [presets::benchmark(), presets::metzger_like(), presets::favero_like()] {
        let grad = force_gradient_and_noise(&p).unwrap().gradient;
        // Five-point stencil; h small against the optical linewidth in x.
        let h = 1e-4 * p.cavity.length / p.cavity.q_c();
        let f = |x| deformation_force(&p, x);
        let fd = (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
        assert!((fd / grad - 1.0).abs() < 1e-6, "{fd} vs {grad}");
    }
}

#[test]
fn shot_noise_strength_follows_poisson_current() {
    // Absorbed-photon current αn_c(0) with unit Fano factor gives force
    // noise (χħω_c)²·αn_c(0).
    let p = presets::metzger_like();
    let n = force_gradient_and_noise(&p).unwrap().noise;
    let current = p.cavity.alpha * cavity_photon_number(&p, 0.0).unwrap();
    let per_photon = p.cantilever.chi * HBAR * p.cavity.omega_c;
    assert!((n * n / (per_photon * per_photon * current) - 1.0).abs() < 1e-12);
}

/// Parameter sets with Γ_rp ≤ 10⁻²Γ_m ≤ 10⁻⁴Γ_ph by construction.
fn hierarchical_params() -> impl Strategy<Value = SystemParams> {
    (
        (5.0f64..7.0, -14.0f64..-10.0, -1.0f64..1.0, -3.0f64..-0.5, 0.0f64..3.0),
        (0.0f64..2.5, 9.0f64..12.0, -1.0f64..1.0, 0.0f64..4.0, -5.0f64..-1.0, 0.0f64..2.0),
    )
        .prop_map(
            |((log_wm, log_m, log_w, log_g, q_extra), (log_t, log_gc, log_dt, log_r, log_lc, chi_extra))| {
                let omega_m = 10f64.powf(log_wm);
                let mass = 10f64.powf(log_m);
                let w = 10f64.powf(log_w);
                let g = 10f64.powf(log_g);
                let tau = w / omega_m;
                // Γ_ph/Γ_m = g·Q_m·w/(1 + w²) ≥ 10².
                let q_m = 1e2 * (1.0 + w * w) / (g * w) * 10f64.powf(q_extra);
                let gamma_c = 10f64.powf(log_gc);
                let omega_c = 1.772e15;
                let delta = gamma_c * 10f64.powf(log_dt);
                let r = 10f64.powf(log_r);
                let alpha = gamma_c / r;
                let l_c = 10f64.powf(log_lc);
                let lorentz = delta * delta + 0.25 * gamma_c * gamma_c;
                let numer = 2.0 * omega_c * delta - lorentz;
                let grad = g * mass * omega_m * omega_m;
                // n_c0 at unit χ, then Γ_rp ∝ 1/χ: choose χ so that Γ_rp ≤ 10⁻²Γ_m.
                let n_c0_unit = grad * l_c * lorentz / (alpha * HBAR * omega_c * numer);
                let rp_unit = 4.0 * n_c0_unit * HBAR * gamma_c * omega_c * omega_c
                    / (mass * l_c * l_c)
                    * delta
                    / (lorentz * lorentz);
                let gamma_m = omega_m / q_m;
                let chi = rp_unit / (1e-2 * gamma_m) * 10f64.powf(chi_extra);
                let n_c0 = n_c0_unit / chi;
                let omega_p = omega_c - delta;
                let power = 4.0 * HBAR * omega_p * n_c0 * lorentz / gamma_c;
                let mut p = presets::benchmark();
                p.cavity.omega_c = omega_c;
                p.cavity.gamma_c = gamma_c;
                p.cavity.alpha = alpha;
                p.cavity.length = l_c;
                p.cavity.omega_p = omega_p;
                p.cavity.power = power;
                p.cantilever.omega_m = omega_m;
                p.cantilever.mass = mass;
                p.cantilever.q_m = q_m;
                p.cantilever.tau = tau;
                p.cantilever.chi = chi;
                p.environment.temperature = 10f64.powf(log_t);
                p
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rate_equation_splits_into_classical_and_noise(p in hierarchical_params()) {
        let d = occupation_budget(&p).unwrap();
        prop_assert!(d.gamma_rp <= 1e-2 * d.gamma_m * (1.0 + 1e-9));
        prop_assert!(d.gamma_m <= 1e-2 * d.gamma_ph * (1.0 + 1e-9));
        let split = classical_population(&p).unwrap() + noise_population(&p).unwrap();
        prop_assert!((d.n_tot - split).abs() / d.n_tot < 5e-2, "{} vs {}", d.n_tot, split);
        prop_assert!(d.n_tot >= 0.0 && d.n_classical >= 0.0 && d.n_noise >= 0.0);
        let identity = d.omega_m_tilde * d.omega_m_tilde + d.grad_f / p.cantilever.mass;
        let w2 = p.cantilever.omega_m * p.cantilever.omega_m;
        prop_assert!((identity - w2).abs() <= 8.0 * f64::EPSILON * w2);
    }
}
