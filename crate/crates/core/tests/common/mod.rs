//! Brute-force reference minimizers shared by the oracle suites.
#![allow(dead_code)]

use photocool_core::model::{classical_population, force_gradient_and_noise};
use photocool_core::optimizer::{noise_population_a, OptInputs};
use photocool_core::{SystemParams, TemperatureReference};

/// Golden-section minimum of a unimodal `f` on [a, b]; returns (x, f(x)).
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol * (1.0 + c.abs()) {
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
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Numerical minimum of n_N(A) over ln A; returns (A*, n_N(A*)).
pub fn brute_force_a(inp: &OptInputs) -> (f64, f64) {
    let f = |ln_a: f64| noise_population_a(inp, ln_a.exp()).unwrap();
    let (x, v) = golden_min(f, -80.0, 80.0, 1e-13);
    (x.exp(), v)
}

/// Numerical minimum of n_N over A and Δ̃ ∈ [lo, hi] at fixed Q_c.
pub fn brute_force_a_and_detuning(r: f64, w: f64, q_c: f64, lo: f64, hi: f64) -> (f64, f64) {
    let f = |ln_d: f64| brute_force_a(&OptInputs::new(r, w, q_c, ln_d.exp())).1;
    let (x, v) = golden_min(f, lo.ln(), hi.ln(), 1e-10);
    (x.exp(), v)
}

/// Minimum of n_C on an n×n grid of g = ∇F/(mω_m²) ∈ (0, 1) and
/// ω_mτ ∈ [0.1, 10] (log-spaced), at the bath temperature.
/// Returns (n_C, ω_mτ, g) at the best grid point.
pub fn classical_grid_min(p: &SystemParams, n: usize) -> (f64, f64, f64) {
    let mut base = *p;
    base.temperature_reference = TemperatureReference::Bath;
    let m = &base.cantilever;
    let stiffness = m.mass * m.omega_m * m.omega_m;
    let per_watt = force_gradient_and_noise(&base.with_power(1.0)).unwrap().gradient;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 1..n {
        let g = i as f64 / n as f64;
        for j in 0..=n {
            let wt = 10f64.powf(-1.0 + 2.0 * j as f64 / n as f64);
            let q = base
                .with_power(g * stiffness / per_watt)
                .with_tau(wt / m.omega_m);
            let v = classical_population(&q).unwrap();
            if v < best.0 {
                best = (v, wt, g);
            }
        }
    }
    best
}
