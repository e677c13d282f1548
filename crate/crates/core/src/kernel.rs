//! Delayed photothermal response.
//!
//! The photothermal force follows the instantaneous deformation force through
//! h(t) = (1 − e^{−t/τ})Θ(t), i.e. F_ph(t) = ∫ h(t − t') dF_def(t'). Equivalent
//! to the first-order low-pass τ dF_ph/dt = F_def − F_ph.

// Float math for toolchains whose `core` lacks inherent f64 methods.
#[allow(unused_imports)]
use num_traits::Float;

/// h(t) = (1 − e^{−t/τ}) for t ≥ 0, zero before.
pub fn memory_kernel(t: f64, tau: f64) -> f64 {
    if t < 0.0 {
        0.0
    } else if tau == 0.0 {
        1.0
    } else {
        -(-t / tau).exp_m1()
    }
}

/// One low-pass step with F_def held constant over `dt` (zero-order hold).
///
/// Exact for piecewise-constant drive; identical to convolving the kernel
/// with the step increments of F_def.
pub fn kernel_lowpass_step(f_ph: f64, f_def: f64, dt: f64, tau: f64) -> f64 {
    if tau == 0.0 {
        return f_def;
    }
    f_def + (f_ph - f_def) * (-dt / tau).exp()
}

/// One low-pass step with F_def linear between `f_def0` and `f_def1`
/// (first-order hold). Exact for piecewise-linear drive.
pub fn kernel_lowpass_step_linear(f_ph: f64, f_def0: f64, f_def1: f64, dt: f64, tau: f64) -> f64 {
    if tau == 0.0 {
        return f_def1;
    }
    let slope = (f_def1 - f_def0) / dt;
    let decay = (-dt / tau).exp();
    f_def1 - slope * tau + (f_ph - f_def0 + slope * tau) * decay
}

/// Direct discrete convolution of the kernel with the step increments of a
/// piecewise-constant drive sampled every `dt`, starting from rest.
///
/// O(n²); intended as a reference for the recursive form.
pub fn convolve_steps(f_def: &[f64], dt: f64, tau: f64) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec::Vec::with_capacity(f_def.len());
    for n in 0..f_def.len() {
        let mut acc = 0.0;
        let mut prev = 0.0;
        for (j, &f) in f_def[..n].iter().enumerate() {
            let t = (n - j) as f64 * dt;
            acc += memory_kernel(t, tau) * (f - prev);
            prev = f;
        }
        out.push(acc);
    }
    out
}
