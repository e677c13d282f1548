//! Parallel ensembles. Each member owns its RNG streams, so the result does
//! not depend on the thread count or scheduling.

use photocool_core::simulator::{simulate, SimConfig, Trajectory};
use photocool_core::{Result, SystemParams};
use rayon::prelude::*;

/// Simulate members `0..cfg.ensemble` on up to `jobs` threads (0 = all
/// cores). Members are returned in order.
pub fn run_ensemble(p: &SystemParams, cfg: &SimConfig, jobs: usize) -> Result<Vec<Trajectory>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| {
        (0..cfg.ensemble as u64)
            .into_par_iter()
            .map(|k| simulate(p, cfg, k))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use photocool_core::presets;
    use photocool_core::simulator::simulate_ensemble;

    #[test]
    fn thread_count_does_not_change_results() {
        let p = presets::benchmark();
        let mut cfg = SimConfig::recommended(&p, 8, 100.0).unwrap();
        cfg.ensemble = 3;
        let serial = simulate_ensemble(&p, &cfg).unwrap();
        assert_eq!(run_ensemble(&p, &cfg, 1).unwrap(), serial);
        assert_eq!(run_ensemble(&p, &cfg, 3).unwrap(), serial);
    }
}
