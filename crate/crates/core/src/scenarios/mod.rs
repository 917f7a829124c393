//! End-to-end dataset builders: rate regions, noisy random-circuit sweeps,
//! bath-coupled chaos curves, and uncoded storage baselines.

mod baseline;
mod chaos;

pub use baseline::{
    baseline_bruteforce, baseline_closed_form, baseline_dataset, lower_bound_cases, BaselineCase, BASELINE_COLUMNS,
    BRUTEFORCE_MAX_DIM,
};
pub use chaos::{
    chaos_error_curve, sample_couplings, time_average, uniform_t_grid, ChaosConfig, ChaosRun, CounterKey, CHAOS_COLUMNS,
};

use crate::capacity::{error_bound, noisy_bound_from, region_grid, GateRule, NoiseSpec, RatePoint};
use crate::dataset::ScenarioDataset;
use crate::entropy::{h_channel_detailed, SolverConfig};
use crate::error::{argument, Result};

/// Error bounds over a rate grid for `N` qubits, each hit by `noise`.
pub fn rqc_region_dataset(noise: NoiseSpec, n_qubits: u32, grid: &[RatePoint], cfg: &SolverConfig) -> Result<ScenarioDataset> {
    region_grid(noise, n_qubits, grid, cfg)
}

pub const NOISY_SWEEP_COLUMNS: [&str; 6] = ["N", "c", "q", "case_i_baseline", "case_ii_noiseless", "case_iii_noisy"];

/// Under dephasing `p`, compares uncoded storage (i), a noiseless random
/// circuit encoder (ii), and one whose gates have fidelity `f` (iii), for
/// every `q` in `q_list` and `N` in `n_min..=n_max`.
pub fn rqc_noisy_sweep(
    p: f64,
    f: f64,
    c: f64,
    q_list: &[f64],
    n_min: u32,
    n_max: u32,
    cfg: &SolverConfig,
) -> Result<ScenarioDataset> {
    if n_min == 0 || n_min > n_max {
        return argument(format!("N range {}..={} is empty or starts at zero", n_min, n_max));
    }
    if q_list.is_empty() {
        return argument("q list is empty");
    }
    noisy_bound_from(0.0, f, 1)?;
    let noise = NoiseSpec::Dephasing(p);
    let (h, solved) = h_channel_detailed(&[noise.channel()?], 1, cfg)?;
    let rule = GateRule::CeilPow32;

    let mut ds = ScenarioDataset::new(&NOISY_SWEEP_COLUMNS);
    ds.set_meta("p", p);
    ds.set_meta("f", f);
    ds.set_meta("h", h);
    ds.set_meta("solver_converged", solved.iter().all(|r| r.converged));
    ds.set_meta("gate_rule", "ceil(N^1.5)");
    for &q in q_list {
        let pt = RatePoint::new(c, q)?;
        for n in n_min..=n_max {
            let baseline = baseline_closed_form(&BaselineCase::new(noise, c, q, n)?);
            let ideal = error_bound(pt, h, 1, n)?;
            let noisy = noisy_bound_from(ideal, f, rule.gates(n as u64))?;
            ds.push(vec![(n as usize).into(), c.into(), q.into(), baseline.into(), ideal.into(), noisy.into()]);
        }
    }
    Ok(ds)
}
