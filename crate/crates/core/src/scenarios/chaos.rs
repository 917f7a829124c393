//! Monte-Carlo error curves for qubit pairs coupled to a bath spin with
//! Gaussian-distributed coupling constants.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Cell, ScenarioDataset};
use crate::entropy::{hmax_cond, SolverConfig};
use crate::error::{argument, domain, Result};
use crate::quantum::{choi_from_channel, heisenberg_channel, HeisenbergCouplings};

/// Position of one Monte-Carlo sample in the random stream.
///
/// Every `(seed, t_index, sample_index)` selects an independent ChaCha8
/// stream, and coupling component `k` reads from word offset `4k`, so a
/// draw never depends on how many other draws were made before it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterKey {
    pub seed: u64,
    pub t_index: u32,
    pub sample_index: u32,
}

impl CounterKey {
    pub fn new(seed: u64, t_index: u32, sample_index: u32) -> Self {
        Self { seed, t_index, sample_index }
    }

    /// Standard normal variate for coupling component `component` (Box–Muller).
    pub fn normal(&self, component: u32) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((self.t_index as u64) << 32) | self.sample_index as u64);
        rng.set_word_pos(4 * component as u128);
        let u1 = ((rng.next_u64() >> 11) + 1) as f64 * f64::EPSILON / 2.0;
        let u2 = (rng.next_u64() >> 11) as f64 * f64::EPSILON / 2.0;
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Six independent `N(mean, std²)` couplings: left qubit `(x, y, z)`, then right.
pub fn sample_couplings(key: CounterKey, mean: f64, std: f64) -> Result<HeisenbergCouplings> {
    if !(std >= 0.0 && std.is_finite() && mean.is_finite()) {
        return argument(format!("coupling distribution N({}, {}²) is invalid", mean, std));
    }
    let draw = |k: u32| mean + std * key.normal(k);
    HeisenbergCouplings::new([draw(0), draw(1), draw(2)], [draw(3), draw(4), draw(5)])
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChaosConfig {
    pub p: f64,
    pub t_grid: Vec<f64>,
    /// The system has `2 n_pairs` qubits.
    pub n_pairs: u32,
    pub c: f64,
    pub q: f64,
    pub samples: u32,
    pub coupling_mean: f64,
    pub coupling_std: f64,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl Default for ChaosConfig {
    fn default() -> Self {
        Self {
            p: 1.0,
            t_grid: uniform_t_grid(10.0, 0.1).expect("valid grid"),
            n_pairs: 100,
            c: 0.0,
            q: 0.5,
            samples: 50,
            coupling_mean: 1.0,
            coupling_std: 0.25,
            seed: 0,
            solver: SolverConfig::default(),
        }
    }
}

impl ChaosConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.5..=1.0).contains(&self.p) {
            return argument(format!("Boltzmann factor p = {} outside [0.5, 1]", self.p));
        }
        if self.t_grid.is_empty() || self.t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return argument("t grid must be nonempty with finite nonnegative times");
        }
        if self.samples == 0 || self.n_pairs == 0 {
            return argument("samples and n must be positive");
        }
        if !(0.0..=2.0).contains(&self.c) || !(0.0..=1.0).contains(&self.q) {
            return argument(format!("rates (c, q) = ({}, {}) out of range", self.c, self.q));
        }
        self.solver.validate()
    }
}

/// `{0, step, 2 step, …}` up to `t_max`, each time computed as `k * step`.
pub fn uniform_t_grid(t_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && t_max >= 0.0 && t_max.is_finite()) {
        return argument(format!("t grid needs step > 0 and t_max >= 0, got {} and {}", step, t_max));
    }
    let count = (t_max / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| k as f64 * step).collect())
}

pub const CHAOS_COLUMNS: [&str; 6] = ["t", "p", "mean_bound", "std_bound", "samples", "flagged"];

/// Dataset plus the per-sample conditional entropies, indexed `[t][sample]`.
/// Entropies within roundoff of `±2` are snapped onto the range.
#[derive(Clone, Debug)]
pub struct ChaosRun {
    pub dataset: ScenarioDataset,
    pub h_samples: Vec<Vec<f64>>,
    pub flagged: usize,
}

/// One row per time with the sample mean and sample standard deviation of
/// the per-sample bound, then an `avg` row holding the arithmetic mean over
/// the grid of the reported means.
pub fn chaos_error_curve(cfg: &ChaosConfig) -> Result<ChaosRun> {
    cfg.validate()?;
    let n = 2.0 * cfg.n_pairs as f64;
    let prefactor = if cfg.c == 0.0 { 1.0 } else { (1.0 + (cfg.c * n / 2.0).exp2()).sqrt() };

    let mut ds = ScenarioDataset::new(&CHAOS_COLUMNS);
    ds.set_meta("p", cfg.p);
    ds.set_meta("n", cfg.n_pairs);
    ds.set_meta("N", 2 * cfg.n_pairs);
    ds.set_meta("m", 2);
    ds.set_meta("c", cfg.c);
    ds.set_meta("q", cfg.q);
    ds.set_meta("samples", cfg.samples);
    ds.set_meta("coupling_mean", cfg.coupling_mean);
    ds.set_meta("coupling_std", cfg.coupling_std);
    ds.set_meta("seed", cfg.seed);

    let mut h_samples = Vec::with_capacity(cfg.t_grid.len());
    let mut means = Vec::with_capacity(cfg.t_grid.len());
    let mut total_flagged = 0;
    for (ti, &t) in cfg.t_grid.iter().enumerate() {
        let mut terms = Vec::with_capacity(cfg.samples as usize);
        let mut hs = Vec::with_capacity(cfg.samples as usize);
        let mut flagged = 0;
        for s in 0..cfg.samples {
            let j = sample_couplings(CounterKey::new(cfg.seed, ti as u32, s), cfg.coupling_mean, cfg.coupling_std)?;
            let choi = choi_from_channel(&heisenberg_channel(cfg.p, t, &j)?);
            let res = hmax_cond(&choi, &["A"], &["B"], &cfg.solver)?;
            if !res.converged {
                flagged += 1;
            }
            if res.value.abs() > 2.0 + 1e-9 {
                return domain(format!("conditional entropy {} outside [-2, 2] at t = {}", res.value, t));
            }
            let h0 = res.value.clamp(-2.0, 2.0);
            hs.push(h0);
            terms.push(prefactor * ((2.0 * cfg.q + h0 / 2.0 - 1.0) * n / 4.0).exp2());
        }
        let k = terms.len() as f64;
        let mean = terms.iter().sum::<f64>() / k;
        let var = if terms.len() > 1 { terms.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
        let reported = mean.min(1.0);
        means.push(reported);
        total_flagged += flagged;
        ds.push(vec![t.into(), cfg.p.into(), reported.into(), var.sqrt().into(), (cfg.samples as usize).into(), flagged.into()]);
        h_samples.push(hs);
    }
    let avg = means.iter().sum::<f64>() / means.len() as f64;
    ds.push(vec![
        "avg".into(),
        cfg.p.into(),
        avg.into(),
        Cell::Empty,
        (cfg.samples as usize * cfg.t_grid.len()).into(),
        total_flagged.into(),
    ]);
    Ok(ChaosRun { dataset: ds, h_samples, flagged: total_flagged })
}

/// The `avg` row's mean bound.
pub fn time_average(run: &ChaosRun) -> f64 {
    let means = run.dataset.column("mean_bound").expect("chaos dataset");
    *means.last().expect("avg row")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(p: f64) -> ChaosConfig {
        ChaosConfig { p, t_grid: uniform_t_grid(2.0, 0.5).unwrap(), n_pairs: 10, samples: 4, ..ChaosConfig::default() }
    }

    #[test]
    fn grid_construction() {
        let g = uniform_t_grid(10.0, 0.1).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[100], 10.0);
        assert_eq!(g[3], 3.0 * 0.1);
        assert!(uniform_t_grid(1.0, 0.0).is_err());
    }

    #[test]
    fn degenerate_and_reproducible_draws() {
        let j = sample_couplings(CounterKey::new(3, 1, 2), 1.0, 0.0).unwrap();
        assert_eq!(j.j_left, [1.0; 3]);
        assert_eq!(j.j_right, [1.0; 3]);
        let a = sample_couplings(CounterKey::new(7, 4, 9), 1.0, 0.25).unwrap();
        let b = sample_couplings(CounterKey::new(7, 4, 9), 1.0, 0.25).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_couplings(CounterKey::new(7, 4, 10), 1.0, 0.25).unwrap());
        assert_ne!(a, sample_couplings(CounterKey::new(8, 4, 9), 1.0, 0.25).unwrap());
        assert_ne!(a.j_left[0], a.j_left[1]);
        assert!(sample_couplings(CounterKey::new(0, 0, 0), 1.0, -0.1).is_err());
    }

    #[test]
    fn sample_statistics() {
        let (mean, std) = (1.0, 0.25);
        let mut sum = 0.0;
        let mut sq = 0.0;
        let count = 100_000u32;
        for s in 0..count {
            let j = sample_couplings(CounterKey::new(11, s >> 16, s & 0xffff), mean, std).unwrap();
            for x in j.j_left.iter().chain(&j.j_right) {
                sum += x;
                sq += x * x;
            }
        }
        let n = 6.0 * count as f64;
        let m = sum / n;
        assert!((m - mean).abs() < 5.0 * std / n.sqrt(), "sample mean {}", m);
        let var = sq / n - m * m;
        assert!((var.sqrt() - std).abs() < 0.01 * std, "sample std {}", var.sqrt());
    }

    #[test]
    fn time_zero_and_zero_coupling() {
        let cfg = ChaosConfig { t_grid: vec![0.0], ..ChaosConfig::default() };
        let run = chaos_error_curve(&cfg).unwrap();
        let mean = run.dataset.column("mean_bound").unwrap()[0];
        assert!((mean - 2f64.powi(-50)).abs() < 1e-20);
        assert!(mean <= 1e-15);
        assert!(run.h_samples[0].iter().all(|h| (h + 2.0).abs() < 1e-9));

        let still = ChaosConfig { coupling_mean: 0.0, coupling_std: 0.0, ..small(0.7) };
        let run = chaos_error_curve(&still).unwrap();
        let expect = 2f64.powf(-20.0 / 4.0);
        for m in run.dataset.column("mean_bound").unwrap() {
            assert!((m - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn layout_and_determinism() {
        let a = chaos_error_curve(&small(0.9)).unwrap();
        let b = chaos_error_curve(&small(0.9)).unwrap();
        assert_eq!(a.dataset.to_csv(), b.dataset.to_csv());
        assert_eq!(a.dataset.header(), "t,p,mean_bound,std_bound,samples,flagged");
        assert_eq!(a.dataset.rows.len(), 6);
        assert!(a.dataset.to_csv().lines().last().unwrap().starts_with("avg,"));
        assert!(a.h_samples.iter().flatten().all(|h| (-2.0..=2.0).contains(h)));
        assert_eq!(a.flagged, 0);
        let with_c = chaos_error_curve(&ChaosConfig { c: 0.1, ..small(0.9) }).unwrap();
        let base = a.dataset.column("mean_bound").unwrap();
        let scaled = with_c.dataset.column("mean_bound").unwrap();
        let factor = (1.0 + 2f64.powf(0.1 * 20.0 / 2.0)).sqrt();
        assert!((scaled[1] - (base[1] * factor).min(1.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(chaos_error_curve(&ChaosConfig { p: 0.3, ..small(0.9) }).is_err());
        assert!(chaos_error_curve(&ChaosConfig { samples: 0, ..small(0.9) }).is_err());
        assert!(chaos_error_curve(&ChaosConfig { t_grid: vec![], ..small(0.9) }).is_err());
    }
}
