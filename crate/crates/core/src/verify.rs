//! Acceptance checks with runtime budgets, grouped into suites.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capacity::{rate_grid, theorem1_check, BlockEncodingState, CapacityTuple, GateRule, NoiseSpec};
use crate::entropy::{hmax_cond, SolverConfig};
use crate::linalg::{self, ComplexMatrix, Mat};
use crate::oracle::{bloch_grid_hmax, dephasing_hmax};
use crate::quantum::{
    amplitude_damping, channel_from_choi, choi_from_channel, classical_corr, completely_mixed, dephasing,
    heisenberg_channel, max_entangled, tensor_channel, HeisenbergCouplings, MultipartiteState, QuantumChannel,
};
use crate::scenarios::{
    baseline_bruteforce, baseline_closed_form, chaos_error_curve, lower_bound_cases, rqc_noisy_sweep,
    rqc_region_dataset, time_average, BaselineCase, ChaosConfig,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Entropy,
    Capacity,
    Baseline,
    Region,
    Noisy,
    Chaos,
    Channels,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Entropy, Suite::Capacity, Suite::Baseline, Suite::Region, Suite::Noisy, Suite::Chaos, Suite::Channels];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Entropy => "entropy",
            Suite::Capacity => "capacity",
            Suite::Baseline => "baseline",
            Suite::Region => "region",
            Suite::Noisy => "noisy",
            Suite::Chaos => "chaos",
            Suite::Channels => "channels",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite {:?}; expected one of {}", s, Suite::ALL.map(|x| x.name()).join(", ")))
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub only: Option<Suite>,
    /// Shifts the dephasing closed form used as a reference, to confirm the
    /// suite notices a wrong oracle.
    pub perturb_closed_form: bool,
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub suite: Suite,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<28} ({}, {:.2}s of {}s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.suite,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

type CheckResult = Result<String, String>;

struct Check {
    id: u8,
    name: &'static str,
    suite: Suite,
    budget_secs: u64,
    run: fn(&VerifyOptions) -> CheckResult,
}

const CHECKS: [Check; 10] = [
    Check { id: 1, name: "entropy trivial values", suite: Suite::Entropy, budget_secs: 1, run: entropy_trivial },
    Check { id: 2, name: "dephasing closed form", suite: Suite::Entropy, budget_secs: 10, run: dephasing_closed_form },
    Check { id: 3, name: "additivity", suite: Suite::Entropy, budget_secs: 60, run: additivity },
    Check { id: 4, name: "block-state decomposition", suite: Suite::Capacity, budget_secs: 30, run: decomposition },
    Check { id: 5, name: "storage baseline equality", suite: Suite::Baseline, budget_secs: 1, run: baseline_equality },
    Check { id: 6, name: "storage baseline lower bound", suite: Suite::Baseline, budget_secs: 60, run: baseline_lower_bound },
    Check { id: 7, name: "rate region", suite: Suite::Region, budget_secs: 300, run: region },
    Check { id: 8, name: "noisy circuit sweep", suite: Suite::Noisy, budget_secs: 300, run: noisy_sweep },
    Check { id: 9, name: "chaos curves", suite: Suite::Chaos, budget_secs: 1800, run: chaos },
    Check { id: 10, name: "channel algebra", suite: Suite::Channels, budget_secs: 10, run: channels },
];

/// Runs the selected checks in order, reporting each as it finishes.
pub fn run(opts: &VerifyOptions, mut report: impl FnMut(&CheckOutcome)) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for check in CHECKS.iter().filter(|c| opts.only.is_none_or(|s| s == c.suite)) {
        let start = Instant::now();
        let result = (check.run)(opts);
        let elapsed = start.elapsed();
        let budget = Duration::from_secs(check.budget_secs);
        let (passed, detail) = match result {
            Ok(detail) if elapsed <= budget => (true, detail),
            Ok(detail) => (false, format!("over time budget; {}", detail)),
            Err(why) => (false, why),
        };
        let outcome = CheckOutcome { id: check.id, name: check.name, suite: check.suite, passed, detail, elapsed, budget };
        report(&outcome);
        out.push(outcome);
    }
    out
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * f64::EPSILON / 2.0
}

fn hmax_ab(rho: &MultipartiteState) -> Result<f64, String> {
    Ok(hmax_cond(rho, &["A"], &["B"], &SolverConfig::default()).map_err(err)?.value)
}

fn entropy_trivial(_: &VerifyOptions) -> CheckResult {
    let tol = 1e-6;
    let mut worst: f64 = 0.0;
    for r in [1u32, 2] {
        let v = hmax_ab(&max_entangled(r))?;
        ensure((v + r as f64).abs() <= tol, || format!("Phi_{} gave {}", r, v))?;
        worst = worst.max((v + r as f64).abs());
    }
    let v = hmax_cond(&classical_corr(1), &["Mc"], &["Rc"], &SolverConfig::default()).map_err(err)?.value;
    ensure(v.abs() <= tol, || format!("Omega_1 gave {}", v))?;
    worst = worst.max(v.abs());
    let c = linalg::C64::new;
    let sigma = ComplexMatrix::from_row_major(vec![2], &[c(0.7, 0.0), c(0.2, -0.1), c(0.2, 0.1), c(0.3, 0.0)]).map_err(err)?;
    let sigma = MultipartiteState::new(sigma, vec!["B".into()]).map_err(err)?;
    let v = hmax_ab(&completely_mixed(1, "A").tensor(&sigma).map_err(err)?)?;
    ensure((v - 1.0).abs() <= tol, || format!("pi x sigma gave {}", v))?;
    worst = worst.max((v - 1.0).abs());
    Ok(format!("max deviation {:.1e}", worst))
}

fn dephasing_closed_form(opts: &VerifyOptions) -> CheckResult {
    let shift = if opts.perturb_closed_form { 1e-3 } else { 0.0 };
    let (mut worst_cf, mut worst_or): (f64, f64) = (0.0, 0.0);
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let rho = choi_from_channel(&dephasing(p).map_err(err)?);
        let v = hmax_ab(&rho)?;
        let cf = dephasing_hmax(p) + shift;
        let or = bloch_grid_hmax(&rho).map_err(err)?;
        ensure((v - cf).abs() <= 1e-5, || format!("p={}: solver {} vs closed form {}", p, v, cf))?;
        ensure((v - or).abs() <= 1e-4, || format!("p={}: solver {} vs grid oracle {}", p, v, or))?;
        worst_cf = worst_cf.max((v - cf).abs());
        worst_or = worst_or.max((v - or).abs());
    }
    Ok(format!("closed form {:.1e}, grid oracle {:.1e}", worst_cf, worst_or))
}

fn additivity(_: &VerifyOptions) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (p, g) = (uniform(&mut rng), uniform(&mut rng));
        let d = dephasing(p).map_err(err)?;
        let a = amplitude_damping(g).map_err(err)?;
        let joint = hmax_ab(&choi_from_channel(&tensor_channel(&[d.clone(), a.clone()]).map_err(err)?))?;
        let parts = hmax_ab(&choi_from_channel(&d))? + hmax_ab(&choi_from_channel(&a))?;
        ensure((joint - parts).abs() <= 1e-5, || format!("p={} gamma={}: {} vs {}", p, g, joint, parts))?;
        worst = worst.max((joint - parts).abs());
    }
    Ok(format!("20 pairs, max deviation {:.1e}", worst))
}

fn decomposition(_: &VerifyOptions) -> CheckResult {
    let cfg = SolverConfig::default();
    let enc = BlockEncodingState::identity_encoding(2, 1).map_err(err)?;
    let tuple = CapacityTuple::new(1.0, 0.0, 0.0, 0.0, 2).map_err(err)?;
    let mut worst: f64 = 0.0;
    for p in [0.05, 0.3, 0.8] {
        let noise = dephasing(p).map_err(err)?;
        let h = hmax_ab(&choi_from_channel(&noise))?;
        let rep = theorem1_check(&enc, &noise, &tuple, 1.0, 1.0, &cfg).map_err(err)?;
        let (a, b) = ((rep.hmax_s_given_b - 1.0 - h).abs(), (rep.hmax_sr_given_bsc - h).abs());
        ensure(a <= 1e-4, || format!("p={}: H(S|B) = {} vs 1 + {}", p, rep.hmax_s_given_b, h))?;
        ensure(b <= 1e-4, || format!("p={}: H(Sr|BSc) = {} vs {}", p, rep.hmax_sr_given_bsc, h))?;
        worst = worst.max(a).max(b);
    }
    Ok(format!("max deviation {:.1e}", worst))
}

fn baseline_equality(_: &VerifyOptions) -> CheckResult {
    let case = BaselineCase::new(NoiseSpec::Dephasing(0.2), 0.5, 0.5, 2).map_err(err)?;
    let bf = baseline_bruteforce(&case).map_err(err)?;
    let cf = baseline_closed_form(&case);
    ensure((bf - 0.1).abs() <= 1e-9 && (cf - 0.1).abs() <= 1e-9, || format!("brute force {} closed form {}", bf, cf))?;
    Ok(format!("brute force {:.12}, closed form {:.12}", bf, cf))
}

fn baseline_lower_bound(_: &VerifyOptions) -> CheckResult {
    let params = [0.1, 0.5, 0.9];
    let mut cases = lower_bound_cases(NoiseSpec::Dephasing, &params).map_err(err)?;
    cases.extend(lower_bound_cases(NoiseSpec::AmplitudeDamping, &params).map_err(err)?);
    let mut covered = std::collections::BTreeSet::new();
    let mut margin = f64::INFINITY;
    for case in &cases {
        let bf = baseline_bruteforce(case).map_err(err)?;
        let cf = baseline_closed_form(case);
        ensure(bf >= cf - 1e-9, || format!("{:?}: brute force {} < closed form {}", case, bf, cf))?;
        covered.insert((case.noise.name(), case.case_id()));
        margin = margin.min(bf - cf);
    }
    ensure(covered.len() == 6, || format!("only {} of 6 cases covered", covered.len()))?;
    Ok(format!("{} configurations, min margin {:.1e}", cases.len(), margin))
}

fn region(_: &VerifyOptions) -> CheckResult {
    let cfg = SolverConfig::default();
    let grid = rate_grid(41, 41).map_err(err)?;
    let lo = rqc_region_dataset(NoiseSpec::Dephasing(0.01), 20, &grid, &cfg).map_err(err)?;
    let hi = rqc_region_dataset(NoiseSpec::Dephasing(0.1), 20, &grid, &cfg).map_err(err)?;
    let b = lo.column("delta_bound").map_err(err)?;
    let b_hi = hi.column("delta_bound").map_err(err)?;
    ensure(b[0] < 0.01, || format!("delta at (0,0) is {}", b[0]))?;
    ensure(b[b.len() - 1] == 1.0, || format!("delta at (2,1) is {}", b[b.len() - 1]))?;
    for i in 0..41 {
        for k in 0..41 {
            let here = b[i * 41 + k];
            ensure(i == 40 || b[(i + 1) * 41 + k] >= here, || format!("not monotone in c at row {}", i * 41 + k))?;
            ensure(k == 40 || b[i * 41 + k + 1] >= here, || format!("not monotone in q at row {}", i * 41 + k))?;
        }
    }
    let inside_hi = b_hi.iter().filter(|&&x| x < 0.5).count();
    ensure(b.iter().zip(&b_hi).all(|(l, h)| *h >= 0.5 || *l < 0.5), || "p=0.1 region not contained in p=0.01 region".into())?;
    Ok(format!("delta(0,0) = {:.3e}, {} of 1681 points under 0.5 at p=0.1", b[0], inside_hi))
}

fn noisy_sweep(_: &VerifyOptions) -> CheckResult {
    let cfg = SolverConfig::default();
    let f = 0.995;
    let ds = rqc_noisy_sweep(0.05, f, 0.9, &[0.1, 0.15, 0.2], 10, 60, &cfg).map_err(err)?;
    let (n, q) = (ds.column("N").map_err(err)?, ds.column("q").map_err(err)?);
    let (i, ii, iii) = (
        ds.column("case_i_baseline").map_err(err)?,
        ds.column("case_ii_noiseless").map_err(err)?,
        ds.column("case_iii_noisy").map_err(err)?,
    );
    for r in 0..n.len() {
        let fg = f.powf(GateRule::CeilPow32.gates(n[r] as u64) as f64);
        ensure((iii[r] - ((1.0 - fg) + fg * ii[r])).abs() <= 1e-12, || format!("row {}: identity broken", r))?;
        ensure(iii[r] - (1.0 - fg) <= fg * ii[r] + 1e-12, || format!("row {}: exceeds 1 - f^G by more than f^G delta", r))?;
    }
    // the inner bound decays with N at these rates, pulling (iii) onto 1 - f^G
    let far = rqc_noisy_sweep(0.05, f, 0.9, &[0.1], 2000, 2000, &cfg).map_err(err)?;
    let fg = f.powf(GateRule::CeilPow32.gates(2000) as f64);
    let gap = (far.column("case_iii_noisy").map_err(err)?[0] - (1.0 - fg)).abs();
    ensure(gap <= 1e-12, || format!("at N=2000 (iii) differs from 1 - f^G by {}", gap))?;
    let row = (0..n.len()).find(|&r| n[r] == 20.0 && q[r] == 0.1).ok_or("row (q=0.1, N=20) missing")?;
    ensure((i[row] - 0.049375).abs() <= 1e-9, || format!("case (i) at q=0.1, N=20 is {}", i[row]))?;
    Ok(format!("{} rows, case (i) at N=20 = {:.9}", n.len(), i[row]))
}

fn chaos(_: &VerifyOptions) -> CheckResult {
    let mut avgs = Vec::new();
    let mut first_csv = None;
    for p in [1.0, 0.9, 0.5] {
        let cfg = ChaosConfig { p, seed: 5, ..ChaosConfig::default() };
        let run = chaos_error_curve(&cfg).map_err(err)?;
        let t0 = run.dataset.column("mean_bound").map_err(err)?[0];
        ensure(t0 <= 1e-15, || format!("p={}: mean bound at t=0 is {}", p, t0))?;
        let bad = run.h_samples.iter().flatten().find(|h| !(-2.0..=2.0).contains(*h));
        ensure(bad.is_none(), || format!("p={}: sampled h = {:?} outside [-2, 2]", p, bad))?;
        avgs.push(time_average(&run));
        if first_csv.is_none() {
            first_csv = Some((cfg, run.dataset.to_csv()));
        }
    }
    ensure(avgs[0] <= avgs[1] && avgs[1] <= avgs[2], || format!("time averages not ordered: {:?}", avgs))?;
    let (cfg, csv) = first_csv.expect("ran at least once");
    let again = chaos_error_curve(&cfg).map_err(err)?.dataset.to_csv();
    ensure(again == csv, || "rerun with the same seed produced different rows".into())?;
    Ok(format!("time averages p=1: {:.3e}, p=0.9: {:.3e}, p=0.5: {:.3e}", avgs[0], avgs[1], avgs[2]))
}

fn max_action_diff(a: &QuantumChannel, b: &QuantumChannel) -> f64 {
    let d = a.d_in();
    let mut worst: f64 = 0.0;
    for r in 0..d {
        for c in 0..d {
            let mut e = Mat::zeros(d, d);
            e[(r, c)] = linalg::C64::new(1.0, 0.0);
            let diff = a.apply_matrix(&e).expect("dims") - b.apply_matrix(&e).expect("dims");
            worst = worst.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    worst
}

fn channels(_: &VerifyOptions) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut round_trip: f64 = 0.0;
    let mut tp: f64 = 0.0;
    for _ in 0..10 {
        let p = 0.5 + 0.5 * uniform(&mut rng);
        let t = 5.0 * uniform(&mut rng);
        let mut draw = || 2.0 * uniform(&mut rng) - 1.0;
        let j = HeisenbergCouplings::new([draw(), draw(), draw()], [draw(), draw(), draw()]).map_err(err)?;
        let chs = [
            dephasing(uniform(&mut rng)).map_err(err)?,
            amplitude_damping(uniform(&mut rng)).map_err(err)?,
            heisenberg_channel(p, t, &j).map_err(err)?,
        ];
        for ch in &chs {
            let back = channel_from_choi(&choi_from_channel(ch), ch.d_in(), ch.d_out()).map_err(err)?;
            round_trip = round_trip.max(max_action_diff(ch, &back));
        }
        tp = tp.max(chs[2].trace_preservation_error());

        let unital = heisenberg_channel(0.5, t, &j).map_err(err)?;
        let mixed = Mat::identity(4, 4).scale(0.25);
        let out = unital.apply_matrix(&mixed).map_err(err)?;
        let dev = (out - &mixed).iter().map(|z| z.norm()).fold(0.0, f64::max);
        ensure(dev <= 1e-10, || format!("p=0.5 channel moves I/4 by {}", dev))?;

        let pure = heisenberg_channel(1.0, t, &j).map_err(err)?;
        let eig = linalg::herm_eig(choi_from_channel(&pure).matrix()).map_err(err)?;
        ensure(eig.eigenvalues[2] < 1e-10, || format!("p=1 Choi third eigenvalue {}", eig.eigenvalues[2]))?;
    }
    ensure(round_trip <= 1e-8, || format!("Choi round trip error {}", round_trip))?;
    ensure(tp <= 1e-10, || format!("trace preservation error {}", tp))?;
    Ok(format!("round trip {:.1e}, trace preservation {:.1e}", round_trip, tp))
}

/// Whether every outcome passed.
pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn perturbed_oracle_is_caught() {
        let opts = VerifyOptions { only: Some(Suite::Entropy), perturb_closed_form: true };
        let out = run(&opts, |_| {});
        let two = out.iter().find(|o| o.id == 2).unwrap();
        assert!(!two.passed && two.detail.contains("closed form"));
        assert!(out.iter().filter(|o| o.id != 2).all(|o| o.passed));
    }

    #[test]
    fn only_filters_suites() {
        let out = run(&VerifyOptions { only: Some(Suite::Baseline), ..Default::default() }, |_| {});
        assert_eq!(out.iter().map(|o| o.id).collect::<Vec<_>>(), vec![5, 6]);
        assert!(all_passed(&out));
    }
}
