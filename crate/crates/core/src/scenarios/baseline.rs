//! Error of storing the source directly in the noisy qubits without coding.

use crate::capacity::{NoiseSpec, RatePoint};
use crate::dataset::{Cell, ScenarioDataset};
use crate::error::{argument, Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::quantum::{
    apply_channel, basis_state, classical_corr_on, completely_mixed, hybrid_source, max_entangled_on, MultipartiteState,
};

/// Largest side length of the states built by [`baseline_bruteforce`].
pub const BRUTEFORCE_MAX_DIM: usize = 1 << 12;
const BRANCH_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaselineCase {
    pub noise: NoiseSpec,
    pub pt: RatePoint,
    pub n_qubits: u32,
}

impl BaselineCase {
    pub fn new(noise: NoiseSpec, c: f64, q: f64, n_qubits: u32) -> Result<Self> {
        noise.channel()?;
        if n_qubits == 0 {
            return argument("N must be positive");
        }
        Ok(Self { noise, pt: RatePoint::new(c, q)?, n_qubits })
    }

    /// 1: `c ≥ 1`; 2: `c < 1`, `c + q > 1`; 3: `c < 1`, `c + q ≤ 1`.
    pub fn case_id(&self) -> u8 {
        let (c, q) = (self.pt.c(), self.pt.q());
        if c >= 1.0 - BRANCH_TOL {
            1
        } else if c + q > 1.0 + BRANCH_TOL {
            2
        } else {
            3
        }
    }

    /// `(cN, qN)` when both are integers.
    pub fn register_sizes(&self) -> Result<(u32, u32)> {
        let n = self.n_qubits as f64;
        let mut out = [0u32; 2];
        for (slot, (name, rate)) in out.iter_mut().zip([("c", self.pt.c()), ("q", self.pt.q())]) {
            let x = rate * n;
            let r = x.round();
            if (x - r).abs() > 1e-9 {
                return argument(format!("{}N = {} is not an integer", name, x));
            }
            *slot = r as u32;
        }
        Ok((out[0], out[1]))
    }
}

/// Lower bound on the storage error.
pub fn baseline_closed_form(case: &BaselineCase) -> f64 {
    let (c, q) = (case.pt.c(), case.pt.q());
    let n = case.n_qubits as f64;
    let lost = |e: f64| (-e * n).exp2();
    match (case.noise, case.case_id()) {
        (NoiseSpec::Dephasing(_), 1) => 1.0 - lost(c - 1.0 + 2.0 * q),
        (NoiseSpec::Dephasing(p), 2) => 1.0 - (1.0 - p / 2.0).powf((1.0 - c) * n) * lost(2.0 * (q + c - 1.0)),
        (NoiseSpec::Dephasing(p), _) => 1.0 - (1.0 - p / 2.0).powf(q * n),
        (NoiseSpec::AmplitudeDamping(g), id) => {
            let a = 1.0 - g / 2.0;
            let b = (1.0 + (1.0 - g).sqrt()) / 2.0;
            match id {
                1 => 1.0 - lost(c - 1.0 + 2.0 * q) * a.powf(n),
                2 => 1.0 - lost(2.0 * (q + c - 1.0)) * a.powf(c * n) * b.powf(2.0 * (1.0 - c) * n),
                _ => 1.0 - a.powf(c * n) * b.powf(2.0 * q * n),
            }
        }
    }
}

fn pair_labels(prefix_m: &str, prefix_r: &str, count: u32) -> Vec<(String, String)> {
    (0..count).map(|k| (format!("{}{}", prefix_m, k), format!("{}{}", prefix_r, k))).collect()
}

/// Splits a `2^count` register into qubits named `prefix0, prefix1, …`.
fn split_qubits(state: MultipartiteState, label: &str, prefix: &str, count: u32) -> Result<MultipartiteState> {
    let names: Vec<String> = (0..count).map(|k| format!("{}{}", prefix, k)).collect();
    let parts: Vec<(&str, usize)> = names.iter().map(|s| (s.as_str(), 2)).collect();
    state.split(label, &parts)
}

/// Trace distance between the ideal source and what survives when classical
/// bits are stored first, then qubits, each on one noisy physical qubit;
/// anything that does not fit is replaced by `|0⟩`.
pub fn baseline_bruteforce(case: &BaselineCase) -> Result<f64> {
    let (k, qn) = case.register_sizes()?;
    let total_qubits = 2 * (k as u64 + qn as u64);
    if total_qubits > 12 {
        return Err(Error::Resource(format!(
            "brute force needs dimension 2^{} > {}",
            total_qubits, BRUTEFORCE_MAX_DIM
        )));
    }
    let n = case.n_qubits;
    let sc = k.min(n);
    let sq = qn.min(n - sc);
    let noise = case.noise.channel()?;

    let classical = pair_labels("mc", "rc", k);
    let quantum = pair_labels("mq", "rq", qn);
    let order: Vec<&str> = classical.iter().chain(&quantum).flat_map(|(m, r)| [m.as_str(), r.as_str()]).collect();

    let mut ideal = hybrid_source(k, qn);
    for (label, prefix, count) in [("Mc", "mc", k), ("Rc", "rc", k), ("Mq", "mq", qn), ("Rq", "rq", qn)] {
        ideal = split_qubits(ideal, label, prefix, count)?;
    }
    let ideal = ideal.reorder(&order)?;

    let mut pieces = Vec::with_capacity(order.len());
    for (i, (m, r)) in classical.iter().enumerate() {
        let piece = if (i as u32) < sc {
            apply_channel(&noise, &classical_corr_on(1, m, r)?, m)?
        } else {
            basis_state(2, 0, m)?.tensor(&completely_mixed(1, r))?
        };
        pieces.push(piece.into_matrix());
    }
    for (i, (m, r)) in quantum.iter().enumerate() {
        let piece = if (i as u32) < sq {
            apply_channel(&noise, &max_entangled_on(1, m, r)?, m)?
        } else {
            basis_state(2, 0, m)?.tensor(&completely_mixed(1, r))?
        };
        pieces.push(piece.into_matrix());
    }
    let stored = if pieces.is_empty() { ComplexMatrix::identity(&[1]) } else { linalg::kron_all(&pieces)? };
    let stored = stored.with_dims(ideal.dims().to_vec())?;
    Ok(0.5 * linalg::trace_norm(&(ideal.matrix() - &stored)))
}

pub const BASELINE_COLUMNS: [&str; 8] = ["noise", "param", "c", "q", "N", "case_id", "closed_form", "bruteforce"];

/// One row per case; the brute-force column is filled only when requested.
pub fn baseline_dataset(cases: &[BaselineCase], bruteforce: bool) -> Result<ScenarioDataset> {
    let mut ds = ScenarioDataset::new(&BASELINE_COLUMNS);
    ds.set_meta("bruteforce", bruteforce);
    for case in cases {
        let bf = if bruteforce { Some(baseline_bruteforce(case)?) } else { None };
        ds.push(vec![
            case.noise.name().into(),
            case.noise.param().into(),
            case.pt.c().into(),
            case.pt.q().into(),
            (case.n_qubits as usize).into(),
            (case.case_id() as usize).into(),
            baseline_closed_form(case).into(),
            Cell::from(bf),
        ]);
    }
    Ok(ds)
}

/// Integer-rate configurations covering all three branches for one noise
/// model, each small enough for [`baseline_bruteforce`].
pub fn lower_bound_cases(noise_of: impl Fn(f64) -> NoiseSpec, params: &[f64]) -> Result<Vec<BaselineCase>> {
    // (K, Qn, N): cN classical bits and qN qubits on N physical qubits
    const SHAPES: [(u32, u32, u32); 9] =
        [(1, 0, 1), (2, 0, 1), (1, 1, 1), (2, 1, 2), (1, 2, 2), (0, 2, 2), (3, 0, 2), (2, 2, 3), (1, 1, 2)];
    let mut out = Vec::new();
    for &p in params {
        for &(k, qn, n) in &SHAPES {
            let nf = n as f64;
            out.push(BaselineCase::new(noise_of(p), k as f64 / nf, qn as f64 / nf, n)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::max_entangled;

    fn deph(p: f64, c: f64, q: f64, n: u32) -> BaselineCase {
        BaselineCase::new(NoiseSpec::Dephasing(p), c, q, n).unwrap()
    }

    fn damp(g: f64, c: f64, q: f64, n: u32) -> BaselineCase {
        BaselineCase::new(NoiseSpec::AmplitudeDamping(g), c, q, n).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let eq = deph(0.2, 0.5, 0.5, 2);
        assert_eq!(eq.case_id(), 3);
        assert!((baseline_closed_form(&eq) - 0.1).abs() < 1e-15);
        assert!((baseline_closed_form(&damp(1.0, 0.0, 1.0, 1)) - 0.75).abs() < 1e-15);
        assert!((baseline_closed_form(&deph(0.05, 0.9, 0.1, 20)) - 0.049375).abs() < 1e-12);
        // noise-free residual comes only from what does not fit
        assert_eq!(baseline_closed_form(&deph(0.0, 0.5, 0.3, 10)), 0.0);
        let over = deph(0.0, 1.5, 0.5, 4);
        assert!((baseline_closed_form(&over) - (1.0 - 2f64.powf(-1.5 * 4.0))).abs() < 1e-15);
        assert!(BaselineCase::new(NoiseSpec::Dephasing(0.1), 2.5, 0.0, 4).is_err());
        assert!(BaselineCase::new(NoiseSpec::Dephasing(0.1), 0.0, 1.5, 4).is_err());
    }

    #[test]
    fn branch_boundaries() {
        assert_eq!(deph(0.1, 1.0, 0.0, 4).case_id(), 1);
        assert_eq!(deph(0.1, 0.75, 0.5, 4).case_id(), 2);
        assert_eq!(deph(0.1, 0.5, 0.5, 4).case_id(), 3);
        // both dephasing expressions agree on c + q = 1
        let p: f64 = 0.3;
        let (c, q, n) = (0.25, 0.75, 8.0);
        let second = 1.0 - (1.0 - p / 2.0).powf((1.0 - c) * n);
        assert!((second - baseline_closed_form(&deph(p, c, q, 8))).abs() < 1e-15);
    }

    #[test]
    fn bruteforce_examples() {
        assert!((baseline_bruteforce(&deph(0.2, 0.5, 0.5, 2)).unwrap() - 0.1).abs() < 1e-12);
        let golden = (1.0 + 5f64.sqrt()) / 4.0;
        assert!((baseline_bruteforce(&damp(1.0, 0.0, 1.0, 1)).unwrap() - golden).abs() < 1e-12);
        for case in [deph(0.0, 0.5, 0.5, 2), damp(0.0, 0.25, 0.5, 4)] {
            assert!(baseline_bruteforce(&case).unwrap().abs() < 1e-12);
        }
        assert!(matches!(baseline_bruteforce(&deph(0.1, 0.5, 0.3, 3)), Err(crate::Error::Argument(_))));
        assert!(matches!(baseline_bruteforce(&deph(0.1, 1.0, 0.5, 8)), Err(crate::Error::Resource(_))));
    }

    #[test]
    fn ideal_state_is_a_product_of_pairs() {
        let mut ideal = hybrid_source(1, 2);
        for (label, prefix, count) in [("Mc", "mc", 1), ("Rc", "rc", 1), ("Mq", "mq", 2), ("Rq", "rq", 2)] {
            ideal = split_qubits(ideal, label, prefix, count).unwrap();
        }
        let ideal = ideal.reorder(&["mc0", "rc0", "mq0", "rq0", "mq1", "rq1"]).unwrap();
        let bell = max_entangled(1).into_matrix();
        let expect = linalg::kron_all(&[crate::quantum::classical_corr(1).into_matrix(), bell.clone(), bell]).unwrap();
        assert!(ideal.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn bruteforce_dominates_closed_form() {
        let mut cases = lower_bound_cases(NoiseSpec::Dephasing, &[0.1, 0.6]).unwrap();
        cases.extend(lower_bound_cases(NoiseSpec::AmplitudeDamping, &[0.1, 0.6]).unwrap());
        let mut seen = std::collections::BTreeSet::new();
        for case in &cases {
            let bf = baseline_bruteforce(case).unwrap();
            let cf = baseline_closed_form(case);
            assert!(bf >= cf - 1e-9, "{:?}: bruteforce {} < closed form {}", case, bf, cf);
            if matches!(case.noise, NoiseSpec::Dephasing(_)) && case.case_id() == 3 {
                assert!((bf - cf).abs() < 1e-9, "{:?}: {} vs {}", case, bf, cf);
            }
            seen.insert((case.noise.name(), case.case_id()));
        }
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn dataset_layout() {
        let ds = baseline_dataset(&[deph(0.2, 0.5, 0.5, 2)], false).unwrap();
        assert_eq!(ds.header(), "noise,param,c,q,N,case_id,closed_form,bruteforce");
        assert!(ds.to_csv().lines().nth(1).unwrap().ends_with(','));
        let ds = baseline_dataset(&[deph(0.2, 0.5, 0.5, 2)], true).unwrap();
        assert!((ds.column("bruteforce").unwrap()[0] - 0.1).abs() < 1e-12);
    }
}
