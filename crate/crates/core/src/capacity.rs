//! Achievability conditions for hybrid classical-quantum coding with
//! entanglement assistance, and the rate-level error bounds derived from them.

use crate::dataset::{Cell, ScenarioDataset};
use crate::entropy::{h_channel_detailed, hmax_cond, von_neumann_cond, SolverConfig};
use crate::error::{argument, domain, Result};
use crate::linalg::{self, kron, ComplexMatrix};
use crate::quantum::{amplitude_damping, apply_channel, choi_from_channel, dephasing, MultipartiteState, QuantumChannel};

/// Slack allowed when comparing the two sides of an achievability condition.
pub const CONDITION_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapacityTuple {
    pub c_bits: f64,
    pub q_qubits: f64,
    pub e_ebits: f64,
    pub epsilon: f64,
    pub j_alphabet: u64,
}

impl CapacityTuple {
    pub fn new(c_bits: f64, q_qubits: f64, e_ebits: f64, epsilon: f64, j_alphabet: u64) -> Result<Self> {
        for (name, v) in [("C", c_bits), ("Q", q_qubits), ("E", e_ebits), ("epsilon", epsilon)] {
            if !(v >= 0.0 && v.is_finite()) {
                return argument(format!("{} = {} must be finite and nonnegative", name, v));
            }
        }
        if j_alphabet < 2 || (j_alphabet as f64) < c_bits.exp2() {
            return argument(format!("alphabet size J = {} must be at least max(2, 2^C)", j_alphabet));
        }
        Ok(Self { c_bits, q_qubits, e_ebits, epsilon, j_alphabet })
    }
}

/// `J` blocks `ρ_j` on `(S_r, A)`, mixed uniformly with a classical label `S_c`.
#[derive(Clone, Debug)]
pub struct BlockEncodingState {
    blocks: Vec<ComplexMatrix>,
    d_sr: usize,
    d_a: usize,
}

impl BlockEncodingState {
    /// Each block must be a density operator with completely mixed `S_r` marginal.
    pub fn new(blocks: Vec<ComplexMatrix>, d_sr: usize, d_a: usize) -> Result<Self> {
        if blocks.len() < 2 {
            return argument("a block encoding needs at least two blocks");
        }
        let mixed = ComplexMatrix::identity(&[d_sr]).scale(1.0 / d_sr as f64);
        for (j, b) in blocks.iter().enumerate() {
            if b.side() != d_sr * d_a {
                return argument(format!("block {} has side {}, expected {}", j, b.side(), d_sr * d_a));
            }
            let b = b.clone().with_dims(vec![d_sr, d_a])?;
            MultipartiteState::new(b.clone(), vec!["Sr".into(), "A".into()])?;
            let marginal = linalg::partial_trace(&b, &[0])?;
            let dev = marginal.max_abs_diff(&mixed);
            if dev > 1e-8 || (b.trace().re - 1.0).abs() > 1e-8 {
                return domain(format!("block {} is not normalized with a completely mixed S_r marginal (deviation {:.3e})", j, dev));
            }
        }
        let blocks = blocks.into_iter().map(|b| b.with_dims(vec![d_sr, d_a])).collect::<Result<_>>()?;
        Ok(Self { blocks, d_sr, d_a })
    }

    /// `J` copies of a maximally entangled `(S_r, A)` pair.
    pub fn identity_encoding(j: usize, qubits: u32) -> Result<Self> {
        let phi = crate::quantum::max_entangled(qubits).into_matrix();
        let d = 1usize << qubits;
        Self::new(vec![phi; j], d, d)
    }

    pub fn j(&self) -> usize {
        self.blocks.len()
    }

    pub fn d_sr(&self) -> usize {
        self.d_sr
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    /// `(1/J) Σ_j |j⟩⟨j| ⊗ ρ_j` on `(S_c, S_r, A)`.
    pub fn joint_state(&self) -> MultipartiteState {
        let j = self.blocks.len();
        let mut acc = ComplexMatrix::zeros(&[j, self.d_sr, self.d_a]);
        for (k, b) in self.blocks.iter().enumerate() {
            acc = &acc + &kron(&ComplexMatrix::basis_projector(j, k), b);
        }
        let acc = acc.scale(1.0 / j as f64).with_dims(vec![j, self.d_sr, self.d_a]).expect("consistent dims");
        MultipartiteState::from_parts(acc, vec!["Sc".into(), "Sr".into(), "A".into()]).expect("three labels")
    }
}

#[derive(Clone, Debug)]
pub struct Theorem1Report {
    pub achievable: bool,
    pub delta_bound: f64,
    /// `Q + E ≤ log₂ d_{S_r}`.
    pub size_condition: bool,
    /// `C + Q − E ≤ −H_max(S|B) + log₂(J−1) + log₂ δ₁`; `None` when `C = 0`.
    pub classical_condition: Option<bool>,
    /// `Q − E ≤ −H_max(S_r|BS_c) + log₂ δ₂`.
    pub quantum_condition: bool,
    pub hmax_s_given_b: f64,
    pub hmax_sr_given_bsc: f64,
    pub solver_converged: bool,
}

/// Evaluates the one-shot achievability conditions at smoothing zero.
pub fn theorem1_check(
    enc: &BlockEncodingState,
    noise: &QuantumChannel,
    tuple: &CapacityTuple,
    delta1: f64,
    delta2: f64,
    cfg: &SolverConfig,
) -> Result<Theorem1Report> {
    if noise.d_in() != enc.d_a() {
        return argument(format!("noise acts on dimension {}, encoder output A has {}", noise.d_in(), enc.d_a()));
    }
    if tuple.j_alphabet != enc.j() as u64 {
        return argument(format!("tuple has J = {}, encoding has {} blocks", tuple.j_alphabet, enc.j()));
    }
    let classical = tuple.c_bits > 0.0;
    if !(delta2 > 0.0) || (classical && !(delta1 > 0.0)) {
        return argument("delta1 and delta2 must be positive");
    }
    let noisy = apply_channel(noise, &enc.joint_state(), "A")?.relabel("A", "B")?;
    let s_b = hmax_cond(&noisy, &["Sc", "Sr"], &["B"], cfg)?;
    let sr_bsc = hmax_cond(&noisy, &["Sr"], &["Sc", "B"], cfg)?;

    let (c, q, e) = (tuple.c_bits, tuple.q_qubits, tuple.e_ebits);
    let size_condition = q + e <= (enc.d_sr() as f64).log2() + CONDITION_SLACK;
    let classical_condition = classical.then(|| {
        c + q - e <= -s_b.value + ((tuple.j_alphabet - 1) as f64).log2() + delta1.log2() + CONDITION_SLACK
    });
    let quantum_condition = q - e <= -sr_bsc.value + delta2.log2() + CONDITION_SLACK;
    let d1 = if classical { delta1 } else { 0.0 };
    Ok(Theorem1Report {
        achievable: size_condition && classical_condition.unwrap_or(true) && quantum_condition,
        delta_bound: (d1.sqrt() + delta2.sqrt() + 4.0 * tuple.epsilon).sqrt(),
        size_condition,
        classical_condition,
        quantum_condition,
        hmax_s_given_b: s_b.value,
        hmax_sr_given_bsc: sr_bsc.value,
        solver_converged: s_b.converged && sr_bsc.converged,
    })
}

/// Classical rate `c ∈ [0, 2]` and quantum rate `q ∈ [0, 1]` per noisy qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    c: f64,
    q: f64,
}

impl RatePoint {
    pub fn new(c: f64, q: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&c) {
            return argument(format!("classical rate c = {} outside [0, 2]", c));
        }
        if !(0.0..=1.0).contains(&q) {
            return argument(format!("quantum rate q = {} outside [0, 1]", q));
        }
        Ok(Self { c, q })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Uniform `nc x nq` grid over `[0, 2] x [0, 1]`, `c` varying slowest.
pub fn rate_grid(nc: usize, nq: usize) -> Result<Vec<RatePoint>> {
    if nc < 2 || nq < 2 {
        return argument(format!("grid {}x{} needs at least two points per axis", nc, nq));
    }
    let mut out = Vec::with_capacity(nc * nq);
    for i in 0..nc {
        for k in 0..nq {
            let c = 2.0 * i as f64 / (nc - 1) as f64;
            let q = k as f64 / (nq - 1) as f64;
            out.push(RatePoint::new(c, q)?);
        }
    }
    Ok(out)
}

fn check_h(h: f64, m: u32) -> Result<()> {
    if m == 0 {
        return argument("block size m must be positive");
    }
    if !(h.abs() <= m as f64 + 1e-9) {
        return argument(format!("h = {} outside [-{}, {}]", h, m, m));
    }
    Ok(())
}

/// Smallest `(δ₁, δ₂)` meeting the classical and quantum conditions at rate
/// `pt` with `N = m·n`. `j_alphabet` may be infinite.
pub fn min_delta_pair(pt: RatePoint, h: f64, m: u32, n_blocks: u32, j_alphabet: f64) -> Result<(f64, f64)> {
    check_h(h, m)?;
    if !(j_alphabet >= 2.0) {
        return argument(format!("alphabet size J = {} must be at least 2", j_alphabet));
    }
    let n = (m * n_blocks) as f64;
    let e = 2.0 * pt.q + h / m as f64 - 1.0;
    let delta1 = (1.0 + 1.0 / (j_alphabet - 1.0)) * ((pt.c + e) * n).exp2();
    let delta2 = (e * n).exp2();
    Ok((delta1, delta2))
}

/// `log₂` of the unclamped error bound.
fn log2_error_bound(pt: RatePoint, h: f64, m: u32, n_blocks: u32) -> f64 {
    let n = (m * n_blocks) as f64;
    let decay = (2.0 * pt.q + h / m as f64 - 1.0) * n / 4.0;
    if pt.c == 0.0 {
        return decay;
    }
    let x = pt.c * n / 2.0;
    // log₂(1 + 2^x) without overflow
    let prefactor = if x > 60.0 { x + (-x).exp2().ln_1p() / std::f64::consts::LN_2 } else { x.exp2().ln_1p() / std::f64::consts::LN_2 };
    0.5 * prefactor + decay
}

/// `(1 + 2^{cN/2})^{1/2} 2^{(2q+h/m−1)N/4}` (no prefactor at `c = 0`), clamped to 1.
pub fn error_bound(pt: RatePoint, h: f64, m: u32, n_blocks: u32) -> Result<f64> {
    check_h(h, m)?;
    Ok(log2_error_bound(pt, h, m, n_blocks).min(0.0).exp2())
}

/// Gate count of a random circuit on `N` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GateRule {
    /// `G = ⌈N^{3/2}⌉`.
    #[default]
    CeilPow32,
    Fixed(u64),
}

impl GateRule {
    pub fn gates(&self, n_qubits: u64) -> u64 {
        match *self {
            GateRule::Fixed(g) => g,
            GateRule::CeilPow32 => {
                let cube = (n_qubits as u128).pow(3);
                let mut g = (cube as f64).sqrt().floor() as u128;
                while g * g < cube {
                    g += 1;
                }
                while g > 0 && (g - 1) * (g - 1) >= cube {
                    g -= 1;
                }
                g as u64
            }
        }
    }
}

/// `(1 − f^G) + f^G δ`, clamped to 1.
pub fn noisy_bound_from(inner: f64, f: f64, gates: u64) -> Result<f64> {
    if !(f > 0.0 && f <= 1.0) {
        return argument(format!("gate fidelity f = {} outside (0, 1]", f));
    }
    let fg = (gates as f64 * f.ln()).exp();
    Ok(((1.0 - fg) + fg * inner).min(1.0))
}

/// Error bound for a random-circuit encoder whose gates each have fidelity `f`.
pub fn noisy_rqc_bound(pt: RatePoint, h: f64, m: u32, n_blocks: u32, f: f64, rule: GateRule) -> Result<f64> {
    let inner = error_bound(pt, h, m, n_blocks)?;
    noisy_bound_from(inner, f, rule.gates((m * n_blocks) as u64))
}

/// Rate region reachable as `N → ∞`, from the conditional von Neumann entropy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticRegion {
    pub h_vn: f64,
    pub m: u32,
}

impl AsymptoticRegion {
    pub fn contains(&self, pt: RatePoint) -> bool {
        let limit = 1.0 - self.h_vn / self.m as f64 + 1e-12;
        pt.c + 2.0 * pt.q <= limit && 2.0 * pt.q <= limit
    }
}

pub fn asymptotic_boundary(h_vn: f64, m: u32) -> Result<AsymptoticRegion> {
    check_h(h_vn, m)?;
    Ok(AsymptoticRegion { h_vn, m })
}

/// Single-qubit noise models used by the scenario builders.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseSpec {
    Dephasing(f64),
    AmplitudeDamping(f64),
}

impl NoiseSpec {
    pub fn parse(kind: &str, param: f64) -> Result<Self> {
        let spec = match kind {
            "dephasing" => NoiseSpec::Dephasing(param),
            "amp_damp" | "amplitude_damping" | "amplitude-damping" => NoiseSpec::AmplitudeDamping(param),
            other => return argument(format!("unknown noise kind {:?} (expected dephasing or amp_damp)", other)),
        };
        spec.channel()?;
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseSpec::Dephasing(_) => "dephasing",
            NoiseSpec::AmplitudeDamping(_) => "amp_damp",
        }
    }

    pub fn param(&self) -> f64 {
        match *self {
            NoiseSpec::Dephasing(p) | NoiseSpec::AmplitudeDamping(p) => p,
        }
    }

    pub fn channel(&self) -> Result<QuantumChannel> {
        match *self {
            NoiseSpec::Dephasing(p) => dephasing(p),
            NoiseSpec::AmplitudeDamping(g) => amplitude_damping(g),
        }
    }
}

pub const REGION_COLUMNS: [&str; 7] = ["c", "q", "h", "delta1", "delta2", "delta_bound", "inside_asymptotic"];

/// One row per rate point for `N` single-qubit blocks of `noise`. The
/// alphabet is taken as unbounded, so `δ₁` carries no `1/(J−1)` correction;
/// at `c = 0` the classical condition is absent and `δ₁` is reported as 0.
pub fn region_grid(noise: NoiseSpec, n_qubits: u32, grid: &[RatePoint], cfg: &SolverConfig) -> Result<ScenarioDataset> {
    if n_qubits == 0 {
        return argument("N must be positive");
    }
    let ch = noise.channel()?;
    let (h, solved) = h_channel_detailed(std::slice::from_ref(&ch), 1, cfg)?;
    let h_vn = von_neumann_cond(&choi_from_channel(&ch), &["A"], &["B"])?;
    let region = asymptotic_boundary(h_vn.clamp(-1.0, 1.0), 1)?;

    let mut ds = ScenarioDataset::new(&REGION_COLUMNS);
    ds.set_meta("noise", noise.name());
    ds.set_meta("param", noise.param());
    ds.set_meta("N", n_qubits);
    ds.set_meta("m", 1);
    ds.set_meta("h", h);
    ds.set_meta("h_vn", h_vn);
    ds.set_meta("solver_converged", solved.iter().all(|r| r.converged));
    for &pt in grid {
        let (d1, d2) = min_delta_pair(pt, h, 1, n_qubits, f64::INFINITY)?;
        let d1 = if pt.c == 0.0 { 0.0 } else { d1 };
        ds.push(vec![
            pt.c.into(),
            pt.q.into(),
            h.into(),
            Cell::Float(d1),
            Cell::Float(d2),
            error_bound(pt, h, 1, n_qubits)?.into(),
            region.contains(pt).into(),
        ]);
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::QuantumChannel;
    use proptest::prelude::*;

    fn pt(c: f64, q: f64) -> RatePoint {
        RatePoint::new(c, q).unwrap()
    }

    #[test]
    fn rate_point_validation() {
        assert!(RatePoint::new(2.1, 0.0).is_err());
        assert!(RatePoint::new(0.0, 1.01).is_err());
        assert!(RatePoint::new(-0.1, 0.0).is_err());
        assert_eq!(rate_grid(41, 41).unwrap().len(), 1681);
        assert_eq!(rate_grid(3, 2).unwrap()[5], pt(2.0, 1.0));
    }

    #[test]
    fn min_delta_pair_examples() {
        let (d1, d2) = min_delta_pair(pt(0.5, 0.25), 0.0, 1, 8, 65536.0).unwrap();
        assert!((d1 - 1.0000152590218967).abs() < 1e-15);
        assert!((d2 - 0.0625).abs() < 1e-15);
        let (_, d2) = min_delta_pair(pt(0.0, 0.3), -1.0, 1, 10, 4.0).unwrap();
        assert!((d2 - ((2.0 * 0.3 - 2.0) * 10.0f64).exp2()).abs() < 1e-18);
        let (d1, _) = min_delta_pair(pt(0.0, 0.0), 0.0, 1, 1, f64::INFINITY).unwrap();
        assert_eq!(d1, 0.5);
    }

    #[test]
    fn error_bound_examples() {
        assert!((error_bound(pt(0.0, 0.0), -1.0, 1, 20).unwrap() - 2f64.powi(-10)).abs() < 1e-18);
        assert!((error_bound(pt(0.5, 0.0), -1.0, 1, 20).unwrap() - 0.005609924459509794).abs() < 1e-15);
        for n in [1, 5, 50] {
            assert_eq!(error_bound(pt(0.0, 1.0), 1.0, 1, n).unwrap(), 1.0);
        }
        let tiny = error_bound(pt(1e-12, 0.0), -1.0, 1, 20).unwrap();
        let zero = error_bound(pt(0.0, 0.0), -1.0, 1, 20).unwrap();
        assert!((tiny / zero - 2f64.sqrt()).abs() < 1e-9);
        assert!(error_bound(pt(0.0, 0.0), 1.5, 1, 20).is_err());
        assert!(error_bound(pt(2.0, 0.0), -1.0, 1, 4000).unwrap().is_finite());
    }

    #[test]
    fn delta_pair_reproduces_error_bound() {
        for &(c, q, h) in &[(0.5, 0.1, -0.8), (1.2, 0.0, -0.3), (0.05, 0.2, -1.0)] {
            let (d1, d2) = min_delta_pair(pt(c, q), h, 1, 20, f64::INFINITY).unwrap();
            let via_pair = (d1.sqrt() + d2.sqrt()).sqrt().min(1.0);
            assert!((via_pair - error_bound(pt(c, q), h, 1, 20).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn noisy_bound_examples() {
        let inner = error_bound(pt(0.5, 0.1), -0.5, 1, 20).unwrap();
        assert_eq!(noisy_rqc_bound(pt(0.5, 0.1), -0.5, 1, 20, 1.0, GateRule::CeilPow32).unwrap(), inner);
        assert!((noisy_bound_from(0.0, 0.995, 1000).unwrap() - 0.993346031421168).abs() < 1e-12);
        assert_eq!(GateRule::CeilPow32.gates(20), 90);
        assert_eq!(GateRule::CeilPow32.gates(16), 64);
        assert_eq!(GateRule::CeilPow32.gates(1), 1);
        assert!((noisy_bound_from(0.001, 0.995, 90).unwrap() - 0.3637280829320155).abs() < 1e-12);
        assert!(noisy_bound_from(0.1, 0.0, 10).is_err());
        assert!(noisy_rqc_bound(pt(0.0, 0.0), -1.0, 1, 400, 0.995, GateRule::CeilPow32).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn asymptotic_examples() {
        let noiseless = asymptotic_boundary(-1.0, 1).unwrap();
        assert!(noiseless.contains(pt(2.0, 0.0)));
        assert!(noiseless.contains(pt(0.0, 1.0)));
        assert!(!noiseless.contains(pt(1.0, 0.75)));
        let dephased = asymptotic_boundary(0.0, 1).unwrap();
        assert!(dephased.contains(pt(1.0, 0.0)));
        assert!(!dephased.contains(pt(1.05, 0.0)));
        let full = asymptotic_boundary(1.0, 1).unwrap();
        assert!(full.contains(pt(0.0, 0.0)));
        assert!(!full.contains(pt(0.05, 0.0)) && !full.contains(pt(0.0, 0.025)));
    }

    #[test]
    fn region_examples() {
        let cfg = SolverConfig::default();
        let grid = rate_grid(41, 41).unwrap();
        let ds = region_grid(NoiseSpec::Dephasing(0.01), 20, &grid, &cfg).unwrap();
        assert_eq!(ds.header(), "c,q,h,delta1,delta2,delta_bound,inside_asymptotic");
        assert_eq!(ds.rows.len(), 1681);
        let bound = ds.column("delta_bound").unwrap();
        assert!((bound[0] - 0.001889106560222639).abs() < 1e-9);
        assert_eq!(*bound.last().unwrap(), 1.0);
        for i in 0..41 {
            for k in 0..41 {
                if i + 1 < 41 {
                    assert!(bound[(i + 1) * 41 + k] >= bound[i * 41 + k]);
                }
                if k + 1 < 41 {
                    assert!(bound[i * 41 + k + 1] >= bound[i * 41 + k]);
                }
            }
        }
        let full = region_grid(NoiseSpec::Dephasing(1.0), 20, &grid, &cfg).unwrap();
        let (c, q, b) = (full.column("c").unwrap(), full.column("q").unwrap(), full.column("delta_bound").unwrap());
        assert!(full.column("h").unwrap()[0].abs() < 1e-9);
        for r in 0..c.len() {
            if c[r] + 2.0 * q[r] > 1.0 + 1e-9 {
                assert_eq!(b[r], 1.0);
            }
        }
        let id_a = region_grid(NoiseSpec::AmplitudeDamping(0.0), 20, &grid[..50], &cfg).unwrap();
        let id_d = region_grid(NoiseSpec::Dephasing(0.0), 20, &grid[..50], &cfg).unwrap();
        assert_eq!(id_a.rows, id_d.rows);
    }

    #[test]
    fn theorem1_identity_blocks() {
        let cfg = SolverConfig::default();
        let enc = BlockEncodingState::identity_encoding(2, 1).unwrap();
        let p = 0.3;
        let h = crate::entropy::hmax_cond(&choi_from_channel(&dephasing(p).unwrap()), &["A"], &["B"], &cfg).unwrap().value;
        let tuple = CapacityTuple::new(1.0, 0.0, 0.0, 0.0, 2).unwrap();
        let rep = theorem1_check(&enc, &dephasing(p).unwrap(), &tuple, 1.0, 1.0, &cfg).unwrap();
        assert!((rep.hmax_s_given_b - (1.0 + h)).abs() < 1e-4);
        assert!((rep.hmax_sr_given_bsc - h).abs() < 1e-4);
        assert!((rep.delta_bound - 2f64.sqrt()).abs() < 1e-15);
        assert!(rep.solver_converged);
    }

    #[test]
    fn theorem1_noiseless_quantum_only() {
        let cfg = SolverConfig::default();
        let enc = BlockEncodingState::identity_encoding(2, 1).unwrap();
        // Q + E = 1 = log₂ d_{S_r}; H_max(S_r|BS_c) = −1
        let (q, e) = (0.25, 0.75);
        let delta2 = ((q - e) - 1.0f64).exp2();
        let tuple = CapacityTuple::new(0.0, q, e, 0.0, 2).unwrap();
        let rep = theorem1_check(&enc, &QuantumChannel::identity(2), &tuple, 0.5, delta2, &cfg).unwrap();
        assert!(rep.achievable && rep.classical_condition.is_none());
        assert!((rep.hmax_sr_given_bsc + 1.0).abs() < 1e-6);
        assert!((rep.delta_bound - delta2.sqrt().sqrt()).abs() < 1e-15);
        let strict = theorem1_check(&enc, &QuantumChannel::identity(2), &tuple, 0.5, delta2 / 4.0, &cfg).unwrap();
        assert!(!strict.achievable);
        let too_big = CapacityTuple::new(0.0, 0.5, 0.75, 0.0, 2).unwrap();
        assert!(!theorem1_check(&enc, &QuantumChannel::identity(2), &too_big, 0.5, 1.0, &cfg).unwrap().size_condition);
    }

    #[test]
    fn theorem1_rejects_mismatches() {
        let cfg = SolverConfig::default();
        let enc = BlockEncodingState::identity_encoding(2, 1).unwrap();
        let tuple = CapacityTuple::new(1.0, 0.0, 0.0, 0.0, 2).unwrap();
        let wide = QuantumChannel::identity(4);
        assert!(matches!(theorem1_check(&enc, &wide, &tuple, 1.0, 1.0, &cfg), Err(crate::Error::Argument(_))));
        assert!(CapacityTuple::new(2.0, 0.0, 0.0, 0.0, 2).is_err());
        let skewed = ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0]).with_dims(vec![2, 2]).unwrap();
        assert!(matches!(BlockEncodingState::new(vec![skewed.clone(), skewed], 2, 2), Err(crate::Error::Domain(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bound_is_monotone(c in 0.0f64..2.0, q in 0.0f64..1.0, h in -1.0f64..1.0, dc in 0.0f64..0.5, dq in 0.0f64..0.5, dh in 0.0f64..0.5, n in 1u32..60) {
            let base = error_bound(pt(c, q), h, 1, n).unwrap();
            prop_assert!(error_bound(pt((c + dc).min(2.0), q), h, 1, n).unwrap() >= base);
            prop_assert!(error_bound(pt(c, (q + dq).min(1.0)), h, 1, n).unwrap() >= base);
            prop_assert!(error_bound(pt(c, q), (h + dh).min(1.0), 1, n).unwrap() >= base);
        }

        #[test]
        fn vanishing_bounds_lie_in_the_region(c in 0.0f64..2.0, q in 0.0f64..1.0, h in -1.0f64..1.0, slack in 0.0f64..0.3) {
            let point = pt(c, q);
            let e = 2.0 * q + h - 1.0;
            if e < 0.0 && c + e < 0.0 {
                prop_assert!(asymptotic_boundary((h - slack).max(-1.0), 1).unwrap().contains(point));
            }
        }
    }

    #[test]
    fn region_nesting_for_dephasing() {
        let cfg = SolverConfig::default();
        let grid = rate_grid(21, 21).unwrap();
        let lo = region_grid(NoiseSpec::Dephasing(0.01), 20, &grid, &cfg).unwrap().column("delta_bound").unwrap();
        let hi = region_grid(NoiseSpec::Dephasing(0.1), 20, &grid, &cfg).unwrap().column("delta_bound").unwrap();
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b));
    }
}
