use crate::error::{argument, domain, Result};
use crate::linalg::{self, ComplexMatrix, Mat, C64};

use super::state::MultipartiteState;

const TP_TOL: f64 = 1e-10;
/// Choi eigenvalues below this are dropped when extracting Kraus operators.
const KRAUS_CUTOFF: f64 = 1e-12;

/// CPTP map in Kraus form. Operators are `d_out x d_in`.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    kraus: Vec<Mat>,
    d_in: usize,
    d_out: usize,
}

impl QuantumChannel {
    /// Checks shapes and `Σ K†K = I` within 1e-10.
    pub fn new(kraus: Vec<Mat>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return argument("a channel needs at least one Kraus operator");
        };
        let (d_out, d_in) = first.shape();
        if d_in == 0 || d_out == 0 {
            return argument("Kraus operators must be nonempty");
        }
        if kraus.iter().any(|k| k.shape() != (d_out, d_in)) {
            return argument("Kraus operators have inconsistent shapes");
        }
        let ch = Self { kraus, d_in, d_out };
        let err = ch.trace_preservation_error();
        if err > TP_TOL {
            return domain(format!("Kraus operators are not trace preserving (error {:.3e})", err));
        }
        Ok(ch)
    }

    pub fn identity(d: usize) -> Self {
        Self { kraus: vec![Mat::identity(d, d)], d_in: d, d_out: d }
    }

    pub fn kraus(&self) -> &[Mat] {
        &self.kraus
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// Largest entry of `|Σ K†K − I|`.
    pub fn trace_preservation_error(&self) -> f64 {
        let sum: Mat = self.kraus.iter().map(|k| k.adjoint() * k).fold(Mat::zeros(self.d_in, self.d_in), |a, b| a + b);
        let diff = sum - Mat::identity(self.d_in, self.d_in);
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Action on a single-system operator.
    pub fn apply_matrix(&self, rho: &Mat) -> Result<Mat> {
        if rho.shape() != (self.d_in, self.d_in) {
            return argument(format!("channel input is {}-dimensional, operator is {:?}", self.d_in, rho.shape()));
        }
        Ok(self.kraus.iter().fold(Mat::zeros(self.d_out, self.d_out), |acc, k| acc + k * rho * k.adjoint()))
    }

    /// Choi state `(id ⊗ N)(Φ)` on `A` (input reference) and `B` (output).
    pub fn choi(&self) -> MultipartiteState {
        choi_from_channel(self)
    }
}

/// `(id^A ⊗ N)(Φ^{AA'})` with the output relabeled `B`. Its `A` marginal is
/// completely mixed for every trace-preserving `N`.
pub fn choi_from_channel(ch: &QuantumChannel) -> MultipartiteState {
    let (din, dout) = (ch.d_in, ch.d_out);
    let mut out = Mat::zeros(din * dout, din * dout);
    for k in &ch.kraus {
        // (I ⊗ K)|Φ> = d^-1/2 Σ_{i,j} K[j,i] |i>|j>
        let v: Vec<C64> = (0..din * dout).map(|idx| k[(idx % dout, idx / dout)]).collect();
        for r in 0..v.len() {
            if v[r] == C64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..v.len() {
                out[(r, c)] += v[r] * v[c].conj();
            }
        }
    }
    out.scale_mut(1.0 / din as f64);
    let m = ComplexMatrix::new(out, vec![din, dout]).expect("consistent dims");
    MultipartiteState::from_parts(m, vec!["A".into(), "B".into()]).expect("two labels")
}

/// Inverse Choi map `T(σ) = d_A tr_A[(σ^T ⊗ I) ρ]`, returned as Kraus
/// operators from the eigendecomposition of `d_A ρ`. `rho` must have a
/// completely mixed `A` marginal (first factor) within 1e-8.
pub fn channel_from_choi(rho: &MultipartiteState, d_in: usize, d_out: usize) -> Result<QuantumChannel> {
    let m = rho.matrix();
    if m.side() != d_in * d_out {
        return argument(format!("Choi operator of side {} cannot map {} -> {}", m.side(), d_in, d_out));
    }
    let m = m.clone().with_dims(vec![d_in, d_out])?;
    let marginal = linalg::partial_trace(&m, &[0])?;
    let mixed = ComplexMatrix::identity(&[d_in]).scale(1.0 / d_in as f64);
    let dev = marginal.max_abs_diff(&mixed);
    if dev > 1e-8 {
        return domain(format!("input marginal deviates from completely mixed by {:.3e}; not a CPTP dual", dev));
    }
    let eig = linalg::herm_eig(&m.scale(d_in as f64))?;
    if let Some(&min) = eig.eigenvalues.last() {
        if min < -linalg::PSD_CLIP {
            return domain(format!("Choi operator has eigenvalue {:.3e}; map is not completely positive", min));
        }
    }
    let mut kraus = Vec::new();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam < KRAUS_CUTOFF {
            continue;
        }
        let s = lam.sqrt();
        kraus.push(Mat::from_fn(d_out, d_in, |j, i| eig.eigenvectors[(i * d_out + j, k)] * s));
    }
    if kraus.is_empty() {
        return domain("Choi operator is zero");
    }
    // Dropped eigenvalues leave a TP defect of order KRAUS_CUTOFF; accept it.
    let ch = QuantumChannel { kraus, d_in, d_out };
    let err = ch.trace_preservation_error();
    if err > 1e-8 {
        return domain(format!("extracted Kraus set is not trace preserving (error {:.3e})", err));
    }
    Ok(ch)
}

/// Applies `ch` to the factor labeled `target`; the label is kept.
pub fn apply_channel(ch: &QuantumChannel, state: &MultipartiteState, target: &str) -> Result<MultipartiteState> {
    let i = state.index_of(target)?;
    let d = state.dims()[i];
    if d != ch.d_in {
        return argument(format!("channel input dimension {} does not match subsystem {:?} of dimension {}", ch.d_in, target, d));
    }
    let out = linalg::apply_local_kraus(state.matrix(), i, &ch.kraus)?;
    MultipartiteState::from_parts(out, state.labels().to_vec())
}

/// `N_1 ⊗ … ⊗ N_k`; the Kraus set is every ordered product.
pub fn tensor_channel(chs: &[QuantumChannel]) -> Result<QuantumChannel> {
    let Some((first, rest)) = chs.split_first() else {
        return argument("tensor_channel needs at least one channel");
    };
    let mut acc = first.clone();
    for ch in rest {
        let mut kraus = Vec::with_capacity(acc.kraus.len() * ch.kraus.len());
        for a in &acc.kraus {
            for b in &ch.kraus {
                kraus.push(a.kronecker(b));
            }
        }
        acc = QuantumChannel { kraus, d_in: acc.d_in * ch.d_in, d_out: acc.d_out * ch.d_out };
    }
    Ok(acc)
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return argument(format!("{} = {} outside [0, 1]", name, x));
    }
    Ok(())
}

/// `D_p(ρ) = (1 − p/2) ρ + (p/2) Z ρ Z`.
pub fn dephasing(p: f64) -> Result<QuantumChannel> {
    check_unit_interval("p", p)?;
    let i = linalg::pauli::id().into_matrix().scale((1.0 - p / 2.0).sqrt());
    let z = linalg::pauli::z().into_matrix().scale((p / 2.0).sqrt());
    QuantumChannel::new(vec![i, z])
}

/// Amplitude damping with `K0 = |0><0| + √(1−γ)|1><1|`, `K1 = √γ |0><1|`.
pub fn amplitude_damping(gamma: f64) -> Result<QuantumChannel> {
    check_unit_interval("gamma", gamma)?;
    let zero = C64::new(0.0, 0.0);
    let k0 = Mat::from_row_slice(2, 2, &[C64::new(1.0, 0.0), zero, zero, C64::new((1.0 - gamma).sqrt(), 0.0)]);
    let k1 = Mat::from_row_slice(2, 2, &[zero, C64::new(gamma.sqrt(), 0.0), zero, zero]);
    QuantumChannel::new(vec![k0, k1])
}
