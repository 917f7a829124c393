//! Purified distance, conditional max-entropy and conditional von Neumann entropy.

mod solver;

use crate::error::{argument, domain, Result};
use crate::linalg::{self, ComplexMatrix, PSD_CLIP};
use crate::quantum::{choi_from_channel, MultipartiteState, QuantumChannel};

use solver::Problem;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Stop once an iteration improves the objective (in bits) by less than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Weight of the completely mixed state mixed into every evaluated `σ`.
    pub boundary_reg: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 5000, boundary_reg: 1e-12 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return argument(format!("solver tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return argument("solver max_iter must be positive");
        }
        if !(0.0..1.0).contains(&self.boundary_reg) {
            return argument(format!("boundary_reg must lie in [0, 1), got {}", self.boundary_reg));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct EntropyResult {
    /// `2 log₂ G(sigma_opt)` in bits; a certified lower bound on the supremum.
    pub value: f64,
    pub sigma_opt: MultipartiteState,
    pub iterations: usize,
    pub last_improvement: f64,
    pub converged: bool,
    /// Frank–Wolfe upper bound on the supremum, in bits.
    pub upper_bound: f64,
    /// Objective in bits after each accepted iterate, starting from `σ = π`.
    pub history: Vec<f64>,
}

impl EntropyResult {
    pub fn gap(&self) -> f64 {
        self.upper_bound - self.value
    }
}

fn check_subnormalized(m: &ComplexMatrix, what: &str) -> Result<f64> {
    let tr = m.trace().re;
    if tr > 1.0 + 1e-10 {
        return domain(format!("{} has trace {} > 1", what, tr));
    }
    Ok(tr)
}

/// `‖√ρ√σ‖₁ + √((1−tr ρ)(1−tr σ))`.
pub fn purified_fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if rho.side() != sigma.side() {
        return argument(format!("operators of side {} and {}", rho.side(), sigma.side()));
    }
    let tr_rho = check_subnormalized(rho, "rho")?;
    let tr_sigma = check_subnormalized(sigma, "sigma")?;
    let a = linalg::psd_sqrt(rho)?;
    let b = linalg::psd_sqrt(sigma)?;
    let overlap = linalg::trace_norm(&a.matmul(&b));
    let defect = ((1.0 - tr_rho).max(0.0) * (1.0 - tr_sigma).max(0.0)).sqrt();
    Ok((overlap + defect).clamp(0.0, 1.0))
}

/// `√(1 − F̄²)`.
pub fn purified_distance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let f = purified_fidelity(rho, sigma)?;
    Ok((1.0 - f * f).max(0.0).sqrt())
}

/// Brings `rho` into `(A, B)` order and returns `(matrix, d_A, b dims)`.
fn bipartition(rho: &MultipartiteState, a: &[&str], b: &[&str]) -> Result<(ComplexMatrix, usize, Vec<usize>)> {
    let mut order: Vec<&str> = a.to_vec();
    order.extend_from_slice(b);
    if order.len() != rho.labels().len() {
        return argument(format!("labels {:?} | {:?} do not partition {:?}", a, b, rho.labels()));
    }
    let r = rho.reorder(&order)?;
    let d_a: usize = r.dims()[..a.len()].iter().product();
    let b_dims = r.dims()[a.len()..].to_vec();
    let d_b: usize = b_dims.iter().product();
    Ok((r.into_matrix().with_dims(vec![d_a, d_b])?, d_a, b_dims))
}

/// `H_max(A|B)_ρ = sup_σ 2 log₂ ‖√ρ √(I_A⊗σ_B)‖₁`.
///
/// `value` is the exact objective at `sigma_opt`. If the iteration cap is hit
/// the result is returned with `converged == false`.
pub fn hmax_cond(rho: &MultipartiteState, a_labels: &[&str], b_labels: &[&str], cfg: &SolverConfig) -> Result<EntropyResult> {
    cfg.validate()?;
    if !rho.is_normalized() {
        return domain(format!("hmax_cond needs a normalized state, trace is {}", rho.trace()));
    }
    let (m, d_a, b_dims) = bipartition(rho, a_labels, b_labels)?;
    let min = linalg::hermitian_eigenvalues_blocked(&m)?.last().copied().unwrap_or(0.0);
    if min < -PSD_CLIP {
        return domain(format!("state has eigenvalue {:.3e}", min));
    }
    let d_b = m.dims()[1];
    let problem = Problem::new(m.matrix(), d_a, d_b, cfg.boundary_reg);
    let out = problem.solve(cfg.tol, cfg.max_iter);

    let (labels, dims) = if b_labels.is_empty() {
        (vec![String::from("_")], vec![1])
    } else {
        (b_labels.iter().map(|s| s.to_string()).collect(), b_dims)
    };
    let sigma = ComplexMatrix::new(out.sigma, dims)?;
    let value = 2.0 * out.objective.log2();
    Ok(EntropyResult {
        value,
        sigma_opt: MultipartiteState::from_parts(sigma, labels)?,
        iterations: out.iterations,
        last_improvement: out.last_improvement,
        converged: out.converged,
        upper_bound: (2.0 * out.upper.log2()).max(value),
        history: out.history,
    })
}

/// `2 log₂ ‖√ρ √(I⊗σ)‖₁` for a given conditioning state, in bits.
pub fn hmax_objective(rho: &MultipartiteState, a_labels: &[&str], b_labels: &[&str], sigma: &ComplexMatrix) -> Result<f64> {
    let (m, d_a, _) = bipartition(rho, a_labels, b_labels)?;
    let d_b = m.dims()[1];
    if sigma.side() != d_b {
        return argument(format!("conditioning state has side {}, expected {}", sigma.side(), d_b));
    }
    let problem = Problem::new(m.matrix(), d_a, d_b, 0.0);
    Ok(2.0 * problem.objective(sigma.matrix()).log2())
}

fn shannon_bits(values: &[f64]) -> f64 {
    values.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.log2()).sum()
}

/// Von Neumann entropy in bits, `0 log 0 = 0`.
pub fn von_neumann(m: &ComplexMatrix) -> Result<f64> {
    Ok(shannon_bits(&linalg::hermitian_eigenvalues_blocked(m)?))
}

/// `S(AB) − S(B)`.
pub fn von_neumann_cond(rho: &MultipartiteState, a_labels: &[&str], b_labels: &[&str]) -> Result<f64> {
    let (m, _, _) = bipartition(rho, a_labels, b_labels)?;
    let b = linalg::partial_trace(&m, &[1])?;
    Ok(von_neumann(&m)? - von_neumann(&b)?)
}

/// Per-block average `(1/n) Σᵢ H_max(a|a′)` over Choi states of `m`-qubit channels,
/// with the channel output as the conditioning side.
pub fn h_channel(chs: &[QuantumChannel], m: u32, cfg: &SolverConfig) -> Result<f64> {
    Ok(h_channel_detailed(chs, m, cfg)?.0)
}

/// Like [`h_channel`], also returning the per-channel solver results.
pub fn h_channel_detailed(chs: &[QuantumChannel], m: u32, cfg: &SolverConfig) -> Result<(f64, Vec<EntropyResult>)> {
    if chs.is_empty() {
        return argument("h_channel needs at least one channel");
    }
    let d = 1usize << m;
    let mut results = Vec::with_capacity(chs.len());
    for (i, ch) in chs.iter().enumerate() {
        if ch.d_in() != d || ch.d_out() != d {
            return argument(format!("channel {} maps {} -> {} dims, blocks are {} qubits", i, ch.d_in(), ch.d_out(), m));
        }
        results.push(hmax_cond(&choi_from_channel(ch), &["A"], &["B"], cfg)?);
    }
    let mean = results.iter().map(|r| r.value).sum::<f64>() / chs.len() as f64;
    let m = m as f64;
    Ok((mean.clamp(-m, m), results))
}
