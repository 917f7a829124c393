use crate::error::{argument, domain, Result};
use crate::linalg::{self, ComplexMatrix, C64, HERMITIAN_TOL, PSD_CLIP};

const TRACE_TOL: f64 = 1e-10;

/// Density operator on labeled tensor factors.
///
/// Labels are unique and line up with `matrix().dims()`. A state may be
/// subnormalized (trace below one); see [`MultipartiteState::is_normalized`].
#[derive(Clone, Debug, PartialEq)]
pub struct MultipartiteState {
    matrix: ComplexMatrix,
    labels: Vec<String>,
}

impl MultipartiteState {
    /// Validates Hermiticity, positivity and `tr <= 1` before wrapping.
    pub fn new(matrix: ComplexMatrix, labels: Vec<String>) -> Result<Self> {
        let state = Self::from_parts(matrix, labels)?;
        let asym = state.matrix.hermiticity_error();
        if asym > HERMITIAN_TOL {
            return domain(format!("density operator is not Hermitian (asymmetry {:.3e})", asym));
        }
        let tr = state.trace();
        if !(-TRACE_TOL..=1.0 + TRACE_TOL).contains(&tr) {
            return domain(format!("density operator has trace {}", tr));
        }
        let min = linalg::hermitian_eigenvalues_blocked(&state.matrix)?.last().copied().unwrap_or(0.0);
        if min < -PSD_CLIP {
            return domain(format!("density operator has eigenvalue {:.3e}", min));
        }
        Ok(state)
    }

    /// Checks label bookkeeping only; for constructions that preserve positivity.
    pub(crate) fn from_parts(matrix: ComplexMatrix, labels: Vec<String>) -> Result<Self> {
        if labels.len() != matrix.dims().len() {
            return argument(format!("{} labels for {} tensor factors", labels.len(), matrix.dims().len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return argument(format!("duplicate subsystem label {:?}", l));
            }
        }
        Ok(Self { matrix, labels })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        self.matrix.dims()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn is_normalized(&self) -> bool {
        (self.trace() - 1.0).abs() <= TRACE_TOL
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        match self.labels.iter().position(|l| l == label) {
            Some(i) => Ok(i),
            None => argument(format!("no subsystem labeled {:?} (have {:?})", label, self.labels)),
        }
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.dims()[self.index_of(label)?])
    }

    fn indices_of(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.index_of(l)).collect()
    }

    /// Keeps the listed subsystems (in their existing order) and traces out the rest.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        let idx = self.indices_of(keep)?;
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        let matrix = linalg::partial_trace(&self.matrix, &idx)?;
        let labels = sorted.iter().map(|&i| self.labels[i].clone()).collect();
        if sorted.is_empty() {
            return Ok(Self { matrix, labels: vec![String::from("_")] });
        }
        Ok(Self { matrix, labels })
    }

    pub fn trace_out(&self, drop: &[&str]) -> Result<Self> {
        self.indices_of(drop)?;
        let keep: Vec<&str> = self.labels.iter().map(String::as_str).filter(|l| !drop.contains(l)).collect();
        self.partial_trace(&keep)
    }

    /// Reorders factors to the given label order, which must name every subsystem.
    pub fn reorder(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.labels.len() {
            return argument(format!("reorder needs all of {:?}, got {:?}", self.labels, order));
        }
        let idx = self.indices_of(order)?;
        let matrix = linalg::permute_factors(&self.matrix, &idx)?;
        Ok(Self { matrix, labels: order.iter().map(|s| s.to_string()).collect() })
    }

    /// `self ⊗ other`; labels must be disjoint.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Self::from_parts(linalg::kron(&self.matrix, &other.matrix), labels)
    }

    pub fn relabel(mut self, from: &str, to: &str) -> Result<Self> {
        let i = self.index_of(from)?;
        if from != to && self.labels.contains(&to.to_string()) {
            return argument(format!("label {:?} already in use", to));
        }
        self.labels[i] = to.to_string();
        Ok(self)
    }

    pub fn with_labels(self, labels: &[&str]) -> Result<Self> {
        Self::from_parts(self.matrix, labels.iter().map(|s| s.to_string()).collect())
    }

    /// Splits one factor into consecutive sub-factors. Always valid because
    /// the row-major layout nests sub-factors the same way `kron` does.
    pub fn split(&self, label: &str, parts: &[(&str, usize)]) -> Result<Self> {
        let i = self.index_of(label)?;
        let prod: usize = parts.iter().map(|p| p.1).product();
        if prod != self.dims()[i] {
            return argument(format!("cannot split {:?} of dim {} into {:?}", label, self.dims()[i], parts));
        }
        let mut dims = self.dims()[..i].to_vec();
        dims.extend(parts.iter().map(|p| p.1));
        dims.extend_from_slice(&self.dims()[i + 1..]);
        let mut labels = self.labels[..i].to_vec();
        labels.extend(parts.iter().map(|p| p.0.to_string()));
        labels.extend_from_slice(&self.labels[i + 1..]);
        Self::from_parts(self.matrix.clone().with_dims(dims)?, labels)
    }

    /// Merges adjacent factors into one.
    pub fn merge(&self, labels: &[&str], into: &str) -> Result<Self> {
        let idx = self.indices_of(labels)?;
        let Some(&first) = idx.first() else {
            return argument("merge needs at least one label");
        };
        if idx.iter().enumerate().any(|(k, &i)| i != first + k) {
            return argument(format!("labels {:?} are not adjacent and in order", labels));
        }
        let last = first + idx.len();
        let mut dims = self.dims()[..first].to_vec();
        dims.push(self.dims()[first..last].iter().product());
        dims.extend_from_slice(&self.dims()[last..]);
        let mut new_labels = self.labels[..first].to_vec();
        new_labels.push(into.to_string());
        new_labels.extend_from_slice(&self.labels[last..]);
        Self::from_parts(self.matrix.clone().with_dims(dims)?, new_labels)
    }
}

fn labels2(a: &str, b: &str) -> Vec<String> {
    vec![a.to_string(), b.to_string()]
}

/// `Φ_r` between subsystems `a` and `b`, Schmidt rank `2^r`.
pub fn max_entangled_on(r: u32, a: &str, b: &str) -> Result<MultipartiteState> {
    let d = 1usize << r;
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = amp;
    }
    let m = ComplexMatrix::projector(&v).with_dims(vec![d, d])?;
    MultipartiteState::from_parts(m, labels2(a, b))
}

/// `Φ_r` on subsystems labeled `A` and `B`.
pub fn max_entangled(r: u32) -> MultipartiteState {
    max_entangled_on(r, "A", "B").expect("distinct labels")
}

/// `π_r`, the completely mixed state of rank `2^r`.
pub fn completely_mixed(r: u32, label: &str) -> MultipartiteState {
    let d = 1usize << r;
    let m = ComplexMatrix::identity(&[d]).scale(1.0 / d as f64);
    MultipartiteState::from_parts(m, vec![label.to_string()]).expect("one label")
}

/// `|k><k|` on a `d`-dimensional subsystem.
pub fn basis_state(d: usize, k: usize, label: &str) -> Result<MultipartiteState> {
    if k >= d {
        return argument(format!("basis index {} out of range for dimension {}", k, d));
    }
    MultipartiteState::from_parts(ComplexMatrix::basis_projector(d, k), vec![label.to_string()])
}

/// `Ω_C = 2^-C Σ_j |j><j| ⊗ |j><j|` between subsystems `a` and `b`.
pub fn classical_corr_on(c_bits: u32, a: &str, b: &str) -> Result<MultipartiteState> {
    let d = 1usize << c_bits;
    let mut diag = vec![0.0; d * d];
    for j in 0..d {
        diag[j * d + j] = 1.0 / d as f64;
    }
    let m = ComplexMatrix::from_real_diag(&diag).with_dims(vec![d, d])?;
    MultipartiteState::from_parts(m, labels2(a, b))
}

/// `Ω_C` on subsystems labeled `Mc` and `Rc`.
pub fn classical_corr(c_bits: u32) -> MultipartiteState {
    classical_corr_on(c_bits, "Mc", "Rc").expect("distinct labels")
}

/// Hybrid source `Ω_C ⊗ Φ_Q` on `Mc, Rc, Mq, Rq`. Empty registers keep
/// their label with dimension one.
pub fn hybrid_source(c_bits: u32, q_qubits: u32) -> MultipartiteState {
    let omega = classical_corr(c_bits);
    let phi = max_entangled_on(q_qubits, "Mq", "Rq").expect("distinct labels");
    omega.tensor(&phi).expect("disjoint labels")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn max_entangled_examples() {
        let phi = max_entangled(1);
        let mut expect = ComplexMatrix::zeros(&[2, 2]);
        let mut entries = vec![c(0.0); 16];
        for i in [0usize, 3] {
            for j in [0usize, 3] {
                entries[i * 4 + j] = c(0.5);
            }
        }
        expect = &expect + &ComplexMatrix::from_row_major(vec![2, 2], &entries).unwrap();
        assert!(phi.matrix().max_abs_diff(&expect) < 1e-15);
        let trivial = max_entangled(0);
        assert_eq!(trivial.dims(), &[1, 1]);
        assert!((trivial.matrix()[(0, 0)] - c(1.0)).norm() < 1e-15);
        let marginal = max_entangled(2).partial_trace(&["A"]).unwrap();
        assert!(marginal.matrix().max_abs_diff(completely_mixed(2, "A").matrix()) < 1e-15);
        assert!(MultipartiteState::new(phi.matrix().clone(), phi.labels().to_vec()).is_ok());
    }

    #[test]
    fn classical_corr_examples() {
        let omega = classical_corr(1);
        assert!(omega.matrix().max_abs_diff(&ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]).with_dims(vec![2, 2]).unwrap()) < 1e-15);
        assert_eq!(classical_corr(0).dims(), &[1, 1]);
        for side in ["Mc", "Rc"] {
            let m = classical_corr(3).partial_trace(&[side]).unwrap();
            assert!(m.matrix().max_abs_diff(completely_mixed(3, side).matrix()) < 1e-15);
        }
    }

    #[test]
    fn hybrid_source_examples() {
        let s = hybrid_source(1, 1);
        assert_eq!(s.labels(), &["Mc", "Rc", "Mq", "Rq"]);
        assert_eq!(s.matrix().side(), 16);
        assert!(s.is_normalized());
        let q_only = hybrid_source(0, 2);
        assert!(q_only.matrix().matrix() == max_entangled(2).matrix().matrix());
        let c_only = hybrid_source(2, 0);
        assert!(c_only.matrix().matrix() == classical_corr(2).matrix().matrix());
    }

    #[test]
    fn label_operations() {
        let s = hybrid_source(1, 1);
        let r = s.reorder(&["Rq", "Mc", "Mq", "Rc"]).unwrap();
        assert_eq!(r.dims(), &[2, 2, 2, 2]);
        let back = r.reorder(&["Mc", "Rc", "Mq", "Rq"]).unwrap();
        assert!(back.matrix().max_abs_diff(s.matrix()) == 0.0);
        assert!(s.reorder(&["Mc", "Rc"]).is_err());
        assert!(s.partial_trace(&["Zz"]).is_err());
        assert!(s.tensor(&classical_corr(1)).is_err());
        let split = max_entangled(2).split("A", &[("A1", 2), ("A2", 2)]).unwrap();
        assert_eq!(split.labels(), &["A1", "A2", "B"]);
        let merged = split.merge(&["A1", "A2"], "A").unwrap();
        assert!(merged.matrix().matrix() == max_entangled(2).matrix().matrix());
        assert!(split.merge(&["A1", "B"], "X").is_err());
    }

    #[test]
    fn validation_rejects_bad_operators() {
        let neg = ComplexMatrix::from_real_diag(&[1.2, -0.2]);
        assert!(matches!(MultipartiteState::new(neg, vec!["A".into()]), Err(crate::Error::Domain(_))));
        let big = ComplexMatrix::from_real_diag(&[0.7, 0.7]);
        assert!(matches!(MultipartiteState::new(big, vec!["A".into()]), Err(crate::Error::Domain(_))));
        let sub = MultipartiteState::new(ComplexMatrix::from_real_diag(&[0.3, 0.2]), vec!["A".into()]).unwrap();
        assert!(!sub.is_normalized());
        assert!(MultipartiteState::new(ComplexMatrix::identity(&[2]), vec!["A".into(), "B".into()]).is_err());
    }
}
