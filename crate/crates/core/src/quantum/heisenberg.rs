use crate::error::{argument, Result};
use crate::linalg::{self, pauli, ComplexMatrix, Mat, C64};

use super::channel::QuantumChannel;

/// Coupling vectors `(J_x, J_y, J_z)` of two neighbouring qubits to a shared bath spin.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HeisenbergCouplings {
    pub j_left: [f64; 3],
    pub j_right: [f64; 3],
}

impl HeisenbergCouplings {
    pub fn new(j_left: [f64; 3], j_right: [f64; 3]) -> Result<Self> {
        if j_left.iter().chain(&j_right).any(|x| !x.is_finite()) {
            return argument("coupling constants must be finite");
        }
        Ok(Self { j_left, j_right })
    }

    pub fn is_zero(&self) -> bool {
        self.j_left.iter().chain(&self.j_right).all(|&x| x == 0.0)
    }
}

/// `Σ_j −(J_x X_j X_E + J_y Y_j Y_E + J_z Z_j Z_E)` on `(q_i, q_{i+1}, E)`.
pub fn bath_hamiltonian(j: &HeisenbergCouplings) -> ComplexMatrix {
    let paulis = [pauli::x(), pauli::y(), pauli::z()];
    let id = pauli::id();
    let mut h = ComplexMatrix::zeros(&[2, 2, 2]);
    for (site, coup) in [j.j_left, j.j_right].iter().enumerate() {
        for (s, p) in paulis.iter().enumerate() {
            if coup[s] == 0.0 {
                continue;
            }
            let term = if site == 0 {
                linalg::kron(&linalg::kron(p, &id), p)
            } else {
                linalg::kron(&linalg::kron(&id, p), p)
            };
            h = &h - &term.scale(coup[s]);
        }
    }
    h
}

/// Two-qubit channel `ρ ↦ tr_E[U (ρ ⊗ ρ_E) U†]` with `U = exp(−itH)` and
/// `ρ_E = diag(1−p, p)`, so `p = 1` is the pure bath state `|1⟩`.
pub fn heisenberg_channel(p: f64, t: f64, j: &HeisenbergCouplings) -> Result<QuantumChannel> {
    if !(0.5..=1.0).contains(&p) {
        return argument(format!("Boltzmann factor p = {} outside [0.5, 1]", p));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return argument(format!("time t = {} must be finite and nonnegative", t));
    }
    let j = HeisenbergCouplings::new(j.j_left, j.j_right)?;
    let u = linalg::unitary_from_hamiltonian(&bath_hamiltonian(&j), t)?.into_matrix();
    let env = [1.0 - p, p];
    let mut kraus = Vec::with_capacity(4);
    for (f, &w) in env.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let s = w.sqrt();
        for e in 0..2 {
            // rows (out, e), cols (in, f) of U with E the last factor
            kraus.push(Mat::from_fn(4, 4, |r, c| u[(2 * r + e, 2 * c + f)] * C64::new(s, 0.0)));
        }
    }
    QuantumChannel::new(kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::channel::{channel_from_choi, choi_from_channel};
    use proptest::prelude::*;

    fn max_diff(a: &Mat, b: &Mat) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn spanning_inputs() -> Vec<Mat> {
        let mut out = Vec::new();
        for r in 0..4 {
            for c in 0..4 {
                let mut m = Mat::zeros(4, 4);
                m[(r, c)] = C64::new(1.0, 0.0);
                out.push(m);
            }
        }
        out
    }

    fn agree(a: &QuantumChannel, b: &QuantumChannel) -> f64 {
        spanning_inputs()
            .iter()
            .map(|e| max_diff(&a.apply_matrix(e).unwrap(), &b.apply_matrix(e).unwrap()))
            .fold(0.0, f64::max)
    }

    /// Direct Stinespring evaluation with an explicit partial trace.
    fn dilation_apply(p: f64, t: f64, j: &HeisenbergCouplings, rho: &Mat) -> Mat {
        let u = linalg::unitary_from_hamiltonian(&bath_hamiltonian(j), t).unwrap();
        let sys = ComplexMatrix::new(rho.clone(), vec![2, 2]).unwrap();
        let joint = linalg::kron(&sys, &ComplexMatrix::from_real_diag(&[1.0 - p, p]));
        linalg::partial_trace(&joint.conjugate_by(&u), &[0, 1]).unwrap().into_matrix()
    }

    fn couplings() -> HeisenbergCouplings {
        HeisenbergCouplings::new([0.8, -0.3, 1.1], [0.2, 0.5, -0.7]).unwrap()
    }

    #[test]
    fn trivial_dynamics_give_identity() {
        let id = QuantumChannel::identity(4);
        assert!(agree(&heisenberg_channel(0.7, 0.0, &couplings()).unwrap(), &id) < 1e-12);
        assert!(agree(&heisenberg_channel(0.7, 3.0, &HeisenbergCouplings::default()).unwrap(), &id) < 1e-12);
    }

    #[test]
    fn matches_dilation() {
        let j = couplings();
        let ch = heisenberg_channel(0.8, 1.3, &j).unwrap();
        for e in spanning_inputs() {
            assert!(max_diff(&ch.apply_matrix(&e).unwrap(), &dilation_apply(0.8, 1.3, &j, &e)) < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let j = couplings();
        for (p, t) in [(0.4, 1.0), (1.1, 1.0), (0.7, -1.0), (0.7, f64::NAN)] {
            assert!(matches!(heisenberg_channel(p, t, &j), Err(crate::Error::Argument(_))));
        }
        assert!(HeisenbergCouplings::new([f64::INFINITY, 0.0, 0.0], [0.0; 3]).is_err());
    }

    #[test]
    fn single_site_coupling_only_touches_its_qubit() {
        // J_z coupling alone dephases qubit i and leaves qubit i+1 alone.
        let j = HeisenbergCouplings::new([0.0, 0.0, 0.9], [0.0; 3]).unwrap();
        let ch = heisenberg_channel(0.5, 0.6, &j).unwrap();
        let choi = choi_from_channel(&ch);
        let eig = linalg::herm_eig(choi.matrix()).unwrap();
        assert!(eig.eigenvalues[2].abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn channel_invariants(
            p in 0.5f64..=1.0,
            t in 0.0f64..4.0,
            jl in prop::array::uniform3(-2.0f64..2.0),
            jr in prop::array::uniform3(-2.0f64..2.0),
        ) {
            let j = HeisenbergCouplings::new(jl, jr).unwrap();
            let ch = heisenberg_channel(p, t, &j).unwrap();
            prop_assert!(ch.trace_preservation_error() <= 1e-10);
            let back = channel_from_choi(&choi_from_channel(&ch), 4, 4).unwrap();
            prop_assert!(agree(&ch, &back) <= 1e-8);

            let unital = heisenberg_channel(0.5, t, &j).unwrap();
            let mixed = Mat::identity(4, 4).scale(0.25);
            prop_assert!(max_diff(&unital.apply_matrix(&mixed).unwrap(), &mixed) <= 1e-10);

            let pure = heisenberg_channel(1.0, t, &j).unwrap();
            let eig = linalg::herm_eig(choi_from_channel(&pure).matrix()).unwrap();
            prop_assert!(eig.eigenvalues[2] < 1e-10);
        }
    }
}
