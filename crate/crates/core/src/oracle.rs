//! Reference evaluations that share no code path with the solver, used to
//! cross-check it.

use crate::error::{argument, Result};
use crate::linalg::{self, kron, ComplexMatrix, C64};
use crate::quantum::MultipartiteState;

/// `2 log₂ ‖√ρ √(I⊗σ)‖₁` through explicit matrix square roots and an SVD.
fn objective_svd(sqrt_rho: &ComplexMatrix, d_a: usize, sigma: &ComplexMatrix) -> f64 {
    let tau = kron(&ComplexMatrix::identity(&[d_a]), sigma);
    let root = linalg::psd_sqrt(&tau).expect("Bloch-ball states are PSD");
    2.0 * (sqrt_rho.matrix() * root.matrix()).singular_values().sum().log2()
}

fn bloch_state(r: [f64; 3]) -> ComplexMatrix {
    ComplexMatrix::from_row_major(
        vec![2],
        &[
            C64::new((1.0 + r[2]) / 2.0, 0.0),
            C64::new(r[0] / 2.0, -r[1] / 2.0),
            C64::new(r[0] / 2.0, r[1] / 2.0),
            C64::new((1.0 - r[2]) / 2.0, 0.0),
        ],
    )
    .expect("2x2")
}

/// `H_max(A|B)` for a qubit `B` (last factor) by gradient-free grid search
/// over the Bloch ball: a uniform grid of step 0.1, then eight rounds of
/// local grids whose step shrinks fourfold each round, down to about 1e-6.
pub fn bloch_grid_hmax(rho: &MultipartiteState) -> Result<f64> {
    let side = rho.matrix().side();
    if rho.dims().last() != Some(&2) {
        return argument("the grid oracle needs a qubit as the last factor");
    }
    let m = rho.matrix().clone().with_dims(vec![side / 2, 2])?;
    let sqrt_rho = linalg::psd_sqrt(&m)?;
    let eval = |r: [f64; 3]| -> f64 {
        if r.iter().map(|x| x * x).sum::<f64>() > 1.0 {
            return f64::NEG_INFINITY;
        }
        objective_svd(&sqrt_rho, side / 2, &bloch_state(r))
    };
    let mut best = ([0.0; 3], eval([0.0; 3]));
    let (mut step, mut half) = (0.1, 10i32);
    for _ in 0..9 {
        let center = best.0;
        for i in -half..=half {
            for j in -half..=half {
                for k in -half..=half {
                    let r = [center[0] + i as f64 * step, center[1] + j as f64 * step, center[2] + k as f64 * step];
                    let v = eval(r);
                    if v > best.1 {
                        best = (r, v);
                    }
                }
            }
        }
        step /= 4.0;
        half = 6;
    }
    Ok(best.1)
}

/// Closed form of `H_max` for the Choi state of dephasing with parameter `p`.
pub fn dephasing_hmax(p: f64) -> f64 {
    (1.0 + 2.0 * ((p / 2.0) * (1.0 - p / 2.0)).sqrt()).log2() - 1.0
}

/// Closed form of `H_max` for the Choi state of amplitude damping with `γ`;
/// the optimal conditioning state is `|0⟩⟨0|`.
pub fn amplitude_damping_hmax(gamma: f64) -> f64 {
    2.0 * (1.0 + gamma.sqrt()).log2() - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{amplitude_damping, choi_from_channel, dephasing, max_entangled};

    #[test]
    fn grid_reproduces_closed_forms() {
        for p in [0.0, 0.1, 0.5, 1.0] {
            let v = bloch_grid_hmax(&choi_from_channel(&dephasing(p).unwrap())).unwrap();
            assert!((v - dephasing_hmax(p)).abs() < 1e-6, "p={} {} {}", p, v, dephasing_hmax(p));
        }
        for g in [0.2, 0.7] {
            let v = bloch_grid_hmax(&choi_from_channel(&amplitude_damping(g).unwrap())).unwrap();
            assert!((v - amplitude_damping_hmax(g)).abs() < 1e-6);
        }
        assert!((bloch_grid_hmax(&max_entangled(1)).unwrap() + 1.0).abs() < 1e-9);
        assert!(bloch_grid_hmax(&max_entangled(2)).is_err());
    }
}
