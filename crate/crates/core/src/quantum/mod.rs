//! States on labeled tensor factors, channels in Kraus form, and the Choi duality.

mod channel;
mod heisenberg;
mod state;

pub use channel::{amplitude_damping, apply_channel, channel_from_choi, choi_from_channel, dephasing, tensor_channel, QuantumChannel};
pub use heisenberg::{bath_hamiltonian, heisenberg_channel, HeisenbergCouplings};
pub use state::{
    basis_state, classical_corr, classical_corr_on, completely_mixed, hybrid_source, max_entangled, max_entangled_on,
    MultipartiteState,
};
