//! Markovian entanglement networks for n-qubit pure states.
//!
//! A network is an undirected graph over qubits whose edges mark conditional
//! entanglement, together with one amplitude-potential table per qubit. This
//! crate extracts networks from dense states, rebuilds states from networks,
//! answers exact probabilistic queries (with linear-time paths for chains)
//! and classifies three-qubit states by network topology.
//!
//! Conventions used throughout:
//! - qubits are numbered `1..=n`, and qubit 1 is the most significant bit of
//!   a basis index;
//! - the reference point defaults to the all-zeros assignment;
//! - states are compared up to a global phase.

pub mod assignment;
pub mod classify;
pub mod cli;
pub mod error;
pub mod format;
pub mod inference;
pub mod men;
pub mod random;
pub mod separability;
pub mod state;
pub mod tolerance;

pub use assignment::{assignment_of, index_of, Assignment, QubitSet};
pub use error::{MenError, Result};
pub use men::{MenGraph, MenModel, QFunctionTable};
pub use separability::{SeparabilityMode, SeparabilityVerdict, ZeroAmplitudeWarning};
pub use state::{fidelity_up_to_phase, tensor_product, LocalBasisChange, PureState};
pub use tolerance::ToleranceConfig;
