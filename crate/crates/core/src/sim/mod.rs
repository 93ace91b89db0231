//! Simulation backends.
//!
//! [`StateVector`] is the dense reference. [`run_basis_path`] evaluates
//! circuits that only permute basis states and attach phases in `{1, i, -1,
//! -i}`, in time linear in the gate count. [`run_path_sum`] tracks a sparse
//! superposition and handles every gate kind, which is enough for a query
//! circuit acting on a single environment.

mod basis_path;
mod statevector;

pub use basis_path::{run_basis_path, run_path_sum, BasisState, Phase};
pub use statevector::{apply, StateVector, MAX_STATEVECTOR_WIRES};
