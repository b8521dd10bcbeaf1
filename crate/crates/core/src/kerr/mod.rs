//! Fock-basis states of the Kerr oscillator and their exact evolution in the
//! energy eigenbasis.

mod cutoff;
mod evolution;
mod state;

pub use cutoff::{auto_cutoff, auto_cutoff_capped, StateKind, DEFAULT_CUTOFF_CAP, DEFAULT_TRUNCATION_TOL};
pub use evolution::{evolve, evolve_density, kerr_energy, recurrence_time};
pub use state::{
    coherent_state, coherent_state_with_tol, density_matrix, fock_superposition, squeezed_vacuum,
    squeezed_vacuum_with_tol, DensityMatrix,
    StateVector,
};
