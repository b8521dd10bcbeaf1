//! Phase-space dynamics of Kerr oscillators.
//!
//! States are built and evolved exactly in the Fock eigenbasis ([`kerr`]),
//! mapped to Wigner distributions on a uniform grid ([`wigner`]), and
//! analysed through the Wigner current ([`current`]), its classical
//! counterpart ([`classical`]) and the shear and revival diagnostics in
//! [`diagnostics`]. [`io`] holds the CSV and binary field formats.

pub mod classical;
pub mod current;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod io;
pub mod kerr;
pub mod params;
pub mod wigner;
mod special;

pub use error::{Error, Result};
pub use grid::{PhaseGrid, ScalarField, VectorField};
pub use params::KerrParams;
