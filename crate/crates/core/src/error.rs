use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Fock cutoff {cutoff} too small: discarded tail mass {tail:.3e} exceeds tolerance {tol:.3e}")]
    Truncation { cutoff: usize, tail: f64, tol: f64 },

    #[error("required cutoff exceeds the hard cap of {cap}")]
    CutoffCap { cap: usize },

    #[error("eigenbasis evolution needs equal nonlinearities, got lambda2_p={lambda2_p}, lambda2_x={lambda2_x}")]
    MismatchedNonlinearity { lambda2_p: f64, lambda2_x: f64 },

    #[error("no recurrence scale: the oscillator is harmonic (lambda2 = 0)")]
    Harmonic,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("grid too small for the stencil: need at least {needed} points per axis, have {have}")]
    GridTooSmall { needed: usize, have: usize },

    #[error("point ({x}, {p}) lies outside the grid box")]
    OutOfBox { x: f64, p: f64 },

    #[error("quadrature did not converge, last change {residual:.3e}")]
    Quadrature { residual: f64 },

    #[error("precision loss evaluating Wigner kernel for (m, n) = ({m}, {n})")]
    Precision { m: usize, n: usize },

    #[error("approximation invalid near W = 0 (|W| = {value:.3e} below floor {floor:.3e})")]
    NearZero { value: f64, floor: f64 },

    #[error("series too short: need {needed} samples, have {have}")]
    SeriesTooShort { needed: usize, have: usize },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
