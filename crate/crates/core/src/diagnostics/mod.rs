//! Ring traces, vorticity and shear polarization, special-state detection,
//! negativity and spectral content.

mod events;
mod ring;
mod shear;
mod spectral;

pub use events::{
    detect_special_states, deviation, moving_average, nearest_fraction, EventKind, SpecialEvent,
    DEFAULT_BASELINE_WINDOW, DEFAULT_SMOOTHING_WINDOW,
};
pub use ring::{
    classical_phase, ring_probability, ring_trace, ring_velocity_approx, RingSampler, RingTrace,
    DEFAULT_N_THETA, MIN_N_THETA,
};
pub use shear::{
    pi_at, pi_series, shear_polarization, shear_polarization_local, vorticity, PiSeriesOptions,
    ShearSeries,
};
pub use spectral::{negativity, spectral_content, Negativity, SpectralSummary};
