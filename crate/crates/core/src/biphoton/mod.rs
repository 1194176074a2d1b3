//! Two-photon joint amplitudes: source models, conjugate transforms and coherence
//! diagnostics.

mod coherence;
mod fourier;
mod grid;
mod source;
mod state;

pub use coherence::{first_order_coherence_time, second_order_coherence_time};
pub use grid::{FrequencyGrid, SpectralAxis, TimeGrid, MIN_POINTS};
pub use source::{
    make_cascade_state, make_gaussian_pdc_state, make_timebin_state, SourceSpec, CASCADE_COVERAGE,
    OUT_OF_BAND_LIMIT,
};
pub use state::{weighted_rms, Domain, JointAmplitude, Moments};
