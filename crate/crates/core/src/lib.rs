//! Numerical models of nonlocal two-photon interferometry (Franson fringes, CHSH,
//! Hong-Ou-Mandel interference, dispersion cancellation) and of two-atom excitation
//! transfer through the Feynman propagator outside the light cone.
//!
//! Everything is in natural units, c = ħ = 1. The [`harness`] module drives the other
//! modules from JSON configs and writes CSV tables.

// `!(x > 0.0)` is used on purpose so that NaN fails validation; small matrix kernels
// read better with explicit indices.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod biphoton;
pub mod dispersion;
pub mod error;
pub mod harness;
pub mod hom;
pub mod interferometry;
pub mod lightcone;
pub mod scan;

pub use error::{Error, RegimeWarning, Result, Warned};
