//! Numerical laboratory for generic entanglement under symmetry.
//!
//! Builds permutation- and translation-symmetric subspaces of n-qudit
//! Hilbert spaces, samples Haar-random states inside them, measures
//! entanglement entropies and spectra, evaluates the analytic bounds, and
//! runs the distribution analysis (histograms, tail fits, phase
//! classification).

pub mod analytics;
pub mod distribution;
pub mod entanglement;
pub mod error;
pub mod haar;
pub mod measure;
pub mod qudit;
pub mod sectors;
pub mod verify;

pub use error::{Error, Result};
