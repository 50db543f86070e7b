//! Haar-uniform sampling of states inside a symmetry sector.
//!
//! Each sample owns an independent counter-based random stream keyed by
//! (master_seed, sample_index), so results do not depend on worker count
//! or scheduling.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qudit::{PureState, QuditGeometry};
use crate::sectors::SubspaceBasis;

/// Addresses one sample's random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub sample_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, sample_index: u64) -> Self {
        Self { master_seed, sample_index }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.sample_index);
        rng
    }
}

/// Draws i.i.d. standard complex Gaussian coefficients over an orthonormal
/// basis of the given dimension and normalizes. This is Haar-uniform on the
/// sector's unit sphere.
pub fn sample_sector_coeffs(dimension: usize, seed: SeedSpec) -> Result<DVector<Complex64>> {
    if dimension == 0 {
        return Err(Error::EmptyBasis);
    }
    let mut rng = seed.rng();
    loop {
        let mut coeffs = DVector::from_fn(dimension, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let norm_sq: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        // zero-norm draws have probability 0; retry from the same stream
        if norm_sq > f64::MIN_POSITIVE {
            coeffs /= Complex64::new(norm_sq.sqrt(), 0.0);
            return Ok(coeffs);
        }
    }
}

/// Expands sector coordinates into the full-space amplitude vector.
pub fn expand_coeffs(basis: &SubspaceBasis, coeffs: &DVector<Complex64>) -> Result<PureState> {
    if coeffs.len() != basis.dimension() {
        return Err(Error::WrongLength { expected: basis.dimension(), got: coeffs.len() });
    }
    let mut amplitudes = DVector::zeros(basis.full_dim());
    for (element, coeff) in basis.elements.iter().zip(coeffs.iter()) {
        for &(idx, c) in &element.terms {
            amplitudes[idx] += coeff * c;
        }
    }
    // any n_A in range works here; the caller re-cuts through its own geometry
    let geometry = QuditGeometry::new(basis.n, basis.d, 1)?;
    PureState::new(geometry, amplitudes)
}

/// Draws a Haar-random state from the sector spanned by `basis`, expanded
/// to the full space with the bipartition of `geometry`.
pub fn sample_sector_state(
    basis: &SubspaceBasis,
    geometry: QuditGeometry,
    seed: SeedSpec,
) -> Result<PureState> {
    let coeffs = sample_sector_coeffs(basis.dimension(), seed)?;
    let expanded = expand_coeffs(basis, &coeffs)?;
    PureState::new(geometry, expanded.amplitudes().clone())
}
