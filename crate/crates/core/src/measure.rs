//! Batch sampling driver: draws sector states, reduces them, and records
//! entanglement measures. Samples fan out across a rayon pool when the
//! `parallel` feature is enabled; the per-sample random streams make the
//! output identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::entanglement::EntanglementRecord;
use crate::error::Result;
use crate::haar::{sample_sector_state, SeedSpec};
use crate::qudit::{hermitian_spectrum, QuditGeometry};
use crate::sectors::SubspaceBasis;

/// One measured sample.
#[derive(Debug, Clone)]
pub struct SampleRecord {
    pub sample_index: u64,
    pub measures: EntanglementRecord,
}

/// Draws and measures a single sample.
pub fn measure_one(
    basis: &SubspaceBasis,
    geometry: QuditGeometry,
    q: f64,
    seed: SeedSpec,
) -> Result<SampleRecord> {
    let state = sample_sector_state(basis, geometry, seed)?;
    let rho = state.partial_trace();
    let spectrum = hermitian_spectrum(&rho)?;
    let measures =
        EntanglementRecord::from_spectrum(&spectrum, q, geometry.n_a(), geometry.d())?;
    Ok(SampleRecord { sample_index: seed.sample_index, measures })
}

/// Sequential reference path; always available.
pub fn run_samples_sequential(
    basis: &SubspaceBasis,
    geometry: QuditGeometry,
    q: f64,
    master_seed: u64,
    count: u64,
) -> Result<Vec<SampleRecord>> {
    (0..count)
        .map(|idx| measure_one(basis, geometry, q, SeedSpec::new(master_seed, idx)))
        .collect()
}

/// Data-parallel path over sample indices; output is in index order.
#[cfg(feature = "parallel")]
pub fn run_samples_parallel(
    basis: &SubspaceBasis,
    geometry: QuditGeometry,
    q: f64,
    master_seed: u64,
    count: u64,
) -> Result<Vec<SampleRecord>> {
    (0..count)
        .into_par_iter()
        .map(|idx| measure_one(basis, geometry, q, SeedSpec::new(master_seed, idx)))
        .collect()
}

/// Default driver: parallel when the feature is on, sequential otherwise.
pub fn run_samples(
    basis: &SubspaceBasis,
    geometry: QuditGeometry,
    q: f64,
    master_seed: u64,
    count: u64,
) -> Result<Vec<SampleRecord>> {
    #[cfg(feature = "parallel")]
    {
        run_samples_parallel(basis, geometry, q, master_seed, count)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_samples_sequential(basis, geometry, q, master_seed, count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sectors::{basis_for, SectorKind};

    #[test]
    fn records_are_ordered_and_bounded() {
        let geo = QuditGeometry::new(6, 2, 3).unwrap();
        let basis = basis_for(SectorKind::Momentum(1), 6, 2).unwrap();
        let records = run_samples(&basis, geo, 2.0, 17, 50).unwrap();
        assert_eq!(records.len(), 50);
        let max_e1 = 3.0 * std::f64::consts::LN_2;
        for (i, rec) in records.iter().enumerate() {
            assert_eq!(rec.sample_index, i as u64);
            assert!(rec.measures.e1_nats >= -1e-9 && rec.measures.e1_nats <= max_e1 + 1e-9);
            assert!(rec.measures.s >= 1.0 - 1e-9 && rec.measures.s <= 8.0 + 1e-9);
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential_bitwise() {
        let geo = QuditGeometry::new(5, 2, 2).unwrap();
        let basis = basis_for(SectorKind::Symmetric, 5, 2).unwrap();
        let par = run_samples_parallel(&basis, geo, 2.0, 99, 200).unwrap();
        let seq = run_samples_sequential(&basis, geo, 2.0, 99, 200).unwrap();
        for (a, b) in par.iter().zip(seq.iter()) {
            assert_eq!(a.measures.e1_nats.to_bits(), b.measures.e1_nats.to_bits());
            assert_eq!(a.measures.s.to_bits(), b.measures.s.to_bits());
        }
    }
}
