//! Dense many-qudit states: basis-index arithmetic, site symmetries,
//! partial trace, and Hermitian spectra.
//!
//! Site 1 is the most significant digit of a basis index. The bipartition
//! is always the contiguous leading block A = sites 1..n_A.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on the full Hilbert-space dimension d^n.
pub const DEFAULT_SIZE_CAP: u128 = 1 << 24;

/// Construction cap on d^n, overridable through `SYMSECTOR_SIZE_CAP`.
pub fn size_cap() -> u128 {
    std::env::var("SYMSECTOR_SIZE_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_SIZE_CAP)
}

/// System geometry: n qudits of local dimension d, cut after site n_A.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuditGeometry {
    n: usize,
    d: usize,
    n_a: usize,
}

impl QuditGeometry {
    pub fn new(n: usize, d: usize, n_a: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Geometry("site count n must be positive".into()));
        }
        if d < 2 {
            return Err(Error::Geometry(format!("local dimension d must be >= 2, got {d}")));
        }
        if n_a == 0 || n_a >= n {
            return Err(Error::Geometry(format!(
                "subsystem size n_A must satisfy 1 <= n_A <= n-1, got n_A={n_a}, n={n}"
            )));
        }
        let dim = (d as u128)
            .checked_pow(n as u32)
            .ok_or(Error::Overflow("d^n"))?;
        let cap = size_cap();
        if dim > cap {
            return Err(Error::SizeCap { dim, cap });
        }
        Ok(Self { n, d, n_a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    /// Complement size n_Ā = n - n_A.
    pub fn n_b(&self) -> usize {
        self.n - self.n_a
    }

    /// Full dimension d^n.
    pub fn dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    /// Subsystem dimension d^{n_A}.
    pub fn dim_a(&self) -> usize {
        self.d.pow(self.n_a as u32)
    }

    /// Complement dimension d^{n_Ā}.
    pub fn dim_b(&self) -> usize {
        self.d.pow(self.n_b() as u32)
    }

    /// Packs base-d digits (site 1 first, most significant) into an index.
    pub fn encode_index(&self, digits: &[u8]) -> Result<usize> {
        encode_index(digits, self.n, self.d)
    }

    /// Unpacks an index into base-d digits, site 1 first.
    pub fn decode_index(&self, index: usize) -> Vec<u8> {
        decode_index(index, self.n, self.d)
    }
}

pub fn encode_index(digits: &[u8], n: usize, d: usize) -> Result<usize> {
    if digits.len() != n {
        return Err(Error::WrongLength { expected: n, got: digits.len() });
    }
    let mut index = 0usize;
    for &digit in digits {
        if digit as usize >= d {
            return Err(Error::DigitOutOfRange { digit, d });
        }
        index = index * d + digit as usize;
    }
    Ok(index)
}

pub fn decode_index(mut index: usize, n: usize, d: usize) -> Vec<u8> {
    let mut digits = vec![0u8; n];
    for slot in digits.iter_mut().rev() {
        *slot = (index % d) as u8;
        index /= d;
    }
    digits
}

/// Right cyclic rotation applied k times: u(T)|c_1..c_n> = |c_n c_1..c_{n-1}>.
/// k = n acts as the identity.
pub fn rotate_string(digits: &[u8], k: usize) -> Vec<u8> {
    let n = digits.len();
    let k = k % n;
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&digits[n - k..]);
    out.extend_from_slice(&digits[..n - k]);
    out
}

/// A unit-norm pure state over the d^n computational basis.
#[derive(Debug, Clone)]
pub struct PureState {
    geometry: QuditGeometry,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Norm tolerance on construction.
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(geometry: QuditGeometry, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != geometry.dim() {
            return Err(Error::WrongLength { expected: geometry.dim(), got: amplitudes.len() });
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::Geometry(format!("state squared norm {norm_sq} is not 1")));
        }
        Ok(Self { geometry, amplitudes })
    }

    /// A computational basis state |c>.
    pub fn basis_state(geometry: QuditGeometry, digits: &[u8]) -> Result<Self> {
        let idx = geometry.encode_index(digits)?;
        let mut amplitudes = DVector::zeros(geometry.dim());
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Self::new(geometry, amplitudes)
    }

    pub fn geometry(&self) -> QuditGeometry {
        self.geometry
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Shifts every qudit k sites to the right (periodic boundary).
    pub fn apply_translation(&self, k: usize) -> PureState {
        let geo = self.geometry;
        let mut out = DVector::zeros(geo.dim());
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let digits = geo.decode_index(idx);
            let rotated = rotate_string(&digits, k);
            let target = geo.encode_index(&rotated).expect("rotation preserves digits");
            out[target] = *amp;
        }
        PureState { geometry: geo, amplitudes: out }
    }

    /// Relabels sites: site i moves to site perm[i-1] (1-based targets).
    pub fn apply_site_permutation(&self, perm: &[usize]) -> Result<PureState> {
        let geo = self.geometry;
        let n = geo.n();
        if perm.len() != n {
            return Err(Error::InvalidPermutation);
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p == 0 || p > n || seen[p - 1] {
                return Err(Error::InvalidPermutation);
            }
            seen[p - 1] = true;
        }
        let mut out = DVector::zeros(geo.dim());
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let digits = geo.decode_index(idx);
            let mut moved = vec![0u8; n];
            for (i, &digit) in digits.iter().enumerate() {
                moved[perm[i] - 1] = digit;
            }
            let target = geo.encode_index(&moved).expect("permutation preserves digits");
            out[target] = *amp;
        }
        Ok(PureState { geometry: geo, amplitudes: out })
    }

    /// Reduced state on A: rho_A = tr_Ā |phi><phi|, via the reshaped
    /// amplitude matrix M M^dagger.
    pub fn partial_trace(&self) -> DensityOperator {
        let geo = self.geometry;
        let (da, db) = (geo.dim_a(), geo.dim_b());
        // M[a, b] = amplitude at index a*db + b
        let m = DMatrix::from_fn(da, db, |a, b| self.amplitudes[a * db + b]);
        let rho = &m * m.adjoint();
        DensityOperator { matrix: rho }
    }

    /// Reduced state on the complement Ā.
    pub fn partial_trace_complement(&self) -> DensityOperator {
        let geo = self.geometry;
        let (da, db) = (geo.dim_a(), geo.dim_b());
        let m = DMatrix::from_fn(da, db, |a, b| self.amplitudes[a * db + b]);
        let rho = (m.adjoint() * &m).transpose();
        DensityOperator { matrix: rho }
    }
}

/// Largest entry magnitude of a complex matrix.
pub fn max_abs(matrix: &DMatrix<Complex64>) -> f64 {
    matrix.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    pub const HERMITICITY_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const POSITIVITY_TOL: f64 = 1e-10;

    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Geometry("density operator must be square".into()));
        }
        let dev = max_abs(&(&matrix - matrix.adjoint()));
        if dev > Self::HERMITICITY_TOL {
            return Err(Error::Geometry(format!("matrix is not Hermitian (deviation {dev:.3e})")));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > Self::TRACE_TOL || trace.im.abs() > Self::TRACE_TOL {
            return Err(Error::Geometry(format!("trace {trace} is not 1")));
        }
        Ok(Self { matrix })
    }

    /// Diagonal density operator from a probability vector.
    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        let dim = probs.len();
        let matrix = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j { Complex64::new(probs[i], 0.0) } else { Complex64::default() }
        });
        Self::new(matrix)
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Checks Hermiticity, trace, and eigenvalue positivity.
    pub fn validate(&self) -> Result<()> {
        let spectrum = hermitian_spectrum(self)?;
        if let Some(&min) = spectrum.last() {
            if min < -Self::POSITIVITY_TOL {
                return Err(Error::Geometry(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(())
    }
}

/// Eigenvalues of a density operator, sorted descending. Their sum is
/// checked against 1 to 1e-10.
pub fn hermitian_spectrum(rho: &DensityOperator) -> Result<Vec<f64>> {
    let eigen = rho
        .matrix
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(Error::EigenFailure)?;
    let mut values: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > DensityOperator::TRACE_TOL {
        return Err(Error::Geometry(format!("spectrum sums to {sum}, not 1")));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_index(&[0, 0, 0, 0], 4, 2).unwrap(), 0);
        assert_eq!(encode_index(&[1, 0, 1, 0], 4, 2).unwrap(), 10);
        assert_eq!(encode_index(&[2, 1], 2, 3).unwrap(), 7);
    }

    #[test]
    fn encode_rejects_bad_digits() {
        assert!(matches!(encode_index(&[2, 0], 2, 2), Err(Error::DigitOutOfRange { .. })));
        assert!(matches!(encode_index(&[0, 0, 0], 2, 2), Err(Error::WrongLength { .. })));
    }

    #[test]
    fn decode_roundtrip() {
        for idx in 0..81 {
            let digits = decode_index(idx, 4, 3);
            assert_eq!(encode_index(&digits, 4, 3).unwrap(), idx);
        }
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(rotate_string(&[1, 0, 0, 0], 1), vec![0, 1, 0, 0]);
        assert_eq!(rotate_string(&[1, 0, 1, 1], 4), vec![1, 0, 1, 1]);
        assert_eq!(rotate_string(&[1, 0, 1, 0], 2), vec![1, 0, 1, 0]);
    }

    #[test]
    fn translation_moves_basis_states() {
        let geo = QuditGeometry::new(4, 2, 2).unwrap();
        let state = PureState::basis_state(geo, &[1, 0, 0, 0]).unwrap();
        let shifted = state.apply_translation(1);
        let expected = PureState::basis_state(geo, &[0, 1, 0, 0]).unwrap();
        assert_abs_diff_eq!((shifted.inner(&expected).re), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn translation_fixes_uniform_superposition() {
        let geo = QuditGeometry::new(3, 2, 1).unwrap();
        let dim = geo.dim();
        let amp = c(1.0 / (dim as f64).sqrt());
        let state = PureState::new(geo, DVector::from_element(dim, amp)).unwrap();
        let shifted = state.apply_translation(1);
        assert_abs_diff_eq!(shifted.inner(&state).re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn swap_permutation() {
        let geo = QuditGeometry::new(2, 2, 1).unwrap();
        let state = PureState::basis_state(geo, &[0, 1]).unwrap();
        let swapped = state.apply_site_permutation(&[2, 1]).unwrap();
        let expected = PureState::basis_state(geo, &[1, 0]).unwrap();
        assert_abs_diff_eq!(swapped.inner(&expected).re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn identity_permutation_is_noop() {
        let geo = QuditGeometry::new(3, 2, 1).unwrap();
        let state = PureState::basis_state(geo, &[1, 0, 1]).unwrap();
        let out = state.apply_site_permutation(&[1, 2, 3]).unwrap();
        assert_abs_diff_eq!(out.inner(&state).re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn invalid_permutation_rejected() {
        let geo = QuditGeometry::new(3, 2, 1).unwrap();
        let state = PureState::basis_state(geo, &[1, 0, 1]).unwrap();
        assert!(state.apply_site_permutation(&[1, 1, 2]).is_err());
        assert!(state.apply_site_permutation(&[1, 2]).is_err());
    }

    #[test]
    fn product_state_reduces_to_projector() {
        let geo = QuditGeometry::new(3, 2, 1).unwrap();
        let state = PureState::basis_state(geo, &[1, 0, 1]).unwrap();
        let rho = state.partial_trace();
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn bell_pair_is_maximally_mixed() {
        let geo = QuditGeometry::new(2, 2, 1).unwrap();
        let mut amp = DVector::zeros(4);
        amp[0] = c(std::f64::consts::FRAC_1_SQRT_2);
        amp[3] = c(std::f64::consts::FRAC_1_SQRT_2);
        let rho = PureState::new(geo, amp).unwrap().partial_trace();
        let spec = hermitian_spectrum(&rho).unwrap();
        assert_abs_diff_eq!(spec[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(spec[1], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn ghz_reduced_is_flat() {
        let geo = QuditGeometry::new(3, 2, 1).unwrap();
        let mut amp = DVector::zeros(8);
        amp[0] = c(std::f64::consts::FRAC_1_SQRT_2);
        amp[7] = c(std::f64::consts::FRAC_1_SQRT_2);
        let rho = PureState::new(geo, amp).unwrap().partial_trace();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn spectrum_examples() {
        let rho = DensityOperator::from_diagonal(&[0.3, 0.7]).unwrap();
        let spec = hermitian_spectrum(&rho).unwrap();
        assert_abs_diff_eq!(spec[0], 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(spec[1], 0.3, epsilon = 1e-12);

        let rho = DensityOperator::from_diagonal(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let spec = hermitian_spectrum(&rho).unwrap();
        assert_eq!(spec.len(), 4);
        assert_abs_diff_eq!(spec[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn geometry_rejects_oversize() {
        assert!(matches!(QuditGeometry::new(30, 2, 5), Err(Error::SizeCap { .. })));
        assert!(QuditGeometry::new(10, 2, 0).is_err());
        assert!(QuditGeometry::new(10, 2, 10).is_err());
        assert!(QuditGeometry::new(4, 1, 2).is_err());
    }
}
