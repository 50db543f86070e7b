//! Entropy measures and the rescaled entanglement variable.
//!
//! All entropies are in nats. Eigenvalues below `EIGENVALUE_CLAMP` are
//! treated as exact zeros, with 0 log 0 = 0.

use crate::error::{Error, Result};
use crate::qudit::{hermitian_spectrum, DensityOperator};

/// Eigenvalues below this are clamped to exact zero before logs.
pub const EIGENVALUE_CLAMP: f64 = 1e-14;

/// Rank-counting threshold for the q = 0 Renyi entropy.
pub const RANK_THRESHOLD: f64 = 1e-12;

fn clamped(spectrum: &[f64]) -> impl Iterator<Item = f64> + '_ {
    spectrum.iter().map(|&x| if x < EIGENVALUE_CLAMP { 0.0 } else { x })
}

/// Renyi-q entropy of a spectrum, in nats. q = 1 is the von Neumann branch,
/// q = 0 counts the rank, q = infinity is -log(lambda_max).
pub fn renyi_entropy_of_spectrum(spectrum: &[f64], q: f64) -> Result<f64> {
    if q < 0.0 || q.is_nan() {
        return Err(Error::NegativeRenyiOrder(q));
    }
    if q == 0.0 {
        let rank = spectrum.iter().filter(|&&x| x > RANK_THRESHOLD).count();
        return Ok((rank as f64).ln());
    }
    if q == 1.0 {
        return Ok(von_neumann_of_spectrum(spectrum));
    }
    if q.is_infinite() {
        let max = spectrum.iter().cloned().fold(f64::MIN, f64::max);
        return Ok(-max.ln());
    }
    let sum: f64 = clamped(spectrum).filter(|&x| x > 0.0).map(|x| x.powf(q)).sum();
    Ok(sum.ln() / (1.0 - q))
}

pub fn von_neumann_of_spectrum(spectrum: &[f64]) -> f64 {
    clamped(spectrum).filter(|&x| x > 0.0).map(|x| -x * x.ln()).sum()
}

pub fn renyi_entropy(rho: &DensityOperator, q: f64) -> Result<f64> {
    let spectrum = hermitian_spectrum(rho)?;
    renyi_entropy_of_spectrum(&spectrum, q)
}

/// Rescaled entanglement s, from E_q = n_A log d + log s / (1 - q).
/// For q = 2 this equals d^{n_A} tr(rho_A^2).
pub fn rescaled_s(eq_nats: f64, q: f64, n_a: usize, d: usize) -> Result<f64> {
    if q == 1.0 {
        return Err(Error::UndefinedRescaling);
    }
    let max_entropy = n_a as f64 * (d as f64).ln();
    Ok(((1.0 - q) * (eq_nats - max_entropy)).exp())
}

/// Per-sample measurement row.
#[derive(Debug, Clone)]
pub struct EntanglementRecord {
    pub e1_nats: f64,
    pub eq_nats: f64,
    pub q: f64,
    pub s: f64,
    /// Top eigenvalues of rho_A, descending.
    pub spectrum_head: Vec<f64>,
}

/// Default number of retained top eigenvalues.
pub const SPECTRUM_HEAD: usize = 4;

impl EntanglementRecord {
    /// Measures a reduced-state spectrum at Renyi order q.
    pub fn from_spectrum(spectrum: &[f64], q: f64, n_a: usize, d: usize) -> Result<Self> {
        Self::from_spectrum_with_head(spectrum, q, n_a, d, SPECTRUM_HEAD)
    }

    pub fn from_spectrum_with_head(
        spectrum: &[f64],
        q: f64,
        n_a: usize,
        d: usize,
        head: usize,
    ) -> Result<Self> {
        let e1 = von_neumann_of_spectrum(spectrum);
        let eq = renyi_entropy_of_spectrum(spectrum, q)?;
        let s = if q == 1.0 { f64::NAN } else { rescaled_s(eq, q, n_a, d)? };
        let mut spectrum_head: Vec<f64> = spectrum.iter().take(head).copied().collect();
        spectrum_head.resize(head, 0.0);
        Ok(Self { e1_nats: e1, eq_nats: eq, q, s, spectrum_head })
    }
}

pub const LN_2: f64 = std::f64::consts::LN_2;

/// Nats to bits.
pub fn nats_to_bits(nats: f64) -> f64 {
    nats / LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn flat_spectrum_gives_log_m() {
        for q in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
            let spec = vec![0.25; 4];
            assert_abs_diff_eq!(
                renyi_entropy_of_spectrum(&spec, q).unwrap(),
                4.0f64.ln(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn rank_one_gives_zero() {
        let spec = vec![1.0, 0.0, 0.0, 0.0];
        for q in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
            assert_abs_diff_eq!(renyi_entropy_of_spectrum(&spec, q).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn renyi2_example() {
        let spec = vec![0.7, 0.3];
        let e2 = renyi_entropy_of_spectrum(&spec, 2.0).unwrap();
        assert_abs_diff_eq!(e2, -(0.58f64.ln()), epsilon = 1e-12);
    }

    #[test]
    fn negative_q_rejected() {
        assert!(renyi_entropy_of_spectrum(&[1.0], -0.5).is_err());
    }

    #[test]
    fn rescaled_examples() {
        let ln2 = std::f64::consts::LN_2;
        // maximally mixed: E_2 = n_A ln d -> s = 1
        assert_abs_diff_eq!(rescaled_s(5.0 * ln2, 2.0, 5, 2).unwrap(), 1.0, epsilon = 1e-12);
        // product state: E_2 = 0 -> s = d^{n_A}
        assert_abs_diff_eq!(rescaled_s(0.0, 2.0, 5, 2).unwrap(), 32.0, epsilon = 1e-9);
        // E_2 = ln 16 at n_A = 5 -> s = 2
        assert_abs_diff_eq!(rescaled_s(16f64.ln(), 2.0, 5, 2).unwrap(), 2.0, epsilon = 1e-10);
        assert!(rescaled_s(1.0, 1.0, 5, 2).is_err());
    }

    #[test]
    fn rescaled_matches_purity_route() {
        // two independent code paths: exp((1-q)(E_2 - n_A ln d)) vs d^{n_A} sum(lam^2)
        let spec = vec![0.5, 0.3, 0.15, 0.05];
        let e2 = renyi_entropy_of_spectrum(&spec, 2.0).unwrap();
        let via_s = rescaled_s(e2, 2.0, 2, 2).unwrap();
        let purity: f64 = spec.iter().map(|x| x * x).sum();
        assert_abs_diff_eq!(via_s, 4.0 * purity, epsilon = 1e-10);
    }

    #[test]
    fn monotone_in_q() {
        let spec = vec![0.4, 0.3, 0.2, 0.1];
        let orders = [0.0, 0.5, 1.0, 2.0, f64::INFINITY];
        let values: Vec<f64> =
            orders.iter().map(|&q| renyi_entropy_of_spectrum(&spec, q).unwrap()).collect();
        for pair in values.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9);
        }
    }
}
