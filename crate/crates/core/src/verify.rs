//! Built-in verification suite: brute-force oracles for sector dimensions,
//! the tabulated n = 4 momentum bases, the permutation-sector closed form of
//! Omega, and the momentum-sector matrix structure.
//!
//! The projector oracle here is constructed directly from the defining
//! symmetry operators and never goes through the basis constructors it
//! checks.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::analytics::{momentum_diagonal, offdiagonal_bound, omega_reduced};
use crate::error::Result;
use crate::qudit::{decode_index, encode_index, rotate_string, QuditGeometry};
use crate::sectors::{
    basis_for, momentum_basis, projector, sector_dimension, SectorKind, SectorSpec, SubspaceBasis,
};

/// Outcome of one verification check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Largest measured deviation, where meaningful.
    pub deviation: f64,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: impl Into<String>, deviation: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: true, deviation, detail: detail.into() }
    }

    fn fail(name: impl Into<String>, deviation: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: false, deviation, detail: detail.into() }
    }
}

/// Projector assembled from the defining symmetry operators: the group
/// average of u(T)^j (momentum) or u(sigma) (permutation sectors).
pub fn brute_force_projector(kind: SectorKind, n: usize, d: usize) -> Result<DMatrix<Complex64>> {
    let dim = d.pow(n as u32);
    let mut pi = DMatrix::<Complex64>::zeros(dim, dim);
    match kind {
        SectorKind::Full => {
            pi = DMatrix::identity(dim, dim);
        }
        SectorKind::Momentum(k) => {
            let theta = 2.0 * PI * (k % n) as f64 / n as f64;
            for j in 0..n {
                let weight = Complex64::from_polar(1.0 / n as f64, -theta * j as f64);
                for col in 0..dim {
                    let digits = decode_index(col, n, d);
                    let row = encode_index(&rotate_string(&digits, j), n, d)?;
                    pi[(row, col)] += weight;
                }
            }
        }
        SectorKind::Symmetric | SectorKind::Antisymmetric => {
            let signed = kind == SectorKind::Antisymmetric;
            let perms = all_permutations(n);
            let weight = 1.0 / perms.len() as f64;
            for (perm, sign) in perms {
                let factor = if signed { sign * weight } else { weight };
                for col in 0..dim {
                    let digits = decode_index(col, n, d);
                    let mut moved = vec![0u8; n];
                    for (i, &digit) in digits.iter().enumerate() {
                        moved[perm[i]] = digit;
                    }
                    let row = encode_index(&moved, n, d)?;
                    pi[(row, col)] += Complex64::new(factor, 0.0);
                }
            }
        }
    }
    Ok(pi)
}

fn all_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut items: Vec<usize> = (0..n).collect();
    let mut out = vec![(items.clone(), 1.0)];
    let mut c = vec![0usize; n];
    let mut sign = 1.0;
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            sign = -sign;
            out.push((items.clone(), sign));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Numerical rank of a Hermitian projector: eigenvalues above 1/2.
pub fn projector_rank(pi: &DMatrix<Complex64>) -> Result<usize> {
    let eigen = pi
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(crate::error::Error::EigenFailure)?;
    Ok(eigen.eigenvalues.iter().filter(|&&x| x > 0.5).count())
}

fn dense_element(basis: &SubspaceBasis, i: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(basis.full_dim());
    for &(idx, c) in &basis.elements[i].terms {
        v[idx] = c;
    }
    v
}

/// The tabulated momentum state sqrt(alpha_c) sum_j e^{i theta j} T^j |c>,
/// built straight from the printed definition. Returns None for zero vectors.
fn tabulated_momentum_state(
    config: &[u8],
    n: usize,
    d: usize,
    k: usize,
) -> Option<DVector<Complex64>> {
    let dim = d.pow(n as u32);
    let theta = 2.0 * PI * k as f64 / n as f64;
    let mut v = DVector::<Complex64>::zeros(dim);
    let mut current = config.to_vec();
    for j in 0..n {
        let idx = encode_index(&current, n, d).ok()?;
        v[idx] += Complex64::from_polar(1.0, theta * j as f64);
        current = rotate_string(&current, 1);
    }
    let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return None;
    }
    Some(v / Complex64::new(norm, 0.0))
}

/// Reproduces the n = 4, d = 2 momentum table: dimensions (6, 3, 4, 3) and
/// the exact basis sets, with the vanishing period-2 superpositions excluded.
pub fn check_table1() -> CheckResult {
    let name = "table1_momentum_n4_d2";
    let expected_dims = [6usize, 3, 4, 3];
    let listed: [&[&[u8]]; 4] = [
        &[&[0, 0, 0, 0], &[1, 0, 0, 0], &[1, 1, 0, 0], &[1, 0, 1, 0], &[1, 1, 1, 0], &[1, 1, 1, 1]],
        &[&[1, 0, 0, 0], &[1, 1, 0, 0], &[1, 1, 1, 0]],
        &[&[1, 0, 0, 0], &[1, 1, 0, 0], &[1, 0, 1, 0], &[1, 1, 1, 0]],
        &[&[1, 0, 0, 0], &[1, 1, 0, 0], &[1, 1, 1, 0]],
    ];
    let mut worst: f64 = 0.0;
    for k in 0..4 {
        let basis = match momentum_basis(4, 2, k) {
            Ok(b) => b,
            Err(e) => return CheckResult::fail(name, f64::NAN, e.to_string()),
        };
        if basis.dimension() != expected_dims[k] {
            return CheckResult::fail(
                name,
                f64::NAN,
                format!("k={k}: dimension {} != {}", basis.dimension(), expected_dims[k]),
            );
        }
        // the zero vectors |1010>_{pi/2}, |1010>_{3pi/2} must have been dropped
        if k % 2 == 1 && tabulated_momentum_state(&[1, 0, 1, 0], 4, 2, k).is_some() {
            return CheckResult::fail(name, f64::NAN, format!("k={k}: |1010> did not vanish"));
        }
        let expected: Vec<DVector<Complex64>> = listed[k]
            .iter()
            .filter_map(|config| tabulated_momentum_state(config, 4, 2, k))
            .collect();
        if expected.len() != expected_dims[k] {
            return CheckResult::fail(name, f64::NAN, format!("k={k}: table construction"));
        }
        // each constructed element must match exactly one listed state up to
        // a global phase
        let mut used = vec![false; expected.len()];
        for i in 0..basis.dimension() {
            let ours = dense_element(&basis, i);
            let mut matched = false;
            for (j, reference) in expected.iter().enumerate() {
                if used[j] {
                    continue;
                }
                let overlap = reference.dotc(&ours).norm();
                if (overlap - 1.0).abs() < 1e-10 {
                    worst = worst.max((overlap - 1.0).abs());
                    used[j] = true;
                    matched = true;
                    break;
                }
            }
            if !matched {
                return CheckResult::fail(name, f64::NAN, format!("k={k}: unmatched element {i}"));
            }
        }
    }
    CheckResult::pass(name, worst, "dimensions (6,3,4,3) and exact basis sets reproduced")
}

/// Sector dimensions against the operator-average projector rank, plus the
/// momentum completeness sum.
pub fn check_dimensions(n: usize, d: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut kinds = vec![SectorKind::Full, SectorKind::Symmetric];
    if n <= d {
        kinds.push(SectorKind::Antisymmetric);
    }
    for k in 0..n {
        kinds.push(SectorKind::Momentum(k));
    }
    let mut momentum_total = 0u64;
    for kind in kinds {
        let name = format!("dimension_oracle_n{n}_d{d}_{}", kind.label());
        let formula = match sector_dimension(kind, n, d) {
            Ok(v) => v,
            Err(e) => {
                out.push(CheckResult::fail(name, f64::NAN, e.to_string()));
                continue;
            }
        };
        if let SectorKind::Momentum(_) = kind {
            momentum_total += formula;
        }
        let rank = brute_force_projector(kind, n, d)
            .and_then(|pi| projector_rank(&pi));
        match rank {
            Ok(rank) if rank as u64 == formula => {
                out.push(CheckResult::pass(name, 0.0, format!("dimension {formula}")));
            }
            Ok(rank) => {
                out.push(CheckResult::fail(
                    name,
                    (rank as f64 - formula as f64).abs(),
                    format!("formula {formula} != projector rank {rank}"),
                ));
            }
            Err(e) => out.push(CheckResult::fail(name, f64::NAN, e.to_string())),
        }
    }
    let full = (d as u64).pow(n as u32);
    let name = format!("momentum_dimension_sum_n{n}_d{d}");
    if momentum_total == full {
        out.push(CheckResult::pass(name, 0.0, format!("sums to {full}")));
    } else {
        out.push(CheckResult::fail(
            name,
            (momentum_total as f64 - full as f64).abs(),
            format!("{momentum_total} != {full}"),
        ));
    }
    out
}

/// Omega_{P,+-}^(A) against Pi^(A)/D^(A) on subsystem A.
pub fn check_permutation_omega(n: usize, d: usize, n_a: usize, antisymmetric: bool) -> CheckResult {
    let kind = if antisymmetric { SectorKind::Antisymmetric } else { SectorKind::Symmetric };
    let name = format!("omega_closed_form_n{n}_d{d}_na{n_a}_{}", kind.label());
    let result = (|| -> Result<f64> {
        let geo = QuditGeometry::new(n, d, n_a)?;
        let spec = SectorSpec::new(kind, geo)?;
        let omega = omega_reduced(spec)?;
        let basis_a = basis_for(kind, n_a, d)?;
        let pi_a = projector(&basis_a)?;
        let expected = pi_a / Complex64::new(basis_a.dimension() as f64, 0.0);
        Ok(crate::qudit::max_abs(&(omega.rho.matrix() - expected)))
    })();
    match result {
        Ok(dev) if dev < 1e-10 => CheckResult::pass(name, dev, "matches Pi^(A)/D^(A)"),
        Ok(dev) => CheckResult::fail(name, dev, "deviation exceeds 1e-10"),
        Err(e) => CheckResult::fail(name, f64::NAN, e.to_string()),
    }
}

/// Momentum Omega structure at prime n: diagonal formula, off-diagonal
/// magnitude bound, and vanishing cross-occupation blocks.
pub fn check_momentum_structure(n: usize, d: usize, n_a: usize, k: usize) -> CheckResult {
    let name = format!("momentum_structure_n{n}_d{d}_na{n_a}_k{k}");
    let result = (|| -> Result<(f64, f64, f64)> {
        let geo = QuditGeometry::new(n, d, n_a)?;
        let spec = SectorSpec::new(SectorKind::Momentum(k), geo)?;
        let omega = omega_reduced(spec)?;
        let m = omega.rho.matrix();
        let sector_dim = sector_dimension(SectorKind::Momentum(k), n, d)?;
        let bound = offdiagonal_bound(sector_dim);
        let mut diag_dev: f64 = 0.0;
        let mut offdiag_excess: f64 = 0.0;
        let mut cross_dev: f64 = 0.0;
        let dim_a = geo.dim_a();
        let occupations: Vec<Vec<usize>> = (0..dim_a)
            .map(|idx| {
                let mut occ = vec![0usize; d];
                for digit in decode_index(idx, n_a, d) {
                    occ[digit as usize] += 1;
                }
                occ
            })
            .collect();
        for a in 0..dim_a {
            let digits = decode_index(a, n_a, d);
            let formula = momentum_diagonal(n, d, n_a, k, &digits)?;
            diag_dev = diag_dev.max((m[(a, a)].re - formula).abs());
            diag_dev = diag_dev.max(m[(a, a)].im.abs());
            for b in 0..dim_a {
                if a == b {
                    continue;
                }
                let magnitude = m[(a, b)].norm();
                if occupations[a] != occupations[b] {
                    cross_dev = cross_dev.max(magnitude);
                }
                offdiag_excess = offdiag_excess.max(magnitude - bound);
            }
        }
        Ok((diag_dev, offdiag_excess, cross_dev))
    })();
    match result {
        Ok((diag, excess, cross)) => {
            let passed = diag < 1e-12 && excess <= 1e-12 && cross < 1e-12;
            let detail = format!(
                "diag dev {diag:.2e}, off-diagonal excess {excess:.2e}, cross-block {cross:.2e}"
            );
            let worst = diag.max(excess).max(cross);
            if passed {
                CheckResult::pass(name, worst, detail)
            } else {
                CheckResult::fail(name, worst, detail)
            }
        }
        Err(e) => CheckResult::fail(name, f64::NAN, e.to_string()),
    }
}

/// Runs every check feasible under the given brute-force caps.
pub fn run_verification(max_n: usize, max_d: usize) -> Vec<CheckResult> {
    let mut out = vec![check_table1()];
    for d in 2..=max_d.max(2) {
        for n in 2..=max_n {
            // keep the operator-average oracle desk sized
            let dim = (d as u64).saturating_pow(n as u32);
            if dim > 6561 || n > 8 {
                continue;
            }
            if d == 3 && n > 5 {
                continue;
            }
            out.extend(check_dimensions(n, d));
        }
    }
    for n in [4usize, 6, 8] {
        if n > max_n {
            continue;
        }
        for n_a in 1..n {
            out.push(check_permutation_omega(n, 2, n_a, false));
        }
    }
    if max_d >= 4 {
        for n_a in 1..3 {
            out.push(check_permutation_omega(3, 4, n_a, false));
            out.push(check_permutation_omega(3, 4, n_a, true));
        }
    }
    for n in [3usize, 5, 7] {
        if n > max_n {
            continue;
        }
        for n_a in 1..n {
            for k in 0..n {
                out.push(check_momentum_structure(n, 2, n_a, k));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_passes() {
        let result = check_table1();
        assert!(result.passed, "{}", result.detail);
    }

    #[test]
    fn small_dimension_oracle_passes() {
        for check in check_dimensions(4, 2) {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
        for check in check_dimensions(3, 3) {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
    }

    #[test]
    fn omega_closed_form_small() {
        let result = check_permutation_omega(4, 2, 2, false);
        assert!(result.passed, "{}", result.detail);
    }

    #[test]
    fn momentum_structure_n3() {
        for n_a in 1..3 {
            for k in 0..3 {
                let result = check_momentum_structure(3, 2, n_a, k);
                assert!(result.passed, "{}: {}", result.name, result.detail);
            }
        }
    }
}
