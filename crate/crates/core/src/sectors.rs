//! Orthonormal bases, projectors, and dimensions of the symmetric,
//! antisymmetric, and momentum sectors.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::binomial;

use crate::error::{Error, Result};
use crate::qudit::{decode_index, encode_index, rotate_string, size_cap, QuditGeometry};

/// Which symmetry sector of the n-qudit space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectorKind {
    Full,
    Symmetric,
    Antisymmetric,
    /// Momentum index k, with theta = 2 pi k / n.
    Momentum(usize),
}

impl SectorKind {
    pub fn label(&self) -> String {
        match self {
            SectorKind::Full => "full".into(),
            SectorKind::Symmetric => "sym".into(),
            SectorKind::Antisymmetric => "antisym".into(),
            SectorKind::Momentum(k) => format!("mom(k={k})"),
        }
    }
}

/// A sector of a fixed geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SectorSpec {
    kind: SectorKind,
    geometry: QuditGeometry,
}

impl SectorSpec {
    pub fn new(kind: SectorKind, geometry: QuditGeometry) -> Result<Self> {
        let kind = match kind {
            SectorKind::Antisymmetric if geometry.n() > geometry.d() => {
                return Err(Error::SectorNonexistent { n: geometry.n(), d: geometry.d() })
            }
            SectorKind::Momentum(k) => SectorKind::Momentum(k % geometry.n()),
            other => other,
        };
        Ok(Self { kind, geometry })
    }

    pub fn kind(&self) -> SectorKind {
        self.kind
    }

    pub fn geometry(&self) -> QuditGeometry {
        self.geometry
    }

    /// Momentum angle theta = 2 pi k / n, when applicable.
    pub fn theta(&self) -> Option<f64> {
        match self.kind {
            SectorKind::Momentum(k) => Some(2.0 * PI * k as f64 / self.geometry.n() as f64),
            _ => None,
        }
    }
}

/// A translation orbit of configurations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitClass {
    /// Lexicographically smallest configuration in the orbit.
    pub representative: Vec<u8>,
    /// Smallest p with rotate_string(c, p) = c; divides n.
    pub exact_period: usize,
    site_count: usize,
}

impl OrbitClass {
    /// Normalization alpha_c = p_c / n^2 of the momentum superposition.
    pub fn alpha(&self) -> f64 {
        self.exact_period as f64 / (self.site_count * self.site_count) as f64
    }
}

/// Partitions all d^n configurations into translation orbits, sorted by
/// lexicographic representative.
pub fn enumerate_orbits(n: usize, d: usize) -> Result<Vec<OrbitClass>> {
    let dim = (d as u128).checked_pow(n as u32).ok_or(Error::Overflow("d^n"))?;
    let cap = size_cap();
    if dim > cap {
        return Err(Error::SizeCap { dim, cap });
    }
    let dim = dim as usize;
    let mut orbits = Vec::new();
    for idx in 0..dim {
        let digits = decode_index(idx, n, d);
        let mut is_rep = true;
        let mut period = n;
        let mut current = digits.clone();
        for p in 1..=n {
            current = rotate_string(&current, 1);
            let rotated_idx = encode_index(&current, n, d)?;
            if rotated_idx < idx {
                is_rep = false;
                break;
            }
            if current == digits {
                period = p;
                break;
            }
        }
        if is_rep {
            orbits.push(OrbitClass { representative: digits, exact_period: period, site_count: n });
        }
    }
    Ok(orbits)
}

/// One basis element: a sparse combination of computational basis states.
#[derive(Debug, Clone)]
pub struct BasisElement {
    /// (full-space index, coefficient) pairs, sorted by index.
    pub terms: Vec<(usize, Complex64)>,
}

impl BasisElement {
    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    pub fn dot(&self, other: &BasisElement) -> Complex64 {
        // merge join over sorted index lists
        let mut acc = Complex64::default();
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].0.cmp(&other.terms[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.terms[i].1.conj() * other.terms[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

/// Orthonormal basis of a symmetry sector over the full d^n space.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub kind: SectorKind,
    pub n: usize,
    pub d: usize,
    pub elements: Vec<BasisElement>,
}

impl SubspaceBasis {
    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    pub fn full_dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }
}

/// Constructs the basis of the given sector kind on n qudits of dimension d.
pub fn basis_for(kind: SectorKind, n: usize, d: usize) -> Result<SubspaceBasis> {
    match kind {
        SectorKind::Full => full_basis(n, d),
        SectorKind::Symmetric => symmetric_basis(n, d),
        SectorKind::Antisymmetric => antisymmetric_basis(n, d),
        SectorKind::Momentum(k) => momentum_basis(n, d, k),
    }
}

fn check_dim(n: usize, d: usize) -> Result<usize> {
    let dim = (d as u128).checked_pow(n as u32).ok_or(Error::Overflow("d^n"))?;
    let cap = size_cap();
    if dim > cap {
        return Err(Error::SizeCap { dim, cap });
    }
    Ok(dim as usize)
}

pub fn full_basis(n: usize, d: usize) -> Result<SubspaceBasis> {
    let dim = check_dim(n, d)?;
    let one = Complex64::new(1.0, 0.0);
    let elements = (0..dim).map(|idx| BasisElement { terms: vec![(idx, one)] }).collect();
    Ok(SubspaceBasis { kind: SectorKind::Full, n, d, elements })
}

/// Momentum-sector basis: for each orbit admitted at theta = 2 pi k / n
/// (i.e. k * p_c = 0 mod n), the normalized phase-weighted superposition of
/// the orbit. Orbits whose superposition vanishes are excluded.
pub fn momentum_basis(n: usize, d: usize, k: usize) -> Result<SubspaceBasis> {
    check_dim(n, d)?;
    let k = k % n;
    let theta = 2.0 * PI * k as f64 / n as f64;
    let mut elements = Vec::new();
    for orbit in enumerate_orbits(n, d)? {
        let p = orbit.exact_period;
        if (k * p) % n != 0 {
            continue; // zero vector at this theta
        }
        // coefficient of the j-times-rotated representative is e^{i theta j}/sqrt(p);
        // the representative itself carries a real positive coefficient.
        let scale = 1.0 / (p as f64).sqrt();
        let mut terms = Vec::with_capacity(p);
        let mut config = orbit.representative.clone();
        for j in 0..p {
            let idx = encode_index(&config, n, d)?;
            let phase = Complex64::from_polar(scale, theta * j as f64);
            terms.push((idx, phase));
            config = rotate_string(&config, 1);
        }
        terms.sort_by_key(|(idx, _)| *idx);
        elements.push(BasisElement { terms });
    }
    Ok(SubspaceBasis { kind: SectorKind::Momentum(k), n, d, elements })
}

/// Enumerates occupation vectors (m_0, ..., m_{d-1}) with sum n, in
/// lexicographic order.
pub fn compositions(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; d];
    fn rec(slot: usize, remaining: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slot == current.len() - 1 {
            current[slot] = remaining;
            out.push(current.clone());
            return;
        }
        for m in 0..=remaining {
            current[slot] = m;
            rec(slot + 1, remaining - m, current, out);
        }
    }
    rec(0, n, &mut current, &mut out);
    out
}

fn occupation(digits: &[u8], d: usize) -> Vec<usize> {
    let mut occ = vec![0usize; d];
    for &digit in digits {
        occ[digit as usize] += 1;
    }
    occ
}

/// Symmetric-sector basis: one uniform superposition per occupation multiset.
pub fn symmetric_basis(n: usize, d: usize) -> Result<SubspaceBasis> {
    let dim = check_dim(n, d)?;
    let mut buckets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for idx in 0..dim {
        let occ = occupation(&decode_index(idx, n, d), d);
        buckets.entry(occ).or_default().push(idx);
    }
    let order = compositions(n, d);
    let mut elements = Vec::with_capacity(order.len());
    for occ in order {
        let indices = &buckets[&occ];
        let coeff = Complex64::new(1.0 / (indices.len() as f64).sqrt(), 0.0);
        elements.push(BasisElement { terms: indices.iter().map(|&i| (i, coeff)).collect() });
    }
    Ok(SubspaceBasis { kind: SectorKind::Symmetric, n, d, elements })
}

fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, f64)> {
    // Heap's algorithm; sign flips on each transposition.
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

/// Antisymmetric-sector basis: one Slater determinant per size-n subset of
/// the d levels. Exists only for n <= d.
pub fn antisymmetric_basis(n: usize, d: usize) -> Result<SubspaceBasis> {
    if n > d {
        return Err(Error::SectorNonexistent { n, d });
    }
    check_dim(n, d)?;
    let perms = permutations_with_sign(n);
    let norm = 1.0 / (perms.len() as f64).sqrt();
    let mut elements = Vec::new();
    for levels in level_subsets(n, d) {
        let mut terms = Vec::with_capacity(perms.len());
        for (perm, sign) in &perms {
            let digits: Vec<u8> = perm.iter().map(|&slot| levels[slot]).collect();
            let idx = encode_index(&digits, n, d)?;
            terms.push((idx, Complex64::new(sign * norm, 0.0)));
        }
        terms.sort_by_key(|(idx, _)| *idx);
        elements.push(BasisElement { terms });
    }
    Ok(SubspaceBasis { kind: SectorKind::Antisymmetric, n, d, elements })
}

fn level_subsets(n: usize, d: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current: Vec<u8> = Vec::with_capacity(n);
    fn rec(start: u8, n: usize, d: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for level in start..d as u8 {
            current.push(level);
            rec(level + 1, n, d, current, out);
            current.pop();
        }
    }
    rec(0, n, d, &mut current, &mut out);
    out
}

/// Sector dimension from the closed formulas (binomials for the permutation
/// sectors, admitted orbit count for momentum).
pub fn sector_dimension(kind: SectorKind, n: usize, d: usize) -> Result<u64> {
    match kind {
        SectorKind::Full => {
            let dim = (d as u64).checked_pow(n as u32).ok_or(Error::Overflow("d^n"))?;
            Ok(dim)
        }
        SectorKind::Symmetric => Ok(binomial((n + d - 1) as u64, (d - 1) as u64)),
        SectorKind::Antisymmetric => {
            if n > d {
                return Err(Error::SectorNonexistent { n, d });
            }
            Ok(binomial(d as u64, n as u64))
        }
        SectorKind::Momentum(k) => {
            let k = k % n;
            let count = enumerate_orbits(n, d)?
                .iter()
                .filter(|orbit| (k * orbit.exact_period) % n == 0)
                .count();
            Ok(count as u64)
        }
    }
}

/// Assembles the dense projector Pi = sum |b><b| over the full space.
pub fn projector(basis: &SubspaceBasis) -> Result<DMatrix<Complex64>> {
    let dim = basis.full_dim() as u128;
    let cap = size_cap();
    if dim * dim > cap {
        return Err(Error::SizeCap { dim: dim * dim, cap });
    }
    let dim = dim as usize;
    let mut pi = DMatrix::zeros(dim, dim);
    for element in &basis.elements {
        for &(i, ci) in &element.terms {
            for &(j, cj) in &element.terms {
                pi[(i, j)] += ci * cj.conj();
            }
        }
    }
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn orbit_examples() {
        let orbits = enumerate_orbits(2, 2).unwrap();
        assert_eq!(orbits.len(), 3);
        assert_eq!(orbits[0].representative, vec![0, 0]);
        assert_eq!(orbits[1].representative, vec![0, 1]);
        assert_eq!(orbits[1].exact_period, 2);
        assert_eq!(orbits[2].representative, vec![1, 1]);

        let orbits = enumerate_orbits(4, 2).unwrap();
        assert_eq!(orbits.len(), 6);
        let mut periods: Vec<usize> = orbits.iter().map(|o| o.exact_period).collect();
        periods.sort_unstable();
        assert_eq!(periods, vec![1, 1, 2, 4, 4, 4]);

        assert_eq!(enumerate_orbits(5, 2).unwrap().len(), 8);
    }

    #[test]
    fn orbits_partition_all_configurations() {
        for (n, d) in [(4usize, 2usize), (5, 2), (3, 3)] {
            let orbits = enumerate_orbits(n, d).unwrap();
            let total: usize = orbits.iter().map(|o| o.exact_period).sum();
            assert_eq!(total, d.pow(n as u32));
        }
    }

    #[test]
    fn prime_n_orbit_normalization() {
        for orbit in enumerate_orbits(5, 2).unwrap() {
            let uniform = orbit.representative.iter().all(|&x| x == orbit.representative[0]);
            if !uniform {
                assert_eq!(orbit.exact_period, 5);
                assert_abs_diff_eq!(orbit.alpha(), 1.0 / 5.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn table_dimensions_n4_d2() {
        let dims: Vec<u64> = (0..4)
            .map(|k| sector_dimension(SectorKind::Momentum(k), 4, 2).unwrap())
            .collect();
        assert_eq!(dims, vec![6, 3, 4, 3]);
    }

    #[test]
    fn momentum_dimensions_n5_d2() {
        assert_eq!(sector_dimension(SectorKind::Momentum(0), 5, 2).unwrap(), 8);
        for k in 1..5 {
            assert_eq!(sector_dimension(SectorKind::Momentum(k), 5, 2).unwrap(), 6);
        }
    }

    #[test]
    fn symmetric_dimension_formulas() {
        assert_eq!(sector_dimension(SectorKind::Symmetric, 2, 2).unwrap(), 3);
        assert_eq!(sector_dimension(SectorKind::Symmetric, 10, 2).unwrap(), 11);
        assert_eq!(sector_dimension(SectorKind::Symmetric, 3, 3).unwrap(), 10);
        assert_eq!(sector_dimension(SectorKind::Antisymmetric, 3, 4).unwrap(), 4);
        assert!(sector_dimension(SectorKind::Antisymmetric, 3, 2).is_err());
    }

    #[test]
    fn bases_match_dimension_formulas() {
        for (kind, n, d) in [
            (SectorKind::Symmetric, 5, 2),
            (SectorKind::Symmetric, 3, 3),
            (SectorKind::Antisymmetric, 2, 2),
            (SectorKind::Antisymmetric, 3, 4),
            (SectorKind::Momentum(0), 6, 2),
            (SectorKind::Momentum(2), 6, 2),
            (SectorKind::Momentum(1), 4, 3),
        ] {
            let basis = basis_for(kind, n, d).unwrap();
            assert_eq!(basis.dimension() as u64, sector_dimension(kind, n, d).unwrap());
        }
    }

    #[test]
    fn basis_orthonormality() {
        for (kind, n, d) in [
            (SectorKind::Symmetric, 4, 2),
            (SectorKind::Antisymmetric, 3, 4),
            (SectorKind::Momentum(1), 6, 2),
            (SectorKind::Momentum(3), 6, 2),
        ] {
            let basis = basis_for(kind, n, d).unwrap();
            for (i, a) in basis.elements.iter().enumerate() {
                for (j, b) in basis.elements.iter().enumerate() {
                    let overlap = a.dot(b);
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(overlap.re, expected, epsilon = 1e-12);
                    assert_abs_diff_eq!(overlap.im, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn singlet_is_the_antisymmetric_basis() {
        let basis = antisymmetric_basis(2, 2).unwrap();
        assert_eq!(basis.dimension(), 1);
        let el = &basis.elements[0];
        // (|01> - |10>)/sqrt(2)
        assert_eq!(el.terms.len(), 2);
        assert_abs_diff_eq!(el.terms[0].1.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(el.terms[1].1.re, -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn symmetric_basis_n2_d2() {
        let basis = symmetric_basis(2, 2).unwrap();
        assert_eq!(basis.dimension(), 3);
        // middle element is (|01> + |10>)/sqrt(2)
        let mid = &basis.elements[1];
        assert_eq!(mid.terms.len(), 2);
        assert_abs_diff_eq!(mid.terms[0].1.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn projector_properties() {
        let basis = symmetric_basis(2, 2).unwrap();
        let pi = projector(&basis).unwrap();
        // idempotent, trace = dimension
        assert!(crate::qudit::max_abs(&((&pi * &pi) - &pi)) < 1e-10);
        assert_abs_diff_eq!(pi.trace().re, 3.0, epsilon = 1e-8);
        // Pi |01> = (|01> + |10>)/2
        assert_abs_diff_eq!(pi[(1, 1)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(pi[(2, 1)].re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn momentum_projectors_resolve_identity() {
        let n = 4;
        let d = 2;
        let dim = 16;
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        let mut total = 0u64;
        for k in 0..n {
            let basis = momentum_basis(n, d, k).unwrap();
            total += basis.dimension() as u64;
            sum += projector(&basis).unwrap();
        }
        assert_eq!(total, 16);
        let identity = DMatrix::<Complex64>::identity(dim, dim);
        assert!(crate::qudit::max_abs(&(sum - identity)) < 1e-10);
    }

    #[test]
    fn momentum_lead_coefficient_is_real_positive() {
        for k in 0..6 {
            let basis = momentum_basis(6, 2, k).unwrap();
            for el in &basis.elements {
                let lead = el.terms.first().unwrap().1;
                assert!(lead.re > 0.0 && lead.im.abs() < 1e-14);
            }
        }
    }
}
