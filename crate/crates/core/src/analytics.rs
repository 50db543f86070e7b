//! Exact averaged reduced states Omega_G^(A), effective dimensions, and the
//! analytic entropy bounds (concentration interval, permutation-sector
//! interval, momentum-sector lower bound, Page bound).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::entanglement::{von_neumann_of_spectrum, RANK_THRESHOLD};
use crate::error::{Error, Result};
use crate::qudit::{hermitian_spectrum, DensityOperator};
use crate::sectors::{basis_for, compositions, sector_dimension, SectorKind, SectorSpec};

/// 18 pi^3, the constant in the concentration exponent.
pub fn concentration_constant() -> f64 {
    18.0 * std::f64::consts::PI.powi(3)
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Uniform-string diagonal offset: n-1 in the k = 0 sector, -1 otherwise
/// (the theta != 0 basis simply lacks the uniform strings).
pub fn m_theta(n: usize, k: usize) -> f64 {
    if k % n == 0 {
        (n - 1) as f64
    } else {
        -1.0
    }
}

/// The averaged reduced state tr_complement Pi_G / D_G with its spectrum.
#[derive(Debug, Clone)]
pub struct OmegaState {
    pub spec: SectorSpec,
    pub rho: DensityOperator,
    /// Eigenvalues, descending.
    pub spectrum: Vec<f64>,
    /// Count of eigenvalues above the rank threshold.
    pub rank: usize,
    pub purity: f64,
    /// Von Neumann entropy in nats.
    pub entropy: f64,
}

fn contract_basis(spec: SectorSpec, keep_a: bool) -> Result<OmegaState> {
    let geo = spec.geometry();
    let basis = basis_for(spec.kind(), geo.n(), geo.d())?;
    let sector_dim = basis.dimension();
    if sector_dim == 0 {
        return Err(Error::EmptyBasis);
    }
    let (kept_dim, db) = if keep_a { (geo.dim_a(), geo.dim_b()) } else { (geo.dim_b(), geo.dim_b()) };
    let mut omega = DMatrix::<Complex64>::zeros(kept_dim, kept_dim);
    // stream one basis element at a time; the full projector is never built
    let mut groups: HashMap<usize, Vec<(usize, Complex64)>> = HashMap::new();
    for element in &basis.elements {
        groups.clear();
        for &(idx, coeff) in &element.terms {
            let (a, b) = (idx / db, idx % db);
            let (kept, traced) = if keep_a { (a, b) } else { (b, a) };
            groups.entry(traced).or_default().push((kept, coeff));
        }
        for entries in groups.values() {
            for &(r, cr) in entries {
                for &(c, cc) in entries {
                    omega[(r, c)] += cr * cc.conj();
                }
            }
        }
    }
    omega /= Complex64::new(sector_dim as f64, 0.0);
    let rho = DensityOperator::new(omega)?;
    let spectrum = hermitian_spectrum(&rho)?;
    let rank = spectrum.iter().filter(|&&x| x > RANK_THRESHOLD).count();
    let purity = spectrum.iter().map(|x| x * x).sum();
    let entropy = von_neumann_of_spectrum(&spectrum);
    Ok(OmegaState { spec, rho, spectrum, rank, purity, entropy })
}

/// Omega_G^(A): exact partial trace of the normalized sector projector,
/// contracted element by element.
pub fn omega_reduced(spec: SectorSpec) -> Result<OmegaState> {
    contract_basis(spec, true)
}

/// Omega on the complement side, tr_A Pi_G / D_G.
pub fn omega_complement(spec: SectorSpec) -> Result<OmegaState> {
    contract_basis(spec, false)
}

type OmegaCache = Mutex<HashMap<(SectorSpec, bool), Arc<OmegaState>>>;

fn omega_cache() -> &'static OmegaCache {
    static CACHE: OnceLock<OmegaCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached variant of [`omega_reduced`]; the result is immutable and shared.
pub fn omega_reduced_cached(spec: SectorSpec) -> Result<Arc<OmegaState>> {
    cached(spec, true)
}

pub fn omega_complement_cached(spec: SectorSpec) -> Result<Arc<OmegaState>> {
    cached(spec, false)
}

fn cached(spec: SectorSpec, keep_a: bool) -> Result<Arc<OmegaState>> {
    if let Some(hit) = omega_cache().lock().unwrap().get(&(spec, keep_a)) {
        return Ok(hit.clone());
    }
    let computed = Arc::new(contract_basis(spec, keep_a)?);
    omega_cache().lock().unwrap().insert((spec, keep_a), computed.clone());
    Ok(computed)
}

/// Effective complement dimension: inverse purity of Omega on the complement.
pub fn effective_dimension(spec: SectorSpec) -> Result<f64> {
    Ok(1.0 / omega_complement_cached(spec)?.purity)
}

/// Diagonal entry of the momentum-sector Omega at prime n: uniform strings
/// get (d^{n_comp} + m_theta) / (n D), all others d^{n_comp} / (n D).
pub fn momentum_diagonal(n: usize, d: usize, n_a: usize, k: usize, a_digits: &[u8]) -> Result<f64> {
    if !is_prime(n) {
        return Err(Error::RequiresPrimeN(n));
    }
    if a_digits.len() != n_a {
        return Err(Error::WrongLength { expected: n_a, got: a_digits.len() });
    }
    let sector_dim = sector_dimension(SectorKind::Momentum(k), n, d)? as f64;
    let db = (d as f64).powi((n - n_a) as i32);
    let uniform = a_digits.iter().all(|&x| x == a_digits[0]);
    let numerator = if uniform { db + m_theta(n, k) } else { db };
    Ok(numerator / (n as f64 * sector_dim))
}

/// Upper bound on any off-diagonal magnitude of the momentum-sector Omega.
pub fn offdiagonal_bound(sector_dim: u64) -> f64 {
    1.0 / sector_dim as f64
}

/// Gamma_A = sum over occupation types of (M^2 - M), M the multinomial.
pub fn gamma_sum(n_a: usize, d: usize) -> Result<u128> {
    let mut total: u128 = 0;
    for occ in compositions(n_a, d) {
        let m = multinomial(n_a, &occ)?;
        let sq = m.checked_mul(m).ok_or(Error::Overflow("Gamma_A"))?;
        total = total.checked_add(sq - m).ok_or(Error::Overflow("Gamma_A"))?;
    }
    Ok(total)
}

fn multinomial(n: usize, parts: &[usize]) -> Result<u128> {
    let mut value: u128 = 1;
    let mut seen = 0usize;
    for &part in parts {
        for j in 1..=part {
            seen += 1;
            value = value
                .checked_mul(seen as u128)
                .ok_or(Error::Overflow("multinomial"))?
                / j as u128;
        }
    }
    debug_assert_eq!(seen, n);
    Ok(value)
}

/// Closed-form upper bound on tr(Omega_{T,theta}^(A))^2 at prime n.
pub fn purity_upper_bound(n: usize, d: usize, n_a: usize, k: usize) -> Result<f64> {
    if !is_prime(n) {
        return Err(Error::RequiresPrimeN(n));
    }
    let m = m_theta(n, k);
    let df = d as f64;
    let n_b = n - n_a;
    let gamma = gamma_sum(n_a, d)? as f64;
    let prefactor = 1.0 / (df.powi(n_a as i32) * (1.0 + m * df.powi(1 - n as i32)).powi(2));
    let bracket = 1.0
        + 2.0 * m / df.powi(n as i32 - 1)
        + (m * m * df + (n * n) as f64 * gamma) / df.powi((n + n_b) as i32);
    Ok(prefactor * bracket)
}

/// Entropy floor for the momentum-sector Omega: the rigorous
/// -ln(purity bound) together with the two-term asymptotic expansion.
pub fn sbar_momentum(n: usize, d: usize, n_a: usize, k: usize) -> Result<(f64, f64)> {
    let exact = -purity_upper_bound(n, d, n_a, k)?.ln();
    let df = d as f64;
    let asymptotic =
        n_a as f64 * df.ln() - (n * n) as f64 / df.powi(2 * n as i32 - 3 * n_a as i32);
    Ok((exact, asymptotic))
}

/// The capped -x log x correction of the Fannes-Audenaert inequality.
pub fn eta0(x: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::RegimeViolation(format!("eta0 needs x >= 0, got {x}")));
    }
    let e_inv = std::f64::consts::E.recip();
    if x == 0.0 {
        Ok(0.0)
    } else if x <= e_inv {
        Ok(-x * x.ln())
    } else {
        Ok(e_inv)
    }
}

/// |S(rho) - S(sigma)| <= dist * ln(dim) + eta0(dist).
pub fn fannes_audenaert_bound(trace_norm_distance: f64, dim: usize) -> Result<f64> {
    Ok(trace_norm_distance * (dim as f64).ln() + eta0(trace_norm_distance)?)
}

/// exp(-D_G eps^2 / 18 pi^3).
pub fn concentration_probability(sector_dim: u64, eps: f64) -> f64 {
    (-(sector_dim as f64) * eps * eps / concentration_constant()).exp()
}

/// A concentration statement: |E - center| <= halfwidth with probability at
/// least 1 - failure_prob, or a one-sided lower bound when center is the
/// floor itself.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BoundInterval {
    pub center: f64,
    pub halfwidth: f64,
    pub failure_prob: f64,
    pub eps: f64,
    pub eps_prime: f64,
    /// Set when eps' >= 1 or the halfwidth exceeds the entropy ceiling.
    pub non_informative: bool,
}

/// Concentration interval around S(Omega_G^(A)) for any sector.
pub fn prop1_interval(spec: SectorSpec, eps: f64) -> Result<BoundInterval> {
    let geo = spec.geometry();
    let omega = omega_reduced_cached(spec)?;
    let d_eff = effective_dimension(spec)?;
    let eps_prime = eps + (omega.rank as f64 / d_eff).sqrt();
    let r_bound = match spec.kind() {
        SectorKind::Symmetric | SectorKind::Antisymmetric => {
            sector_dimension(spec.kind(), geo.n_a(), geo.d())? as f64
        }
        _ => geo.dim_a() as f64,
    };
    let halfwidth = eps_prime * r_bound.ln() + eta0(eps_prime)?;
    let sector_dim = sector_dimension(spec.kind(), geo.n(), geo.d())?;
    let ceiling = geo.n_a() as f64 * (geo.d() as f64).ln();
    Ok(BoundInterval {
        center: omega.entropy,
        halfwidth,
        failure_prob: concentration_probability(sector_dim, eps),
        eps,
        eps_prime,
        non_informative: eps_prime >= 1.0 || halfwidth > ceiling,
    })
}

/// Permutation-sector interval around ln D_{P,+-}^(A), from the binomial
/// dimension formulas alone.
pub fn prop2_interval(
    n: usize,
    d: usize,
    n_a: usize,
    antisymmetric: bool,
    eps: f64,
) -> Result<BoundInterval> {
    let kind = if antisymmetric { SectorKind::Antisymmetric } else { SectorKind::Symmetric };
    let dim_full = sector_dimension(kind, n, d)?;
    let dim_a = sector_dimension(kind, n_a, d)? as f64;
    let dim_b = sector_dimension(kind, n - n_a, d)? as f64;
    if dim_a <= 0.0 || dim_b <= 0.0 {
        return Err(Error::SectorNonexistent { n, d });
    }
    let eps_prime = eps + (dim_a / dim_b).sqrt();
    let center = dim_a.ln();
    let halfwidth = eps_prime * (center - eps_prime.ln());
    Ok(BoundInterval {
        center,
        halfwidth,
        failure_prob: concentration_probability(dim_full, eps),
        eps,
        eps_prime,
        non_informative: eps_prime >= 1.0 || halfwidth > center,
    })
}

/// Momentum-sector entropy floor: E >= Sbar - eps' (n_A ln d - ln eps'),
/// using the exact Omega where constructible.
pub fn prop4_bound(n: usize, d: usize, n_a: usize, k: usize, eps: f64) -> Result<BoundInterval> {
    if !is_prime(n) {
        return Err(Error::RequiresPrimeN(n));
    }
    let (sbar_exact, _) = sbar_momentum(n, d, n_a, k)?;
    let df = d as f64;
    let eps_prime = match exact_eps_prime(n, d, n_a, k, eps) {
        Ok(value) => value,
        // fall back to the asymptotic form when the space is too large to build
        Err(Error::SizeCap { .. }) => eps + n as f64 * df.powf(-(n_a as f64) / 2.0),
        Err(other) => return Err(other),
    };
    let max_entropy = n_a as f64 * df.ln();
    let halfwidth = eps_prime * (max_entropy - eps_prime.ln());
    let sector_dim = sector_dimension(SectorKind::Momentum(k), n, d)?;
    Ok(BoundInterval {
        center: sbar_exact,
        halfwidth,
        failure_prob: concentration_probability(sector_dim, eps),
        eps,
        eps_prime,
        non_informative: eps_prime >= 1.0 || halfwidth > max_entropy,
    })
}

fn exact_eps_prime(n: usize, d: usize, n_a: usize, k: usize, eps: f64) -> Result<f64> {
    let geo = crate::qudit::QuditGeometry::new(n, d, n_a)?;
    let spec = SectorSpec::new(SectorKind::Momentum(k), geo)?;
    let omega = omega_reduced_cached(spec)?;
    let d_eff = effective_dimension(spec)?;
    Ok(eps + (omega.rank as f64 / d_eff).sqrt())
}

/// The fully random Page-type floor n_A ln d - d^{-n+2n_A-1}.
pub fn page_lower_bound(n: usize, d: usize, n_a: usize) -> Result<f64> {
    if 2 * n_a > n {
        return Err(Error::RegimeViolation(format!(
            "Page bound needs n_A <= n - n_A, got n_A={n_a}, n={n}"
        )));
    }
    let df = d as f64;
    Ok(n_a as f64 * df.ln() - df.powi(2 * n_a as i32 - n as i32 - 1))
}
