//! Histogramming of entanglement samples, Gaussian/exponential tail fits,
//! transition-point detection, and phase classification.

use serde::Serialize;

use crate::error::{Error, Result};

/// Fixed-width histogram with a density view.
#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub bin_width: f64,
    /// Left edge of the first bin, floor(min / bin_width) * bin_width.
    pub origin: f64,
    pub counts: Vec<u64>,
    pub total_count: u64,
}

impl Histogram {
    pub fn build(samples: &[f64], bin_width: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        if !(bin_width > 0.0) {
            return Err(Error::NonPositiveBinWidth);
        }
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let origin = (min / bin_width).floor() * bin_width;
        let nbins = (((max - origin) / bin_width).floor() as usize) + 1;
        let mut counts = vec![0u64; nbins];
        for &x in samples {
            let bin = (((x - origin) / bin_width) as usize).min(nbins - 1);
            counts[bin] += 1;
        }
        Ok(Self { bin_width, origin, counts, total_count: samples.len() as u64 })
    }

    pub fn bin_center(&self, bin: usize) -> f64 {
        self.origin + (bin as f64 + 0.5) * self.bin_width
    }

    /// count / (total * bin_width); integrates to 1.
    pub fn density(&self, bin: usize) -> f64 {
        self.counts[bin] as f64 / (self.total_count as f64 * self.bin_width)
    }

    /// (center, density) pairs for every bin.
    pub fn density_points(&self) -> Vec<(f64, f64)> {
        (0..self.counts.len()).map(|b| (self.bin_center(b), self.density(b))).collect()
    }
}

/// Mean, unbiased standard deviation, and standard error of the mean.
pub fn summary_stats(samples: &[f64]) -> Result<(f64, f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: samples.len() });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let std = var.sqrt();
    Ok((mean, std, std / n.sqrt()))
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussianFit {
    pub mu: f64,
    pub sigma: f64,
    pub amplitude: f64,
    /// Sum of squared density residuals over the fitted bins.
    pub residual: f64,
}

impl GaussianFit {
    pub fn density(&self, s: f64) -> f64 {
        let z = (s - self.mu) / self.sigma;
        self.amplitude * (-0.5 * z * z).exp()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentialFit {
    /// Density modeled as exp(a s + b).
    pub a: f64,
    pub b: f64,
    /// Sum of squared log-density residuals over the fitted bins.
    pub residual: f64,
}

impl ExponentialFit {
    pub fn density(&self, s: f64) -> f64 {
        (self.a * s + self.b).exp()
    }
}

const MIN_FIT_BINS: usize = 5;

/// Window growth factor for the iterative Gaussian-core refinement: after
/// each fit the window is reset to bins with center <= mu + this * sigma.
pub const CORE_WINDOW_SIGMA: f64 = 0.6;

/// Gaussian fit of the peak. The first pass uses bins with center <=
/// split_point; subsequent passes shrink the window to mu + 0.6 sigma of
/// the previous fit until stable, which keeps the exponential right tail
/// from contaminating the core parameters.
pub fn fit_gaussian_left(hist: &Histogram, split_point: f64) -> Result<GaussianFit> {
    let mut window = split_point;
    let mut fit = fit_gaussian_window(hist, window)?;
    for _ in 0..50 {
        let refined = fit.mu + CORE_WINDOW_SIGMA * fit.sigma;
        if !refined.is_finite() || (refined - window).abs() < 0.5 * hist.bin_width {
            break;
        }
        match fit_gaussian_window(hist, refined) {
            Ok(next) => {
                window = refined;
                fit = next;
            }
            // the refined window has too few usable bins; keep the last fit
            Err(_) => break,
        }
    }
    Ok(fit)
}

/// Single-pass least-squares Gaussian fit of the density over bins with
/// center <= window_max. Plain unweighted residuals, Gauss-Newton with
/// step damping.
fn fit_gaussian_window(hist: &Histogram, split_point: f64) -> Result<GaussianFit> {
    let points: Vec<(f64, f64)> = hist
        .density_points()
        .into_iter()
        .filter(|&(x, y)| x <= split_point && y > 0.0)
        .collect();
    if points.len() < MIN_FIT_BINS {
        return Err(Error::InsufficientBins { need: MIN_FIT_BINS, got: points.len() });
    }
    // moment-based initial guess from the truncated points
    let wsum: f64 = points.iter().map(|&(_, y)| y).sum();
    let mut mu: f64 = points.iter().map(|&(x, y)| x * y).sum::<f64>() / wsum;
    let mut sigma: f64 =
        (points.iter().map(|&(x, y)| y * (x - mu) * (x - mu)).sum::<f64>() / wsum).sqrt();
    if !(sigma > 0.0) {
        sigma = hist.bin_width;
    }
    let mut amp = points.iter().map(|&(_, y)| y).fold(0.0, f64::max);

    let sse = |amp: f64, mu: f64, sigma: f64| -> f64 {
        points
            .iter()
            .map(|&(x, y)| {
                let z = (x - mu) / sigma;
                let r = y - amp * (-0.5 * z * z).exp();
                r * r
            })
            .sum()
    };
    let mut best = sse(amp, mu, sigma);
    for _ in 0..200 {
        // normal equations for the 3-parameter Gauss-Newton step
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for &(x, y) in &points {
            let z = (x - mu) / sigma;
            let g = (-0.5 * z * z).exp();
            let f = amp * g;
            let jac = [g, f * z / sigma, f * z * z / sigma];
            let r = y - f;
            for i in 0..3 {
                jtr[i] += jac[i] * r;
                for j in 0..3 {
                    jtj[i][j] += jac[i] * jac[j];
                }
            }
        }
        let Some(step) = solve3(&jtj, &jtr) else { break };
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let candidate = (
                amp + scale * step[0],
                mu + scale * step[1],
                (sigma + scale * step[2]).abs().max(1e-12),
            );
            let value = sse(candidate.0, candidate.1, candidate.2);
            if value < best {
                amp = candidate.0;
                mu = candidate.1;
                sigma = candidate.2;
                best = value;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok(GaussianFit { mu, sigma, amplitude: amp, residual: best })
}

fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        m.swap(col, pivot);
        if m[col][col].abs() < 1e-300 {
            return None;
        }
        for row in 0..3 {
            if row != col {
                let factor = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= factor * m[col][k];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Least-squares line fit of log-density over bins with center >=
/// split_point. Zero-count bins are excluded.
pub fn fit_exponential_right(hist: &Histogram, split_point: f64) -> Result<ExponentialFit> {
    let points: Vec<(f64, f64)> = hist
        .density_points()
        .into_iter()
        .filter(|&(x, y)| x >= split_point && y > 0.0)
        .map(|(x, y)| (x, y.ln()))
        .collect();
    if points.len() < MIN_FIT_BINS {
        return Err(Error::InsufficientBins { need: MIN_FIT_BINS, got: points.len() });
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::InsufficientBins { need: MIN_FIT_BINS, got: points.len() });
    }
    let a = (n * sxy - sx * sy) / denom;
    let b = (sy - a * sx) / n;
    let residual = points.iter().map(|&(x, y)| (y - a * x - b).powi(2)).sum();
    Ok(ExponentialFit { a, b, residual })
}

/// Bisection root of gaussian density minus exponential density over the
/// interval, to |ds| < 1e-6. The curves must bracket a sign change.
pub fn intersection(
    gauss: &GaussianFit,
    expfit: &ExponentialFit,
    interval: (f64, f64),
) -> Result<f64> {
    let diff = |s: f64| gauss.density(s) - expfit.density(s);
    let (mut lo, mut hi) = interval;
    let (flo, fhi) = (diff(lo), diff(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoIntersection);
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        let fmid = diff(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The s-axis phase boundaries; defaults are the large-n singular points
/// for q = 2.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseBoundaries {
    pub s1: f64,
    pub s2: f64,
}

impl Default for PhaseBoundaries {
    fn default() -> Self {
        Self { s1: 1.25, s2: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    /// Maximally entangled: s < s1.
    I,
    /// Typical: s1 <= s < s2.
    II,
    /// Separable: s >= s2.
    III,
}

/// Boundary ties are assigned rightward.
pub fn classify_phase(s: f64, boundaries: PhaseBoundaries) -> Phase {
    if s < boundaries.s1 {
        Phase::I
    } else if s < boundaries.s2 {
        Phase::II
    } else {
        Phase::III
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct PhaseCounts {
    #[serde(rename = "I")]
    pub i: u64,
    #[serde(rename = "II")]
    pub ii: u64,
    #[serde(rename = "III")]
    pub iii: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub std: f64,
    pub sem: f64,
}

/// Full analysis of one sample set: histogram, both tail fits, their
/// intersection, and phase counts over the raw samples.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub stats: SummaryStats,
    pub gaussian: Option<GaussianFit>,
    pub exponential: Option<ExponentialFit>,
    pub intersection: Option<f64>,
    pub intersection_note: Option<String>,
    pub phase_counts: PhaseCounts,
    #[serde(skip)]
    pub histogram: Histogram,
}

/// Runs the fit pipeline. The left/right split point defaults to the
/// sample mean.
pub fn analyze_samples(
    samples: &[f64],
    bin_width: f64,
    boundaries: PhaseBoundaries,
    split_override: Option<f64>,
) -> Result<FitReport> {
    let (mean, std, sem) = summary_stats(samples)?;
    let histogram = Histogram::build(samples, bin_width)?;
    let split = split_override.unwrap_or(mean);
    let gaussian = fit_gaussian_left(&histogram, split).ok();
    let exponential = fit_exponential_right(&histogram, split).ok();
    let (intersection_value, intersection_note) = match (&gaussian, &exponential) {
        (Some(g), Some(e)) => {
            let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            match intersection(g, e, (split, max)) {
                Ok(root) => (Some(root), None),
                Err(err) => (None, Some(err.to_string())),
            }
        }
        _ => (None, Some("one or both fits unavailable".into())),
    };
    let mut phase_counts = PhaseCounts::default();
    for &s in samples {
        match classify_phase(s, boundaries) {
            Phase::I => phase_counts.i += 1,
            Phase::II => phase_counts.ii += 1,
            Phase::III => phase_counts.iii += 1,
        }
    }
    Ok(FitReport {
        stats: SummaryStats { mean, std, sem },
        gaussian,
        exponential,
        intersection: intersection_value,
        intersection_note,
        phase_counts,
        histogram,
    })
}
