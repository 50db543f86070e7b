//! Experiment configuration: JSON config file merged with command-line
//! flags (flags win).

use serde::{Deserialize, Serialize};
use symsector_core::qudit::QuditGeometry;
use symsector_core::sectors::{SectorKind, SectorSpec};

/// Entropy display unit; storage is always nats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Nats,
    Bits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SectorArg {
    Full,
    Sym,
    Antisym,
    Mom,
}

/// On-disk and in-memory run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sector: SectorArg,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub n: usize,
    pub d: usize,
    pub na: usize,
    pub q: f64,
    pub samples: u64,
    pub seed: u64,
    pub bin_width: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub units: Units,
}

/// Partial configuration as read from a file or flags; `None` means
/// "not specified here".
#[derive(Debug, Clone, Default, Deserialize)]
pub struct PartialConfig {
    pub sector: Option<SectorArg>,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub na: Option<usize>,
    pub q: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub bin_width: Option<f64>,
    pub workers: Option<usize>,
    pub units: Option<Units>,
}

impl PartialConfig {
    /// Overlays `self` (flags) on top of `base` (config file).
    pub fn merged_over(self, base: PartialConfig) -> PartialConfig {
        PartialConfig {
            sector: self.sector.or(base.sector),
            k: self.k.or(base.k),
            n: self.n.or(base.n),
            d: self.d.or(base.d),
            na: self.na.or(base.na),
            q: self.q.or(base.q),
            samples: self.samples.or(base.samples),
            seed: self.seed.or(base.seed),
            bin_width: self.bin_width.or(base.bin_width),
            workers: self.workers.or(base.workers),
            units: self.units.or(base.units),
        }
    }

    /// Fills defaults and checks completeness. Geometry/sector validity is
    /// checked separately through `sector_spec`.
    pub fn resolve(self) -> Result<ExperimentConfig, String> {
        let sector = self.sector.ok_or("missing --sector")?;
        let n = self.n.ok_or("missing --n")?;
        let d = self.d.ok_or("missing --d")?;
        let na = self.na.ok_or("missing --na")?;
        if sector == SectorArg::Mom && self.k.is_none() {
            return Err("momentum sector requires --k".into());
        }
        Ok(ExperimentConfig {
            sector,
            k: self.k,
            n,
            d,
            na,
            q: self.q.unwrap_or(2.0),
            samples: self.samples.unwrap_or(1000),
            seed: self.seed.unwrap_or(0),
            bin_width: self.bin_width.unwrap_or(0.001),
            workers: self.workers,
            units: self.units.unwrap_or(Units::Nats),
        })
    }
}

impl ExperimentConfig {
    pub fn sector_kind(&self) -> SectorKind {
        match self.sector {
            SectorArg::Full => SectorKind::Full,
            SectorArg::Sym => SectorKind::Symmetric,
            SectorArg::Antisym => SectorKind::Antisymmetric,
            SectorArg::Mom => SectorKind::Momentum(self.k.unwrap_or(0)),
        }
    }

    /// Validated geometry + sector; any failure is a config rejection.
    pub fn sector_spec(&self) -> Result<SectorSpec, String> {
        let geometry =
            QuditGeometry::new(self.n, self.d, self.na).map_err(|e| e.to_string())?;
        SectorSpec::new(self.sector_kind(), geometry).map_err(|e| e.to_string())
    }

    pub fn sector_label(&self) -> String {
        self.sector_kind().label()
    }
}

pub fn load_config_file(path: &std::path::Path) -> Result<PartialConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = PartialConfig { n: Some(8), d: Some(2), ..Default::default() };
        let flags = PartialConfig {
            sector: Some(SectorArg::Full),
            n: Some(10),
            na: Some(5),
            ..Default::default()
        };
        let merged = flags.merged_over(file).resolve().unwrap();
        assert_eq!(merged.n, 10);
        assert_eq!(merged.d, 2);
        assert_eq!(merged.samples, 1000);
    }

    #[test]
    fn momentum_requires_k() {
        let partial = PartialConfig {
            sector: Some(SectorArg::Mom),
            n: Some(6),
            d: Some(2),
            na: Some(3),
            ..Default::default()
        };
        assert!(partial.resolve().is_err());
    }

    #[test]
    fn antisym_rejected_when_n_exceeds_d() {
        let config = PartialConfig {
            sector: Some(SectorArg::Antisym),
            n: Some(3),
            d: Some(2),
            na: Some(1),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        assert!(config.sector_spec().is_err());
    }
}
