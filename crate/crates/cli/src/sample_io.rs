//! Sample-file format: comma-separated rows with a fixed header, plus the
//! JSON run record written next to each sample file.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};
use symsector_core::measure::SampleRecord;

use crate::config::ExperimentConfig;

pub const SAMPLE_HEADER: &str = "sample_index,E1_nats,Eq_nats,q,s,lam1,lam2,lam3,lam4";

/// Formats one record as a CSV row; floats carry 17 significant digits so
/// round-tripping is lossless.
pub fn format_row(record: &SampleRecord) -> String {
    let m = &record.measures;
    let mut row = format!(
        "{},{:.16e},{:.16e},{:.16e},{:.16e}",
        record.sample_index, m.e1_nats, m.eq_nats, m.q, m.s
    );
    for i in 0..4 {
        let lam = m.spectrum_head.get(i).copied().unwrap_or(0.0);
        row.push_str(&format!(",{lam:.16e}"));
    }
    row
}

pub fn write_samples<W: Write>(mut out: W, records: &[SampleRecord]) -> std::io::Result<()> {
    writeln!(out, "{SAMPLE_HEADER}")?;
    for record in records {
        writeln!(out, "{}", format_row(record))?;
    }
    Ok(())
}

/// One parsed data row. All columns are retained even where the current
/// commands only consume a subset.
#[derive(Debug, Clone)]
#[allow(dead_code)]
pub struct ParsedRow {
    pub sample_index: u64,
    pub e1_nats: f64,
    pub eq_nats: f64,
    pub q: f64,
    pub s: f64,
    pub lam: [f64; 4],
}

/// Parses a sample file, reporting the 1-based line number on any error.
pub fn read_samples(path: &Path) -> Result<Vec<ParsedRow>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == SAMPLE_HEADER => {}
        Some((_, header)) => {
            return Err(format!(
                "{}: line 1: bad header {header:?}, expected {SAMPLE_HEADER:?}",
                path.display()
            ))
        }
        None => return Err(format!("{}: empty file", path.display())),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(format!(
                "{}: line {lineno}: expected 9 fields, found {}",
                path.display(),
                fields.len()
            ));
        }
        let bad = |field: &str, err: String| {
            format!("{}: line {lineno}: field {field:?}: {err}", path.display())
        };
        let float = |i: usize| -> Result<f64, String> {
            fields[i].trim().parse::<f64>().map_err(|e| bad(fields[i], e.to_string()))
        };
        rows.push(ParsedRow {
            sample_index: fields[0]
                .trim()
                .parse::<u64>()
                .map_err(|e| bad(fields[0], e.to_string()))?,
            e1_nats: float(1)?,
            eq_nats: float(2)?,
            q: float(3)?,
            s: float(4)?,
            lam: [float(5)?, float(6)?, float(7)?, float(8)?],
        });
    }
    Ok(rows)
}

fn sha256_hex(data: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data.as_bytes());
    format!("{:x}", hasher.finalize())
}

/// Provenance record written as `<out>.run.json` alongside a sample file.
pub fn run_record(
    config: &ExperimentConfig,
    records: &[SampleRecord],
    elapsed_seconds: f64,
) -> serde_json::Value {
    let first = records.first().map(format_row);
    let last = records.last().map(format_row);
    serde_json::json!({
        "config": config,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "created_utc": chrono::Utc::now().to_rfc3339(),
        "elapsed_seconds": elapsed_seconds,
        "sample_count": records.len(),
        "first_row_sha256": first.as_deref().map(sha256_hex),
        "last_row_sha256": last.as_deref().map(sha256_hex),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use symsector_core::entanglement::EntanglementRecord;

    fn record(idx: u64) -> SampleRecord {
        SampleRecord {
            sample_index: idx,
            measures: EntanglementRecord {
                e1_nats: 0.5,
                eq_nats: 0.25,
                q: 2.0,
                s: 1.5,
                spectrum_head: vec![0.7, 0.3, 0.0, 0.0],
            },
        }
    }

    #[test]
    fn row_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("samples.csv");
        let mut buf = Vec::new();
        write_samples(&mut buf, &[record(0), record(1)]).unwrap();
        std::fs::write(&path, &buf).unwrap();
        let rows = read_samples(&path).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].sample_index, 1);
        assert_eq!(rows[0].e1_nats, 0.5);
        assert_eq!(rows[0].lam, [0.7, 0.3, 0.0, 0.0]);
    }

    #[test]
    fn bad_field_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("samples.csv");
        std::fs::write(&path, format!("{SAMPLE_HEADER}\n0,oops,1,2,3,4,5,6,7\n")).unwrap();
        let err = read_samples(&path).unwrap_err();
        assert!(err.contains("line 2"), "{err}");
    }
}
