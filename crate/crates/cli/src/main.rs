//! `symsector`: sampling and analysis harness for symmetry-sector
//! entanglement experiments.

mod config;
mod sample_io;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{load_config_file, ExperimentConfig, PartialConfig, SectorArg, Units};
use symsector_core::analytics::{
    effective_dimension, is_prime, omega_reduced_cached, page_lower_bound, prop1_interval,
    prop2_interval, prop4_bound, purity_upper_bound, sbar_momentum, BoundInterval,
};
use symsector_core::distribution::{analyze_samples, PhaseBoundaries};
use symsector_core::entanglement::nats_to_bits;
use symsector_core::measure::run_samples;
use symsector_core::qudit::decode_index;
use symsector_core::sectors::{basis_for, sector_dimension, SectorKind};
use symsector_core::verify::run_verification;

/// Error classified by exit code: configuration rejections exit with 2,
/// runtime failures with 1.
enum CliError {
    Config(String),
    Runtime(String),
}

type CliResult = Result<(), CliError>;

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn runtime_err(msg: impl std::fmt::Display) -> CliError {
    CliError::Runtime(msg.to_string())
}

#[derive(Parser)]
#[command(
    name = "symsector",
    version,
    about = "Haar sampling and entanglement statistics in symmetric subspaces of n qudits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every experiment-shaped subcommand; each may also come
/// from a JSON `--config` file, with flags taking precedence.
#[derive(Args, Clone)]
struct ConfigFlags {
    /// Sector: full Hilbert space, symmetric, antisymmetric, or momentum.
    #[arg(long, value_enum)]
    sector: Option<SectorArg>,
    /// Momentum index k (momentum sector only).
    #[arg(long)]
    k: Option<usize>,
    /// Number of qudits.
    #[arg(long)]
    n: Option<usize>,
    /// Local dimension of each qudit.
    #[arg(long)]
    d: Option<usize>,
    /// Size of subsystem A (first na sites).
    #[arg(long)]
    na: Option<usize>,
    /// Renyi order for the Eq column.
    #[arg(long)]
    q: Option<f64>,
    /// Number of Haar samples to draw.
    #[arg(long)]
    samples: Option<u64>,
    /// Master seed; sample i uses stream i of this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Histogram bin width.
    #[arg(long = "bin-width")]
    bin_width: Option<f64>,
    /// Worker threads for sampling (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Entropy display unit.
    #[arg(long, value_enum)]
    units: Option<Units>,
    /// JSON config file providing defaults for the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ConfigFlags {
    fn to_partial(&self) -> PartialConfig {
        PartialConfig {
            sector: self.sector,
            k: self.k,
            n: self.n,
            d: self.d,
            na: self.na,
            q: self.q,
            samples: self.samples,
            seed: self.seed,
            bin_width: self.bin_width,
            workers: self.workers,
            units: self.units,
        }
    }

    fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let base = match &self.config {
            Some(path) => load_config_file(path).map_err(config_err)?,
            None => PartialConfig::default(),
        };
        self.to_partial().merged_over(base).resolve().map_err(config_err)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw Haar-random states in a sector and record their entanglement.
    Sample {
        #[command(flatten)]
        flags: ConfigFlags,
        /// Sample file to write (stdout if omitted). A provenance record
        /// is written to <out>.run.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit and classify the distribution recorded in a sample file.
    Analyze {
        /// Sample file produced by `symsector sample`.
        input: PathBuf,
        #[command(flatten)]
        flags: ConfigFlags,
        /// Column to analyze.
        #[arg(long, value_enum, default_value = "s")]
        value: ValueColumn,
        /// Left/right split point for the tail fits (default: sample mean).
        #[arg(long)]
        split: Option<f64>,
        /// Phase I/II boundary.
        #[arg(long)]
        s1: Option<f64>,
        /// Phase II/III boundary.
        #[arg(long)]
        s2: Option<f64>,
        /// Report JSON file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Two-column histogram text file (default: <out> with extension
        /// hist.txt when --out is set).
        #[arg(long = "hist-out")]
        hist_out: Option<PathBuf>,
    },
    /// Exact averaged reduced state of a sector: spectrum, entropy, rank.
    Omega {
        #[command(flatten)]
        flags: ConfigFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analytic concentration and typicality bounds for a sector.
    Bounds {
        #[command(flatten)]
        flags: ConfigFlags,
        /// Concentration parameter epsilon.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the orthonormal sector basis, one element per line.
    Basis {
        #[command(flatten)]
        flags: ConfigFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print sector dimensions for a geometry.
    Dims {
        #[command(flatten)]
        flags: ConfigFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check bases, dimensions, and averaged states against
    /// brute-force projectors built from the defining symmetry operators.
    Verify {
        /// Largest qudit count to verify.
        #[arg(long = "max-n", default_value_t = 8)]
        max_n: usize,
        /// Largest local dimension to verify.
        #[arg(long = "max-d", default_value_t = 4)]
        max_d: usize,
        /// Emit results as JSON instead of text lines.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ValueColumn {
    /// Rescaled purity-style measure s.
    S,
    /// Von Neumann entropy E1.
    E1,
    /// Renyi entropy Eq.
    Eq,
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => {}
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
    }
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Sample { flags, out } => cmd_sample(&flags, out.as_deref()),
        Command::Analyze { input, flags, value, split, s1, s2, out, hist_out } => {
            cmd_analyze(&input, &flags, value, split, s1, s2, out.as_deref(), hist_out.as_deref())
        }
        Command::Omega { flags, out } => cmd_omega(&flags, out.as_deref()),
        Command::Bounds { flags, eps, out } => cmd_bounds(&flags, eps, out.as_deref()),
        Command::Basis { flags, out } => cmd_basis(&flags, out.as_deref()),
        Command::Dims { flags, out } => cmd_dims(&flags, out.as_deref()),
        Command::Verify { max_n, max_d, json, out } => {
            cmd_verify(max_n, max_d, json, out.as_deref())
        }
    }
}

fn write_text(out: Option<&std::path::Path>, text: &str) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| runtime_err(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_json(out: Option<&std::path::Path>, value: &serde_json::Value) -> CliResult {
    let mut text = serde_json::to_string_pretty(value).map_err(runtime_err)?;
    text.push('\n');
    write_text(out, &text)
}

fn cmd_sample(flags: &ConfigFlags, out: Option<&std::path::Path>) -> CliResult {
    let config = flags.resolve()?;
    let spec = config.sector_spec().map_err(config_err)?;
    let geometry = spec.geometry();
    let started = Instant::now();
    let basis = basis_for(spec.kind(), geometry.n(), geometry.d()).map_err(runtime_err)?;
    let records = match config.workers {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(runtime_err)?
            .install(|| run_samples(&basis, geometry, config.q, config.seed, config.samples)),
        None => run_samples(&basis, geometry, config.q, config.seed, config.samples),
    }
    .map_err(runtime_err)?;
    let elapsed = started.elapsed().as_secs_f64();
    let mut buf = Vec::new();
    sample_io::write_samples(&mut buf, &records).map_err(runtime_err)?;
    let text = String::from_utf8(buf).expect("sample rows are ASCII");
    write_text(out, &text)?;
    if let Some(path) = out {
        let record = sample_io::run_record(&config, &records, elapsed);
        let mut sidecar = path.as_os_str().to_owned();
        sidecar.push(".run.json");
        write_json(Some(std::path::Path::new(&sidecar)), &record)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    input: &std::path::Path,
    flags: &ConfigFlags,
    value: ValueColumn,
    split: Option<f64>,
    s1: Option<f64>,
    s2: Option<f64>,
    out: Option<&std::path::Path>,
    hist_out: Option<&std::path::Path>,
) -> CliResult {
    let base = match &flags.config {
        Some(path) => load_config_file(path).map_err(config_err)?,
        None => PartialConfig::default(),
    };
    let merged = flags.to_partial().merged_over(base);
    let bin_width = merged.bin_width.unwrap_or(0.001);
    let units = merged.units.unwrap_or(Units::Nats);
    if bin_width <= 0.0 {
        return Err(config_err("bin width must be positive"));
    }
    let defaults = PhaseBoundaries::default();
    let boundaries =
        PhaseBoundaries { s1: s1.unwrap_or(defaults.s1), s2: s2.unwrap_or(defaults.s2) };
    if boundaries.s1 >= boundaries.s2 {
        return Err(config_err("phase boundary s1 must be below s2"));
    }

    let rows = sample_io::read_samples(input).map_err(runtime_err)?;
    let in_bits = units == Units::Bits && value != ValueColumn::S;
    let samples: Vec<f64> = rows
        .iter()
        .map(|r| match value {
            ValueColumn::S => r.s,
            ValueColumn::E1 => r.e1_nats,
            ValueColumn::Eq => r.eq_nats,
        })
        .map(|x| if in_bits { nats_to_bits(x) } else { x })
        .collect();
    let report = analyze_samples(&samples, bin_width, boundaries, split).map_err(runtime_err)?;

    let hist_text: String = report
        .histogram
        .density_points()
        .iter()
        .map(|(center, density)| format!("{center:.16e} {density:.16e}\n"))
        .collect();
    let hist_path = hist_out.map(PathBuf::from).or_else(|| {
        out.map(|p| p.with_extension("hist.txt"))
    });
    if let Some(path) = &hist_path {
        write_text(Some(path), &hist_text)?;
    }

    let mut json = serde_json::to_value(&report).map_err(runtime_err)?;
    let object = json.as_object_mut().expect("report serializes to an object");
    object.insert(
        "config".into(),
        serde_json::json!({
            "input": input.display().to_string(),
            "value": match value { ValueColumn::S => "s", ValueColumn::E1 => "e1", ValueColumn::Eq => "eq" },
            "units": if in_bits { "bits" } else if value == ValueColumn::S { "dimensionless" } else { "nats" },
            "bin_width": bin_width,
            "split": split,
            "s1": boundaries.s1,
            "s2": boundaries.s2,
            "sample_count": samples.len(),
            "histogram_file": hist_path.as_ref().map(|p| p.display().to_string()),
        }),
    );
    write_json(out, &json)
}

fn cmd_omega(flags: &ConfigFlags, out: Option<&std::path::Path>) -> CliResult {
    let config = flags.resolve()?;
    let spec = config.sector_spec().map_err(config_err)?;
    let geo = spec.geometry();
    let omega = omega_reduced_cached(spec).map_err(runtime_err)?;
    let d_eff = effective_dimension(spec).map_err(runtime_err)?;
    let dim = sector_dimension(spec.kind(), geo.n(), geo.d()).map_err(runtime_err)?;
    let mut json = serde_json::json!({
        "config": config,
        "sector": config.sector_label(),
        "sector_dimension": dim,
        "rank": omega.rank,
        "purity": omega.purity,
        "S_omega_nats": omega.entropy,
        "effective_complement_dimension": d_eff,
        "spectrum": omega.spectrum,
    });
    if config.units == Units::Bits {
        json["S_omega_bits"] = serde_json::json!(nats_to_bits(omega.entropy));
    }
    write_json(out, &json)
}

fn interval_json(interval: &BoundInterval, units: Units) -> serde_json::Value {
    let mut json = serde_json::to_value(interval).expect("interval serializes");
    if units == Units::Bits {
        json["center_bits"] = serde_json::json!(nats_to_bits(interval.center));
        json["halfwidth_bits"] = serde_json::json!(nats_to_bits(interval.halfwidth));
    }
    json
}

fn cmd_bounds(flags: &ConfigFlags, eps: f64, out: Option<&std::path::Path>) -> CliResult {
    if !(eps > 0.0) {
        return Err(config_err("--eps must be positive"));
    }
    let config = flags.resolve()?;
    let spec = config.sector_spec().map_err(config_err)?;
    let geo = spec.geometry();
    let units = config.units;
    let (n, d, na) = (geo.n(), geo.d(), geo.n_a());

    let prop1 = prop1_interval(spec, eps).map_err(runtime_err)?;
    let d_eff = effective_dimension(spec).map_err(runtime_err)?;

    let mut json = serde_json::json!({
        "config": config,
        "sector": config.sector_label(),
        "eps": eps,
        "concentration": interval_json(&prop1, units),
        "effective_complement_dimension": d_eff,
    });

    match spec.kind() {
        SectorKind::Symmetric | SectorKind::Antisymmetric => {
            let antisym = spec.kind() == SectorKind::Antisymmetric;
            let prop2 = prop2_interval(n, d, na, antisym, eps).map_err(runtime_err)?;
            json["permutation_closed_form"] = interval_json(&prop2, units);
        }
        SectorKind::Momentum(k) => {
            if is_prime(n) {
                let prop4 = prop4_bound(n, d, na, k, eps).map_err(runtime_err)?;
                json["momentum_closed_form"] = interval_json(&prop4, units);
                let purity = purity_upper_bound(n, d, na, k).map_err(runtime_err)?;
                let (sbar_lower, sbar_asym) = sbar_momentum(n, d, na, k).map_err(runtime_err)?;
                json["purity_upper_bound"] = serde_json::json!(purity);
                json["sbar_lower_nats"] = serde_json::json!(sbar_lower);
                json["sbar_asymptotic_nats"] = serde_json::json!(sbar_asym);
                if units == Units::Bits {
                    json["sbar_lower_bits"] = serde_json::json!(nats_to_bits(sbar_lower));
                }
            } else {
                json["momentum_closed_form"] = serde_json::json!(null);
                json["note"] =
                    serde_json::json!("momentum closed forms require prime n");
            }
        }
        SectorKind::Full => {
            if 2 * na <= n {
                let page = page_lower_bound(n, d, na).map_err(runtime_err)?;
                json["page_lower_bound_nats"] = serde_json::json!(page);
                if units == Units::Bits {
                    json["page_lower_bound_bits"] = serde_json::json!(nats_to_bits(page));
                }
            } else {
                json["page_lower_bound_nats"] = serde_json::json!(null);
                json["note"] = serde_json::json!("Page bound stated for na <= n/2");
            }
        }
    }
    write_json(out, &json)
}

fn cmd_basis(flags: &ConfigFlags, out: Option<&std::path::Path>) -> CliResult {
    let config = flags.resolve()?;
    let spec = config.sector_spec().map_err(config_err)?;
    let geo = spec.geometry();
    let basis = basis_for(spec.kind(), geo.n(), geo.d()).map_err(runtime_err)?;
    let mut text = String::new();
    for element in &basis.elements {
        let mut first = true;
        for &(idx, coeff) in &element.terms {
            if !first {
                text.push_str("  +  ");
            }
            first = false;
            let digits: String = decode_index(idx, geo.n(), geo.d())
                .iter()
                .map(|digit| char::from_digit(*digit as u32, 36).expect("digit < d <= 36"))
                .collect();
            text.push_str(&format!("{:+.12e} {:+.12e} @ {digits}", coeff.re, coeff.im));
        }
        text.push('\n');
    }
    write_text(out, &text)
}

fn cmd_dims(flags: &ConfigFlags, out: Option<&std::path::Path>) -> CliResult {
    // na is irrelevant for dimensions; only n and d are required.
    let n = flags.n.ok_or_else(|| config_err("missing --n"))?;
    let d = flags.d.ok_or_else(|| config_err("missing --d"))?;
    if n == 0 || d < 2 {
        return Err(config_err("require n >= 1 and d >= 2"));
    }
    let requested = flags.sector;
    let mut text = String::new();
    let mut emit = |kind: SectorKind| -> CliResult {
        match sector_dimension(kind, n, d) {
            Ok(dim) => {
                text.push_str(&format!("{} {dim}\n", kind.label()));
                Ok(())
            }
            Err(e) => Err(runtime_err(e)),
        }
    };
    match requested {
        None | Some(SectorArg::Full) => emit(SectorKind::Full)?,
        _ => {}
    }
    match requested {
        None | Some(SectorArg::Sym) => emit(SectorKind::Symmetric)?,
        _ => {}
    }
    if matches!(requested, Some(SectorArg::Antisym)) || (requested.is_none() && n <= d) {
        emit(SectorKind::Antisymmetric)?;
    }
    match requested {
        None | Some(SectorArg::Mom) => {
            let ks: Vec<usize> = match flags.k {
                Some(k) => vec![k % n],
                None => (0..n).collect(),
            };
            for k in ks {
                emit(SectorKind::Momentum(k))?;
            }
        }
        _ => {}
    }
    write_text(out, &text)
}

fn cmd_verify(max_n: usize, max_d: usize, json: bool, out: Option<&std::path::Path>) -> CliResult {
    if max_n < 2 || max_d < 2 {
        return Err(config_err("require --max-n >= 2 and --max-d >= 2"));
    }
    let results = run_verification(max_n, max_d);
    let failures = results.iter().filter(|r| !r.passed).count();
    if json {
        let value = serde_json::json!({
            "checks": results,
            "failures": failures,
        });
        write_json(out, &value)?;
    } else {
        let mut text = String::new();
        for check in &results {
            let status = if check.passed { "PASS" } else { "FAIL" };
            text.push_str(&format!(
                "{status} {} (deviation {:.3e}): {}\n",
                check.name, check.deviation, check.detail
            ));
        }
        text.push_str(&format!("{} checks, {failures} failures\n", results.len()));
        write_text(out, &text)?;
    }
    if failures > 0 {
        return Err(runtime_err(format!("{failures} verification checks failed")));
    }
    Ok(())
}
