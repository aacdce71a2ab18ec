//! Command-line surface for nvprobe: spectra, sideband heights, exclusion
//! curves and oracle verification, each run leaving a manifest next to its
//! outputs.

pub mod svg;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nvprobe::config_file::{parse_config, write_config};
use nvprobe::exclusion::{exclusion_bound, exclusion_curve, log_grid, to_csv, validation_report, ThresholdSpec};
use nvprobe::spectrum::{height_vs_g, peak_report, spectrum_scan, SidebandScan, Spectrum};
use nvprobe::susceptibility::SusceptibilityInputs;
use nvprobe::{default_config, ExperimentConfig, PhysicalConstants};
use serde::Serialize;
use sha2::{Digest, Sha256};

use svg::{Chart, Marker, Series};
use verify::Suite;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] nvprobe::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0} verification check(s) failed")]
    Verification(usize),
}

impl CliError {
    /// 1 for failed verification, 2 for anything the caller has to fix.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "nvprobe", version, about = "Pump-probe spectra and axial-vector exclusion limits")]
pub struct Cli {
    /// Configuration file (flat `key = value`, SI units). Defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probe absorption around a sideband.
    Spectrum(SpectrumArgs),
    /// Sideband peak heights as a function of the spin–phonon coupling.
    Heights(HeightsArgs),
    /// Upper bound on the axial-vector coupling constant versus range.
    Constrain(ConstrainArgs),
    /// Cross-check the closed forms against the independent oracles.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Center {
    Plus,
    Minus,
    Custom(f64),
}

impl Center {
    pub fn resolve(self, omega_r: f64) -> f64 {
        match self {
            Center::Plus => omega_r,
            Center::Minus => -omega_r,
            Center::Custom(v) => v,
        }
    }
}

fn parse_center(s: &str) -> Result<Center, String> {
    match s {
        "plus" | "+" => Ok(Center::Plus),
        "minus" | "-" => Ok(Center::Minus),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Center::Custom)
            .ok_or_else(|| format!("expected `plus`, `minus` or a detuning in rad/s, got `{other}`")),
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    /// Spin–phonon coupling g, rad/s.
    #[arg(long)]
    pub g: f64,
    /// Window center: `plus` (+ω_r), `minus` (−ω_r) or a detuning in rad/s.
    #[arg(long, default_value = "plus", value_parser = parse_center, allow_hyphen_values = true)]
    pub center: Center,
    /// Half width of the window, rad/s.
    #[arg(long, default_value_t = 50.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 1001)]
    pub n_points: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Skip the SVG plot.
    #[arg(long)]
    pub no_plot: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HeightsArgs {
    /// Comma-separated couplings, rad/s.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub g_list: Vec<f64>,
    #[arg(long, default_value_t = 50.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 1001)]
    pub n_points: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub no_plot: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConstrainArgs {
    /// Smallest identifiable coupling g_c, rad/s.
    #[arg(long, default_value_t = 0.3)]
    pub g_c: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub lambda_lo: f64,
    #[arg(long, default_value_t = 1e-1)]
    pub lambda_hi: f64,
    /// Number of log-spaced ranges.
    #[arg(long, default_value_t = 181)]
    pub n: usize,
    /// Comparison curves to draw on the plot (CSV: lambda_m, alpha per row).
    #[arg(long)]
    pub overlay: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub no_plot: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Record of one invocation; written as `manifest.json` in the output directory.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub version: &'static str,
    pub arguments: serde_json::Value,
    /// Resolved configuration; also written as `config.snapshot.toml`.
    pub config_snapshot: String,
    pub inputs: Vec<InputDigest>,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
}

/// What a successful run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub outputs: Vec<String>,
    pub summary: String,
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load_config(path: Option<&Path>) -> CliResult<(ExperimentConfig, Vec<InputDigest>)> {
    match path {
        None => Ok((default_config(), Vec::new())),
        Some(p) => {
            let bytes = read(p)?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|_| CliError::Usage(format!("{}: configuration is not valid UTF-8", p.display())))?;
            let cfg = parse_config(&text)?;
            Ok((
                cfg,
                vec![InputDigest {
                    path: p.to_path_buf(),
                    sha256: digest(&bytes),
                }],
            ))
        }
    }
}

struct Writer {
    dir: PathBuf,
    outputs: Vec<String>,
}

impl Writer {
    fn new(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io { path, source })?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn finish<A: Serialize>(
        mut self,
        command: &'static str,
        args: &A,
        config: &ExperimentConfig,
        inputs: Vec<InputDigest>,
        summary: String,
    ) -> CliResult<Outcome> {
        let snapshot = write_config(config);
        self.write("config.snapshot.toml", &snapshot)?;
        let mut outputs = self.outputs.clone();
        outputs.push("manifest.json".into());
        let manifest = RunManifest {
            command,
            version: VERSION,
            arguments: serde_json::to_value(args).expect("arguments serialize"),
            config_snapshot: snapshot,
            inputs,
            outputs: outputs.clone(),
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        self.write("manifest.json", &json)?;
        Ok(Outcome {
            out_dir: self.dir,
            outputs,
            summary,
        })
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::from("delta,re_bracket,im_bracket,absorption\n");
    for p in &s.points {
        if p.singular {
            out.push_str(&format!("{},singular,singular,singular\n", num(p.delta)));
        } else {
            out.push_str(&format!(
                "{},{},{},{}\n",
                num(p.delta),
                num(p.chi_bracket.re),
                num(p.chi_bracket.im),
                num(p.absorption)
            ));
        }
    }
    out
}

fn offset_label(center: f64) -> String {
    if center == 0.0 {
        "δ (Hz)".into()
    } else {
        format!("δ − ({center:e}) (Hz)")
    }
}

pub fn cmd_spectrum(args: &SpectrumArgs, config_path: Option<&Path>) -> CliResult<Outcome> {
    let (config, inputs_digest) = load_config(config_path)?;
    config.validate()?;
    if args.n_points < 2 {
        return Err(CliError::Usage("--n-points must be at least 2".into()));
    }
    if !(args.half_width > 0.0 && args.half_width.is_finite()) {
        return Err(CliError::Usage("--half-width must be positive".into()));
    }
    if !(args.g >= 0.0 && args.g.is_finite()) {
        return Err(CliError::Usage("--g must be finite and >= 0".into()));
    }
    let center = args.center.resolve(config.omega_r);
    let inputs = SusceptibilityInputs::from_config(&config, args.g);
    let spectrum = spectrum_scan(&inputs, (center - args.half_width, center + args.half_width), args.n_points)?;

    let mut w = Writer::new(&args.out)?;
    w.write("spectrum.csv", &spectrum_csv(&spectrum))?;
    let peak = peak_report(&spectrum, center).ok();
    if !args.no_plot {
        let chart = Chart {
            title: format!("probe absorption, g = {} rad/s", args.g),
            x_label: offset_label(center),
            y_label: "Υ₂·Im χ̄ (arb. units)".into(),
            series: vec![Series {
                label: format!("g = {}", args.g),
                points: spectrum.points.iter().map(|p| (p.delta - center, p.absorption)).collect(),
            }],
            markers: peak
                .iter()
                .filter_map(|r| {
                    let p = spectrum.points.iter().find(|p| p.delta == r.center)?;
                    Some(Marker {
                        x: r.center - center,
                        y: p.absorption,
                        label: format!("peak {:+.3e}", r.height),
                    })
                })
                .collect(),
            ..Chart::default()
        };
        w.write("spectrum.svg", &chart.render())?;
    }
    let singular = spectrum.points.iter().filter(|p| p.singular).count();
    let summary = match peak {
        Some(r) => format!(
            "{} points, inversion {:.6}, extremum {:+.6e} at delta = {:e}, {singular} singular",
            spectrum.points.len(),
            spectrum.omega0,
            r.height,
            r.center
        ),
        None => format!(
            "{} points, inversion {:.6}, {singular} singular",
            spectrum.points.len(),
            spectrum.omega0
        ),
    };
    w.finish("spectrum", args, &config, inputs_digest, summary)
}

pub fn cmd_heights(args: &HeightsArgs, config_path: Option<&Path>) -> CliResult<Outcome> {
    if args.g_list.is_empty() {
        return Err(CliError::Usage("--g-list needs at least one coupling".into()));
    }
    if let Some(g) = args.g_list.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
        return Err(CliError::Usage(format!("couplings must be positive, got {g}")));
    }
    let (config, inputs_digest) = load_config(config_path)?;
    config.validate()?;
    let scan = SidebandScan {
        half_width: args.half_width,
        n_points: args.n_points,
    };
    let samples = height_vs_g(&SusceptibilityInputs::from_config(&config, 0.0), &args.g_list, scan)?;

    let mut w = Writer::new(&args.out)?;
    let mut csv = String::from("g,height_pos,height_neg\n");
    for s in &samples {
        csv.push_str(&format!("{},{},{}\n", num(s.g), num(s.positive.height), num(s.negative.height)));
    }
    w.write("heights.csv", &csv)?;
    if !args.no_plot {
        let chart = Chart {
            title: "sideband peak heights".into(),
            x_label: "g (Hz)".into(),
            y_label: "|height| (arb. units)".into(),
            log_x: true,
            log_y: true,
            series: vec![
                Series {
                    label: "positive (δ = +ω_r)".into(),
                    points: samples.iter().map(|s| (s.g, s.positive.height.abs())).collect(),
                },
                Series {
                    label: "negative (δ = −ω_r)".into(),
                    points: samples.iter().map(|s| (s.g, s.negative.height.abs())).collect(),
                },
            ],
            ..Chart::default()
        };
        w.write("heights.svg", &chart.render())?;
    }
    let summary = format!("{} couplings", samples.len());
    w.finish("heights", args, &config, inputs_digest, summary)
}

fn read_overlay(path: &Path) -> CliResult<(Series, InputDigest)> {
    let bytes = read(path)?;
    let text = String::from_utf8_lossy(&bytes);
    let points = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .filter_map(|l| {
            let mut cols = l.split(',').map(|c| c.trim().parse::<f64>());
            match (cols.next(), cols.next()) {
                (Some(Ok(x)), Some(Ok(y))) => Some((x, y)),
                _ => None,
            }
        })
        .collect::<Vec<_>>();
    if points.is_empty() {
        return Err(CliError::Usage(format!("{}: no numeric `lambda,alpha` rows", path.display())));
    }
    let label = path.file_stem().map_or_else(|| "overlay".into(), |s| s.to_string_lossy().into_owned());
    Ok((
        Series { label, points },
        InputDigest {
            path: path.to_path_buf(),
            sha256: digest(&bytes),
        },
    ))
}

pub fn cmd_constrain(args: &ConstrainArgs, config_path: Option<&Path>) -> CliResult<Outcome> {
    let (config, mut inputs_digest) = load_config(config_path)?;
    config.validate()?;
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if !(args.lambda_lo <= args.lambda_hi) {
        return Err(CliError::Usage("--lambda-lo must not exceed --lambda-hi".into()));
    }
    if args.n > 1 && args.lambda_lo == args.lambda_hi {
        return Err(CliError::Usage("several points need lambda_lo < lambda_hi".into()));
    }
    let threshold = ThresholdSpec::new(args.g_c)?;
    let consts = PhysicalConstants::default();
    let grid = log_grid(args.lambda_lo, args.lambda_hi, args.n);
    let curve = exclusion_curve(&threshold, &grid, &config, &consts)?;
    let report = validation_report(&threshold, &grid, &config, &consts)?;

    let mut overlays = Vec::new();
    for p in &args.overlay {
        let (series, d) = read_overlay(p)?;
        overlays.push(series);
        inputs_digest.push(d);
    }

    let mut w = Writer::new(&args.out)?;
    w.write("exclusion.csv", &to_csv(&curve))?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    w.write("validation.json", &json)?;
    if !args.no_plot {
        let mut series = vec![Series {
            label: format!("this work, g_c = {} Hz", args.g_c),
            points: curve.iter().map(|p| (p.lambda, p.alpha_bound)).collect(),
        }];
        series.extend(overlays);
        let chart = Chart {
            title: "upper limit on the axial-vector coupling".into(),
            x_label: "λ (m)".into(),
            y_label: "g_A g_A / 4πħc".into(),
            log_x: true,
            log_y: true,
            series,
            ..Chart::default()
        };
        w.write("exclusion.svg", &chart.render())?;
    }
    let finite: Vec<_> = curve.iter().filter(|p| p.alpha_bound.is_finite()).collect();
    let summary = match finite.first() {
        Some(p) => format!(
            "{} ranges ({} finite), tightest {:.6e} at lambda = {:e}, {} flagged by the bisection check",
            curve.len(),
            finite.len(),
            finite.iter().map(|p| p.alpha_bound).fold(f64::INFINITY, f64::min),
            finite.iter().min_by(|a, b| a.alpha_bound.total_cmp(&b.alpha_bound)).unwrap_or(p).lambda,
            report.flagged
        ),
        None => format!("{} ranges, none finite", curve.len()),
    };
    w.finish("constrain", args, &config, inputs_digest, summary)
}

/// Writes `verify.json` and fails with [`CliError::Verification`] when any check fails.
pub fn cmd_verify(args: &VerifyArgs, config_path: Option<&Path>) -> CliResult<Outcome> {
    let (config, inputs_digest) = load_config(config_path)?;
    config.validate()?;
    let report = verify::run_suite(args.suite, &config, &PhysicalConstants::default());
    let mut w = Writer::new(&args.out)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    w.write("verify.json", &json)?;
    for e in report.entries.iter().filter(|e| !e.passed) {
        eprintln!("FAIL {}: {}", e.name, e.message.as_deref().unwrap_or("tolerance exceeded"));
    }
    let summary = format!("{} checks, {} failed", report.entries.len(), report.failures);
    let outcome = w.finish("verify", args, &config, inputs_digest, summary)?;
    if report.passed {
        Ok(outcome)
    } else {
        Err(CliError::Verification(report.failures))
    }
}

/// Single exclusion bound, for callers that need one number.
pub fn bound_at(lambda: f64, g_c: f64, config: &ExperimentConfig) -> CliResult<f64> {
    Ok(exclusion_bound(lambda, &ThresholdSpec::new(g_c)?, config, &PhysicalConstants::default())?)
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let config = cli.config.as_deref();
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, config),
        Command::Heights(a) => cmd_heights(a, config),
        Command::Constrain(a) => cmd_constrain(a, config),
        Command::Verify(a) => cmd_verify(a, config),
    }
}
