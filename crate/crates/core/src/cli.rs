//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage errors (bad flags or parameters),
//! 1 for runtime and I/O failures.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use percdetect::newman_ziff::REFERENCE_PROBABILITIES;
use percdetect::pnm::{self, PnmImage};
use percdetect::{
    detect, estimate_cdf_inhomogeneous, generate_percolation, label_components, power_estimate,
    rect_subgrid, sweep, threshold, BinaryImage, CdfEstimate, Direction, Ensemble, Lattice,
    NullDistribution, RngStream, Subgrid, Topology,
};

const REFERENCE_GRID: usize = 55;
const REFERENCE_RUNS: usize = 1000;
const REFERENCE_INHOM_RUNS: usize = 100;
const REFERENCE_SUBGRID: (usize, usize, usize, usize) = (19, 19, 10, 10);
const REFERENCE_P_IN: f64 = 0.6;
const REFERENCE_P_OUT: f64 = 0.4;

#[derive(Debug, Parser)]
#[command(
    name = "percdetect",
    version,
    about = "Percolation-based object detection in noisy images"
)]
pub struct Cli {
    /// Worker threads for simulations [default: number of cores]. Results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random site-percolation image as PBM.
    Percolate(PercolateArgs),
    /// Threshold a PGM image into a PBM.
    Threshold(ThresholdArgs),
    /// Label the clusters of an image and report their sizes as JSON.
    Label(LabelArgs),
    /// Estimate the maximum-cluster-size distribution for homogeneous noise.
    Simulate(SimulateArgs),
    /// Estimate the distribution with a subgrid of higher activation probability.
    SimulateInhom(SimulateInhomArgs),
    /// Test an image against a simulated null distribution.
    Detect(DetectArgs),
    /// Estimate the type II error against an object on a rectangular subgrid.
    Power(PowerArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    /// Active if intensity >= tau (ties are active).
    Geq,
    /// Active if intensity < tau.
    Lt,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Geq => Direction::ActiveIfGeq,
            DirectionArg::Lt => Direction::ActiveIfLt,
        }
    }
}

#[derive(Debug, Args)]
struct ThresholdOpts {
    /// Threshold in [0, 1] applied to PGM intensities (required for PGM input).
    #[arg(long, value_parser = probability)]
    tau: Option<f64>,

    /// Which side of the threshold is active; `geq` counts ties as active.
    #[arg(long, value_enum, default_value = "geq")]
    direction: DirectionArg,
}

#[derive(Debug, Args)]
struct PercolateArgs {
    #[arg(long, value_parser = positive)]
    rows: usize,
    #[arg(long, value_parser = positive)]
    cols: usize,
    /// Activation probability in [0, 1].
    #[arg(long, value_parser = probability)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output PBM path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Input PGM (P2 or P5).
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    threshold: ThresholdOpts,
    /// Output PBM path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct LabelArgs {
    /// Input PBM (P1/P4) or PGM (P2/P5; needs --tau).
    #[arg(short, long)]
    input: PathBuf,
    /// Neighbourhood: 4, 6 (triangular) or 8.
    #[arg(long, default_value = "6", value_parser = topology)]
    topology: Topology,
    #[command(flatten)]
    threshold: ThresholdOpts,
    /// Also write a PBM mask of the largest cluster.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Report path [default: stdout].
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Grid rows [default: 55].
    #[arg(long, value_parser = positive)]
    rows: Option<usize>,
    /// Grid columns [default: 55].
    #[arg(long, value_parser = positive)]
    cols: Option<usize>,
    /// Neighbourhood: 4, 6 (triangular) or 8 [default: 6].
    #[arg(long, value_parser = topology)]
    topology: Option<Topology>,
    /// Monte Carlo runs [default: 1000].
    #[arg(long, value_parser = positive)]
    runs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Activation probabilities, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = probability, required_unless_present = "paper_defaults")]
    p: Vec<f64>,
    /// Sweep the 17 reference probabilities 0.1, 0.2, 0.3, 0.4, 0.42, ..., 0.58, 0.6, 0.7, 0.8, 0.9.
    #[arg(long, conflicts_with = "p")]
    paper_defaults: bool,
    /// Simulate an independent ensemble per probability instead of reusing one.
    #[arg(long)]
    fresh_ensembles: bool,
    /// Directory receiving one CSV + JSON pair per probability.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct SubgridOpts {
    /// 0-based row of the subgrid's upper-left corner.
    #[arg(long)]
    top: Option<usize>,
    /// 0-based column of the subgrid's upper-left corner.
    #[arg(long)]
    left: Option<usize>,
    #[arg(long, value_parser = positive)]
    height: Option<usize>,
    #[arg(long, value_parser = positive)]
    width: Option<usize>,
}

#[derive(Debug, Args)]
struct SimulateInhomArgs {
    /// Grid rows [default: 55].
    #[arg(long, value_parser = positive)]
    rows: Option<usize>,
    /// Grid columns [default: 55].
    #[arg(long, value_parser = positive)]
    cols: Option<usize>,
    /// Neighbourhood: 4, 6 (triangular) or 8 [default: 6].
    #[arg(long, value_parser = topology)]
    topology: Option<Topology>,
    /// Monte Carlo runs [default: 100].
    #[arg(long, value_parser = positive)]
    runs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    subgrid: SubgridOpts,
    /// Activation probability inside the subgrid.
    #[arg(long, value_parser = probability)]
    p_in: Option<f64>,
    /// Activation probability outside the subgrid.
    #[arg(long, value_parser = probability)]
    p_out: Option<f64>,
    /// Fill unspecified values with the reference set: 55x55 six-neighbourhood,
    /// 10x10 subgrid at 0-based (19, 19), p_in 0.6, p_out 0.4, 100 runs.
    #[arg(long)]
    paper_defaults: bool,
    /// Directory receiving the CSV + JSON pair.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct DetectArgs {
    /// Image to test: PBM, or PGM with --tau.
    #[arg(short, long)]
    input: PathBuf,
    /// Null distribution CSV; its JSON sidecar must sit next to it.
    #[arg(long)]
    null: PathBuf,
    /// Significance level in (0, 1].
    #[arg(long, default_value = "0.05", value_parser = alpha)]
    alpha: f64,
    #[command(flatten)]
    threshold: ThresholdOpts,
    /// Result path [default: stdout].
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PowerArgs {
    #[arg(long, default_value_t = REFERENCE_GRID, value_parser = positive)]
    rows: usize,
    #[arg(long, default_value_t = REFERENCE_GRID, value_parser = positive)]
    cols: usize,
    /// Neighbourhood: 4, 6 (triangular) or 8.
    #[arg(long, default_value = "6", value_parser = topology)]
    topology: Topology,
    #[command(flatten)]
    subgrid: SubgridOpts,
    #[arg(long, value_parser = probability)]
    p_in: f64,
    #[arg(long, value_parser = probability)]
    p_out: f64,
    #[arg(long, default_value = "0.05", value_parser = alpha)]
    alpha: f64,
    #[arg(long, default_value_t = REFERENCE_INHOM_RUNS, value_parser = positive)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("{p} is not in [0, 1]"))
    }
}

fn alpha(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if a > 0.0 && a <= 1.0 {
        Ok(a)
    } else {
        Err(format!("{a} is not in (0, 1]"))
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(_) => Err(format!("`{s}` is not a positive integer")),
    }
}

fn topology(s: &str) -> Result<Topology, String> {
    s.parse::<u8>()
        .ok()
        .and_then(|n| Topology::try_from(n).ok())
        .ok_or_else(|| format!("`{s}` is not one of 4, 6, 8"))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Runtime(err) => write!(f, "{err:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        CliError::Runtime(err)
    }
}

impl From<percdetect::Error> for CliError {
    fn from(err: percdetect::Error) -> Self {
        CliError::Runtime(err.into())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

type CliResult<T = ()> = Result<T, CliError>;

pub fn run(cli: Cli) -> CliResult {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .context("configuring worker threads")?;
    }
    match cli.command {
        Command::Percolate(a) => cmd_percolate(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Label(a) => cmd_label(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::SimulateInhom(a) => cmd_simulate_inhom(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Power(a) => cmd_power(a),
    }
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    Ok(fs::read(path).with_context(|| format!("reading {}", path.display()))?)
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult {
    Ok(fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?)
}

fn emit_json(value: &impl Serialize, output: Option<&Path>) -> CliResult {
    let text = serde_json::to_string_pretty(value).context("serialising report")? + "\n";
    match output {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Loads a PBM as is, or thresholds a PGM.
fn load_binary(path: &Path, opts: &ThresholdOpts) -> CliResult<BinaryImage> {
    let bytes = read(path)?;
    let image = pnm::load(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    match image {
        PnmImage::Binary(b) => Ok(b),
        PnmImage::Gray(g) => {
            let tau = opts.tau.ok_or_else(|| {
                usage(format!(
                    "{} is a PGM image; --tau is required",
                    path.display()
                ))
            })?;
            Ok(threshold(&g, tau, opts.direction.into())?)
        }
    }
}

fn cmd_percolate(a: PercolateArgs) -> CliResult {
    let mut rng = RngStream::new(a.seed, 0);
    let image =
        generate_percolation(a.p, a.rows, a.cols, &mut rng).map_err(|e| usage(e.to_string()))?;
    write(&a.output, pnm::save_binary(&image))
}

fn cmd_threshold(a: ThresholdArgs) -> CliResult {
    let bytes = read(&a.input)?;
    let gray = pnm::load_gray(&bytes).with_context(|| format!("parsing {}", a.input.display()))?;
    let tau = a.threshold.tau.ok_or_else(|| usage("--tau is required"))?;
    let binary = threshold(&gray, tau, a.threshold.direction.into())?;
    write(&a.output, pnm::save_binary(&binary))
}

#[derive(Debug, Serialize)]
struct LabelReport {
    num_clusters: usize,
    largest: usize,
    /// Number of clusters of each size.
    cluster_sizes: BTreeMap<usize, usize>,
}

fn cmd_label(a: LabelArgs) -> CliResult {
    let image = load_binary(&a.input, &a.threshold)?;
    let lattice = Lattice::new(image.rows(), image.cols(), a.topology)?;
    let labeling = label_components(&image, &lattice)?;

    let mut histogram = BTreeMap::new();
    for &s in &labeling.cluster_sizes {
        *histogram.entry(s).or_insert(0) += 1;
    }
    if let Some(mask_path) = &a.mask {
        let target = labeling.largest_label();
        let mask = labeling
            .labels
            .iter()
            .map(|&l| target.is_some_and(|t| l == t))
            .collect();
        let mask = BinaryImage::new(image.rows(), image.cols(), mask)?;
        write(mask_path, pnm::save_binary(&mask))?;
    }
    emit_json(
        &LabelReport {
            num_clusters: labeling.num_clusters(),
            largest: labeling.largest,
            cluster_sizes: histogram,
        },
        a.output.as_deref(),
    )
}

fn distribution_path(out_dir: &Path, lattice: &Lattice, tag: &str) -> PathBuf {
    out_dir.join(format!(
        "cdf_{}x{}_n{}_{tag}.csv",
        lattice.rows(),
        lattice.cols(),
        lattice.topology()
    ))
}

fn save_estimate(estimate: &CdfEstimate, path: &Path) -> CliResult {
    estimate
        .save(path)
        .with_context(|| format!("writing {}", path.display()))?;
    println!("{}", path.display());
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> CliResult {
    let rows = a.rows.unwrap_or(REFERENCE_GRID);
    let cols = a.cols.unwrap_or(REFERENCE_GRID);
    let topology = a.topology.unwrap_or(Topology::Six);
    let runs = a.runs.unwrap_or(REFERENCE_RUNS);
    let probabilities = if a.paper_defaults {
        REFERENCE_PROBABILITIES.to_vec()
    } else {
        a.p
    };
    let lattice = Lattice::new(rows, cols, topology).map_err(|e| usage(e.to_string()))?;
    let ensemble = if a.fresh_ensembles {
        Ensemble::Fresh
    } else {
        Ensemble::Shared
    };

    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let estimates = sweep(&lattice, &probabilities, runs, a.seed, ensemble)?;
    for (p, estimate) in probabilities.iter().zip(&estimates) {
        let path = distribution_path(&a.out_dir, &lattice, &format!("p{p:?}"));
        save_estimate(estimate, &path)?;
    }
    Ok(())
}

fn resolve_subgrid(lattice: &Lattice, opts: &SubgridOpts, defaults: bool) -> CliResult<Subgrid> {
    let fallback = |v: Option<usize>, d: usize, name: &str| match v {
        Some(v) => Ok(v),
        None if defaults => Ok(d),
        None => Err(usage(format!(
            "--{name} is required without --paper-defaults"
        ))),
    };
    let (dt, dl, dh, dw) = REFERENCE_SUBGRID;
    let top = fallback(opts.top, dt, "top")?;
    let left = fallback(opts.left, dl, "left")?;
    let height = fallback(opts.height, dh, "height")?;
    let width = fallback(opts.width, dw, "width")?;
    rect_subgrid(lattice, top, left, height, width).map_err(|e| usage(e.to_string()))
}

fn cmd_simulate_inhom(a: SimulateInhomArgs) -> CliResult {
    let rows = a.rows.unwrap_or(REFERENCE_GRID);
    let cols = a.cols.unwrap_or(REFERENCE_GRID);
    let topology = a.topology.unwrap_or(Topology::Six);
    let runs = a.runs.unwrap_or(REFERENCE_INHOM_RUNS);
    let probability = |v: Option<f64>, d: f64, name: &str| match v {
        Some(v) => Ok(v),
        None if a.paper_defaults => Ok(d),
        None => Err(usage(format!(
            "--{name} is required without --paper-defaults"
        ))),
    };
    let p_in = probability(a.p_in, REFERENCE_P_IN, "p-in")?;
    let p_out = probability(a.p_out, REFERENCE_P_OUT, "p-out")?;
    let lattice = Lattice::new(rows, cols, topology).map_err(|e| usage(e.to_string()))?;
    let subgrid = resolve_subgrid(&lattice, &a.subgrid, a.paper_defaults)?;

    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let estimate = estimate_cdf_inhomogeneous(&lattice, &subgrid, p_in, p_out, runs, a.seed)?;
    let rect = subgrid.rect().expect("built from a rectangle");
    let tag = format!(
        "inhom_r{}_{}_{}x{}_pin{p_in:?}_pout{p_out:?}",
        rect.subgrid_top, rect.subgrid_left, rect.subgrid_height, rect.subgrid_width
    );
    save_estimate(&estimate, &distribution_path(&a.out_dir, &lattice, &tag))
}

fn cmd_detect(a: DetectArgs) -> CliResult {
    let null = CdfEstimate::load(&a.null)
        .with_context(|| format!("loading null distribution {}", a.null.display()))?;
    let null = NullDistribution::new(null);
    let image = load_binary(&a.input, &a.threshold)?;
    let lattice = Lattice::new(image.rows(), image.cols(), null.meta().topology)?;
    let result = detect(&image, &lattice, &null, a.alpha)
        .with_context(|| format!("testing {}", a.input.display()))?;
    emit_json(&result, a.output.as_deref())
}

fn cmd_power(a: PowerArgs) -> CliResult {
    if a.p_in < a.p_out {
        return Err(usage("--p-in must be at least --p-out"));
    }
    let lattice = Lattice::new(a.rows, a.cols, a.topology).map_err(|e| usage(e.to_string()))?;
    let subgrid = resolve_subgrid(&lattice, &a.subgrid, true)?;
    let estimate = power_estimate(&lattice, &subgrid, a.p_in, a.p_out, a.alpha, a.runs, a.seed)?;
    if estimate.never_rejects {
        eprintln!(
            "warning: no cluster size is significant at alpha = {}; the test never rejects",
            a.alpha
        );
    }
    emit_json(&estimate, None)
}
