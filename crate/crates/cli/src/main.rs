use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use frink_core::balls::{
    annuli, bands_to_dot, delta_ball, distance_ball, euclidean_distances, frink_annuli, jaccard,
    AnnulusBands, BallResult, Metric,
};
use frink_core::diffusion::{diffusion_distance_matrix, laplacian_spectrum, DEFAULT_EIGEN_TOL};
use frink_core::frink::{
    compute_lambda_sequence_with, delta_matrix, frink_chain_metric, verify_all, DiagonalBand,
    InverseVariant, LambdaOptions, LambdaSequence,
};
use frink_core::io::{matrix_to_csv_string, to_sorted_json};
use frink_core::kernel::{newtonian_kernel, KernelFormat};
use frink_core::{AffinityMatrix, Error, SquareMatrix};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "frink", version, about = "Metrics on affinity-weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a Newtonian kernel `|i-j|^-alpha` with a constant diagonal.
    Gen(GenArgs),
    /// Compute the threshold sequence of a kernel.
    Lambda(LambdaArgs),
    /// Dyadic quasi-metric as a CSV matrix.
    Delta(DeltaArgs),
    /// Chain pseudo-metric as a CSV matrix.
    Chain(ChainArgs),
    /// Diffusion distance at time t as a CSV matrix.
    Diffusion(DiffusionArgs),
    /// Colour vertices by annulus around a center.
    Balls(BallsArgs),
    /// Check every invariant of the construction; exit 1 on failure.
    Verify(VerifyArgs),
    /// Jaccard overlap of balls under different metrics.
    Compare(CompareArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    diag: f64,
    /// Output path; `.json` selects JSON, anything else CSV. Stdout if absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SequenceArgs {
    /// Kernel file, CSV or `.json`.
    #[arg(short, long)]
    input: PathBuf,
    /// Number of main diagonals the starting threshold is taken over.
    #[arg(long, default_value_t = 3, value_parser = parse_band)]
    diagonal_band: u8,
    #[arg(long)]
    lambda0_override: Option<f64>,
}

#[derive(Args)]
struct LambdaArgs {
    #[command(flatten)]
    seq: SequenceArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DeltaArgs {
    #[command(flatten)]
    seq: SequenceArgs,
    /// Precomputed sequence JSON; computed from the kernel if absent.
    #[arg(long)]
    lambda: Option<PathBuf>,
    #[arg(long, default_value = "script")]
    variant: InverseVariant,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ChainArgs {
    #[command(flatten)]
    seq: SequenceArgs,
    #[arg(long)]
    lambda: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DiffusionArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long)]
    t: f64,
    /// Keep only this many eigenpairs, those with the largest eigenvalues.
    #[arg(long)]
    components: Option<usize>,
    /// Also write the eigendecomposition as JSON.
    #[arg(long)]
    decomposition: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BallsArgs {
    #[command(flatten)]
    seq: SequenceArgs,
    #[arg(long)]
    lambda: Option<PathBuf>,
    #[arg(long)]
    center: usize,
    #[arg(long, default_value = "F")]
    metric: Metric,
    /// Ascending annulus radii for the D and E metrics, comma separated.
    #[arg(long, value_delimiter = ',')]
    radii: Vec<f64>,
    /// Diffusion time for the D metric.
    #[arg(long)]
    t: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    seq: SequenceArgs,
    #[arg(long)]
    lambda: Option<PathBuf>,
    #[arg(long, default_value = "script")]
    variant: InverseVariant,
    /// Write the full report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    seq: SequenceArgs,
    #[arg(long)]
    lambda: Option<PathBuf>,
    #[arg(long)]
    center: usize,
    #[arg(long)]
    radius_f: Option<f64>,
    #[arg(long)]
    radius_d: Option<f64>,
    #[arg(long)]
    radius_e: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value = "script")]
    variant: InverseVariant,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_band(s: &str) -> Result<u8, String> {
    match s {
        "3" => Ok(3),
        "5" => Ok(5),
        _ => Err(format!("expected 3 or 5, got `{s}`")),
    }
}

/// Failure of a command, carrying its exit code.
enum Failure {
    Core(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<(), Failure>;

fn bad_param(msg: impl Into<String>) -> Failure {
    Failure::Core(Error::InvalidParameter(msg.into()))
}

fn emit(path: Option<&Path>, contents: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, contents)?,
        None => io::stdout().lock().write_all(contents.as_bytes())?,
    }
    Ok(())
}

fn load_kernel(path: &Path) -> Result<AffinityMatrix, Error> {
    AffinityMatrix::load_auto(path)
}

fn load_lambda(path: &Path) -> Result<LambdaSequence, Error> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn sequence_for(kernel: &AffinityMatrix, seq: &SequenceArgs, lambda: Option<&Path>) -> Result<LambdaSequence, Error> {
    if let Some(path) = lambda {
        return load_lambda(path);
    }
    let options = LambdaOptions {
        diagonal_band: DiagonalBand::try_from(seq.diagonal_band)?,
        lambda0_override: seq.lambda0_override,
    };
    compute_lambda_sequence_with(kernel, &options)
}

fn matrix_out(path: Option<&Path>, m: &SquareMatrix) -> CmdResult {
    emit(path, &matrix_to_csv_string(m))?;
    Ok(())
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let kernel = newtonian_kernel(a.n, a.alpha, a.diag)?;
    match a.output.as_deref() {
        Some(p) => kernel.save(p, KernelFormat::from_path(p))?,
        None => emit(None, &kernel.to_csv_string())?,
    }
    Ok(())
}

fn cmd_lambda(a: LambdaArgs) -> CmdResult {
    let kernel = load_kernel(&a.seq.input)?;
    let lambda = sequence_for(&kernel, &a.seq, None)?;
    emit(a.output.as_deref(), &to_sorted_json(&lambda)?)?;
    Ok(())
}

fn cmd_delta(a: DeltaArgs) -> CmdResult {
    let kernel = load_kernel(&a.seq.input)?;
    let lambda = sequence_for(&kernel, &a.seq, a.lambda.as_deref())?;
    matrix_out(a.output.as_deref(), delta_matrix(&kernel, &lambda, a.variant).values())
}

fn cmd_chain(a: ChainArgs) -> CmdResult {
    let kernel = load_kernel(&a.seq.input)?;
    let lambda = sequence_for(&kernel, &a.seq, a.lambda.as_deref())?;
    matrix_out(a.output.as_deref(), frink_chain_metric(&kernel, &lambda).values())
}

fn diffusion_distances(kernel: &AffinityMatrix, t: f64, components: Option<usize>) -> Result<SquareMatrix, Error> {
    let mut decomp = laplacian_spectrum(kernel, DEFAULT_EIGEN_TOL)?;
    if let Some(c) = components {
        decomp = decomp.truncated(c);
    }
    diffusion_distance_matrix(&decomp, t)
}

fn cmd_diffusion(a: DiffusionArgs) -> CmdResult {
    let kernel = load_kernel(&a.input)?;
    let mut decomp = laplacian_spectrum(&kernel, DEFAULT_EIGEN_TOL)?;
    if let Some(c) = a.components {
        if c == 0 {
            return Err(bad_param("--components must be at least 1"));
        }
        decomp = decomp.truncated(c);
    }
    if let Some(p) = a.decomposition.as_deref() {
        emit(Some(p), &to_sorted_json(&decomp)?)?;
    }
    matrix_out(a.output.as_deref(), &diffusion_distance_matrix(&decomp, a.t)?)
}

fn require_t(t: Option<f64>) -> Result<f64, Failure> {
    t.ok_or_else(|| bad_param("the D metric needs --t"))
}

fn cmd_balls(a: BallsArgs) -> CmdResult {
    let kernel = load_kernel(&a.seq.input)?;
    let lambda = sequence_for(&kernel, &a.seq, a.lambda.as_deref())?;
    let bands: AnnulusBands = match a.metric {
        Metric::F => {
            if !a.radii.is_empty() {
                return Err(bad_param("the F metric takes its radii from the threshold sequence"));
            }
            frink_annuli(&kernel, &lambda, a.center)?
        }
        Metric::D => {
            let d = diffusion_distances(&kernel, require_t(a.t)?, None)?;
            if a.center >= kernel.n() {
                return Err(Error::Domain(format!("center {} out of range", a.center)).into());
            }
            annuli(d.row(a.center), a.center, &a.radii)?
        }
        Metric::E => annuli(&euclidean_distances(kernel.n(), a.center)?, a.center, &a.radii)?,
    };
    emit(a.output.as_deref(), &to_sorted_json(&bands)?)?;
    if let Some(p) = a.dot.as_deref() {
        let width = DiagonalBand::try_from(a.seq.diagonal_band)?.half_width() + 1;
        emit(Some(p), &bands_to_dot(&bands, &kernel, kernel.band_min(width)))?;
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let kernel = load_kernel(&a.seq.input)?;
    let lambda = sequence_for(&kernel, &a.seq, a.lambda.as_deref())?;
    let report = verify_all(&kernel, &lambda, a.variant)?;
    if let Some(p) = a.report.as_deref() {
        emit(Some(p), &to_sorted_json(&report)?)?;
    }
    if report.passed {
        eprintln!("verification passed");
        Ok(())
    } else {
        eprintln!("verification failed");
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct Comparison {
    center: usize,
    balls: BTreeMap<String, BallResult>,
    /// Keyed `"A-B"` for each pair of metrics with a configured radius.
    jaccard: BTreeMap<String, f64>,
}

fn cmd_compare(a: CompareArgs) -> CmdResult {
    let kernel = load_kernel(&a.seq.input)?;
    let n = kernel.n();
    let mut balls = BTreeMap::new();
    if let Some(r) = a.radius_f {
        let lambda = sequence_for(&kernel, &a.seq, a.lambda.as_deref())?;
        balls.insert(Metric::F, delta_ball(&kernel, &lambda, a.center, r, a.variant)?);
    }
    if let Some(r) = a.radius_d {
        let d = diffusion_distances(&kernel, require_t(a.t)?, None)?;
        if a.center >= n {
            return Err(Error::Domain(format!("center {} out of range", a.center)).into());
        }
        balls.insert(Metric::D, distance_ball(d.row(a.center), a.center, r, Metric::D)?);
    }
    if let Some(r) = a.radius_e {
        let e = euclidean_distances(n, a.center)?;
        balls.insert(Metric::E, distance_ball(&e, a.center, r, Metric::E)?);
    }
    if balls.is_empty() {
        return Err(bad_param("give at least one of --radius-f, --radius-d, --radius-e"));
    }
    let entries: Vec<_> = balls.iter().collect();
    let mut overlaps = BTreeMap::new();
    for (i, (ma, ba)) in entries.iter().enumerate() {
        for (mb, bb) in &entries[i..] {
            overlaps.insert(format!("{ma}-{mb}"), jaccard(&ba.members, &bb.members));
        }
    }
    let out = Comparison {
        center: a.center,
        balls: balls.into_iter().map(|(m, b)| (m.to_string(), b)).collect(),
        jaccard: overlaps,
    };
    emit(a.output.as_deref(), &to_sorted_json(&out)?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Lambda(a) => cmd_lambda(a),
        Command::Delta(a) => cmd_delta(a),
        Command::Chain(a) => cmd_chain(a),
        Command::Diffusion(a) => cmd_diffusion(a),
        Command::Balls(a) => cmd_balls(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() { EXIT_NUMERIC } else { EXIT_BAD_INPUT })
        }
    }
}
