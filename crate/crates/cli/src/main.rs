//! `refknn`: generate point sets, cluster them on a refined k-nn graph,
//! score labelings and run the benchmark suites.

mod bench;
mod cluster;
mod svg;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use refknn::dataset::{detect_label_column, parse_labels, write_csv};
use refknn::metrics::score;
use refknn::spectral::{ClusterConfig, ClusterCount, GapRule};
use refknn::GeneratorSpec;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "refknn",
    version,
    about = "Spectral clustering on a refined k-nearest-neighbor graph"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic point set as CSV.
    Generate(GenerateArgs),
    /// Cluster a CSV file or a generated point set.
    Cluster(cluster::ClusterArgs),
    /// Score a predicted labeling against ground truth.
    Eval(EvalArgs),
    /// Run a benchmark suite and write summary tables and charts.
    Bench(bench::BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Shape name (rings, lines, blobs, sparse_blobs) or a full spec such as
    /// `rings:n=300,300;r=1,3`.
    shape: String,
    /// Point counts (rings: per ring, lines/blobs: per class, sparse_blobs: per blob).
    #[arg(long)]
    n: Option<String>,
    /// Radii (rings, sparse_blobs).
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    jitter: Option<String>,
    /// Number of lines.
    #[arg(long)]
    count: Option<String>,
    #[arg(long)]
    length: Option<String>,
    #[arg(long)]
    spacing: Option<String>,
    /// Blob centers, e.g. `(0,0)(10,0)`.
    #[arg(long)]
    centers: Option<String>,
    #[arg(long)]
    spread: Option<String>,
    /// Fraction of uniform noise points to append.
    #[arg(long)]
    noise: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    truth: PathBuf,
    pred: PathBuf,
    /// Label column of the truth file; defaults to a `label`/`class` header
    /// column, else column 0.
    #[arg(long)]
    truth_column: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pred_column: usize,
    /// Also write the scores to this JSON file.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GapRuleArg {
    NextValue,
    MeanShift,
}

/// Pipeline parameters shared by `cluster` and `bench`.
#[derive(Args, Clone, Debug)]
pub struct PipelineArgs {
    /// Neighbors per point in the initial table; default min(N-1, max(3*baseline_n, 30)).
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Size of the baseline neighbor distribution.
    #[arg(long, default_value_t = 7)]
    pub baseline_n: usize,
    /// Neighbor rank used as the local scale.
    #[arg(long, default_value_t = 7)]
    pub scale_k: usize,
    /// Number of clusters or `auto`.
    #[arg(long = "c", default_value = "auto", value_parser = parse_count)]
    pub c: ClusterCount,
    /// Eigenpairs to compute; default min(N, 25).
    #[arg(long)]
    pub lambda_max: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    pub row_normalize: OnOff,
    #[arg(long, value_enum, default_value_t = GapRuleArg::NextValue)]
    pub gap_rule: GapRuleArg,
    /// k-means restarts per candidate embedding.
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
}

fn parse_count(s: &str) -> Result<ClusterCount, String> {
    s.parse().map_err(|e: refknn::Error| e.to_string())
}

impl PipelineArgs {
    pub fn config(&self, c: ClusterCount, seed: u64) -> ClusterConfig {
        let mut cfg = ClusterConfig {
            k_max: self.k_max,
            baseline_n: self.baseline_n,
            scale_k: self.scale_k,
            c,
            lambda_max: self.lambda_max,
            seed,
            row_normalize: self.row_normalize == OnOff::On,
            gap_rule: match self.gap_rule {
                GapRuleArg::NextValue => GapRule::NextValue,
                GapRuleArg::MeanShift => GapRule::MeanShift,
            },
            ..ClusterConfig::default()
        };
        cfg.kmeans.restarts = self.restarts;
        cfg
    }
}

/// A failure reported as `{"error": {"kind", "message"}}` on stderr.
#[derive(Debug, Serialize)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<refknn::Error> for Failure {
    fn from(e: refknn::Error) -> Self {
        Self {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self {
            kind: "serialization",
            message: e.to_string(),
        }
    }
}

pub fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        kind: "io",
        message: format!("{}: {e}", path.display()),
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| io_failure(path, e))
}

pub fn create_dir(path: &Path) -> Result<(), Failure> {
    fs::create_dir_all(path).map_err(|e| io_failure(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn generator_spec(args: &GenerateArgs) -> Result<GeneratorSpec, Failure> {
    let mut text = args.shape.clone();
    let flags = [
        ("n", &args.n),
        ("r", &args.r),
        ("jitter", &args.jitter),
        ("count", &args.count),
        ("length", &args.length),
        ("spacing", &args.spacing),
        ("centers", &args.centers),
        ("spread", &args.spread),
        ("noise", &args.noise),
    ];
    let mut sep = if text.contains(':') { ";" } else { ":" };
    for (key, value) in flags {
        if let Some(v) = value {
            text.push_str(&format!("{sep}{key}={v}"));
            sep = ";";
        }
    }
    Ok(text.parse::<GeneratorSpec>()?)
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), Failure> {
    let spec = generator_spec(args)?;
    let ps = spec.generate(args.seed)?;
    let mut bytes = Vec::new();
    write_csv(&ps, &mut bytes).expect("writing to memory");
    match &args.out {
        Some(path) => {
            write_file(path, &bytes)?;
            eprintln!("wrote {} points ({spec}) to {}", ps.len(), path.display());
        }
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| io_failure(Path::new("<stdout>"), e))?,
    }
    Ok(())
}

#[derive(Serialize)]
struct EvalOutput {
    n: usize,
    acc: f64,
    ari: f64,
    nmi: f64,
}

fn cmd_eval(args: &EvalArgs) -> Result<(), Failure> {
    let truth_bytes = read_file(&args.truth)?;
    let column = args
        .truth_column
        .or_else(|| detect_label_column(&truth_bytes))
        .unwrap_or(0);
    let truth = parse_labels(&truth_bytes, column)?;
    let pred = parse_labels(&read_file(&args.pred)?, args.pred_column)?;
    let s = score(&truth, &pred)?;
    let out = EvalOutput {
        n: truth.len(),
        acc: s.acc,
        ari: s.ari,
        nmi: s.nmi,
    };
    let bytes = to_json(&out)?;
    std::io::stdout()
        .write_all(&bytes)
        .map_err(|e| io_failure(Path::new("<stdout>"), e))?;
    if let Some(path) = &args.out {
        write_file(path, &bytes)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Cluster(a) => cluster::run(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Bench(a) => bench::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let body = serde_json::json!({ "error": f });
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
