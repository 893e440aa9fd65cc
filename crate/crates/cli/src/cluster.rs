use std::path::PathBuf;

use clap::Args;
use refknn::dataset::{detect_label_column, parse_csv, write_labels};
use refknn::spectral::cluster;
use refknn::{GeneratorSpec, PointSet};
use serde::Serialize;

use crate::{create_dir, read_file, svg, to_json, write_file, Failure, PipelineArgs};

#[derive(Args)]
pub struct ClusterArgs {
    /// Input CSV; same as `--input`.
    #[arg(conflicts_with_all = ["input", "generate"])]
    path: Option<PathBuf>,
    #[arg(long, conflicts_with = "generate")]
    input: Option<PathBuf>,
    /// Generator spec instead of a file, e.g. `rings` or `lines:noise=0.3`.
    /// The point set is drawn with `--seed`.
    #[arg(long)]
    generate: Option<String>,
    /// Ground-truth column; defaults to a `label`/`class` header column.
    #[arg(long)]
    label_column: Option<usize>,
    /// Ground-truth id of noise points, scored separately.
    #[arg(long)]
    noise_label: Option<usize>,
    /// Scale every feature to zero mean and unit variance first.
    #[arg(long)]
    standardize: bool,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, default_value = "refknn-out")]
    out_dir: PathBuf,
}

/// Everything that identifies a run, echoed into `report.json`.
#[derive(Serialize)]
struct RunEcho {
    input: Option<String>,
    generate: Option<String>,
    label_column: Option<usize>,
    noise_label: Option<usize>,
    standardize: bool,
    out_dir: String,
}

fn load(args: &ClusterArgs) -> Result<(PointSet, Option<usize>), Failure> {
    if let Some(spec) = &args.generate {
        let spec: GeneratorSpec = spec.parse()?;
        return Ok((spec.generate(args.pipeline.seed)?, None));
    }
    let path = args.path.as_ref().or(args.input.as_ref()).ok_or_else(|| Failure {
        kind: "usage",
        message: "give an input CSV or --generate".into(),
    })?;
    let bytes = read_file(path)?;
    let column = args.label_column.or_else(|| detect_label_column(&bytes));
    let name = path
        .file_stem()
        .map_or("points".into(), |s| s.to_string_lossy().into_owned());
    Ok((parse_csv(&bytes, column)?.with_name(name), column))
}

pub fn run(args: &ClusterArgs) -> Result<(), Failure> {
    let (mut ps, label_column) = load(args)?;
    if let Some(noise) = args.noise_label {
        ps = ps.with_noise_class(noise)?;
    }
    if args.standardize {
        ps = ps.standardized();
    }
    let config = args.pipeline.config(args.pipeline.c, args.pipeline.seed);
    let report = cluster(&ps, &config)?;

    let echo = RunEcho {
        input: args
            .path
            .as_ref()
            .or(args.input.as_ref())
            .map(|p| p.display().to_string()),
        generate: args.generate.clone(),
        label_column,
        noise_label: args.noise_label.or(ps.noise_label()),
        standardize: args.standardize,
        out_dir: args.out_dir.display().to_string(),
    };
    let mut json = serde_json::to_value(&report)?;
    json.as_object_mut()
        .expect("report serializes to an object")
        .insert("run".into(), serde_json::to_value(&echo)?);

    create_dir(&args.out_dir)?;
    write_file(&args.out_dir.join("report.json"), &to_json(&json)?)?;
    let mut labels = Vec::new();
    write_labels(&report.labels, &mut labels).expect("writing to memory");
    write_file(&args.out_dir.join("labels.csv"), &labels)?;
    if ps.dim() == 2 {
        let points: Vec<[f64; 2]> = ps.points().map(|p| [p[0], p[1]]).collect();
        let title = format!("{}: C = {}, E% = {:.2}", report.dataset, report.c, report.e_percent);
        let desc = serde_json::to_string(&report.config)?;
        let plot = svg::scatter(&points, &report.labels, &report.isolated, &title, &desc);
        write_file(&args.out_dir.join("scatter.svg"), plot.as_bytes())?;
    }

    let mut line = format!(
        "{}: N = {}, C = {}{}, E% = {:.3}, isolated = {}",
        report.dataset,
        report.n,
        report.c,
        if report.c_detected { " (detected)" } else { "" },
        report.e_percent,
        report.isolated.len()
    );
    if let Some(m) = &report.metrics {
        line.push_str(&format!(", acc = {:.4}, ari = {:.4}, nmi = {:.4}", m.acc, m.ari, m.nmi));
    }
    if let Some(m) = &report.structure_metrics {
        line.push_str(&format!(", structure ari = {:.4}", m.ari));
    }
    println!("{line}");
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}
