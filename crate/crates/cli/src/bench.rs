use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use refknn::spectral::{cluster, ClusterCount};
use refknn::GeneratorSpec;
use serde::Serialize;

use crate::svg::{line_chart, Series};
use crate::{create_dir, to_json, write_file, Failure, PipelineArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Clean synthetic shapes, C given and detected.
    Synthetic,
    /// Lines and rings with 10% to 50% uniform noise, C given.
    Noise,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 20)]
    repeats: usize,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, default_value = "bench-out")]
    out_dir: PathBuf,
}

/// One dataset/noise/mode cell of a suite.
#[derive(Clone, Debug)]
struct Job {
    dataset: &'static str,
    spec: GeneratorSpec,
    noise: f64,
    given: bool,
}

fn jobs(suite: Suite) -> Result<Vec<Job>, Failure> {
    let mut out = Vec::new();
    match suite {
        Suite::Synthetic => {
            for dataset in ["rings", "lines", "blobs", "sparse_blobs"] {
                for given in [true, false] {
                    out.push(Job {
                        dataset,
                        spec: GeneratorSpec::defaults(dataset)?,
                        noise: 0.0,
                        given,
                    });
                }
            }
        }
        Suite::Noise => {
            for dataset in ["lines", "rings"] {
                for pct in [10, 20, 30, 40, 50] {
                    let mut spec = GeneratorSpec::defaults(dataset)?;
                    spec.noise = Some(pct as f64 / 100.0);
                    out.push(Job {
                        dataset,
                        spec,
                        noise: pct as f64 / 100.0,
                        given: true,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
struct Record {
    dataset: &'static str,
    noise: f64,
    mode: &'static str,
    run: usize,
    seed: u64,
    c: usize,
    acc: f64,
    ari: f64,
    nmi: f64,
    structure_ari: Option<f64>,
    e_percent: f64,
    isolated: usize,
    seconds: f64,
}

fn run_one(job: &Job, args: &BenchArgs, run: usize) -> Result<Record, Failure> {
    let seed = args.pipeline.seed + run as u64;
    let ps = job.spec.generate(seed)?;
    let c = if job.given {
        ClusterCount::Fixed(ps.structure_class_count().unwrap_or(1))
    } else {
        ClusterCount::Auto
    };
    let start = Instant::now();
    let report = cluster(&ps, &args.pipeline.config(c, seed))?;
    let seconds = start.elapsed().as_secs_f64();
    let m = report.metrics.expect("generated point sets carry labels");
    Ok(Record {
        dataset: job.dataset,
        noise: job.noise,
        mode: if job.given { "given" } else { "auto" },
        run,
        seed,
        c: report.c,
        acc: m.acc,
        ari: m.ari,
        nmi: m.nmi,
        structure_ari: report.structure_metrics.map(|s| s.ari),
        e_percent: report.e_percent,
        isolated: report.isolated.len(),
        seconds,
    })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn runs_csv(records: &[Record]) -> String {
    let mut out = String::from("dataset,noise,mode,run,seed,c,acc,ari,nmi,structure_ari,e_percent,isolated\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.dataset,
            r.noise,
            r.mode,
            r.run,
            r.seed,
            r.c,
            r.acc,
            r.ari,
            r.nmi,
            r.structure_ari.map_or(String::new(), |v| v.to_string()),
            r.e_percent,
            r.isolated
        );
    }
    out
}

struct Cell {
    job: Job,
    records: Vec<Record>,
}

fn summary_csv(cells: &[Cell]) -> (String, String) {
    let mut summary = String::from(
        "dataset,noise,mode,runs,acc_mean,acc_std,ari_mean,ari_std,nmi_mean,nmi_std,structure_ari_mean,structure_ari_std,e_percent_mean,e_percent_std\n",
    );
    let mut timing = String::from("dataset,noise,mode,runs,seconds_mean,seconds_std\n");
    for cell in cells {
        let col = |f: fn(&Record) -> f64| mean_std(&cell.records.iter().map(f).collect::<Vec<_>>());
        let (acc, acc_s) = col(|r| r.acc);
        let (ari, ari_s) = col(|r| r.ari);
        let (nmi, nmi_s) = col(|r| r.nmi);
        let (e, e_s) = col(|r| r.e_percent);
        let (t, t_s) = col(|r| r.seconds);
        let structure: Vec<f64> = cell.records.iter().filter_map(|r| r.structure_ari).collect();
        let sari = if structure.is_empty() {
            ",".to_string()
        } else {
            let (m, s) = mean_std(&structure);
            format!("{m:.6},{s:.6}")
        };
        let mode = if cell.job.given { "given" } else { "auto" };
        let _ = writeln!(
            summary,
            "{},{},{},{},{acc:.6},{acc_s:.6},{ari:.6},{ari_s:.6},{nmi:.6},{nmi_s:.6},{sari},{e:.6},{e_s:.6}",
            cell.job.dataset,
            cell.job.noise,
            mode,
            cell.records.len()
        );
        let _ = writeln!(
            timing,
            "{},{},{},{},{t:.6},{t_s:.6}",
            cell.job.dataset,
            cell.job.noise,
            mode,
            cell.records.len()
        );
    }
    (summary, timing)
}

fn charts(suite: Suite, cells: &[Cell], desc: &str) -> Vec<(&'static str, String)> {
    let mean_of = |cell: &Cell, f: &dyn Fn(&Record) -> Option<f64>| {
        mean_std(&cell.records.iter().filter_map(f).collect::<Vec<_>>()).0
    };
    match suite {
        Suite::Noise => {
            let mut series = Vec::new();
            for dataset in ["lines", "rings"] {
                let pts = |f: &dyn Fn(&Record) -> Option<f64>| -> Vec<(f64, f64)> {
                    cells
                        .iter()
                        .filter(|c| c.job.dataset == dataset && !c.records.is_empty())
                        .map(|c| (100.0 * c.job.noise, mean_of(c, f)))
                        .collect()
                };
                series.push(Series {
                    name: format!("{dataset} (structure)"),
                    points: pts(&|r| r.structure_ari),
                });
                series.push(Series {
                    name: format!("{dataset} (all)"),
                    points: pts(&|r| Some(r.ari)),
                });
            }
            vec![(
                "noise_ari.svg",
                line_chart(&series, "ARI vs. noise", "noise %", "mean ARI", desc),
            )]
        }
        Suite::Synthetic => {
            let mut series = Vec::new();
            for (mode, given) in [("C given", true), ("C auto", false)] {
                let points = cells
                    .iter()
                    .filter(|c| c.job.given == given)
                    .enumerate()
                    .filter(|(_, c)| !c.records.is_empty())
                    .map(|(k, c)| ((k + 1) as f64, mean_of(c, &|r| Some(r.ari))))
                    .collect();
                series.push(Series {
                    name: mode.into(),
                    points,
                });
            }
            let names: Vec<&str> = cells.iter().filter(|c| c.job.given).map(|c| c.job.dataset).collect();
            vec![(
                "synthetic_ari.svg",
                line_chart(
                    &series,
                    &format!("ARI per dataset: {}", names.join(", ")),
                    "dataset",
                    "mean ARI",
                    desc,
                ),
            )]
        }
    }
}

#[derive(Serialize)]
struct BenchEcho<'a> {
    suite: Suite,
    repeats: usize,
    seed: u64,
    k_max: Option<usize>,
    baseline_n: usize,
    scale_k: usize,
    lambda_max: Option<usize>,
    row_normalize: crate::OnOff,
    restarts: usize,
    datasets: Vec<String>,
    out_dir: &'a str,
}

pub fn run(args: &BenchArgs) -> Result<(), Failure> {
    if args.repeats == 0 {
        return Err(Failure {
            kind: "invalid_parameter",
            message: "--repeats must be at least 1".into(),
        });
    }
    let jobs = jobs(args.suite)?;
    let out_dir = args.out_dir.display().to_string();
    let echo = BenchEcho {
        suite: args.suite,
        repeats: args.repeats,
        seed: args.pipeline.seed,
        k_max: args.pipeline.k_max,
        baseline_n: args.pipeline.baseline_n,
        scale_k: args.pipeline.scale_k,
        lambda_max: args.pipeline.lambda_max,
        row_normalize: args.pipeline.row_normalize,
        restarts: args.pipeline.restarts,
        datasets: jobs
            .iter()
            .map(|j| format!("{} ({})", j.spec, if j.given { "C given" } else { "C auto" }))
            .collect(),
        out_dir: &out_dir,
    };
    create_dir(&args.out_dir)?;
    let config_json = to_json(&echo)?;
    write_file(&args.out_dir.join("config.json"), &config_json)?;

    let tasks: Vec<(usize, usize)> = (0..jobs.len())
        .flat_map(|j| (0..args.repeats).map(move |r| (j, r)))
        .collect();
    let results: Vec<Result<Record, Failure>> = tasks.par_iter().map(|&(j, r)| run_one(&jobs[j], args, r)).collect();

    let mut cells: Vec<Cell> = jobs
        .iter()
        .map(|job| Cell {
            job: job.clone(),
            records: Vec::new(),
        })
        .collect();
    let mut first_error = None;
    for (&(j, _), res) in tasks.iter().zip(results) {
        match res {
            Ok(rec) => cells[j].records.push(rec),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    let records: Vec<Record> = cells.iter().flat_map(|c| c.records.iter().cloned()).collect();
    let (summary, timing) = summary_csv(&cells);
    write_file(&args.out_dir.join("runs.csv"), runs_csv(&records).as_bytes())?;
    write_file(&args.out_dir.join("summary.csv"), summary.as_bytes())?;
    write_file(&args.out_dir.join("timings.csv"), timing.as_bytes())?;
    let desc = String::from_utf8_lossy(&config_json).into_owned();
    for (name, svg) in charts(args.suite, &cells, &desc) {
        write_file(&args.out_dir.join(name), svg.as_bytes())?;
    }
    if let Some(e) = first_error {
        return Err(e);
    }
    print!("{summary}");
    Ok(())
}
