//! Cluster-count detection from the eigenvalue spectrum, the embedding
//! sweep and selection by inter-cluster weight.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::affinity::{build_affinity, local_scales, normalized_operator, regularize_scales, AffinityMatrix};
use crate::eigen::{decompose_with, EigenOptions, EigenSystem, DEFAULT_LAMBDA_MAX};
use crate::kmeans::{kmeans, KMeansOptions};
use crate::knn_graph::{
    build_neighbor_table, default_k_max, mutual_filter, refine_edges, GraphSummary, RefinedGraph, DEFAULT_BASELINE_N,
};
use crate::metrics::{score, Scores};
use crate::rng::stream;
use crate::{affinity::DEFAULT_SCALE_K, Error, PointSet, Result};

/// Slack added to the gap threshold so that eigenvalues equal up to
/// rounding never count as a jump.
pub const GAP_TOL: f64 = 1e-8;

/// Which inequality marks the gap.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapRule {
    /// Next value above the window's mean + std.
    #[default]
    NextValue,
    /// Window mean after adding the next value above the old mean + std.
    MeanShift,
}

impl FromStr for GapRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "next-value" | "next_value" => Ok(Self::NextValue),
            "mean-shift" | "mean_shift" => Ok(Self::MeanShift),
            _ => Err(Error::param(format!("unknown gap rule {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapScan {
    pub rule: GapRule,
    /// `1 - lambda`, ascending; `gamma[0]` is the first value.
    pub gamma: Vec<f64>,
    /// Window statistics over `gamma_2..gamma_i` for each scanned `i`.
    pub running_mean: Vec<f64>,
    pub running_std: Vec<f64>,
    pub detected_c: usize,
    pub triggered: bool,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Scans `i = 2..lambda_max-1` (1-based) and stops at the first `i` whose
/// successor jumps above the statistics of `gamma_2..gamma_i`. Without a
/// trigger the count falls back to `lambda_max`.
pub fn detect_c(es: &EigenSystem, lambda_max: usize, rule: GapRule) -> Result<GapScan> {
    if es.m() < 4 {
        return Err(Error::param(format!(
            "gap detection needs at least 4 eigenpairs, got {}",
            es.m()
        )));
    }
    if lambda_max < 4 || lambda_max > es.m() {
        return Err(Error::param(format!(
            "lambda_max = {lambda_max} is outside 4..={}",
            es.m()
        )));
    }
    let gamma: Vec<f64> = es.values()[..lambda_max].iter().map(|v| 1.0 - v).collect();
    let mut scan = GapScan {
        rule,
        gamma,
        running_mean: Vec::new(),
        running_std: Vec::new(),
        detected_c: lambda_max,
        triggered: false,
    };
    for i in 2..lambda_max {
        let window = &scan.gamma[1..i];
        let (mean, std) = mean_std(window);
        scan.running_mean.push(mean);
        scan.running_std.push(std);
        let next = scan.gamma[i];
        let probe = match rule {
            GapRule::NextValue => next,
            GapRule::MeanShift => (mean * window.len() as f64 + next) / (window.len() + 1) as f64,
        };
        if probe > mean + std + GAP_TOL {
            scan.detected_c = i;
            scan.triggered = true;
            break;
        }
    }
    Ok(scan)
}

/// Rows of `[v_2 .. v_i]`, row-major with `i - 1` columns. Row
/// normalization leaves all-zero rows at the origin.
pub fn build_embedding(es: &EigenSystem, i: usize, row_normalize: bool) -> Result<Vec<f64>> {
    if i < 2 || i > es.m() {
        return Err(Error::param(format!("embedding v2..v{i} needs 2 <= i <= {}", es.m())));
    }
    let dim = i - 1;
    let v = es.vectors();
    let mut out = Vec::with_capacity(es.n() * dim);
    for r in 0..es.n() {
        let start = out.len();
        out.extend((1..i).map(|c| v[(r, c)]));
        if row_normalize {
            let row = &mut out[start..];
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|x| *x /= norm);
            }
        }
    }
    Ok(out)
}

/// Sum of affinities over undirected edges whose endpoints carry different
/// labels.
pub fn inter_cluster_weight(a: &AffinityMatrix, labels: &[usize]) -> Result<f64> {
    if labels.len() != a.n() {
        return Err(Error::LengthMismatch {
            left: a.n(),
            right: labels.len(),
        });
    }
    Ok(a.matrix()
        .upper()
        .filter(|&(i, j, _)| labels[i] != labels[j])
        .fold(0.0, |acc, (_, _, w)| acc + w))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateLabeling {
    /// The embedding is `v_2..v_{dims_used}`.
    pub dims_used: usize,
    #[serde(skip)]
    pub labels: Vec<usize>,
    pub inter_cluster_weight: f64,
    pub inertia: f64,
    pub kmeans_iterations: usize,
    /// Distinct labels actually used; below `C` when the embedding collapses
    /// groups onto the same point.
    pub clusters: usize,
}

/// Index of the minimal weight among candidates using the most clusters;
/// the earlier (fewer dimensions) wins ties. Merging groups only lowers the
/// cut, so an incomplete partition never beats a complete one.
pub fn select_candidate(candidates: &[CandidateLabeling]) -> Option<usize> {
    let full = candidates.iter().map(|c| c.clusters).max()?;
    let mut best: Option<usize> = None;
    for (k, c) in candidates.iter().enumerate().filter(|(_, c)| c.clusters == full) {
        if best.is_none_or(|b| c.inter_cluster_weight < candidates[b].inter_cluster_weight) {
            best = Some(k);
        }
    }
    best
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClusterCount {
    #[default]
    Auto,
    Fixed(usize),
}

impl fmt::Display for ClusterCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Auto => f.write_str("auto"),
            Self::Fixed(c) => write!(f, "{c}"),
        }
    }
}

impl FromStr for ClusterCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        match s.parse::<usize>() {
            Ok(c) if c >= 1 => Ok(Self::Fixed(c)),
            _ => Err(Error::param(format!(
                "cluster count must be \"auto\" or a positive integer, got {s:?}"
            ))),
        }
    }
}

impl Serialize for ClusterCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Auto => s.serialize_str("auto"),
            Self::Fixed(c) => s.serialize_u64(*c as u64),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterConfig {
    /// `None` uses [`default_k_max`].
    pub k_max: Option<usize>,
    pub baseline_n: usize,
    pub scale_k: usize,
    pub c: ClusterCount,
    /// `None` uses `min(N, 25)`.
    pub lambda_max: Option<usize>,
    pub seed: u64,
    pub row_normalize: bool,
    pub gap_rule: GapRule,
    pub kmeans: KMeansOptions,
    pub eigen: EigenOptions,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            k_max: None,
            baseline_n: DEFAULT_BASELINE_N,
            scale_k: DEFAULT_SCALE_K,
            c: ClusterCount::Auto,
            lambda_max: None,
            seed: 0,
            row_normalize: true,
            gap_rule: GapRule::NextValue,
            kmeans: KMeansOptions::default(),
            eigen: EigenOptions::default(),
        }
    }
}

/// Configuration as actually used, defaults resolved.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub k_max: usize,
    pub baseline_n: usize,
    pub scale_k: usize,
    pub c: ClusterCount,
    pub lambda_max: usize,
    pub seed: u64,
    pub row_normalize: bool,
    pub gap_rule: GapRule,
    pub kmeans_restarts: usize,
    pub kmeans_max_iter: usize,
    pub kmeans_tol: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub neighbors_s: f64,
    pub graph_s: f64,
    pub affinity_s: f64,
    pub eigen_s: f64,
    pub kmeans_s: f64,
    pub total_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusteringReport {
    pub dataset: String,
    pub n: usize,
    pub dim: usize,
    pub config: ConfigEcho,
    /// Cluster count used for the final labeling.
    pub c: usize,
    pub c_detected: bool,
    pub gap: Option<GapScan>,
    pub eigenvalues: Vec<f64>,
    pub candidates: Vec<CandidateLabeling>,
    /// `dims_used` of the selected candidate.
    pub selected: Option<usize>,
    pub labels: Vec<usize>,
    pub e_percent: f64,
    pub graph: GraphSummary,
    pub isolated: Vec<usize>,
    pub degenerate_scales: Vec<usize>,
    pub warnings: Vec<String>,
    /// Against all ground-truth labels, noise class included.
    pub metrics: Option<Scores>,
    /// Against ground truth restricted to points outside the noise class.
    pub structure_metrics: Option<Scores>,
    pub timings: Timings,
}

/// Everything a run produces, for callers that need more than the report.
#[derive(Clone, Debug)]
pub struct ClusterRun {
    pub report: ClusteringReport,
    pub graph: RefinedGraph,
    pub affinity: AffinityMatrix,
    pub eigen: EigenSystem,
}

pub fn cluster(ps: &PointSet, config: &ClusterConfig) -> Result<ClusteringReport> {
    cluster_run(ps, config).map(|r| r.report)
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

pub fn cluster_run(ps: &PointSet, config: &ClusterConfig) -> Result<ClusterRun> {
    let n = ps.len();
    if n < 4 {
        return Err(Error::param(format!("clustering needs at least 4 points, got {n}")));
    }
    let k_max = config.k_max.unwrap_or_else(|| default_k_max(n, config.baseline_n));
    let lambda_max = config.lambda_max.unwrap_or(DEFAULT_LAMBDA_MAX.min(n));
    if lambda_max < 2 || lambda_max > n {
        return Err(Error::param(format!("lambda_max = {lambda_max} is outside 2..={n}")));
    }
    if let ClusterCount::Fixed(c) = config.c {
        if c > n {
            return Err(Error::param(format!("C = {c} exceeds the {n} points")));
        }
    }
    if config.c == ClusterCount::Auto && lambda_max < 4 {
        return Err(Error::param("automatic C needs lambda_max >= 4"));
    }
    let echo = ConfigEcho {
        k_max,
        baseline_n: config.baseline_n,
        scale_k: config.scale_k,
        c: config.c,
        lambda_max,
        seed: config.seed,
        row_normalize: config.row_normalize,
        gap_rule: config.gap_rule,
        kmeans_restarts: config.kmeans.restarts,
        kmeans_max_iter: config.kmeans.max_iter,
        kmeans_tol: config.kmeans.tol,
    };
    let mut timings = Timings::default();
    let mut warnings = Vec::new();
    let start = Instant::now();

    let t = Instant::now();
    let table = build_neighbor_table(ps, k_max)?;
    timings.neighbors_s = secs(t);

    let t = Instant::now();
    let graph = mutual_filter(&refine_edges(&table, config.baseline_n)?);
    timings.graph_s = secs(t);

    let t = Instant::now();
    let mut scales = local_scales(&table, config.scale_k)?;
    let degenerate_scales = regularize_scales(&table, &mut scales);
    if !degenerate_scales.is_empty() {
        warnings.push(format!(
            "{} points had a zero local scale (coincident neighbors) and were regularized",
            degenerate_scales.len()
        ));
    }
    let affinity = build_affinity(&graph, &scales)?;
    let op = normalized_operator(&affinity);
    timings.affinity_s = secs(t);

    let t = Instant::now();
    let fixed = match config.c {
        ClusterCount::Fixed(c) => c,
        ClusterCount::Auto => 0,
    };
    let m = lambda_max.max(fixed).min(n);
    let eigen = decompose_with(&op, m, &config.eigen)?;
    timings.eigen_s = secs(t);

    let gap = if lambda_max >= 4 {
        Some(detect_c(&eigen, lambda_max, config.gap_rule)?)
    } else {
        None
    };
    let graph_summary = GraphSummary::of(&graph)?;
    let (c, c_detected) = match config.c {
        ClusterCount::Fixed(c) => (c, false),
        ClusterCount::Auto => {
            let scan = gap.as_ref().expect("scan runs whenever C is automatic");
            if !scan.triggered {
                warnings.push(format!(
                    "no eigengap found among the first {lambda_max} eigenvalues; C set to {lambda_max} (low confidence)"
                ));
            }
            let nontrivial = graph_summary.components - graph_summary.isolated;
            if nontrivial == 1 {
                warnings.push("refined graph is a single connected component; detected C is low confidence".into());
            }
            (scan.detected_c, true)
        }
    };

    let t = Instant::now();
    let dims: Vec<usize> = match c {
        1 => Vec::new(),
        2 => vec![2],
        _ => (3..=c).collect(),
    };
    let candidates: Vec<CandidateLabeling> = dims
        .par_iter()
        .map(|&i| -> Result<CandidateLabeling> {
            let emb = build_embedding(&eigen, i, config.row_normalize)?;
            let opts = KMeansOptions {
                stream: stream::KMEANS_BASE + ((i as u64) << 16),
                ..config.kmeans
            };
            let km = kmeans(&emb, i - 1, c, config.seed, &opts)?;
            let mut used = km.labels.clone();
            used.sort_unstable();
            used.dedup();
            Ok(CandidateLabeling {
                dims_used: i,
                inter_cluster_weight: inter_cluster_weight(&affinity, &km.labels)?,
                labels: km.labels,
                inertia: km.inertia,
                kmeans_iterations: km.iterations,
                clusters: used.len(),
            })
        })
        .collect::<Result<_>>()?;
    timings.kmeans_s = secs(t);

    let selected = select_candidate(&candidates);
    let labels = match selected {
        Some(k) => candidates[k].labels.clone(),
        None => {
            warnings.push("C = 1: every point is labeled 0".into());
            vec![0; n]
        }
    };

    let (metrics, structure_metrics) = match ps.labels() {
        Some(truth) => {
            let all = score(truth, &labels)?;
            let structure = match ps.noise_label() {
                Some(noise) => {
                    let (t, l): (Vec<usize>, Vec<usize>) = truth
                        .iter()
                        .zip(&labels)
                        .filter(|(t, _)| **t != noise)
                        .map(|(t, l)| (*t, *l))
                        .unzip();
                    if t.is_empty() {
                        None
                    } else {
                        Some(score(&t, &l)?)
                    }
                }
                None => None,
            };
            (Some(all), structure)
        }
        None => (None, None),
    };
    timings.total_s = secs(start);

    let report = ClusteringReport {
        dataset: ps.name().to_string(),
        n,
        dim: ps.dim(),
        config: echo,
        c,
        c_detected,
        gap,
        eigenvalues: eigen.values().to_vec(),
        selected: selected.map(|k| candidates[k].dims_used),
        candidates,
        labels,
        e_percent: graph_summary.e_percent,
        isolated: graph.isolated(),
        graph: graph_summary,
        degenerate_scales,
        warnings,
        metrics,
        structure_metrics,
        timings,
    };
    Ok(ClusterRun {
        report,
        graph,
        affinity,
        eigen,
    })
}
