//! Seeded, budgeted experiment runs over MO-TSPTW instances, per-run
//! metrics, aggregation and CSV/JSON report emission.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metrics::{
    aggregate_runs, bounds_from_union, hypervolume_2d, overall_spread, spacing, Aggregate, Bounds,
};
use crate::oracle::{brute_force_front, MAX_ORACLE_CITIES};
use crate::problem::replay;
use crate::search::{run_nrpa, run_pareto_nrpa, run_random_playouts, SingleObjective};
use crate::tsptw::{MoTsptw, MoTsptwInstance};
use crate::{Error, ObjectiveVector, ParetoArchive, Result, SearchConfig, Solution, RNG_NAME};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    ParetoNrpa,
    /// Classical NRPA on the primary objective.
    Nrpa,
    /// Independent playouts under a uniform policy, without adaptation.
    RandomPlayout,
    /// Exhaustive enumeration; only for small instances.
    Oracle,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ParetoNrpa => "pareto-nrpa",
            Algorithm::Nrpa => "nrpa",
            Algorithm::RandomPlayout => "random-playout",
            Algorithm::Oracle => "oracle",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Algorithm::ParetoNrpa,
            Algorithm::Nrpa,
            Algorithm::RandomPlayout,
            Algorithm::Oracle,
        ]
        .into_iter()
        .find(|a| a.name() == s)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm {s:?}")))
    }
}

/// An instance with the identifier used in reports.
#[derive(Debug, Clone)]
pub struct NamedInstance {
    pub name: String,
    pub instance: MoTsptwInstance,
}

impl NamedInstance {
    /// Loads an instance file; the name is the file stem.
    pub fn load(path: &Path) -> Result<Self> {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Ok(Self {
            name,
            instance: MoTsptwInstance::from_file(path)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub instances: Vec<PathBuf>,
    pub algorithm: Algorithm,
    /// Search parameters; `rng_seed` is replaced by each run's seed.
    pub config: SearchConfig,
    pub n_runs: usize,
    /// Run `i` uses seed `base_seed + i`.
    pub base_seed: u64,
    /// Worker threads; `None` uses rayon's default pool.
    pub threads: Option<usize>,
    pub check_depot_window: bool,
    /// Fixed ideal/maximal vectors for overall spread instead of the
    /// bounds of the valid union.
    pub spread_bounds: Option<(Vec<f64>, Vec<f64>)>,
}

impl ExperimentSpec {
    pub fn new(instances: Vec<PathBuf>, algorithm: Algorithm, config: SearchConfig) -> Self {
        Self {
            instances,
            algorithm,
            config,
            n_runs: 1,
            base_seed: 0,
            threads: None,
            check_depot_window: true,
            spread_bounds: None,
        }
    }

    pub fn seed(&self, run_index: usize) -> u64 {
        self.base_seed.wrapping_add(run_index as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs < 1 {
            return Err(Error::InvalidConfig("n_runs must be >= 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidConfig("threads must be >= 1".into()));
        }
        if let Some((ideal, maximal)) = &self.spread_bounds {
            if ideal.len() != 2 || maximal.len() != 2 {
                return Err(Error::InvalidConfig(
                    "spread bounds need two objectives".into(),
                ));
            }
        }
        self.config.validate()
    }
}

/// One member of a run's final front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontEntry {
    pub objectives: Vec<f64>,
    pub violations: u32,
    pub moves: Vec<usize>,
}

impl From<Solution<usize>> for FrontEntry {
    fn from(s: Solution<usize>) -> Self {
        Self {
            objectives: s.objectives.into_inner(),
            violations: s.violations,
            moves: s.moves,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricBundle {
    pub hypervolume: f64,
    pub normalized_hypervolume: f64,
    pub overall_spread: f64,
    /// `None` when the run has no violation-free solution.
    pub spacing: Option<f64>,
    /// Mean number of violated windows over the front members.
    pub constraint_violations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub cities: usize,
    pub algorithm: Algorithm,
    pub run_index: usize,
    pub seed: u64,
    pub evaluations: u64,
    /// Informational only.
    pub wall_time_s: f64,
    pub front: Vec<FrontEntry>,
    pub metrics: MetricBundle,
}

/// Search result of one run before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRun {
    pub run_index: usize,
    pub seed: u64,
    pub evaluations: u64,
    pub wall_time_s: f64,
    pub front: Vec<Solution<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizerKind {
    /// Hypervolume of the exact front.
    Oracle,
    /// Hypervolume of the non-dominated union of all runs.
    Union,
    /// No violation-free solution anywhere; every metric is 0.
    None,
}

/// How one instance's runs were normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub instance: String,
    pub kind: NormalizerKind,
    pub reference: Option<Vec<f64>>,
    pub ideal: Option<Vec<f64>>,
    pub maximal: Option<Vec<f64>>,
    pub hv_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub instance: String,
    pub cities: usize,
    pub algorithm: Algorithm,
    pub hv: Aggregate,
    pub os: Aggregate,
    /// `None` when spacing is undefined in every run.
    pub sp: Option<Aggregate>,
    pub cv: Aggregate,
    pub n_runs: usize,
    pub excluded_spacing_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub rng: String,
    pub sigma_divisor: String,
    pub spec: ExperimentSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub metadata: Metadata,
    pub normalizations: Vec<Normalization>,
    pub runs: Vec<RunReport>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentReport {
    /// Copy with every wall-time field zeroed, for byte comparisons.
    pub fn without_wall_time(&self) -> Self {
        let mut r = self.clone();
        for run in &mut r.runs {
            run.wall_time_s = 0.0;
        }
        r
    }
}

/// Loads the instances named by `spec` and runs the experiment.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let instances = spec
        .instances
        .iter()
        .map(|p| NamedInstance::load(p))
        .collect::<Result<Vec<_>>>()?;
    run_loaded(&instances, spec)
}

/// Runs the experiment on already loaded instances; `spec.instances` is
/// only recorded in the metadata.
pub fn run_loaded(instances: &[NamedInstance], spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let tasks: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..spec.n_runs).map(move |r| (i, r)))
        .collect();
    let execute = || {
        tasks
            .par_iter()
            .map(|&(i, r)| run_single(&instances[i].instance, spec, r))
            .collect::<Result<Vec<_>>>()
    };
    let raw = match spec.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(execute)?,
        None => execute()?,
    };

    let mut runs = Vec::with_capacity(raw.len());
    let mut normalizations = Vec::with_capacity(instances.len());
    for (named, chunk) in instances.iter().zip(raw.chunks(spec.n_runs)) {
        let problem =
            MoTsptw::new(named.instance.clone()).with_depot_window(spec.check_depot_window);
        let (norm, reports) = score_instance(&named.name, &problem, spec, chunk)?;
        normalizations.push(norm);
        runs.extend(reports);
    }
    let summary = aggregate_reports(&runs)?;
    Ok(ExperimentReport {
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            rng: RNG_NAME.to_string(),
            sigma_divisor: "n".to_string(),
            spec: spec.clone(),
        },
        normalizations,
        runs,
        summary,
    })
}

/// Executes run `run_index` of `spec` on one instance. Depends only on the
/// instance, the spec and the index, so any run can be reproduced alone.
pub fn run_single(
    instance: &MoTsptwInstance,
    spec: &ExperimentSpec,
    run_index: usize,
) -> Result<RawRun> {
    let problem = MoTsptw::new(instance.clone()).with_depot_window(spec.check_depot_window);
    let seed = spec.seed(run_index);
    let config = SearchConfig {
        rng_seed: seed,
        ..spec.config
    };
    let start = Instant::now();
    let (front, evaluations) = match spec.algorithm {
        Algorithm::ParetoNrpa => {
            let out = run_pareto_nrpa(&problem, &config)?;
            (out.front, out.evaluations)
        }
        Algorithm::RandomPlayout => {
            let out = run_random_playouts(&problem, &config)?;
            (out.front, out.evaluations)
        }
        Algorithm::Nrpa => {
            let out = run_nrpa(&SingleObjective::new(&problem, 0)?, &config)?;
            let front = out
                .front
                .into_iter()
                .map(|s| {
                    let eval = replay(&problem, &s.moves)?;
                    Ok(Solution {
                        moves: s.moves,
                        objectives: eval.objectives,
                        violations: eval.violations,
                        policy_index: 0,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (front, out.evaluations)
        }
        Algorithm::Oracle => {
            let exact = brute_force_front(&problem)?;
            (exact.front, exact.enumerated)
        }
    };
    Ok(RawRun {
        run_index,
        seed,
        evaluations,
        wall_time_s: start.elapsed().as_secs_f64(),
        front,
    })
}

fn objective_vectors(front: &[Solution<usize>]) -> Vec<ObjectiveVector> {
    front.iter().map(|s| s.objectives.clone()).collect()
}

fn valid_vectors(front: &[Solution<usize>]) -> Vec<ObjectiveVector> {
    front
        .iter()
        .filter(|s| s.violations == 0)
        .map(|s| s.objectives.clone())
        .collect()
}

/// Normalizes and scores the runs of one instance.
///
/// The reference point and the ideal/maximal vectors are the bounds of the
/// violation-free solutions over all runs (and the exact front when the
/// instance is small enough to enumerate). The hypervolume normalizer is the
/// exact front's hypervolume when available, otherwise that of the
/// non-dominated union of the runs.
fn score_instance(
    name: &str,
    problem: &MoTsptw,
    spec: &ExperimentSpec,
    raw: &[RawRun],
) -> Result<(Normalization, Vec<RunReport>)> {
    let n = problem.instance().n();
    let exact = if n <= MAX_ORACLE_CITIES {
        Some(brute_force_front(problem)?).filter(|e| e.feasible)
    } else {
        None
    };

    let mut union = ParetoArchive::new();
    for run in raw {
        for s in &run.front {
            if s.violations == 0 {
                union.insert(s.clone())?;
            }
        }
    }
    let exact_points = exact
        .as_ref()
        .map(|e| objective_vectors(&e.front))
        .unwrap_or_default();
    let union_points = union.objective_vectors();
    let bounds = bounds_from_union(exact_points.iter().chain(&union_points).map(|y| (y, 0)))?;

    let norm = match &bounds {
        None => Normalization {
            instance: name.to_string(),
            kind: NormalizerKind::None,
            reference: None,
            ideal: None,
            maximal: None,
            hv_max: 0.0,
        },
        Some(Bounds { reference, ideal }) => {
            let (kind, hv_max) = match &exact {
                Some(_) => (
                    NormalizerKind::Oracle,
                    hypervolume_2d(&exact_points, reference)?,
                ),
                None => (
                    NormalizerKind::Union,
                    hypervolume_2d(&union_points, reference)?,
                ),
            };
            let (ideal, maximal) = spec
                .spread_bounds
                .clone()
                .unwrap_or_else(|| (ideal.clone(), reference.clone()));
            Normalization {
                instance: name.to_string(),
                kind,
                reference: Some(reference.clone()),
                ideal: Some(ideal),
                maximal: Some(maximal),
                hv_max,
            }
        }
    };
    // With a zero normalizer every valid point sits on the reference box
    // boundary; a run scores 1 exactly when it contains the whole target front.
    let target: &[ObjectiveVector] = if exact.is_some() {
        &exact_points
    } else {
        &union_points
    };

    let reports = raw
        .iter()
        .map(|run| {
            let valid = valid_vectors(&run.front);
            let constraint_violations = if run.front.is_empty() {
                0.0
            } else {
                run.front.iter().map(|s| s.violations as f64).sum::<f64>() / run.front.len() as f64
            };
            let metrics = match (&norm.reference, &norm.ideal, &norm.maximal) {
                (Some(reference), Some(ideal), Some(maximal)) if !valid.is_empty() => {
                    let hv = hypervolume_2d(&valid, reference)?;
                    let normalized = if norm.hv_max > 0.0 {
                        (hv / norm.hv_max).clamp(0.0, 1.0)
                    } else if target.iter().all(|t| valid.contains(t)) {
                        1.0
                    } else {
                        0.0
                    };
                    MetricBundle {
                        hypervolume: hv,
                        normalized_hypervolume: normalized,
                        overall_spread: overall_spread(&valid, ideal, maximal)?,
                        spacing: Some(spacing(&valid).unwrap_or(0.0)),
                        constraint_violations,
                    }
                }
                _ => MetricBundle {
                    hypervolume: 0.0,
                    normalized_hypervolume: 0.0,
                    overall_spread: 0.0,
                    spacing: None,
                    constraint_violations,
                },
            };
            Ok(RunReport {
                instance: name.to_string(),
                cities: n,
                algorithm: spec.algorithm,
                run_index: run.run_index,
                seed: run.seed,
                evaluations: run.evaluations,
                wall_time_s: run.wall_time_s,
                front: run.front.iter().cloned().map(FrontEntry::from).collect(),
                metrics,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((norm, reports))
}

/// Mean and 95% confidence interval of every metric per (instance,
/// algorithm). Groups come out in name order and runs are summed in
/// run-index order, so the result does not depend on the input order.
pub fn aggregate_reports(reports: &[RunReport]) -> Result<Vec<SummaryRow>> {
    let mut groups: BTreeMap<(&str, Algorithm), Vec<&RunReport>> = BTreeMap::new();
    for r in reports {
        groups
            .entry((r.instance.as_str(), r.algorithm))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((instance, algorithm), mut runs)| {
            runs.sort_by_key(|r| (r.run_index, r.seed));
            let collect = |f: fn(&MetricBundle) -> f64| {
                runs.iter().map(|r| f(&r.metrics)).collect::<Vec<_>>()
            };
            let spacings: Vec<f64> = runs.iter().filter_map(|r| r.metrics.spacing).collect();
            Ok(SummaryRow {
                instance: instance.to_string(),
                cities: runs[0].cities,
                algorithm,
                hv: aggregate_runs(&collect(|m| m.normalized_hypervolume))?,
                os: aggregate_runs(&collect(|m| m.overall_spread))?,
                sp: if spacings.is_empty() {
                    None
                } else {
                    Some(aggregate_runs(&spacings)?)
                },
                cv: aggregate_runs(&collect(|m| m.constraint_violations))?,
                n_runs: runs.len(),
                excluded_spacing_runs: runs.len() - spacings.len(),
            })
        })
        .collect()
}

pub const CSV_HEADER: [&str; 13] = [
    "instance",
    "cities",
    "algorithm",
    "hv_mean",
    "hv_ci",
    "os_mean",
    "os_ci",
    "sp_mean",
    "sp_ci",
    "cv_mean",
    "cv_ci",
    "n_runs",
    "excluded_spacing_runs",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Csv,
    Json,
}

/// 17 significant digits: enough to round-trip any `f64`.
fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Summary table as CSV; undefined spacing is an empty field.
pub fn summary_csv(summary: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Contract(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in summary {
        let (sp_mean, sp_ci) = match row.sp {
            Some(a) => (number(a.mean), number(a.ci95)),
            None => (String::new(), String::new()),
        };
        w.write_record([
            row.instance.clone(),
            row.cities.to_string(),
            row.algorithm.to_string(),
            number(row.hv.mean),
            number(row.hv.ci95),
            number(row.os.mean),
            number(row.os.ci95),
            sp_mean,
            sp_ci,
            number(row.cv.mean),
            number(row.cv.ci95),
            row.n_runs.to_string(),
            row.excluded_spacing_runs.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Contract(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Contract(e.to_string()))
}

/// Full report as pretty JSON. `serde_json` prints the shortest decimal that
/// parses back to the same `f64`, so the output round-trips exactly.
pub fn report_json(report: &ExperimentReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn parse_report_json(text: &str) -> Result<ExperimentReport> {
    Ok(serde_json::from_str(text)?)
}

/// Writes the report in `format` to `path`.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    if report.summary.is_empty() {
        return Err(Error::Contract("empty summary".into()));
    }
    let text = match format {
        ReportFormat::Csv => summary_csv(&report.summary)?,
        ReportFormat::Json => report_json(report)?,
    };
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
