use std::path::PathBuf;

use pareto_nrpa::experiment::{
    aggregate_reports, emit_report, parse_report_json, report_json, run_experiment, run_single,
    Algorithm, ExperimentSpec, NamedInstance, ReportFormat,
};
use pareto_nrpa::SearchConfig;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn small_spec(threads: Option<usize>) -> ExperimentSpec {
    let config = SearchConfig {
        level: 2,
        iterations_per_level: 20,
        eval_budget: 300,
        ..SearchConfig::default()
    };
    ExperimentSpec {
        n_runs: 4,
        base_seed: 100,
        threads,
        ..ExperimentSpec::new(
            vec![data("syn04.txt"), data("syn06.txt")],
            Algorithm::ParetoNrpa,
            config,
        )
    }
}

#[test]
fn same_seed_same_json_single_and_parallel() {
    let a = run_experiment(&small_spec(Some(1))).unwrap();
    let b = run_experiment(&small_spec(Some(3))).unwrap();
    let c = run_experiment(&small_spec(Some(1))).unwrap();
    // The thread count itself is part of the recorded spec.
    let mut b0 = b.without_wall_time();
    b0.metadata.spec.threads = Some(1);
    let a0 = report_json(&a.without_wall_time()).unwrap();
    assert_eq!(a0, report_json(&b0).unwrap());
    assert_eq!(a0, report_json(&c.without_wall_time()).unwrap());
}

#[test]
fn single_run_reproduces_alone() {
    let spec = small_spec(None);
    let full = run_experiment(&spec).unwrap();
    let inst = NamedInstance::load(&data("syn06.txt")).unwrap();
    let again = run_single(&inst.instance, &spec, 2).unwrap();
    let original = full
        .runs
        .iter()
        .find(|r| r.instance == "syn06" && r.run_index == 2)
        .unwrap();
    assert_eq!(again.seed, 102);
    assert_eq!(again.evaluations, original.evaluations);
    let objectives: Vec<Vec<f64>> = again
        .front
        .iter()
        .map(|s| s.objectives.values().to_vec())
        .collect();
    let reported: Vec<Vec<f64>> = original
        .front
        .iter()
        .map(|f| f.objectives.clone())
        .collect();
    assert_eq!(objectives, reported);
}

#[test]
fn aggregation_ignores_report_order() {
    let report = run_experiment(&small_spec(None)).unwrap();
    let mut reversed = report.runs.clone();
    reversed.reverse();
    assert_eq!(aggregate_reports(&reversed).unwrap(), report.summary);
}

#[test]
fn reports_respect_budget_and_fronts_are_non_dominated() {
    let report = run_experiment(&small_spec(None)).unwrap();
    assert_eq!(report.runs.len(), 8);
    for r in &report.runs {
        assert!(r.evaluations <= 300);
        for a in &r.front {
            for b in &r.front {
                let dom = a.objectives.iter().zip(&b.objectives).all(|(x, y)| x <= y)
                    && a.objectives.iter().zip(&b.objectives).any(|(x, y)| x < y);
                assert!(!dom);
            }
        }
    }
}

#[test]
fn emitted_files_round_trip() {
    let report = run_experiment(&small_spec(None)).unwrap();
    let dir = std::env::temp_dir().join(format!("pnrpa-emit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let json = dir.join("r.json");
    let csv = dir.join("r.csv");
    emit_report(&report, ReportFormat::Json, &json).unwrap();
    emit_report(&report, ReportFormat::Csv, &csv).unwrap();
    let back = parse_report_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(back, report);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(emit_report(&report, ReportFormat::Csv, &dir.join("missing/x.csv")).is_err());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn oracle_algorithm_counts_permutations() {
    let spec = ExperimentSpec {
        n_runs: 1,
        ..ExperimentSpec::new(
            vec![data("syn04.txt")],
            Algorithm::Oracle,
            SearchConfig::default(),
        )
    };
    let report = run_experiment(&spec).unwrap();
    assert_eq!(report.runs[0].evaluations, 6);
    assert_eq!(report.runs[0].metrics.normalized_hypervolume, 1.0);
}
