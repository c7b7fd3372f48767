use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pnrpa"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pnrpa-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn run_writes_summary_csv() {
    let dir = scratch("run");
    let out = dir.join("summary.csv");
    let status = bin()
        .args([
            "run",
            "--algo",
            "pareto-nrpa",
            "--level",
            "2",
            "--iters",
            "10",
            "--budget",
            "200",
        ])
        .args([
            "--runs",
            "3",
            "--seed",
            "5",
            "--threads",
            "2",
            "--instances",
        ])
        .arg(data("syn0[46].txt"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("instance,"));
    assert!(lines[1].starts_with("syn04,"));
    assert!(lines[2].starts_with("syn06,"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn run_json_is_reproducible() {
    let dir = scratch("json");
    let go = |name: &str| {
        let out = dir.join(name);
        let status = bin()
            .args([
                "run",
                "--algo",
                "random-playout",
                "--budget",
                "50",
                "--runs",
                "2",
                "--format",
                "json",
            ])
            .arg("--instances")
            .arg(data("syn04.txt"))
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
        for run in v["runs"].as_array_mut().unwrap() {
            run["wall_time_s"] = 0.into();
        }
        v
    };
    assert_eq!(go("a.json"), go("b.json"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn missing_instances_fail_with_message() {
    let out = bin()
        .args([
            "run",
            "--algo",
            "nrpa",
            "--instances",
            "/nonexistent/*.txt",
            "--out",
            "/tmp/x.csv",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no instance matches"));
}

#[test]
fn convert_then_oracle() {
    let dir = scratch("convert");
    let classic = dir.join("tiny.classic");
    std::fs::write(
        &classic,
        "4\n0 3 9 4\n2 0 4 6\n5 7 0 3\n4 5 6 0\n0 500\n0 200\n0 200\n0 200\n",
    )
    .unwrap();
    let converted = dir.join("tiny.txt");
    let status = bin()
        .args(["convert", "--seed", "3", "--classic"])
        .arg(&classic)
        .arg("--out")
        .arg(&converted)
        .status()
        .unwrap();
    assert!(status.success());
    let front = dir.join("front.json");
    let status = bin()
        .args(["oracle", "--instance"])
        .arg(&converted)
        .arg("--out")
        .arg(&front)
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(front).unwrap()).unwrap();
    assert_eq!(v["enumerated"], 6);
    assert!(!v["front"].as_array().unwrap().is_empty());
    std::fs::remove_dir_all(dir).unwrap();
}
