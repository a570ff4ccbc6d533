//! Runner behavior: exit codes, determinism, trace formats and the
//! scenario schema's failure modes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use fplab_cli::{builtin, run_scenario, Overrides, Scenario};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fplab")
}

fn out_dir(label: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fplab-test-{label}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn read_sorted_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().to_string(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn list_prints_the_bundled_names() {
    let output = Command::new(bin()).arg("list").output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    for name in ["example-1.3", "example-2.3", "ishikawa-linear"] {
        assert!(stdout.lines().any(|l| l == name), "missing {name}");
    }
}

#[test]
fn example_run_is_byte_deterministic() {
    let d1 = out_dir("det1");
    let d2 = out_dir("det2");
    for dir in [&d1, &d2] {
        let status = Command::new(bin())
            .args(["example", "example-2.3", "--out"])
            .arg(dir)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let f1 = read_sorted_files(&d1);
    let f2 = read_sorted_files(&d2);
    assert_eq!(f1.len(), f2.len());
    for ((n1, b1), (n2, b2)) in f1.iter().zip(f2.iter()) {
        assert_eq!(n1, n2);
        assert_eq!(b1, b2, "{n1} differs between runs");
    }
}

#[test]
fn empty_scenario_exits_zero_with_an_empty_report() {
    let dir = out_dir("empty");
    let file = dir.join("empty.toml");
    fs::write(
        &file,
        r#"
schema_version = 1
name = "empty"

[domain]
intervals = [{ lo = "0", hi = "1" }]
"#,
    )
    .unwrap();
    let output = Command::new(bin())
        .args(["run"])
        .arg(&file)
        .args(["--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(output.status.success());
    let report = fs::read_to_string(dir.join("empty.report.txt")).unwrap();
    assert!(report.contains("met: 0 of 0"));
}

#[test]
fn unmet_expectation_exits_one_and_names_the_item() {
    let dir = out_dir("unmet");
    let file = dir.join("wrong.toml");
    // the halving map is weakly contractive; expecting failure is unmet
    fs::write(
        &file,
        r#"
schema_version = 1
name = "wrong"

[domain]
intervals = [{ lo = "0", hi = "1" }]

[[maps]]
name = "t"
branches = [
  { subdomain = { lo = "0", hi = "1" }, kind = "affine", slope = "1/2", intercept = "0" },
]

[psi]
family = "half-linear"

[[checks]]
kind = "weakly-contractive"
t = "t"
expect = "fail"
"#,
    )
    .unwrap();
    let output = Command::new(bin())
        .args(["run"])
        .arg(&file)
        .args(["--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("first unmet expectation"));
    assert!(stdout.contains("check 1"));
}

#[test]
fn hard_errors_exit_two() {
    let output = Command::new(bin())
        .args(["run", "/nonexistent/scenario.toml"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let output = Command::new(bin())
        .args(["example", "no-such-scenario"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn trace_csv_has_the_fixed_header_and_full_precision() {
    let dir = out_dir("trace");
    let status = Command::new(bin())
        .args(["example", "ishikawa-linear", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(dir.join("ishikawa-linear__ishikawa-1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,parity,x_n,y_n,z_n,v_n,residual,alpha_n,beta_n"
    );
    let first = lines.next().unwrap();
    let cells: Vec<&str> = first.split(',').collect();
    assert_eq!(cells.len(), 9);
    assert_eq!(cells[0], "0");
    assert_eq!(cells[1], "0");
    // 17 significant digits in scientific notation
    assert!(cells[2].contains('e'));
    assert!(cells[2].len() >= 20, "cell `{}` too short", cells[2]);
    // every row has the same number of cells
    for line in csv.lines().skip(1) {
        assert_eq!(line.split(',').count(), 9);
    }
}

#[test]
fn grid_overrides_change_the_report() {
    let text = builtin("example-2.3").unwrap();
    let coarse = Scenario::from_toml(
        text,
        Overrides {
            grid_points: Some(21),
            ..Default::default()
        },
    )
    .unwrap();
    let outcome = run_scenario(&coarse).unwrap();
    assert!(outcome.report.contains("grid-points-per-interval: 21"));
    assert!(outcome.all_met(), "coarse grids still meet the expectations");
}

#[test]
fn check_subcommand_reports_on_stdout() {
    let file = Path::new(env!("CARGO_MANIFEST_DIR")).join("builtins/example-2.3.toml");
    let output = Command::new(bin())
        .args(["check"])
        .arg(&file)
        .args(["--kind", "fg-min", "--t", "t", "--f", "f", "--g", "g"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("kind: fg-min"));
    assert!(stdout.contains("passed: true"));
}

#[test]
fn iterate_subcommand_emits_csv() {
    let file = Path::new(env!("CARGO_MANIFEST_DIR")).join("builtins/mann-linear.toml");
    let output = Command::new(bin())
        .args(["iterate"])
        .arg(&file)
        .args([
            "--scheme", "mann", "--t", "t", "--f", "id", "--g", "id", "--x0", "1", "--alpha",
            "1/2", "--format", "csv",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.starts_with("n,parity,x_n"));
}

#[test]
fn approx_subcommand_runs_a_battery() {
    let dir = out_dir("approx");
    let file = dir.join("approx.toml");
    fs::write(
        &file,
        r#"
schema_version = 1
name = "approx-demo"

[domain]
intervals = [{ lo = "0", hi = "1" }]

[[maps]]
name = "t"
branches = [
  { subdomain = { lo = "0", hi = "1" }, kind = "affine", slope = "1/2", intercept = "0" },
]

[[maps]]
name = "id"
branches = [
  { subdomain = { lo = "0", hi = "1" }, kind = "affine", slope = "1", intercept = "0" },
]

[approx]
set = { intervals = [{ lo = "0", hi = "1/2" }] }
x0 = "1"
t = "t"
f = "id"
g = "id"
expect_conclusion = false
expect_failed_hypothesis = "x0-common-fixed-point"
"#,
    )
    .unwrap();
    let output = Command::new(bin())
        .args(["approx"])
        .arg(&file)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("hypothesis: x0-common-fixed-point -> fail"));
    // and as a full scenario run, the expectations are met
    let output = Command::new(bin())
        .args(["run"])
        .arg(&file)
        .args(["--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(output.status.success());
}

#[test]
fn scenario_rejects_maps_off_the_declared_domain() {
    let text = r#"
schema_version = 1
name = "bad-domain"

[domain]
intervals = [{ lo = "0", hi = "1" }]

[[maps]]
name = "t"
branches = [
  { subdomain = { lo = "0", hi = "2" }, kind = "affine", slope = "1", intercept = "0" },
]
"#;
    let err = Scenario::from_toml(text, Overrides::default()).unwrap_err();
    assert!(err.to_string().contains("scenario domain"));
}

#[test]
fn witness_probe_requires_expected_failure() {
    let text = r#"
schema_version = 1
name = "bad-probe"

[domain]
intervals = [{ lo = "0", hi = "1" }]

[[maps]]
name = "t"
branches = [
  { subdomain = { lo = "0", hi = "1" }, kind = "affine", slope = "1/2", intercept = "0" },
]

[[checks]]
kind = "weakly-contractive"
t = "t"
expect = "pass"
witness = { x = "0", y = "1", lhs = "1/2", rhs = "1/2" }
"#;
    assert!(Scenario::from_toml(text, Overrides::default()).is_err());
}
