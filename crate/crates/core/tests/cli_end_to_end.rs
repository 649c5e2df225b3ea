//! End-to-end checks of the `stirap` binary: exit-code categories, config
//! validation, output atomicity, the run log, and byte-identical reruns.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stirap"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn shapes_config(out: &Path) -> String {
    format!(
        r#"
verb = "shapes"
output_path = "{}"

[pulse]
family = "ddp-optimized"
omega0 = 20.0
n = 3
lambda = 4.0
t0 = 2.0
"#,
        out.display()
    )
}

#[test]
fn shapes_run_writes_csv_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("shapes.csv");
    let cfg = write_config(dir.path(), "run.toml", &shapes_config(&out));
    let status = bin().args(["shapes", "--config"]).arg(&cfg).status().unwrap();
    assert!(status.success());
    let body = std::fs::read_to_string(&out).unwrap();
    assert!(body.starts_with("t,omega_p,omega_s,rms,mixing_angle\n"));
    let log = std::fs::read_to_string(out.with_extension("log")).unwrap();
    assert!(log.contains("verb: shapes"));
    assert!(log.contains("resolved config:"));
    assert!(log.contains("default applied: integrator.rel_tol = 1e-10"));
    assert!(log.contains("phase compute:"));
    // no temporary files left behind by the atomic writes
    let stray: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| !["run.toml", "shapes.csv", "shapes.log"].contains(&n.as_str()))
        .collect();
    assert!(stray.is_empty(), "stray files: {stray:?}");
}

#[test]
fn unknown_config_key_fails_with_code_2_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let body = shapes_config(&out).replace("omega0", "omega_nought");
    let cfg = write_config(dir.path(), "bad.toml", &body);
    let output = bin().args(["shapes", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("omega_nought"), "stderr: {err}");
    assert!(!out.exists());
}

#[test]
fn malformed_toml_fails_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "broken.toml", "verb = [oops");
    let output = bin().args(["shapes", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn missing_config_file_fails_with_code_4() {
    let output = bin()
        .args(["shapes", "--config", "/nonexistent/run.toml"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn verb_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let cfg = write_config(dir.path(), "run.toml", &shapes_config(&out));
    let output = bin().args(["simulate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("shapes") && err.contains("simulate"), "stderr: {err}");
}

#[test]
fn sweep_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("sweep1.csv");
    let out2 = dir.path().join("sweep2.csv");
    let body = |out: &Path| {
        format!(
            r#"
verb = "sweep"
output_path = "{}"
workers = 2

[pulse]
family = "ddp-optimized"
omega0 = 1.0
n = 3
lambda = 4.0
t0 = 2.0

[sweep]
parameter = "peak-rabi"
start = 5.0
stop = 20.0
points = 4
"#,
            out.display()
        )
    };
    let cfg1 = write_config(dir.path(), "s1.toml", &body(&out1));
    let cfg2 = write_config(dir.path(), "s2.toml", &body(&out2));
    assert!(bin().args(["sweep", "--config"]).arg(&cfg1).status().unwrap().success());
    assert!(bin().args(["sweep", "--config"]).arg(&cfg2).status().unwrap().success());
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "sweep CSVs differ between identical runs");
    assert!(a.starts_with(b"peak_rabi,P1,P2,P3,infidelity,norm_loss,status\n"));
}

#[test]
fn simulate_reports_transfer() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let body = shapes_config(&out).replace("verb = \"shapes\"", "verb = \"simulate\"");
    let cfg = write_config(dir.path(), "sim.toml", &body);
    assert!(bin().args(["simulate", "--config"]).arg(&cfg).status().unwrap().success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("t,P1,P2,P3,norm_loss\n"));
    let last = csv.lines().last().unwrap();
    let p3: f64 = last.split(',').nth(3).unwrap().parse().unwrap();
    assert!(p3 > 0.9999, "final P3 = {p3}");
    let log = std::fs::read_to_string(out.with_extension("log")).unwrap();
    assert!(log.contains("final populations:"));
}

#[test]
fn ddp_analyze_emits_transition_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ddp.csv");
    let body = format!(
        r#"
verb = "ddp-analyze"
output_path = "{}"

[pulse]
family = "landau-zener"
omega0 = 1.0
sweep_rate = 1.0

[ddp]
re = [-4.0, 4.0]
im = [0.05, 4.0]
"#,
        out.display()
    );
    let cfg = write_config(dir.path(), "ddp.toml", &body);
    assert!(bin().args(["ddp-analyze", "--config"]).arg(&cfg).status().unwrap().success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "re_t0,im_t0,re_D,im_D,re_gamma,im_gamma,newton_residual,multiplicity"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let im_t0: f64 = row[1].parse().unwrap();
    assert!((im_t0 - 1.0).abs() < 1e-8, "t0 = i, got Im t0 = {im_t0}");
    let log = std::fs::read_to_string(out.with_extension("log")).unwrap();
    assert!(log.contains("reported probability:"));
}

#[test]
fn validate_verb_passes_the_oracle_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("validate.csv");
    let body = shapes_config(&out).replace("verb = \"shapes\"", "verb = \"validate\"");
    let cfg = write_config(dir.path(), "val.toml", &body);
    let output = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("PASS lz-ddp"), "stdout: {stdout}");
    assert!(!stdout.contains("FAIL"), "stdout: {stdout}");
}
