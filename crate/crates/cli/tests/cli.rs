use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qdyn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdyn"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn run_config(dir: &TempDir, text: &str) -> Output {
    let path = dir.path().join("run.ini");
    fs::write(&path, text).unwrap();
    qdyn(dir.path(), &["run", "--config", path.to_str().unwrap()])
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const COMPARE_B2: &str = "\
# two-level resonant ladder
[system]
model = legendre-b
levels = 2
initial = 0
mode = compare
analytic = spectral

[time]
t_max = 5
dt = 0.001
output_stride = 50

[output]
csv = out/b2.csv
plot = true
";

#[test]
fn compare_two_levels_against_spectral_solution() {
    let dir = TempDir::new().unwrap();
    let out = run_config(&dir, COMPARE_B2);
    assert_eq!(out.status.code(), Some(0), "{}{}", stdout(&out), stderr(&out));
    let report = fs::read_to_string(dir.path().join("out/b2.report.txt")).unwrap();
    let line = report.lines().find(|l| l.starts_with("max-population-deviation: ")).unwrap();
    assert!(line.contains("PASS"), "{line}");
    let value: f64 = line.split(['(', ',']).nth(1).unwrap().trim().parse().unwrap();
    assert!(value <= 1e-6);
    // Defaults are spelled out.
    for key in ["# dt = 0.001", "# stepper = rk4", "# rel_tol = 1e-10", "# theta = real_cut", "# tol = 1e-6"] {
        assert!(report.contains(key), "{key} missing from\n{report}");
    }
    for f in ["b2.csv", "b2.gp", "b2.analytic.csv", "b2.deviation.csv"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
    let dev = fs::read_to_string(dir.path().join("out/b2.deviation.csv")).unwrap();
    assert!(dev.starts_with("t,max_population_deviation\n0,"));
}

#[test]
fn compare_against_printed_closed_form_fails_its_checks() {
    let dir = TempDir::new().unwrap();
    let out = run_config(&dir, &COMPARE_B2.replace("analytic = spectral", "analytic = printed"));
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("analytic-initial-condition: FAIL"));
}

#[test]
fn trace_csv_layout_and_determinism() {
    let dir = TempDir::new().unwrap();
    let text = "[system]\nmodel = legendre-b\nlevels = 4\n[time]\nt_max = 1\ndt = 0.01\noutput_stride = 5\n[output]\ncsv = t.csv\n";
    assert_eq!(run_config(&dir, text).status.code(), Some(0));
    let first = fs::read(dir.path().join("t.csv")).unwrap();
    assert_eq!(run_config(&dir, text).status.code(), Some(0));
    let second = fs::read(dir.path().join("t.csv")).unwrap();
    assert_eq!(first, second);
    let csv = String::from_utf8(first).unwrap();
    assert!(csv.ends_with('\n'));
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 1 + 21);
    assert!(rows.iter().all(|r| r.split(',').count() == 3 * 4 + 2));
    assert_eq!(rows[1], "0,1,0,1,0,0,0,0,0,0,0,0,0,1");
}

#[test]
fn verify_ortho_five_levels_passes() {
    let dir = TempDir::new().unwrap();
    let out = run_config(&dir, "[system]\nmodel = legendre-b\nlevels = 5\nmode = verify-ortho\n[output]\nreport = ortho.txt\n");
    assert_eq!(out.status.code(), Some(0));
    let report = fs::read_to_string(dir.path().join("ortho.txt")).unwrap();
    let checks: Vec<&str> = report.lines().filter(|l| l.starts_with("orthogonality-")).collect();
    assert_eq!(checks.len(), 16);
    assert!(checks.iter().all(|l| l.contains(": PASS (") && l.ends_with(", 1e-10)")));
    assert!(!dir.path().join("trace.csv").exists(), "verify modes write the report only");
}

#[test]
fn verify_recurrence_passes() {
    let dir = TempDir::new().unwrap();
    let out = run_config(&dir, "[system]\nmodel = legendre-a\nlevels = 6\nmode = verify-recurrence\n");
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("recurrence-")).count(), 4);
}

#[test]
fn negative_dt_is_a_usage_error_naming_dt() {
    let dir = TempDir::new().unwrap();
    let out = run_config(&dir, "[system]\nmodel = legendre-b\nlevels = 2\n[time]\ndt = -1\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`dt`"), "{}", stderr(&out));
}

#[test]
fn size_and_scale_errors() {
    let dir = TempDir::new().unwrap();
    let out = run_config(&dir, "[system]\nmodel = legendre-b\nlevels = 1\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("invalid system size N = 1"));
    let out = run_config(&dir, "[system]\nmodel = legendre-a\nlevels = 2\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("scale r is singular for N = 2"));
}

#[test]
fn unknown_key_is_reported_with_line() {
    let dir = TempDir::new().unwrap();
    let out = run_config(&dir, "[system]\nmodel = legendre-b\nlevels = 3\n[time]\nd_t = 0.1\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 5: unknown key `d_t`"), "{}", stderr(&out));
}

#[test]
fn step_budget_exhaustion_is_non_convergence() {
    let dir = TempDir::new().unwrap();
    let out = run_config(
        &dir,
        "[system]\nmodel = legendre-b\nlevels = 3\n[time]\nt_max = 1\ndt = 0.1\nstepper = rk4-doubling\nrel_tol = 1e-14\nmax_steps = 5\n",
    );
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn first_model_propagation_reports_failed_inference() {
    let dir = TempDir::new().unwrap();
    let out = run_config(&dir, "[system]\nmodel = legendre-a\nlevels = 4\ninitial = 1\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("coupling inference failed"));
}

#[test]
fn custom_detuned_ladder() {
    let dir = TempDir::new().unwrap();
    let out = run_config(
        &dir,
        "[system]\nmodel = custom\nlevels = 3\ncouplings = 1.0, 2.236\nshifts = 0, 0.5, -0.25\nmode = compare\nanalytic = spectral\n[time]\nt_max = 2\n",
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn subcommands() {
    let dir = TempDir::new().unwrap();
    let out = qdyn(dir.path(), &["ortho", "--levels", "4", "--tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("orthogonality-3-3: PASS"));

    let out = qdyn(dir.path(), &["infer", "--model", "legendre-b", "--levels", "3", "--initial", "0", "--analytic", "spectral"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let table = fs::read_to_string(dir.path().join("couplings.csv")).unwrap();
    let f: Vec<f64> = table.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!((f[0] - 1.0).abs() < 1e-6 && (f[1] - 5f64.sqrt()).abs() < 1e-6, "{f:?}");

    let out = qdyn(dir.path(), &["infer", "--model", "legendre-a", "--levels", "4", "--initial", "1"]);
    assert_eq!(out.status.code(), Some(1));

    let out = qdyn(dir.path(), &["verify", "--model", "legendre-b", "--levels", "3", "--analytic", "spectral"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = qdyn(dir.path(), &["verify", "--model", "legendre-b", "--levels", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qdyn(dir.path(), &["verify", "--model", "legendre-a", "--levels", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("coupling-inference: FAIL"));

    assert_eq!(qdyn(dir.path(), &["verify", "--model", "legendre-c", "--levels", "3"]).status.code(), Some(2));
    assert_eq!(qdyn(dir.path(), &["ortho"]).status.code(), Some(2));
    assert_eq!(qdyn(dir.path(), &["run", "--config", "missing.ini"]).status.code(), Some(2));
}
