use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use photocool::report::Report;
use photocool_core::model::occupation_budget;
use photocool_core::presets;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_photocool"));
    c.env_remove("PHOTOCOOL_SEED");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_report(o: &Output) -> Report {
    assert_eq!(code(o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("report parses")
}

/// Benchmark config with one textual substitution.
fn variant(dir: &Path, name: &str, from: &str, to: &str) -> PathBuf {
    let text = std::fs::read_to_string(configs().join("benchmark.json")).unwrap();
    assert!(text.contains(from));
    let path = dir.join(name);
    std::fs::write(&path, text.replace(from, to)).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_reports_library_values_bit_exactly() {
    let cfg = configs().join("benchmark.json");
    let r = json_report(&run(&["analyze", "--config", s(&cfg), "--json"]));
    let d = occupation_budget(&presets::benchmark()).unwrap();
    assert_eq!(r.quantities["n_tot"].value.to_bits(), d.n_tot.to_bits());
    assert_eq!(r.quantities["grad_f"].unit, "N/m");
    assert!(r.provenance.inputs.contains_key("config"));
}

#[test]
fn dark_device_analyzes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(dir.path(), "dark.json", "\"power_w\": 6.8e-4", "\"power_w\": 0.0");
    let r = json_report(&run(&["analyze", "--config", s(&cfg), "--json"]));
    assert_eq!(r.quantities["grad_f"].value, 0.0);
    assert_eq!(r.quantities["n_tot"].value, r.quantities["n_th"].value);
}

#[test]
fn blue_detuning_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(dir.path(), "blue.json", "\"detuning_rad_s\": 5.0e9", "\"detuning_rad_s\": -5.0e9");
    let o = run(&["analyze", "--config", s(&cfg)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("heating"));
}

#[test]
fn past_instability_threshold_exits_three_then_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(dir.path(), "hot.json", "\"power_w\": 6.8e-4", "\"power_w\": 7.5e-2");
    assert_eq!(code(&run(&["analyze", "--config", s(&cfg)])), 3);
    let o = run(&["simulate", "--config", s(&cfg), "--t-total", "5e-3", "--t-burn-in", "0"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn malformed_configs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let both = variant(
        dir.path(),
        "both.json",
        "\"omega_m_rad_s\": 1.0e6,",
        "\"omega_m_rad_s\": 1.0e6, \"omega_m_hz\": 1.6e5,",
    );
    assert_eq!(code(&run(&["analyze", "--config", s(&both)])), 2);
    let unknown = variant(dir.path(), "unknown.json", "\"q_m\"", "\"quality\"");
    assert_eq!(code(&run(&["analyze", "--config", s(&unknown)])), 2);
    let missing = dir.path().join("nope.json");
    assert_eq!(code(&run(&["analyze", "--config", s(&missing)])), 2);
}

#[test]
fn fit_with_two_rows_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("two.csv");
    std::fs::write(&data, "power_w,temperature_k\n1e-3,200\n2e-3,150\n").unwrap();
    let cfg = configs().join("metzger08.json");
    let o = run(&["fit", "--config", s(&cfg), "--data", s(&data)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn fit_recovers_stand_in_dataset() {
    let cfg = configs().join("metzger08.json");
    let data = configs().join("metzger_like_dataset.csv");
    let r = json_report(&run(&["fit", "--config", s(&cfg), "--data", s(&data), "--initial-chi", "1e-5", "--json"]));
    assert!((r.quantities["chi_hat"].value / 2e-5 - 1.0).abs() < 0.05);
    assert!(r.provenance.inputs.contains_key("data"));
}

#[test]
fn simulate_twice_gives_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("benchmark.json");
    let mut digests = Vec::new();
    for k in 0..2 {
        let traj = dir.path().join(format!("run{k}.bin"));
        let spec = dir.path().join(format!("run{k}.csv"));
        let o = bin()
            .args(["simulate", "--config", s(&cfg), "--ensemble", "2", "--relaxation-times", "100"])
            .args(["--trajectory", s(&traj), "--spectrum", s(&spec), "--segments", "8", "--json"])
            .env("PHOTOCOOL_SEED", "42")
            .output()
            .unwrap();
        let r = json_report(&o);
        assert_eq!(r.provenance.seed, Some(42));
        let files: Vec<Vec<u8>> = [traj.clone(), PathBuf::from(format!("{}.1", traj.display())), spec]
            .iter()
            .map(|p| std::fs::read(p).unwrap())
            .collect();
        digests.push((files, r.quantities["n_hat"].value.to_bits()));
        assert!(dir.path().join(format!("run{k}.bin.json")).exists());
    }
    assert_eq!(digests[0], digests[1]);
}

#[test]
fn simulate_writes_nothing_unless_asked() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("benchmark.json");
    let o = bin()
        .current_dir(dir.path())
        .args(["simulate", "--config", s(&cfg), "--relaxation-times", "50"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn optimizing_tau_lowers_the_occupation() {
    let cfg = configs().join("benchmark.json");
    let r = json_report(&run(&["optimize", "--config", s(&cfg), "--free", "tau", "--json"]));
    let base = occupation_budget(&presets::benchmark()).unwrap().n_tot;
    assert!(r.quantities["optimum.n_tot"].value <= base);
    let w = r.quantities["optimum.omega_m_tau"].value;
    assert!((0.5..2.0).contains(&w), "{w}");
}

#[test]
fn optimize_without_free_reports_closed_forms_only() {
    let cfg = configs().join("benchmark.json");
    let r = json_report(&run(&["optimize", "--config", s(&cfg), "--json"]));
    assert!(r.quantities.contains_key("noise_floor"));
    assert!(!r.quantities.keys().any(|k| k.starts_with("optimum.")));
    let o = run(&["optimize", "--config", s(&cfg), "--free", "mass"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn table1_names_a_convention_within_factor_three() {
    let c = configs();
    let o = run(&[
        "table1",
        "--config",
        s(&c.join("verbridge08.json")),
        "--config",
        s(&c.join("metzger08.json")),
        "--config",
        s(&c.join("favero07.json")),
        "--json",
    ]);
    let r = json_report(&o);
    assert!(r.quantities["worst_case_factor"].value < 3.0);
    assert!(r.notes[0].contains("77 K, ω=f"));
}
