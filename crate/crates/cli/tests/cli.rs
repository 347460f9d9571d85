use std::f64::consts::FRAC_2_PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ionframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ionframe")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["--out", dir.to_str().unwrap()]);
    ionframe(&all)
}

fn status(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Value printed after `label` in qfit output.
fn printed(out: &str, label: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(label))
        .and_then(|rest| rest.trim().parse().ok())
        .unwrap_or_else(|| panic!("no '{label}' in output:\n{out}"))
}

/// `(k, q_fit, q_exact)` rows of qfit output.
fn q_rows(out: &str) -> Vec<(usize, f64, f64)> {
    out.lines()
        .filter_map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            match f[..] {
                [k, a, b, _] => Some((k.parse().ok()?, a.parse().ok()?, b.parse().ok()?)),
                _ => None,
            }
        })
        .collect()
}

#[test]
fn panel_run_writes_csv_and_report() {
    let dir = TempDir::new().unwrap();
    let o = run_in(dir.path(), &["fidelity", "--panel", "fig2"]);
    assert_eq!(status(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("nu_t,kind,fidelity_raw,fidelity_coarse"));
    let r = report(&dir.path().join("fig2.report.json"));
    assert_eq!(r["config"]["command"], "fidelity");
    assert_eq!(r["config"]["spec"]["params"]["omega"], 1.0);
    let criteria = r["criteria"].as_object().unwrap();
    assert!(!criteria.is_empty());
    for (name, v) in criteria {
        assert_eq!(v["pass"], true, "{name}");
        assert!(v["threshold"].is_number() && v["observed"].is_number());
    }
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn custom_parameters_reproduce_the_panel() {
    let dir = TempDir::new().unwrap();
    assert_eq!(status(&run_in(dir.path(), &["fidelity", "--panel", "fig4"])), 0);
    let o = run_in(dir.path(), &["fidelity", "--omega", "0.95", "--delta", "0.3", "--tmax", "800"]);
    assert_eq!(status(&o), 0);
    let panel = fs::read(dir.path().join("fig4.csv")).unwrap();
    let custom = fs::read(dir.path().join("custom.csv")).unwrap();
    assert!(panel == custom);
}

#[test]
fn repeated_runs_are_bit_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    run_in(a.path(), &["fidelity", "--panel", "fig6", "--tmax", "200"]);
    run_in(b.path(), &["fidelity", "--panel", "fig6", "--tmax", "200"]);
    assert_eq!(fs::read(a.path().join("fig6.csv")).unwrap(), fs::read(b.path().join("fig6.csv")).unwrap());
}

#[test]
fn usage_errors_exit_with_two() {
    let o = ionframe(&["fidelity", "--panel", "nope"]);
    assert_eq!(status(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("fig2"));
    assert_eq!(status(&ionframe(&["wigner", "--gamma", "0.01"])), 2);
    assert_eq!(status(&ionframe(&["fidelity", "--omega", "1"])), 2);
    assert_eq!(status(&ionframe(&["wigner", "--state", "squeezed:1"])), 2);
    assert_eq!(status(&ionframe(&["qfit", "--state", "cat:2", "--alpha", "one"])), 2);
    assert_eq!(status(&ionframe(&["fidelity", "--omega", "1", "--delta", "0", "--eta", "-1"])), 2);
    assert_eq!(status(&ionframe(&["frobnicate"])), 2);
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# short run\nomega = 0.5\ndelta = 0.2\ntmax = 100\neta = 0.1\n").unwrap();
    let o = run_in(dir.path(), &["fidelity", "--config", cfg.to_str().unwrap(), "--eta", "0.05", "--name", "layered"]);
    assert_eq!(status(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let spec = &report(&dir.path().join("layered.report.json"))["config"]["spec"];
    assert_eq!(spec["t_max"], 100.0);
    assert_eq!(spec["params"]["omega"], 0.5);
    assert_eq!(spec["params"]["eta"], 0.05);
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "omega = 1\nwidth = 3\n").unwrap();
    let o = ionframe(&["fidelity", "--panel", "fig2", "--config", cfg.to_str().unwrap()]);
    assert_eq!(status(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("width"));
    assert_eq!(status(&ionframe(&["fidelity", "--panel", "fig2", "--config", "/nonexistent/x.cfg"])), 2);
}

#[test]
fn failing_criterion_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let crit = dir.path().join("strict.txt");
    fs::write(&crit, "impossible: tsrwa.min_coarse >= 1.01\n").unwrap();
    let o = run_in(dir.path(), &["fidelity", "--panel", "fig2", "--tmax", "100", "--criteria", crit.to_str().unwrap()]);
    assert_eq!(status(&o), 1);
    assert!(stdout(&o).contains("FAIL"));
    let r = report(&dir.path().join("fig2.report.json"));
    assert_eq!(r["criteria"]["impossible"]["pass"], false);

    fs::write(&crit, "broken: tsrwa.min_coarse ~ 1\n").unwrap();
    let o = run_in(dir.path(), &["fidelity", "--panel", "fig2", "--criteria", crit.to_str().unwrap()]);
    assert_eq!(status(&o), 2);
}

#[test]
fn vacuum_slices_match_the_gaussian() {
    let dir = TempDir::new().unwrap();
    let o = run_in(dir.path(), &["wigner", "--state", "coherent:0", "--gamma", "0", "--regime", "fast"]);
    assert_eq!(status(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("wigner_gamma0.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("regime,gamma_over_nu,slice,coord,w_reconstructed,w_analytic"));
    let mut count = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let coord: f64 = f[3].parse().unwrap();
        let w: f64 = f[4].parse().unwrap();
        assert!((w - FRAC_2_PI * (-2.0 * coord * coord).exp()).abs() < 1e-3, "{line}");
        count += 1;
    }
    assert_eq!(count, 82);
    let r = report(&dir.path().join("wigner.report.json"));
    assert_eq!(r["config"]["spec"]["config"]["k_max"], 49);
}

#[test]
fn cat_rows_for_two_rates() {
    let dir = TempDir::new().unwrap();
    let o = run_in(
        dir.path(),
        &["wigner", "--state", "cat:2", "--gamma", "0.0004,0.01", "--regime", "both", "--slice", "im", "--points", "15"],
    );
    assert!(status(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
    for g in ["0.0004", "0.01"] {
        let csv = fs::read_to_string(dir.path().join(format!("wigner_gamma{g}.csv"))).unwrap();
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 30);
        assert!(rows.iter().any(|r| r.starts_with("slow,")) && rows.iter().any(|r| r.starts_with("fast,")));
    }
    let r = report(&dir.path().join("wigner.report.json"));
    let metrics = r["metrics"].as_object().unwrap();
    assert!(metrics.contains_key("fast.linf@0.0004") && metrics.contains_key("linf_gap@0.01"));
}

#[test]
fn qfit_single_phonon() {
    let o = ionframe(&["qfit", "--state", "number:1", "--alpha", "0"]);
    assert_eq!(status(&o), 0);
    let out = stdout(&o);
    let rows = q_rows(&out);
    assert_eq!(rows.len(), 50);
    assert!((rows[1].1 - 1.0).abs() < 1e-6);
    assert!((printed(&out, "W fit") + FRAC_2_PI).abs() < 1e-5);
}

#[test]
fn qfit_coherent_populations_are_poissonian() {
    let o = ionframe(&["qfit", "--state", "coherent:1", "--alpha", "0", "--regime", "both"]);
    assert_eq!(status(&o), 0);
    let rows = q_rows(&stdout(&o));
    assert_eq!(rows.len(), 100);
    let mut poisson = (-1.0f64).exp();
    for &(k, fit, _) in &rows[..50] {
        if k > 0 {
            poisson /= k as f64;
        }
        assert!((fit - poisson).abs() < 2e-3, "k = {k}");
    }
}

#[test]
fn qfit_residual_grows_under_dephasing() {
    let clean = stdout(&ionframe(&["qfit", "--state", "cat:2", "--alpha", "0"]));
    let noisy = stdout(&ionframe(&["qfit", "--state", "cat:2", "--alpha", "0", "--gamma", "0.01"]));
    assert!(printed(&noisy, "residual rms") > printed(&clean, "residual rms"));
}
