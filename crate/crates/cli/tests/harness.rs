use std::fs;
use std::process::Command;

use resolvability::Budget;
use resolvability_harness::instance::{load_instance, InputSpec};
use resolvability_harness::sweep::{run_sweep, write_csv, Axis, ExperimentConfig, Method, Mode, ResultRow};

const BSC_FILE: &str = r#"
input_alphabet = ["0", "1"]
output_alphabet = ["0", "1"]
matrix = [[0.9, 0.1], [0.1, 0.9]]
"#;

fn resolv(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_resolv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv(axis: Axis, rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, axis, rows, false).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn instance_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("bsc.toml");
    fs::write(&good, BSC_FILE).unwrap();
    let inst = load_instance(good.to_str().unwrap()).unwrap();
    assert_eq!(inst.channel.row(0), &[0.9, 0.1]);
    assert_eq!(inst.input(&InputSpec::Uniform).unwrap().mass(), &[0.5, 0.5]);

    let bad = dir.path().join("bad.toml");
    fs::write(
        &bad,
        BSC_FILE.replace("[0.9, 0.1], [0.1, 0.9]", "[0.9, 0.08], [0.1, 0.9]"),
    )
    .unwrap();
    let err = load_instance(bad.to_str().unwrap()).unwrap_err().to_string();
    assert!(err.contains("row 0"), "{err}");

    assert!(load_instance(dir.path().join("missing.toml").to_str().unwrap()).is_err());
}

#[test]
fn epsilon_sweep_bounds() {
    let config = ExperimentConfig::new("bsc:0.1", Mode::Singleshot);
    let rows = run_sweep(&config, Axis::Epsilon, &[0.5, 0.25, 0.125]).unwrap();
    assert_eq!(rows.len(), 3);
    // Sorted by axis value; full mask, so the bound is exactly 2ε.
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    assert_eq!(eps, vec![0.125, 0.25, 0.5]);
    for r in &rows {
        assert_eq!(r.complement_mass, 0.0);
        assert!((r.theorem_bound - 2.0 * r.epsilon).abs() < 1e-12);
        assert!(r.measured_tv <= r.theorem_bound);
    }
    assert!(rows.windows(2).all(|w| w[0].theorem_bound <= w[1].theorem_bound));
}

#[test]
fn general_sweep_over_n() {
    let mut config = ExperimentConfig::new("bsc:0.1", Mode::General);
    config.seed = Some(5);
    let rows = run_sweep(&config, Axis::N, &[6.0, 2.0, 4.0]).unwrap();
    let mwu: Vec<_> = rows.iter().filter(|r| r.method == Method::Mwu).collect();
    assert_eq!(mwu.iter().map(|r| r.n).collect::<Vec<_>>(), vec![2, 4, 6]);
    for r in &mwu {
        assert_eq!(r.status, "ok");
        assert!(r.measured_tv <= r.theorem_bound, "{r:?}");
    }
    assert_eq!(rows.iter().filter(|r| r.method == Method::Baseline).count(), 3);
    // Each point's MWU row comes before its baseline row.
    assert!(rows
        .chunks(2)
        .all(|c| c[0].method == Method::Mwu && c[1].method == Method::Baseline));
}

#[test]
fn empty_sweep_is_header_only() {
    let config = ExperimentConfig::new("bsc:0.1", Mode::Singleshot);
    let rows = run_sweep(&config, Axis::L, &[]).unwrap();
    let text = csv(Axis::L, &rows);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "# resolv sweep v1 axis=L");
    assert!(lines[1].starts_with("axis_value,mode,method,n,L,epsilon,measured_tv"));
}

#[test]
fn sweep_csv_is_reproducible() {
    let mut config = ExperimentConfig::new("bsc:0.3", Mode::FixedType);
    config.seed = Some(9);
    let run = |c: &ExperimentConfig, values: &[f64]| csv(Axis::N, &run_sweep(c, Axis::N, values).unwrap());
    let parallel = run(&config, &[2.0, 3.0, 4.0]);
    assert_eq!(parallel, run(&config, &[2.0, 3.0, 4.0]));
    config.jobs = Some(1);
    assert_eq!(run(&config, &[4.0, 3.0, 2.0]), parallel);
}

#[test]
fn budget_overrun_skips_the_point() {
    let mut config = ExperimentConfig::new("bsc:0.1", Mode::General);
    config.budget = Budget(64);
    let rows = run_sweep(&config, Axis::N, &[2.0, 8.0]).unwrap();
    assert_eq!(rows[0].status, "ok");
    assert!(rows[1].status.starts_with("skipped"), "{}", rows[1].status);
    assert!(rows[1].measured_tv.is_nan());
}

#[test]
fn build_then_eval_agree() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("bsc.toml");
    fs::write(&inst, BSC_FILE).unwrap();
    let code = dir.path().join("code.txt");
    let inst = inst.to_str().unwrap();
    let code_s = code.to_str().unwrap();

    let build = resolv(&[
        "build",
        "--channel",
        inst,
        "--input",
        "uniform",
        "--mode",
        "general",
        "--n",
        "3",
        "--out",
        code_s,
    ]);
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let summary = String::from_utf8(build.stderr).unwrap();
    let built_tv: f64 = summary
        .split_whitespace()
        .skip_while(|w| *w != "tv")
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();

    let eval = resolv(&[
        "eval",
        "--channel",
        inst,
        "--input",
        "uniform",
        "--n",
        "3",
        "--codebook",
        code_s,
    ]);
    assert!(eval.status.success(), "{}", String::from_utf8_lossy(&eval.stderr));
    let out = String::from_utf8(eval.stdout).unwrap();
    let tv: f64 = out.trim().strip_prefix("tv ").unwrap().parse().unwrap();
    assert!(
        (tv - built_tv).abs() <= 1e-6 * built_tv.max(1e-12),
        "{tv} vs {built_tv}"
    );
}

#[test]
fn cli_rejects_bad_input() {
    let out = resolv(&[
        "build",
        "--channel",
        "bsc:0.1",
        "--input",
        "uniform",
        "--epsilon",
        "0.7",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));

    let out = resolv(&["build", "--channel", "bsc:0.1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("input_dist"));
}

#[test]
fn cli_sweep_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = resolv(&[
        "sweep",
        "--channel",
        "bsc:0.1",
        "--input",
        "uniform",
        "--axis",
        "epsilon",
        "--values",
        "0.5,0.25",
        "--seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut config = ExperimentConfig::new("bsc:0.1", Mode::Singleshot);
    config.seed = Some(3);
    let lib = csv(Axis::Epsilon, &run_sweep(&config, Axis::Epsilon, &[0.5, 0.25]).unwrap());
    assert_eq!(fs::read_to_string(&path).unwrap(), lib);
}
