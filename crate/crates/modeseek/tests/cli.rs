//! Integration tests for the command layer and the `modeseek` binary:
//! exit-code contract, file outputs, and byte-level reproducibility.

use std::path::Path;
use std::process::Command;

use modeseek::cli::{cmd_figure2, cmd_kernels, cmd_run, ExperimentCase, RunRequest, StartPoint};
use modeseek::MSConfig;

fn write_two_blob_csv(path: &Path) {
    let mut body = String::from("x1\n");
    for k in 0..10 {
        body.push_str(&format!("{}\n", -0.25 + 0.05 * k as f64));
        body.push_str(&format!("{}\n", 9.75 + 0.05 * k as f64));
    }
    std::fs::write(path, body).unwrap();
}

fn request(data: &Path, out: &Path) -> RunRequest {
    RunRequest {
        data_path: data.to_path_buf(),
        kernel_name: "gaussian".into(),
        bandwidth: 0.5,
        start: StartPoint::Point(vec![1.0]),
        config: MSConfig::default(),
        merge_tolerance: None,
        normalized: true,
        output_path: out.to_path_buf(),
    }
}

/// Density mode location by brute-force grid scan, the independent check
/// for where a run should land.
fn grid_mode(points: &[f64], h: f64, lo: f64, hi: f64) -> f64 {
    let density = |x: f64| -> f64 {
        points
            .iter()
            .map(|p| (-((x - p) / h).powi(2) / 2.0).exp())
            .sum()
    };
    let mut best = (f64::NEG_INFINITY, lo);
    for i in 0..200_000 {
        let x = lo + (hi - lo) * i as f64 / 199_999.0;
        let v = density(x);
        if v > best.0 {
            best = (v, x);
        }
    }
    best.1
}

#[test]
fn run_single_start_converges_to_blob_mode() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("blobs.csv");
    let out = dir.path().join("trajectory.csv");
    write_two_blob_csv(&data);

    let code = cmd_run(&request(&data, &out));
    assert_eq!(code, 0);

    let csv = std::fs::read_to_string(&out).unwrap();
    let last = csv.lines().last().unwrap();
    let y_final: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    let blob: Vec<f64> = (0..10).map(|k| -0.25 + 0.05 * k as f64).collect();
    let oracle = grid_mode(&blob, 0.5, -1.0, 1.0);
    assert!(
        (y_final - oracle).abs() < 1e-4,
        "landed at {y_final}, grid mode at {oracle}"
    );

    let sidecar = std::fs::read_to_string(dir.path().join("trajectory.json")).unwrap();
    assert!(sidecar.contains("\"stop_reason\": \"step_below_tolerance\""));
    assert!(dir.path().join("trajectory_rate.json").exists());
}

#[test]
fn run_outputs_are_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("blobs.csv");
    write_two_blob_csv(&data);

    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    assert_eq!(cmd_run(&request(&data, &out_a)), 0);
    assert_eq!(cmd_run(&request(&data, &out_b)), 0);
    assert_eq!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap()
    );
    assert_eq!(
        std::fs::read(dir.path().join("a_rate.json")).unwrap(),
        std::fs::read(dir.path().join("b_rate.json")).unwrap()
    );
}

#[test]
fn run_each_datapoint_clusters_two_blobs() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("blobs.csv");
    let out = dir.path().join("labels.csv");
    write_two_blob_csv(&data);

    let mut req = request(&data, &out);
    req.start = StartPoint::EachDataPoint;
    assert_eq!(cmd_run(&req), 0);

    let labels = std::fs::read_to_string(&out).unwrap();
    assert_eq!(labels.lines().count(), 21); // header + 20 points
    let modes = std::fs::read_to_string(dir.path().join("labels_modes.csv")).unwrap();
    assert_eq!(modes.lines().count(), 3); // header + 2 modes
    let sidecar = std::fs::read_to_string(dir.path().join("labels.json")).unwrap();
    assert!(sidecar.contains("\"n_clusters\": 2"));

    // alternating construction order means alternating labels
    for (i, line) in labels.lines().skip(1).enumerate() {
        let label: usize = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(label, i % 2);
    }
}

#[test]
fn run_rejects_bad_inputs_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("blobs.csv");
    let out = dir.path().join("t.csv");
    write_two_blob_csv(&data);

    let mut unknown_kernel = request(&data, &out);
    unknown_kernel.kernel_name = "triangle".into();
    assert_eq!(cmd_run(&unknown_kernel), 1);

    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "x1\n").unwrap();
    assert_eq!(cmd_run(&request(&empty, &out)), 1);

    let missing = dir.path().join("nope.csv");
    assert_eq!(cmd_run(&request(&missing, &out)), 1);

    let mut bad_dim = request(&data, &out);
    bad_dim.start = StartPoint::Point(vec![0.0, 0.0]);
    assert_eq!(cmd_run(&bad_dim), 1);
}

#[test]
fn run_exit_two_on_iteration_cap() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("blobs.csv");
    let out = dir.path().join("t.csv");
    write_two_blob_csv(&data);

    let mut req = request(&data, &out);
    req.config.max_iterations = 3;
    assert_eq!(cmd_run(&req), 2);
}

#[test]
fn figure2_case_i_passes_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let code = cmd_figure2(ExperimentCase::I, dir.path());
    assert_eq!(code, 0);
    let report =
        std::fs::read_to_string(dir.path().join("figure2_i_report.json")).unwrap();
    assert!(report.contains("\"pass\": true"));
    assert!(report.contains("q_hat"));
    assert!(dir.path().join("figure2_i_trajectory.csv").exists());
}

#[test]
fn figure2_outputs_are_reproducible() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    assert_eq!(cmd_figure2(ExperimentCase::II, dir_a.path()), 0);
    assert_eq!(cmd_figure2(ExperimentCase::II, dir_b.path()), 0);
    for name in ["figure2_ii_trajectory.csv", "figure2_ii_report.json"] {
        assert_eq!(
            std::fs::read(dir_a.path().join(name)).unwrap(),
            std::fs::read(dir_b.path().join(name)).unwrap(),
            "{name} differs between runs"
        );
    }
}

#[test]
fn kernels_table_prints() {
    assert_eq!(cmd_kernels(1), 0);
}

#[test]
fn figure2_slow_cases_pass_within_time_budget() {
    for case in [ExperimentCase::III, ExperimentCase::IV] {
        let dir = tempfile::tempdir().unwrap();
        let clock = std::time::Instant::now();
        assert_eq!(cmd_figure2(case, dir.path()), 0);
        let elapsed = clock.elapsed();
        assert!(
            elapsed.as_secs_f64() < 10.0,
            "case {case:?} took {elapsed:?}, budget 10 s"
        );
    }
}

#[test]
fn binary_kernels_lists_catalog_with_flags() {
    let output = Command::new(env!("CARGO_BIN_EXE_modeseek"))
        .args(["kernels", "--dim", "1"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let tricube = stdout.lines().find(|l| l.starts_with("tricube")).unwrap();
    assert!(tricube.contains('\u{00d7}'));
    let biweight = stdout.lines().find(|l| l.starts_with("biweight")).unwrap();
    assert!(biweight.contains("0.750000"));
    let gaussian = stdout.lines().find(|l| l.starts_with("gaussian")).unwrap();
    assert!(gaussian.trim_end().ends_with('-'));
}

#[test]
fn binary_run_respects_thread_cap_env() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("blobs.csv");
    write_two_blob_csv(&data);

    let run = |threads: &str, out: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_modeseek"))
            .args([
                "run",
                "--data",
                data.to_str().unwrap(),
                "--kernel",
                "gaussian",
                "--bandwidth",
                "0.5",
                "--start",
                "each-datapoint",
                "--out",
                dir.path().join(out).to_str().unwrap(),
            ])
            .env("MODESEEK_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
    };
    run("1", "one.csv");
    run("4", "four.csv");
    assert_eq!(
        std::fs::read(dir.path().join("one.csv")).unwrap(),
        std::fs::read(dir.path().join("four.csv")).unwrap()
    );
    assert_eq!(
        std::fs::read(dir.path().join("one_modes.csv")).unwrap(),
        std::fs::read(dir.path().join("four_modes.csv")).unwrap()
    );
}

#[test]
fn binary_figure2_case_i_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_modeseek"))
        .args([
            "figure2",
            "--case",
            "i",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn binary_rejects_unknown_case() {
    let output = Command::new(env!("CARGO_BIN_EXE_modeseek"))
        .args(["figure2", "--case", "v", "--out", "/tmp"])
        .output()
        .unwrap();
    assert!(!output.status.success());
}
