//! End-to-end tests of the `fogsense` binary: exit codes, file outputs, and
//! exact agreement between CLI output and direct library calls.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fogsense_core::sensing::{
    calibrate_energy_threshold, decide, detect_cyclostationary, energy_metric, framefile,
    waveform_metric,
};
use fogsense_core::signalgen::{gen_noise, gen_pu_signal, Modulation, PuProfile};

fn fogsense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fogsense"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_frame(path: &Path, frame: &fogsense_core::signalgen::SignalFrame) {
    fs::write(path, framefile::encode(frame)).unwrap();
}

#[test]
fn run_writes_csv_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    fs::write(
        &cfg,
        "duration_ticks = 40\nepoch_len_ticks = 20\nn_channels = 2\nframe_len = 32\ncalibration_trials = 2000\n",
    )
    .unwrap();
    let out_path = dir.path().join("m.csv");
    let out = fogsense(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("scope,node_id,tier"));
    assert!(csv.lines().count() >= 3); // header + nodes + aggregate
}

#[test]
fn unknown_subcommand_exits_one_with_usage() {
    let out = fogsense(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Usage"), "stderr: {err}");
}

#[test]
fn invalid_scenario_exits_one_listing_violations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "pfa_target = 2.0\nn_channels = 0\n").unwrap();
    let out = fogsense(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("pfa_target"));
    assert!(err.contains("n_channels"));

    // Unknown --set key is a validation error too.
    let out = fogsense(&["run", "--set", "bogus_key=1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sense_energy_matches_library_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let frame = gen_noise(64, 1.5, 42).unwrap();
    let path = dir.path().join("frame.bin");
    write_frame(&path, &frame);

    let metric = energy_metric(&frame).value;
    let rho = 90.0;
    let out = fogsense(&[
        "sense",
        "--in",
        path.to_str().unwrap(),
        "--detector",
        "energy",
        "--rho",
        "90.0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text,
        format!("metric {}\ndecision {}\n", metric, decide(metric, rho))
    );
}

#[test]
fn sense_waveform_and_cyclic_match_library() {
    let dir = tempfile::tempdir().unwrap();
    let profile = PuProfile {
        modulation: Modulation::Bpsk,
        carrier_freq: 0.2,
        symbol_len: 8,
        amplitude: 1.0,
    };
    let pattern = gen_pu_signal(&profile, 256, 3).unwrap();
    let y = {
        let ch = fogsense_core::signalgen::ChannelModel::awgn(0.5).unwrap();
        fogsense_core::signalgen::apply_channel(&pattern, &ch, 9).unwrap()
    };
    let y_path = dir.path().join("y.bin");
    let p_path = dir.path().join("pattern.bin");
    write_frame(&y_path, &y);
    write_frame(&p_path, &pattern);

    let metric = waveform_metric(&y, &pattern).unwrap();
    let out = fogsense(&[
        "sense",
        "--in",
        y_path.to_str().unwrap(),
        "--detector",
        "waveform",
        "--rho",
        "10.0",
        "--pattern",
        p_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        format!("metric {}\ndecision {}\n", metric, decide(metric, 10.0))
    );

    let (hyp, _, peak) =
        detect_cyclostationary(&y, &[0.125, 0.25, 0.375], &[0, 1, 2, 3], 0.02).unwrap();
    let out = fogsense(&[
        "sense",
        "--in",
        y_path.to_str().unwrap(),
        "--detector",
        "cyclic",
        "--rho",
        "0.02",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), format!("metric {peak}\ndecision {hyp}\n"));
}

#[test]
fn sense_rejects_garbage_frame_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.bin");
    fs::write(&path, b"not a frame").unwrap();
    let out = fogsense(&[
        "sense",
        "--in",
        path.to_str().unwrap(),
        "--detector",
        "energy",
        "--rho",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn calibrate_energy_matches_library() {
    let out = fogsense(&[
        "calibrate",
        "--detector",
        "energy",
        "--pfa",
        "0.1",
        "--n",
        "64",
        "--noise-var",
        "1.0",
        "--trials",
        "2000",
        "--seed",
        "5",
    ]);
    assert!(out.status.success());
    let rho = calibrate_energy_threshold(0.1, 1.0, 64, 2000, 5).unwrap();
    assert_eq!(stdout(&out), format!("rho {rho}\n"));
}

#[test]
fn embed_linear_subspace_recovers_the_plane() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("lin");
    let out = fogsense(&[
        "embed",
        "--kind",
        "linear_subspace",
        "--n",
        "500",
        "--k",
        "10",
        "--r",
        "2",
        "--reg",
        "1e-9",
        "--seed",
        "3",
        "--out-prefix",
        prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let residual: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("procrustes_residual "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual <= 1e-6, "residual {residual}");
    for suffix in ["ambient", "intrinsic", "embedding"] {
        let path = dir.path().join(format!("lin_{suffix}.csv"));
        let body = fs::read_to_string(path).unwrap();
        assert_eq!(body.lines().count(), 500);
    }
}

#[test]
fn embed_swiss_roll_is_trustworthy_and_seed_stable() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("roll");
    let args = [
        "embed",
        "--kind",
        "swiss_roll",
        "--n",
        "1000",
        "--k",
        "10",
        "--r",
        "2",
        "--seed",
        "13",
        "--out-prefix",
        prefix.to_str().unwrap(),
    ];
    let out = fogsense(&args);
    assert!(out.status.success());
    let t: f64 = stdout(&out)
        .lines()
        .find_map(|l| l.strip_prefix("trustworthiness "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(t >= 0.9, "trustworthiness {t}");

    // Byte-identical outputs on a re-run with the same seed.
    let first = fs::read(dir.path().join("roll_embedding.csv")).unwrap();
    let out = fogsense(&args);
    assert!(out.status.success());
    let second = fs::read(dir.path().join("roll_embedding.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn report_prints_cloud_state() {
    let out = fogsense(&[
        "report",
        "--set",
        "duration_ticks=40",
        "--set",
        "n_channels=2",
        "--set",
        "frame_len=32",
        "--set",
        "calibration_trials=2000",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("cloud state"));
    assert!(text.contains("channel beliefs"));
    assert!(text.contains("aggregate:"));
}

#[test]
fn train_svm_on_feature_csv_reaches_full_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("features.csv");
    let mut body = String::from("f0,f1,f2,f3,f4,f5,label\n");
    for i in 0..40 {
        let occupied = i % 2 == 0;
        let energy = if occupied { 2.0 + 0.01 * i as f64 } else { 0.8 + 0.01 * i as f64 };
        body.push_str(&format!(
            "{energy},0.0,0.0,0.0,0.5,0.1,{}\n",
            if occupied { 1 } else { 0 }
        ));
    }
    fs::write(&data, body).unwrap();
    let model_path = dir.path().join("model.json");
    let out = fogsense(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--engine",
        "svm",
        "--kernel",
        "linear",
        "--c",
        "10",
        "--out",
        model_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("training accuracy 1"));
    // The written model is loadable.
    let text = fs::read_to_string(model_path).unwrap();
    fogsense_core::learning::model_io::deserialize_model(&text).unwrap();
}

#[test]
fn run_is_deterministic_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = fogsense(&[
            "run",
            "--set",
            "duration_ticks=60",
            "--set",
            "n_channels=2",
            "--set",
            "frame_len=32",
            "--set",
            "calibration_trials=2000",
            "--seed",
            "77",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn sweep_emits_one_tagged_block_per_value() {
    let out = fogsense(&[
        "sweep",
        "--set",
        "duration_ticks=20",
        "--set",
        "n_channels=2",
        "--set",
        "frame_len=32",
        "--set",
        "calibration_trials=2000",
        "--param",
        "snr_db",
        "--values=-5,5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    // Default tiers give 3 node rows + 1 aggregate per run.
    assert_eq!(text.matches("snr_db,-5").count(), 4);
    assert_eq!(text.matches("snr_db,5").count(), 4);
    let headers = text
        .lines()
        .filter(|l| l.starts_with("scope,"))
        .count();
    assert_eq!(headers, 1);

    let out = fogsense(&[
        "sweep",
        "--param",
        "frame_len",
        "--values",
        "32",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
