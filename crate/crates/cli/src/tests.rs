//! End-to-end checks of the command-line contract.

use std::fs;
use std::path::Path;

use clap::Parser;

use crate::{main_with_args, EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with_args(std::iter::once("qpg").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("exp.toml");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// Lines that are not `# ` comments.
fn body(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect()
}

const CARTPOLE: &str = r#"
seeds = [0, 1]

[environment]
kind = "cartpole"

[model]
qubits = 4
depth = 1

[policy]
postfn = "global"

[training]
episodes = 5
"#;

#[test]
fn train_writes_curves_checkpoints_and_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CARTPOLE);
    let out = dir.path().join("out");
    let (code, stdout, stderr) = run(&["train", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{stderr}");
    assert_eq!(stdout.lines().count(), 2);
    for seed in [0, 1] {
        let curve = body(&out.join(format!("curve_seed{seed}.csv")));
        assert_eq!(curve[0], "episode,reward,avg20");
        assert_eq!(curve.len(), 6);
        assert!(out.join(format!("params_seed{seed}.txt")).exists());
    }
    let agg = body(&out.join("aggregate.csv"));
    assert_eq!(agg[0], "episode,mean,std");
    assert_eq!(agg.len(), 6);
    let header = fs::read_to_string(out.join("aggregate.csv")).unwrap();
    assert!(header.starts_with("# seeds = [0, 1]"), "{header}");
    assert!(header.contains("# lr_theta = 0.01"));
}

#[test]
fn seed_flag_replaces_seed_list() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CARTPOLE);
    let out = dir.path().join("out");
    let (code, _, _) = run(&["train", "--config", &cfg, "--seed", "9", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.join("curve_seed9.csv").exists());
    assert!(!out.join("curve_seed0.csv").exists());
}

#[test]
fn mismatched_postfn_is_a_config_error_before_compute() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &CARTPOLE.replace("postfn = \"global\"", "postfn = \"table:missing.txt\""));
    let out = dir.path().join("out");
    let (code, _, stderr) = run(&["train", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(stderr.contains("postfn"), "{stderr}");
    assert!(!out.exists());

    let bandit = r#"
[environment]
kind = "bandit"
states = 8
actions = 4

[model]
qubits = 3
depth = 1

[policy]
postfn = "parity:2"
"#;
    let cfg = write_config(dir.path(), bandit);
    let (code, _, stderr) = run(&["train", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(stderr.contains("4"), "{stderr}");
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_with_config_code() {
    assert_eq!(run(&["frobnicate"]).0, EXIT_CONFIG);
    assert_eq!(run(&["train"]).0, EXIT_CONFIG);
    assert_eq!(run(&["bound"]).0, EXIT_CONFIG);
    assert_eq!(run(&["--jobs", "0", "bound", "--actions", "4"]).0, EXIT_CONFIG);
}

#[test]
fn runtime_errors_exit_with_runtime_code() {
    // 2^17 bitstrings is past the enumeration limit
    let (code, _, stderr) = run(&["globality", "--postfn", "global", "--qubits", "17", "--actions", "2"]);
    assert_eq!(code, EXIT_RUNTIME, "{stderr}");
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(&["enum", "--qubits", "6", "--actions", "4", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_RUNTIME);
}

#[test]
fn globality_values() {
    let (_, out, _) = run(&["globality", "--postfn", "global", "--qubits", "5", "--actions", "2"]);
    assert!(out.ends_with("G = 5 = 5\n"), "{out}");
    let (_, out, _) = run(&["globality", "--postfn", "msb", "--qubits", "4"]);
    assert!(out.ends_with("G = 1 = 1\n"), "{out}");
    let (_, out, _) = run(&["globality", "--postfn", "parity:3", "--qubits", "5", "--ei"]);
    assert_eq!(out.lines().count(), 2 + 32);
    assert!(out.lines().nth(1).unwrap() == "bits,action,ei");
}

#[test]
fn enum_small_and_sampled() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out, _) = run(&["enum", "--qubits", "2", "--actions", "2", "--out-dir", d]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("total = 3\n"), "{out}");
    assert_eq!(body(&dir.path().join("histogram.csv"))[0], "g_value,count");

    let sampled = |seed: &str| {
        run(&["enum", "--qubits", "6", "--actions", "4", "--sample", "50", "--seed", seed, "--out-dir", d]);
        fs::read(dir.path().join("histogram.csv")).unwrap()
    };
    assert_eq!(sampled("1"), sampled("1"));
    assert_ne!(sampled("1"), sampled("2"));

    let cli = crate::Cli::try_parse_from(["qpg", "enum", "--qubits", "6", "--actions", "4", "--sample"]).unwrap();
    assert!(matches!(cli.command, crate::Command::Enum { sample: Some(100_000), .. }));
}

#[test]
fn bound_from_actions() {
    assert_eq!(run(&["bound", "--actions", "4"]).1, "0.75\n");
}

#[test]
fn zero_beta_fim_is_zero_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[environment]
kind = "bandit"
states = 4
actions = 2

[model]
qubits = 2
depth = 1

[policy]
kind = "rsm"
beta = 0.0

[analysis]
states = "enumerate"
param_sets = 3
samples = 5
"#,
    );
    let out = dir.path().join("out");
    let (code, _, stderr) = run(&["fim", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{stderr}");
    let rows = body(&out.join("fim.csv"));
    // 2·2·2 theta + 2·2·1 lambda + 2 weights
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().all(|r| r.split(',').all(|v| v == "0")));
    let spectrum = body(&out.join("spectrum.csv"));
    assert_eq!(spectrum[1], "0,0.5,42");
}

#[test]
fn fim_and_effdim_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
seeds = [5]

[environment]
kind = "cartpole"

[model]
qubits = 4
depth = 1

[analysis]
param_sets = 4
samples = 10
data_sizes = [1000, 1000000]
"#,
    );
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    assert_eq!(run(&["fim", "--config", &cfg, "--out-dir", o]).0, EXIT_OK);
    assert_eq!(body(&out.join("fim.csv")).len(), 24);
    assert_eq!(body(&out.join("spectrum.csv"))[0], "bucket_low,bucket_high,count");
    let (code, stdout, _) = run(&["effdim", "--config", &cfg, "--out-dir", o]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.starts_with("parameters: 24\n"));
    let rows = body(&out.join("effdim.csv"));
    assert_eq!(rows[0], "data_size,eff_dim,normalized");
    assert_eq!(rows.len(), 3);
}

#[test]
fn bound_experiment_reports_each_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
seeds = [1, 2]

[environment]
kind = "bandit"
states = 8
actions = 4

[model]
qubits = 3
depth = 1

[policy]
kind = "rsm"

[training]
episodes = 20
"#,
    );
    let out = dir.path().join("out");
    let (code, stdout, stderr) = run(&["bound", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{stderr}");
    assert!(stdout.starts_with("bound 0.75\n"));
    assert_eq!(body(&out.join("bound.csv")).len(), 3);
}
