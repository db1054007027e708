use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spdelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spdelab")).args(args).env_remove("SPDE_LAB_THREADS").output().unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn eigen_writes_artifacts_and_a_replayable_config() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let o = spdelab(&["eigen", "--bc", "robin", "--alpha", "0.2", "--beta", "0.2", "--modes", "8", "--out", &out_arg(&a)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["eigen.csv", "summary.json", "manifest.json", "config.toml"] {
        assert!(a.join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(a.join("eigen.csv")).unwrap();
    assert!(csv.starts_with("n,lambda,eta,norm_factor\n"));
    assert_eq!(csv.lines().count(), 9);

    // Replaying the echoed config reproduces the table.
    let b = tmp.path().join("b");
    let cfg = a.join("config.toml");
    let o = spdelab(&["--config", cfg.to_str().unwrap(), "eigen", "--out", &out_arg(&b)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(a.join("eigen.csv")).unwrap(), fs::read(b.join("eigen.csv")).unwrap());
}

#[test]
fn configuration_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = spdelab(&["eigen", "--modes", "many"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"exit_code\":1"));

    let dir = tmp.path().join("bad");
    let o = spdelab(&["solve", "--dx", "0.3", "--out", &out_arg(&dir)]);
    assert_eq!(o.status.code(), Some(1));
    let diag = fs::read_to_string(dir.join("diagnostic.json")).unwrap();
    assert!(diag.contains("\"kind\": \"config\""));
}

#[test]
fn exclusion_threshold_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("kpz");
    let o = spdelab(&[
        "kpz", "--mu", "0.3", "--nu", "0.7", "--u0", "const:1e-13", "--dt", "0.01", "--dx", "0.125", "--modes", "8",
        "--horizon", "0.05", "--reps", "4", "--out", &out_arg(&dir),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.join("summary.json").exists());
    assert!(fs::read_to_string(dir.join("diagnostic.json")).unwrap().contains("\"exit_code\": 2"));
}

#[test]
fn artifacts_do_not_depend_on_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let dir = tmp.path().join(threads);
        let o = spdelab(&[
            "--threads", threads, "solve", "--b", "cos", "--sigma", "sin2", "--dt", "0.002", "--dx", "0.0625",
            "--modes", "16", "--horizon", "0.05", "--reps", "12", "--every", "5", "--seed", "11", "--dump", "--out",
            &out_arg(&dir),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(dir);
    }
    for f in ["moments.csv", "summary.json", "u.spdepath", "w.spdepath"] {
        assert_eq!(fs::read(outputs[0].join(f)).unwrap(), fs::read(outputs[1].join(f)).unwrap(), "{f}");
    }
    // The echoed config differs only in the output directory.
    let echo = |d: &std::path::Path| {
        let s = fs::read_to_string(d.join("config.toml")).unwrap();
        s.lines().filter(|l| !l.starts_with("out =")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(echo(&outputs[0]), echo(&outputs[1]));
}

#[test]
fn statistics_commands_read_archives() {
    let tmp = tempfile::tempdir().unwrap();
    let w = tmp.path().join("w");
    let o = spdelab(&[
        "sample-w", "--modes", "32", "--t-grid", "0.2:0.3:161", "--x-grid", "0.3:0.7:41", "--reps", "8", "--dump",
        "--out", &out_arg(&w),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let archive = w.join("paths.spdepath");
    let m = tmp.path().join("m");
    let o = spdelab(&[
        "modulus", "--input", archive.to_str().unwrap(), "--center", "0.25,0.5", "--ladder", "0.3,0.2", "--out",
        &out_arg(&m),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(m.join("summary.json")).unwrap();
    assert!(summary.contains("\"schema_version\": 1"));
    assert!(summary.contains("\"medians\""));
}
