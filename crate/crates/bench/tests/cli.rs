use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gssd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gssd")).args(args).output().unwrap()
}

/// CSV body with the timing column blanked.
fn without_timing(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|line| match line.rsplit_once(',') {
            Some((head, _)) if !line.starts_with('#') => head.to_string(),
            _ => line.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

const SMALL: &[&str] = &["--dim", "3", "--sizes", "20,40", "--runs", "2", "--projections", "6"];

#[test]
fn experiment_output_is_reproducible_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<_> = ["1", "8", "8"]
        .iter()
        .enumerate()
        .map(|(k, workers)| {
            let path = dir.path().join(format!("run{k}.csv"));
            let mut args = vec!["sample-complexity", "--div", "swd,mmd,skd", "--workers", workers, "--out"];
            args.push(path.to_str().unwrap());
            args.extend_from_slice(SMALL);
            let out = gssd(&args);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            without_timing(&path)
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[1], outs[2]);
    let lines: Vec<&str> = outs[0].lines().collect();
    assert!(lines[0].starts_with("# gssd-bench "));
    assert_eq!(lines[3], "experiment,divergence,d,n,sigma,L,run,value,std_error");
    // 2 sizes x 2 runs x 3 divergences.
    assert_eq!(lines.len() - 4, 12);
}

#[test]
fn every_command_runs() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, extra) in [
        ("projection-complexity", vec!["--proj-grid", "2,4", "--l-ref", "8"]),
        ("noise-sweep", vec!["--sigmas", "0,1,3"]),
        ("displacement", vec!["--shifts", "1,2,3"]),
        ("bound", vec![]),
    ] {
        let path = dir.path().join(format!("{cmd}.csv"));
        let mut args = vec![cmd, "--out", path.to_str().unwrap()];
        args.extend_from_slice(SMALL);
        args.extend(extra);
        let out = gssd(&args);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.lines().filter(|l| !l.starts_with('#')).count() > 1, "{cmd}");
    }
}

#[test]
fn compare_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.csv");
    fs::write(&x, "a,b\n0,1\n1,2\n2,0.5\n").unwrap();
    let out = gssd(&["compare", x.to_str().unwrap(), x.to_str().unwrap(), "--sigmas", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["mean_pow"], 0.0);
    assert_eq!(report["d"], 2);
    assert_eq!(report["L"], 50);
    assert!(report["version"].is_string());
}

#[test]
fn ragged_input_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y, out_path) = (dir.path().join("x.csv"), dir.path().join("y.csv"), dir.path().join("r.json"));
    fs::write(&x, "0,1\n1,2\n").unwrap();
    fs::write(&y, "0,1\n1\n").unwrap();
    let out = gssd(&["compare", x.to_str().unwrap(), y.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 2") && err.contains("column 2"), "{err}");
    assert!(!out_path.exists());
}

#[test]
fn dimension_mismatch_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = (dir.path().join("x.csv"), dir.path().join("y.csv"));
    fs::write(&x, "0,1\n1,2\n").unwrap();
    fs::write(&y, "0,1,2\n").unwrap();
    assert!(!gssd(&["compare", x.to_str().unwrap(), y.to_str().unwrap()]).status.success());
}

#[test]
fn bad_arguments_are_rejected() {
    assert!(!gssd(&["sample-complexity", "--runs", "0"]).status.success());
    assert!(!gssd(&["sample-complexity", "--div", "kl"]).status.success());
    assert!(!gssd(&["bound", "--vartheta", "1.0"]).status.success());
}
