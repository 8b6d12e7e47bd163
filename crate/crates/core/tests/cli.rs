//! The installed binary: exit codes, outputs and reproducibility.

use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modecoupler")).args(args).output().expect("binary runs")
}

const UNIT: [&str; 12] = [
    "--omega", "1", "--kappa", "1", "--epsilon", "1", "--gamma-a", "1", "--gamma-b", "1", "--gamma", "0",
];

fn column(csv: &str, row: usize, name: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.nth(row).unwrap().split(',').nth(idx).unwrap().to_string()
}

#[test]
fn steady_reports_unit_state() {
    let mut args = vec!["steady"];
    args.extend(UNIT);
    let out = bin(&args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for row in 0..2 {
        let p11: f64 = column(&text, row, "p11").parse().unwrap();
        assert!((p11 - 2.0 / 3.0).abs() < 1e-11);
        for c in ["p22", "p33", "p44"] {
            let v: f64 = column(&text, row, c).parse().unwrap();
            assert!((v - 1.0 / 9.0).abs() < 1e-11);
        }
    }
    let dev: f64 = column(&text, 1, "max_abs_deviation").parse().unwrap();
    assert!(dev < 1e-12);
}

#[test]
fn figure_five_has_both_axes_and_concurrence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig5.csv");
    let out = bin(&["figure", "fig5", "--resolution", "64", "--output", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let header = text.lines().next().unwrap();
    for col in ["epsilon", "pdd0", "c", "c1", "c2"] {
        assert!(header.split(',').any(|h| h == col), "{col} missing from {header}");
    }
    assert_eq!(text.lines().count(), 64 * 64 + 1);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig5.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["regimes"][0], "balanced_collective_max");
}

#[test]
fn validate_passes_with_default_seed() {
    let out = bin(&["validate"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
    assert!(text.starts_with("seed 42"));
}

#[test]
fn identical_invocations_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let mut args = vec!["evolve", "--t-end", "10", "--samples", "20", "--output", path.to_str().unwrap()];
        args.extend(UNIT);
        assert!(bin(&args).status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
    let fig = |name: &str| {
        let path = dir.path().join(name);
        assert!(bin(&["figure", "fig3b", "--resolution", "16", "--output", path.to_str().unwrap()]).status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(fig("f1.csv"), fig("f2.csv"));
    let a = bin(&["validate", "--seed", "7"]).stdout;
    assert_eq!(a, bin(&["validate", "--seed", "7"]).stdout);
}

#[test]
fn exit_codes() {
    let out = bin(&["steady", "--kappa", "1", "--epsilon", "-2", "--gamma-a", "1", "--gamma-b", "1", "--gamma", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
    assert_eq!(bin(&["steady", "--params", "/no/such/file.json"]).status.code(), Some(2));
    let mut args = vec!["steady", "--output", "/no/such/dir/x.csv"];
    args.extend(UNIT);
    assert_eq!(bin(&args).status.code(), Some(2));
    assert_eq!(bin(&["figure", "fig3a", "--resolution", "4"]).status.code(), Some(1));
}

#[test]
fn thread_cap_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_modecoupler"))
            .args(["figure", "fig6b", "--resolution", "16"])
            .env("MODECOUPLER_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}
