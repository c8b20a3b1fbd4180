use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vasicek-shapes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn report_matches_first_catalogue_row() {
    let cfg = config("p1.cfg");
    let v = json(&["--config", cfg.to_str().unwrap(), "report"]);
    assert_eq!(v["matched_row"]["index"], 1);
    assert_eq!(
        v["matched_row"]["description"],
        "scale-proximal with rho >= 0"
    );
    assert_eq!(v["descriptor"]["region_count"], 5);
    assert_eq!(v["descriptor"]["graph_matches"], true);
    let passed = v["assumptions"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true);
    assert!(passed);
}

#[test]
fn short_rate_line_passes_five_regions() {
    let cfg = config("p3.cfg");
    let v = json(&[
        "--config",
        cfg.to_str().unwrap(),
        "short-rate",
        "--rate",
        "-0.386",
    ]);
    let codes: BTreeSet<&str> = v["shapes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["label"]["code"].as_str().unwrap())
        .collect();
    assert_eq!(v["count"], 5);
    assert_eq!(codes, BTreeSet::from(["d", "h", "hd", "hdh", "hdhd"]));
}

#[test]
fn classify_state_above_basepoint_is_inverse() {
    let cfg = config("p1.cfg");
    let v = json(&["--config", cfg.to_str().unwrap(), "classify", "0", "1"]);
    assert_eq!(v["label"]["name"], "inverse");
    assert_eq!(v["extrema"], 0);
    assert_eq!(v["boundary"], false);
    let v = json(&["--config", cfg.to_str().unwrap(), "classify", "-2.0", "0.7"]);
    assert_eq!(v["label"]["code"], "hd");
}

#[test]
fn emitted_files_are_reproducible() {
    let cfg = config("p2.cfg");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        for cmd in [
            &["decompose", "--resolution", "64"][..],
            &["probs", "--samples", "5000", "--seed", "3"],
        ] {
            let mut args = vec![
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                d.path().to_str().unwrap(),
            ];
            args.extend_from_slice(cmd);
            assert!(run(&args).status.success());
        }
    }
    for name in ["regions.csv", "descriptor.json", "graph.json", "probs.json"] {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} differs between runs");
    }
    let svg = std::fs::read_to_string(dirs[0].path().join("regions.svg")).unwrap();
    assert!(svg.contains(r#"stroke="red""#) && !svg.contains("href"));
}

#[test]
fn envelope_writes_csv_svg_and_json() {
    let cfg = config("p3.cfg");
    let d = tempfile::tempdir().unwrap();
    let v = json(&[
        "--config",
        cfg.to_str().unwrap(),
        "--curve",
        "yield",
        "--out",
        d.path().to_str().unwrap(),
        "envelope",
    ]);
    assert_eq!(v["kind"], "yield");
    let csv = std::fs::read_to_string(d.path().join("envelope.csv")).unwrap();
    let first = csv.lines().nth(1).unwrap();
    // 17 significant digits per number
    let z1 = first.split(',').nth(1).unwrap();
    assert_eq!(
        z1.split('e')
            .next()
            .unwrap()
            .trim_start_matches('-')
            .replace('.', "")
            .len(),
        17
    );
    assert!(d.path().join("envelope.svg").exists());
}

#[test]
fn exit_codes_distinguish_config_errors() {
    assert_eq!(run(&["classify", "0", "0"]).status.code(), Some(2));
    let d = tempfile::tempdir().unwrap();
    let bad = d.path().join("bad.cfg");
    std::fs::write(
        &bad,
        "lambda1 = 2\nlambda2 = 1\nsigma1 = 1\nsigma2 = 1\nrho = 0\n",
    )
    .unwrap();
    let o = run(&["--config", bad.to_str().unwrap(), "classify", "0", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda1"));
    let cfg = config("p1.cfg");
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--curve",
        "spot",
        "envelope",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--config", "/nonexistent.cfg", "envelope"]);
    assert_eq!(o.status.code(), Some(2));
}
