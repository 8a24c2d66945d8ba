use std::path::Path;
use std::process::{Command, Output};

use nalgebra::DMatrix;

fn eigengesture(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eigengesture"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_csv_matrix(path: &Path) -> DMatrix<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect();
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn missing_input_fails_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let missing = tmp.path().join("nope/corpus.json");
    let o = eigengesture(&[
        "run",
        "--input",
        missing.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(5));
    assert!(!out.exists());
}

#[test]
fn unknown_realisation_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = eigengesture(&[
        "reconstruct",
        "--synth",
        "k=4,l=5,rank=3,noise=0",
        "--gesture",
        "9:1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(9, 1)"));
    assert!(!out.exists());
}

#[test]
fn bad_flags_are_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = eigengesture(&[
        "run",
        "--synth",
        "k=4,l=5",
        "--quantiles",
        "0.9,0.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = eigengesture(&["run", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = eigengesture(&["run", "--synth", "bogus=1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn full_rank_reconstruction_is_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = eigengesture(&[
        "reconstruct",
        "--synth",
        "k=4,l=5,rank=6,noise=0.05",
        "--rank",
        "20",
        "--gesture",
        "2:3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let original = read_csv_matrix(&out.join("reconstruction/gesture_k02_l03_original.csv"));
    let approx = read_csv_matrix(&out.join("reconstruction/gesture_k02_l03_rank020.csv"));
    assert_eq!(original.shape(), (20, 10));
    assert!((original - approx).amax() < 1e-8);
    assert!(out.join("reconstruction/gesture_k02_l03_rank020.svg").exists());
}

#[test]
fn rank_three_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = eigengesture(&[
        "error-curve",
        "--synth",
        "k=6,l=5,rank=3,noise=0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    let curve = r["analysis"]["error_curve"].as_array().unwrap();
    assert_eq!(curve[0].as_f64(), Some(1.0));
    assert!(curve[2].as_f64().unwrap() < 1e-8);
    assert_eq!(r["analysis"]["numerical_rank"].as_u64(), Some(3));
    let csv = std::fs::read_to_string(out.join("error_curve.csv")).unwrap();
    assert!(csv.starts_with("n,d_n\n1,1.0\n"));
}

#[test]
fn repeated_runs_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let dirs = ["a", "b"].map(|d| tmp.path().join(d));
    for d in &dirs {
        let o = eigengesture(&[
            "run",
            "--synth",
            "k=5,l=5,rank=4",
            "--seed",
            "3",
            "--emit",
            "corpus,data_matrix,spectrum,error_curve,eigengestures,reconstruction,plots",
            "--out",
            d.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let list = |d: &Path| {
        let mut v: Vec<String> = report(d)["artifacts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| p.as_str().unwrap().to_string())
            .collect();
        v.push("report.json".into());
        v
    };
    let files = list(&dirs[0]);
    assert_eq!(files, list(&dirs[1]));
    for f in &files {
        assert_eq!(
            std::fs::read(dirs[0].join(f)).unwrap(),
            std::fs::read(dirs[1].join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn synth_then_load_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    let o = eigengesture(&["synth", "--synth", "k=4,l=5,rank=3", "--out", a.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = a.join("corpus/corpus.json");
    let o = eigengesture(&[
        "decompose",
        "--input",
        manifest.to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = eigengesture(&["decompose", "--synth", "k=4,l=5,rank=3", "--out", c.to_str().unwrap()]);
    assert!(o.status.success());
    // Recordings are stored bit-exactly, so the spectrum matches the in-memory run.
    assert_eq!(
        std::fs::read(b.join("spectrum.csv")).unwrap(),
        std::fs::read(c.join("spectrum.csv")).unwrap()
    );
}

#[test]
fn physical_order_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = eigengesture(&[
        "decompose",
        "--synth",
        "k=4,l=5,rank=3",
        "--order",
        "physical",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&out)["config"]["order"], "physical");
}
