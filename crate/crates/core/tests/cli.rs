use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use prcurve::io::{load_curve, load_features};

fn prd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prd"))
        .args(args)
        .env("PRD_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = path(dir, name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn exact_histograms_to_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.csv", "0.2\n0.2\n0.2\n0.2\n0.2\n");
    let q = write(dir.path(), "q.csv", "1\n1\n1\n0\n0\n");
    let out = path(dir.path(), "curve.json");
    let r = prd(&[
        "exact",
        &p,
        &q,
        "--normalize",
        "--lambdas",
        "7",
        "--endpoints",
        "--out",
        &out,
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let curve = load_curve(Path::new(&out)).unwrap();
    assert_eq!(curve.len(), 9);
    let last = curve.points().last().unwrap();
    assert!(last.lambda.is_infinite() && (last.alpha - 1.0).abs() < 1e-15);
    assert!((curve.points()[0].beta - 0.6).abs() < 1e-15);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"inf\""));

    let csv = path(dir.path(), "curve.csv");
    let r = prd(&[
        "exact",
        &p,
        &q,
        "--normalize",
        "--lambdas",
        "7",
        "--format",
        "csv",
        "--out",
        &csv,
    ]);
    assert!(r.status.success());
    assert!(fs::read_to_string(&csv)
        .unwrap()
        .starts_with("lambda,alpha,beta\n"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(prd(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(prd(&["estimate", "only-one-file"]).status.code(), Some(1));
    assert_eq!(prd(&["--version"]).status.code(), Some(0));

    let p = write(dir.path(), "p.csv", "0.5\n0.5\n");
    let bad = write(dir.path(), "bad.csv", "0.5\n0.2\n");
    assert_eq!(prd(&["exact", &p, &bad]).status.code(), Some(2));
    let ragged = write(dir.path(), "ragged.csv", "1,2\n3\n");
    assert_eq!(prd(&["estimate", &ragged, &ragged]).status.code(), Some(2));
    let missing = path(dir.path(), "missing.csv");
    assert_eq!(prd(&["mcr", &p, &missing]).status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let r = Command::new(env!("CARGO_BIN_EXE_prd"))
        .args(["theoretical", "--max-precision", "1", "--max-recall", "0.5"])
        .env("PRD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn synth_then_estimate_recovers_the_corner() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let data_s = data.to_str().unwrap();
    let r = prd(&[
        "synth",
        "class-subset",
        "--q",
        "3",
        "--per-class",
        "200",
        "--seed",
        "4",
        "--out-dir",
        data_s,
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let real = path(&data, "real.csv");
    let fake = path(&data, "fake.csv");
    assert_eq!(load_features(Path::new(&real)).unwrap().rows(), 1000);

    let out_a = path(dir.path(), "a.json");
    let out_b = path(dir.path(), "b.json");
    for out in [&out_a, &out_b] {
        let r = prd(&[
            "estimate",
            &real,
            &fake,
            "--seed",
            "9",
            "--lambdas",
            "101",
            "--out",
            out,
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());

    let curve = load_curve(Path::new(&out_a)).unwrap();
    let corner = curve.nearest(5.0 / 3.0).unwrap();
    assert!(corner.alpha >= 0.95, "{corner:?}");
    assert!((corner.beta - 0.6).abs() <= 0.05, "{corner:?}");

    let spec = path(&data, "theoretical.json");
    let theo = path(dir.path(), "theo.json");
    let r = prd(&[
        "theoretical",
        "--spec",
        &spec,
        "--lambdas",
        "101",
        "--out",
        &theo,
    ]);
    assert!(r.status.success());
    let t = load_curve(Path::new(&theo)).unwrap();
    assert_eq!(t.lambdas(), curve.lambdas());
}

#[test]
fn estimate_side_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("g");
    let r = prd(&[
        "synth",
        "gaussian",
        "--mu1",
        "0",
        "--mu2",
        "2",
        "--per-side",
        "400",
        "--format",
        "binary",
        "--out-dir",
        data.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let real = path(&data, "real.prdf");
    let fake = path(&data, "fake.prdf");
    let scores = path(dir.path(), "scores.csv");
    let model = path(dir.path(), "model.json");
    let r = prd(&[
        "estimate",
        &real,
        &fake,
        "--members",
        "3",
        "--epochs",
        "5",
        "--lambdas",
        "11",
        "--emit-scores",
        &scores,
        "--emit-model",
        &model,
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let stdout = String::from_utf8(r.stdout).unwrap();
    assert!(stdout.contains("\"configHash\""));
    let model_text = fs::read_to_string(&model).unwrap();
    assert_eq!(
        prcurve::EnsembleModel::from_json(&model_text)
            .unwrap()
            .members
            .len(),
        3
    );

    let roc = path(dir.path(), "roc.json");
    let r = prd(&["roc", &scores, "--out", &roc]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(&roc).unwrap();
    assert!(text.contains("\"fpr\"") && text.contains("\"tpr\""));

    let theo = prd(&[
        "theoretical",
        "--spec",
        &path(&data, "theoretical.json"),
        "--lambdas",
        "3",
        "--format",
        "csv",
    ]);
    assert!(theo.status.success());
    // 2 * Phi(-1) at lambda = 1
    assert!(String::from_utf8(theo.stdout)
        .unwrap()
        .contains("3.17310507862914"));
}

#[test]
fn cluster_baseline_and_mcr() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("o");
    let r = prd(&[
        "synth",
        "class-overlap",
        "--classes",
        "8",
        "--ratio",
        "0.5",
        "--per-class",
        "20",
        "--out-dir",
        data.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let out = path(dir.path(), "base.csv");
    let r = prd(&[
        "cluster-baseline",
        &path(&data, "real.csv"),
        &path(&data, "fake.csv"),
        "--clusters",
        "12",
        "--lambdas",
        "5",
        "--format",
        "csv",
        "--out",
        &out,
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 6);

    let p = write(dir.path(), "p.csv", "0.5\n0.5\n");
    let q = write(dir.path(), "q.csv", "0.9\n0.1\n");
    let r = prd(&["mcr", &p, &q, "--format", "csv"]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.starts_with("epsilon,delta\n"), "{text}");
    assert!(
        text.contains("1.0000000000000001e-1,5.0000000000000000e-1"),
        "{text}"
    );
}
