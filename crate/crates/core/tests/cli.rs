use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spectral_nsr::io::{parse_signal, read_graph};
use spectral_nsr::laplacian::normalized_laplacian;
use spectral_nsr::spectral::{chebyshev_filter, ChebyshevFilter};
use spectral_nsr::trainer::Checkpoint;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectral-nsr"))
        .args(args)
        .env_remove("SPECTRAL_NSR_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_fixture(dir: &Path) {
    fs::write(dir.join("g.txt"), "N 4\nnode 0 fact a\nnode 1 proposition b\nnode 2 proposition c\nnode 3 proposition d\nedge 0 1 1\nedge 1 2 1\nedge 2 3 0.5\n").unwrap();
    fs::write(dir.join("x.txt"), "1\n0.2\n0\n-0.3\n").unwrap();
    fs::write(dir.join("kb.txt"), "atom a\natom b\natom c\natom d\nfact a\nclause b :- a\nclause c :- b\n").unwrap();
    fs::write(dir.join("f.json"), r#"{"lambda_max": 2.0, "coefficients": [0.5, -0.25, 0.1]}"#).unwrap();
}

#[test]
fn exit_codes_and_json_errors() {
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
    assert_eq!(cli(&["no-such-command"]).status.code(), Some(1));

    let missing = cli(&["--json-errors", "chain", "--kb", "/nonexistent/kb.txt"]);
    assert_eq!(missing.status.code(), Some(1));
    let payload: serde_json::Value = serde_json::from_slice(missing.stderr.trim_ascii()).unwrap();
    assert_eq!(payload["exit_code"], 1);
    assert!(payload["error"].is_string());
    assert!(payload["message"].as_str().unwrap().contains("/nonexistent/kb.txt"));

    // a checkpoint whose filter overflows at lambda_max is a numerical failure
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let ckpt = dir.path().join("ckpt.json");
    assert!(cli(&["gen", "--n", "20", "--out", path(&data)]).status.success());
    assert!(cli(&["train", "--data", path(&data), "--out", path(&ckpt), "--epochs", "1"]).status.success());
    let mut c = Checkpoint::load(&ckpt).unwrap();
    c.params.bands[0].iter_mut().for_each(|v| *v = 1e308);
    fs::write(&ckpt, c.to_json().unwrap()).unwrap();
    let numeric = cli(&["--json-errors", "response", "--ckpt", path(&ckpt)]);
    assert_eq!(numeric.status.code(), Some(2));
    let payload: serde_json::Value = serde_json::from_slice(numeric.stderr.trim_ascii()).unwrap();
    assert_eq!(payload["exit_code"], 2);
}

#[test]
fn gen_train_eval_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let ckpt = dir.path().join("best.json");
    let report = dir.path().join("report.json");
    let gen = cli(&["gen", "--family", "transitive", "--depth", "3", "--n", "50", "--seed", "2", "--out", path(&data)]);
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    assert!(data.join("rules.txt").exists());

    let trained = cli(&["train", "--data", path(&data), "--out", path(&ckpt), "--epochs", "3"]);
    assert!(trained.status.success(), "{}", String::from_utf8_lossy(&trained.stderr));
    let metrics = fs::read_to_string(format!("{}.metrics.csv", ckpt.display())).unwrap();
    assert!(metrics.starts_with("epoch,train_loss,val_acc,latency_ms\n"));

    let eval = cli(&["eval", "--ckpt", path(&ckpt), "--data", path(&data), "--report", path(&report), "--no-latency"]);
    assert!(eval.status.success());
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let acc = r["accuracy"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&acc));
    assert!(r["latency"].is_null());

    let inspect = stdout(&cli(&["inspect-ckpt", "--ckpt", path(&ckpt)]));
    assert!(inspect.contains("val_accuracy:") && inspect.contains("rule propagate"));

    let response = stdout(&cli(&["response", "--ckpt", path(&ckpt), "--samples", "16"]));
    let lines: Vec<&str> = response.lines().collect();
    assert_eq!(lines[0], "lambda,filter,rules,combined");
    assert_eq!(lines.len(), 17);
}

#[test]
fn filter_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let d = dir.path();
    let out = cli(&["filter", "--graph", path(&d.join("g.txt")), "--signal", path(&d.join("x.txt")), "--filter", path(&d.join("f.json"))]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let got = parse_signal(&stdout(&out)).unwrap();
    let g = read_graph(&d.join("g.txt")).unwrap();
    let x = parse_signal(&fs::read_to_string(d.join("x.txt")).unwrap()).unwrap();
    let f = ChebyshevFilter::new(vec![0.5, -0.25, 0.1], 2.0).unwrap();
    let want = chebyshev_filter(&normalized_laplacian(&g), &f, &x).unwrap();
    assert_eq!(got.values(), want.values());

    let spec = d.join("spec.txt");
    let exact = cli(&["filter", "--graph", path(&d.join("g.txt")), "--signal", path(&d.join("x.txt")), "--filter", path(&d.join("f.json")), "--path", "exact", "--spectrum", path(&spec)]);
    assert!(exact.status.success());
    let y = parse_signal(&stdout(&exact)).unwrap();
    let diff = y.values().iter().zip(want.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-10);
    assert_eq!(parse_signal(&fs::read_to_string(&spec).unwrap()).unwrap().len(), 4);

    let refused = cli(&["filter", "--graph", path(&d.join("g.txt")), "--signal", path(&d.join("x.txt")), "--filter", path(&d.join("f.json")), "--spectrum", path(&spec)]);
    assert_eq!(refused.status.code(), Some(1));
}

#[test]
fn chain_and_run() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let d = dir.path();
    let chain = stdout(&cli(&["chain", "--kb", path(&d.join("kb.txt"))]));
    assert_eq!(chain, "a\nb\nc\n");
    let traced = cli(&["chain", "--kb", path(&d.join("kb.txt")), "--trace"]);
    assert!(traced.status.success() && !traced.stdout.is_empty());

    let run = cli(&["run", "--graph", path(&d.join("g.txt")), "--signal", path(&d.join("x.txt")), "--kb", path(&d.join("kb.txt"))]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let answers: Vec<String> = stdout(&run).lines().map(str::to_string).collect();
    for atom in ["a", "b", "c"] {
        assert!(answers.iter().any(|a| a == atom));
    }
}
