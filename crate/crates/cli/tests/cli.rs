use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_signed-embed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn synth(dir: &Path) -> String {
    let g = dir.join("g.edges");
    let o = run(&["synth", "--size", "12", "--p-intra", "0.5", "--p-inter", "0.3", "--seed", "3", "--output", g.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    g.to_str().unwrap().to_owned()
}

fn small_config(dir: &Path) -> String {
    let c = dir.join("c.cfg");
    fs::write(&c, "embedding_dim=4\nouter_epochs=2\nd_epochs=2\ng_epochs=2\nsamples_per_center=5\neval.k_folds=3\n").unwrap();
    c.to_str().unwrap().to_owned()
}

#[test]
fn check_theorems_on_synthetic_graph() {
    let o = run(&["check-theorems", "--synthetic", "n=100", "seed=7"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("[PASS] normalization"), "{text}");
    let dev: f64 = text
        .split("max deviation ")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .and_then(|s| s.parse().ok())
        .unwrap();
    assert!(dev <= 1e-9);
}

#[test]
fn training_twice_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = synth(dir.path());
    let cfg = small_config(dir.path());
    let before = fs::read(&g).unwrap();
    for out in ["a", "b"] {
        let out = dir.path().join(out);
        let o = run(&["train", "--graph", &g, "--config", &cfg, "--seed", "5", "--output-dir", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["generator.emb", "discriminator.emb", "checkpoint.bin", "effective.cfg"] {
        assert_eq!(fs::read(dir.path().join("a").join(f)).unwrap(), fs::read(dir.path().join("b").join(f)).unwrap(), "{f}");
    }
    assert_eq!(fs::read(&g).unwrap(), before, "input untouched");
    let emb = fs::read_to_string(dir.path().join("a/discriminator.emb")).unwrap();
    assert!(emb.starts_with("# tool=signed-embed "));
    assert!(emb.contains("# config_hash="));
    assert!(emb.contains("# input_checksum.graph="));
    assert!(emb.contains("# config seed=5"));
}

#[test]
fn resumed_training_matches_uninterrupted() {
    let dir = tempfile::tempdir().unwrap();
    let g = synth(dir.path());
    let cfg = small_config(dir.path());
    let full = dir.path().join("full");
    let o = run(&["train", "--graph", &g, "--config", &cfg, "--output-dir", full.to_str().unwrap()]);
    assert!(o.status.success());

    let one = dir.path().join("one.cfg");
    fs::write(&one, fs::read_to_string(&cfg).unwrap().replace("outer_epochs=2", "outer_epochs=1")).unwrap();
    let part = dir.path().join("part");
    let o = run(&["train", "--graph", &g, "--config", one.to_str().unwrap(), "--output-dir", part.to_str().unwrap()]);
    assert!(o.status.success());
    let resumed = dir.path().join("resumed");
    let ckpt = part.join("checkpoint.bin");
    let o = run(&[
        "train", "--graph", &g, "--config", &cfg, "--resume", ckpt.to_str().unwrap(), "--threads", "3",
        "--output-dir", resumed.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // headers echo the thread count; the numbers must not depend on it
    let rows = |p: &Path| -> Vec<String> {
        fs::read_to_string(p).unwrap().lines().filter(|l| !l.starts_with('#')).map(str::to_owned).collect()
    };
    for f in ["generator.emb", "discriminator.emb"] {
        assert_eq!(rows(&full.join(f)), rows(&resumed.join(f)), "{f}");
    }
}

#[test]
fn predict_audit_and_sweep_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let g = synth(dir.path());
    let cfg = small_config(dir.path());
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();
    let o = run(&["train", "--graph", &g, "--config", &cfg, "--output-dir", out_s]);
    assert!(o.status.success());
    let emb = out.join("discriminator.emb");

    let o = run(&["predict", "--graph", &g, "--config", &cfg, "--emb", emb.to_str().unwrap(), "--feature", "hadamard", "--output-dir", out_s]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let metrics: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    let f1 = metrics["metrics"]["mean_averaged_micro_f1"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&f1));
    assert_eq!(metrics["metrics"]["folds"].as_array().unwrap().len(), 3);
    assert!(metrics["metadata"]["config_hash"].is_string());
    assert!(fs::read_to_string(out.join("metrics.csv")).unwrap().lines().count() == 4);

    let o = run(&["predict", "--graph", &g, "--config", &cfg, "--leakage", "fast", "--feature", "l1", "--output-dir", out_s]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = run(&["audit", "--graph", &g, "--emb", emb.to_str().unwrap(), "--output-dir", out_s]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let audit: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("audit.json")).unwrap()).unwrap();
    assert!(audit["audit"]["aped"].as_f64().unwrap() >= 0.0);
    assert!(audit["audit"]["aned"].as_f64().unwrap() >= 0.0);

    let o = run(&["sweep", "--graph", &g, "--config", &cfg, "--fractions", "0.2,0.4", "--repeats", "2", "--leakage", "fast", "--output-dir", out_s]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("schema_version,fraction"));
}

#[test]
fn convert_ratings_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ratings.csv");
    fs::write(&input, "10,20,5,1\n20,30,-3,2\n10,20,4,3\n30,30,1,4\n").unwrap();
    let output = dir.path().join("out.edges");
    let o = run(&["convert", "--input", input.to_str().unwrap(), "--output", output.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&output).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data, ["0 1 1", "1 2 -1"]);
    assert!(run(&["convert", "--input", input.to_str().unwrap(), "--output", input.to_str().unwrap()]).status.code() == Some(2));
}

#[test]
fn failures_exit_nonzero() {
    assert!(!run(&["train", "--graph", "/nonexistent/g.edges"]).status.success());
    assert!(!run(&["predict", "--graph", "x", "--feature", "cosine"]).status.success());
    assert!(!run(&["check-theorems", "--synthetic", "q=1"]).status.success());
    let o = run(&["train", "--graph", "/nonexistent/g.edges"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("sgraph"));
}
