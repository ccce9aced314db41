use std::path::Path;
use std::process::{Command, Output};

use tableau_core::io::serialize_document;
use tableau_core::tableau::STUDIED_ORDERS;
use tableau_testkit::generate::{disjunction_bomb, random_ontology, OntologyShape};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_todo-tableau"));
    c.env_remove("TODO_TABLEAU_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_corpus(dir: &Path, n: u64) {
    for seed in 0..n {
        let shape = OntologyShape { gcis: 3, max_depth: 1, total_axioms: 20 + 5 * seed as usize, counting: seed % 2 == 0, ..Default::default() };
        std::fs::write(dir.join(format!("k{seed:02}.ofs")), serialize_document(&random_ontology(seed, &shape))).unwrap();
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bomb.ofs");
    std::fs::write(&f, serialize_document(&disjunction_bomb(2))).unwrap();
    let f = f.to_str().unwrap();

    let o = run(&["check", f, "--concept", "C"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("UNSAT\n"));
    let o = run(&["check", f, "--concept", "A1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "SAT");

    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["check", f]).status.code(), Some(1));
    assert_eq!(run(&["check", f, "--concept", "C", "--config", "0123"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["bench", "--help"]).status.code(), Some(0));
    assert_eq!(run(&["parse", "/nonexistent.ofs"]).status.code(), Some(2));

    let bad = dir.path().join("bad.ofs");
    std::fs::write(&bad, "SubClassOf(:A").unwrap();
    assert_eq!(run(&["parse", bad.to_str().unwrap()]).status.code(), Some(2));

    let o = run(&["check", f, "--concept", "C", "--timeout", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("TIMEOUT"));
}

#[test]
fn parse_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("k.ofs");
    let doc = random_ontology(5, &OntologyShape::default());
    std::fs::write(&f, serialize_document(&doc)).unwrap();
    let o = run(&["parse", f.to_str().unwrap()]);
    assert_eq!(stdout(&o), serialize_document(&doc));
}

#[test]
fn classify_agrees_across_orders() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), 3);
    for seed in 0..3 {
        let f = dir.path().join(format!("k{seed:02}.ofs"));
        let outs: Vec<String> = STUDIED_ORDERS
            .iter()
            .map(|c| stdout(&run(&["classify", f.to_str().unwrap(), "--config", c, "--format", "csv"])))
            .collect();
        assert!(outs[0].starts_with("sub,super\n"));
        assert!(outs.iter().all(|o| *o == outs[0]));
    }
}

#[test]
fn full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    write_corpus(&corpus, 24);
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let c = corpus.to_str().unwrap();

    let o = run(&["bench", c, "--out", &p("runs.csv"), "--repeats", "1", "--timeout", "5000", "--jobs", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let runs = std::fs::read_to_string(p("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 25);
    assert!(runs.starts_with("ontology_id,"));

    let o = run(&["filter", &p("runs.csv"), "--delta", "0", "--out", &p("kept.csv")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(p("kept.csv")).unwrap().lines().count(), 25);

    let o = run(&["threshold", &p("runs.csv"), "--format", "json"]);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["configs"].as_array().unwrap().len(), 7);

    // timings on tiny KBs are noise; a fixed threshold splits them anyway
    let o = run(&["label", &p("runs.csv"), "--threshold", "1", "--out", &p("labels.csv")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(p("labels.csv")).unwrap().lines().count(), 1 + 24 * 7);

    let o = run(&["features", c, "--out", &p("features.csv")]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["features", c, "--format", "json"]);
    let feats: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(feats.as_array().unwrap().len(), 24);

    let train = |out: &str, seed: &str| {
        let o = bin()
            .args(["train", "--features", &p("features.csv"), "--labels", &p("labels.csv"), "--out", &p(out), "--folds", "4"])
            .env("TODO_TABLEAU_SEED", seed)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(p(out)).unwrap()
    };
    let a = train("a.json", "7");
    let b = train("b.json", "7");
    assert_eq!(a, b, "training is deterministic for a fixed seed");
    assert!(a.contains("\"seed\": 7"));

    let k0 = corpus.join("k00.ofs");
    let o = run(&["predict", "--model", &p("a.json"), k0.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let chosen = out.lines().next().unwrap();
    assert!(STUDIED_ORDERS.contains(&chosen), "{out}");
    assert_eq!(out.lines().count(), 8);

    let o = run(&["run", "--model", &p("a.json"), k0.to_str().unwrap(), "--compare-all", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"], chosen);
    assert!(v["speedup_vs_worst"].as_f64().unwrap() > 0.0);
}
