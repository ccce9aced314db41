use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;
use tableau_core::bench::{
    assign_labels, benchmark_ontology, compute_threshold, filter_corpus, Runtime, RuntimeRecord, CONFIG_COUNT,
};
use tableau_core::features::{extract_features, FeatureVector, FEATURE_NAMES};
use tableau_core::io::{
    parse_class_expression, parse_document, read_benchmark_table, read_feature_table, read_label_table, serialize_document,
    write_benchmark_table, write_feature_table, write_label_table, SourceDocument,
};
use tableau_core::kb::KnowledgeBase;
use tableau_core::services::{classify_hierarchy, ClassifyResult};
use tableau_core::tableau::{check_satisfiability, ExpansionStats, OrderConfig, Verdict, STUDIED_ORDERS};
use tableau_learn::{select_order_config, train_bundle, Grid, ModelBundle, TrainOptions};

use crate::{Command, Failure, Format};

type Outcome = Result<(), Failure>;

fn data(context: impl std::fmt::Display) -> impl FnOnce(&dyn std::fmt::Display) -> Failure {
    move |e| Failure::Data(format!("{context}: {e}"))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| data(path.display())(&e))
}

fn load(path: &Path) -> Result<SourceDocument, Failure> {
    parse_document(&read_text(path)?).map_err(|e| data(path.display())(&e))
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| data(path.display())(&e))
}

/// Stdout unless a path is given.
fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| data(p.display())(&e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    let mut w = sink(out)?;
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(|e| data("write")(&e))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Files given directly plus every `.ofs` file inside given directories, in
/// name order. Ids are file stems.
fn corpus(inputs: &[PathBuf]) -> Result<Vec<(String, PathBuf)>, Failure> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)
                .map_err(|e| data(input.display())(&e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "ofs"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files
        .into_iter()
        .map(|p| (p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned()), p))
        .collect())
}

fn runtime_json(r: Runtime) -> serde_json::Value {
    match r {
        Runtime::Millis(ms) => json!(ms),
        Runtime::Timeout => json!("TO"),
    }
}

fn records_json(records: &[RuntimeRecord]) -> serde_json::Value {
    records
        .iter()
        .map(|r| {
            let runs: serde_json::Map<String, serde_json::Value> =
                STUDIED_ORDERS.iter().zip(r.runtimes).map(|(c, t)| (c.to_string(), runtime_json(t))).collect();
            json!({ "id": r.id, "runtimes": runs })
        })
        .collect()
}

fn stats_lines(stats: &ExpansionStats) -> String {
    ExpansionStats::CSV_HEADER
        .split(',')
        .zip(stats.csv_row().split(','))
        .map(|(k, v)| format!("{k}: {v}\n"))
        .collect()
}

pub fn dispatch(command: Command, seed: u64) -> Outcome {
    match command {
        Command::Parse { file, summary } => parse(&file, summary),
        Command::Check { file, concept, engine, format } => check(&file, &concept, &engine.config, engine.timeout, format),
        Command::Classify { file, engine, format } => classify(&file, &engine.config, engine.timeout, format),
        Command::Features { inputs, out, format } => features(&inputs, out.as_deref(), format),
        Command::Bench { inputs, out, timeout, repeats, jobs, format } => {
            bench(&inputs, out.as_deref(), timeout, repeats, jobs, format)
        }
        Command::Filter { runs, delta, out, format } => filter(&runs, delta, out.as_deref(), format),
        Command::Threshold { runs, format } => threshold(&runs, format),
        Command::Label { runs, threshold, out, format } => label(&runs, threshold, out.as_deref(), format),
        Command::Train { features, labels, out, folds, holdout } => train(&features, &labels, &out, folds, holdout, seed),
        Command::Predict { model, file, format } => predict(&model, &file, format),
        Command::Run { model, file, timeout, compare_all, format } => run(&model, &file, timeout, compare_all, format),
    }
}

fn parse(file: &Path, summary: bool) -> Outcome {
    let doc = load(file)?;
    if !summary {
        return emit(None, &serialize_document(&doc));
    }
    let kb = doc.knowledge_base();
    let text = format!(
        "axioms: {}\ntbox: {}\nrbox: {}\nabox: {}\nclasses: {}\nroles: {}\nindividuals: {}\n",
        doc.axioms.len(),
        kb.tbox.len(),
        kb.rbox.len(),
        kb.abox.len(),
        kb.signature.classes.len(),
        kb.signature.roles.len(),
        kb.signature.individuals.len(),
    );
    emit(None, &text)
}

fn check(file: &Path, concept: &str, config: &OrderConfig, timeout: u64, format: Option<Format>) -> Outcome {
    let kb = load(file)?.knowledge_base();
    let c = parse_class_expression(concept).map_err(|e| Failure::Usage(format!("--concept: {e}")))?;
    let res = check_satisfiability(&kb, &c, config, timeout).map_err(|e| data(file.display())(&e))?;
    let text = match format {
        None => format!("{}\n{}", res.verdict, stats_lines(&res.stats)),
        Some(Format::Csv) => format!("verdict,{}\n{},{}\n", ExpansionStats::CSV_HEADER, res.verdict, res.stats.csv_row()),
        Some(Format::Json) => to_json(&json!({ "verdict": res.verdict.to_string(), "config": config.source(), "stats": res.stats })),
    };
    emit(None, &text)?;
    match res.verdict {
        Verdict::Timeout => Err(Failure::Timeout(format!("no verdict within {timeout} ms"))),
        _ => Ok(()),
    }
}

fn classify_kb(file: &Path, kb: &KnowledgeBase, config: &OrderConfig, timeout: u64) -> Result<ClassifyResult, Failure> {
    classify_hierarchy(kb, config, timeout).map_err(|e| data(file.display())(&e))
}

fn classify(file: &Path, config: &OrderConfig, timeout: u64, format: Option<Format>) -> Outcome {
    let kb = load(file)?.knowledge_base();
    let res = classify_kb(file, &kb, config, timeout)?;
    let text = match (format, &res.hierarchy) {
        (Some(Format::Json), _) => to_json(&res),
        (_, None) => String::new(),
        (Some(Format::Csv), Some(h)) => {
            let mut s = String::from("sub,super\n");
            for (sub, sup) in &h.direct {
                s.push_str(&format!("{sub},{sup}\n"));
            }
            s
        }
        (None, Some(h)) => h.to_lines().join("\n") + "\n",
    };
    emit(None, &text)?;
    if res.timed_out() {
        return Err(Failure::Timeout(format!("classification did not finish within {timeout} ms")));
    }
    log::info!("{} tests in {:.1} ms", res.tests, res.elapsed_ms);
    Ok(())
}

fn features(inputs: &[PathBuf], out: Option<&Path>, format: Format) -> Outcome {
    let rows = corpus(inputs)?
        .into_iter()
        .map(|(id, path)| Ok((id, extract_features(&load(&path)?))))
        .collect::<Result<Vec<(String, FeatureVector)>, Failure>>()?;
    match format {
        Format::Csv => write_feature_table(sink(out)?, &rows).map_err(|e| data("feature table")(&e)),
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(id, fv)| {
                    let named: serde_json::Map<String, serde_json::Value> =
                        FEATURE_NAMES.iter().zip(fv.values()).map(|(n, v)| (n.to_string(), json!(v))).collect();
                    json!({ "id": id, "features": named })
                })
                .collect();
            emit(out, &to_json(&v))
        }
    }
}

fn write_records(records: &[RuntimeRecord], out: Option<&Path>, format: Format) -> Outcome {
    match format {
        Format::Csv => write_benchmark_table(sink(out)?, records).map_err(|e| data("benchmark table")(&e)),
        Format::Json => emit(out, &to_json(&records_json(records))),
    }
}

fn bench(inputs: &[PathBuf], out: Option<&Path>, timeout: u64, repeats: usize, jobs: usize, format: Format) -> Outcome {
    let files = corpus(inputs)?;
    let configs = OrderConfig::studied();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Failure::Usage(format!("--jobs: {e}")))?;
    let records = pool.install(|| {
        files
            .par_iter()
            .map(|(id, path)| {
                let doc = load(path)?;
                let rec = benchmark_ontology(id, &doc, &configs, repeats, timeout).map_err(|e| data(path.display())(&e))?;
                log::info!("{id} done");
                Ok(rec)
            })
            .collect::<Result<Vec<_>, Failure>>()
    })?;
    write_records(&records, out, format)?;
    let slots = records.len() * CONFIG_COUNT;
    let timeouts = records.iter().flat_map(|r| r.runtimes).filter(|r| r.is_timeout()).count();
    if slots > 0 && 2 * timeouts > slots {
        return Err(Failure::Timeout(format!("{timeouts} of {slots} runs timed out")));
    }
    Ok(())
}

fn read_runs(path: &Path) -> Result<Vec<RuntimeRecord>, Failure> {
    read_benchmark_table(open(path)?).map_err(|e| data(path.display())(&e))
}

fn filter(runs: &Path, delta: f64, out: Option<&Path>, format: Format) -> Outcome {
    let result = filter_corpus(&read_runs(runs)?, delta);
    for (r, reason) in &result.excluded {
        log::info!("excluded {} ({reason})", r.id);
    }
    eprintln!("kept {}, excluded {}", result.kept.len(), result.excluded.len());
    write_records(&result.kept, out, format)
}

fn threshold(runs: &Path, format: Option<Format>) -> Outcome {
    let report = compute_threshold(&read_runs(runs)?);
    let text = match format {
        Some(Format::Json) => to_json(&report),
        _ => {
            let mut s = String::from("config,mean,std,mean_plus_std,samples\n");
            for (cfg, m) in STUDIED_ORDERS.iter().zip(&report.configs) {
                match m {
                    Some(m) => s.push_str(&format!("{cfg},{:.3},{:.3},{:.3},{}\n", m.mean, m.std, m.mean_plus_std, m.samples)),
                    None => s.push_str(&format!("{cfg},,,,0\n")),
                }
            }
            if format.is_none() {
                s.push_str(&format!("threshold_ms: {}\n", report.threshold_ms));
            } else {
                s.push_str(&format!("threshold,,,{},\n", report.threshold_ms));
            }
            s
        }
    };
    emit(None, &text)
}

fn label(runs: &Path, threshold: Option<u64>, out: Option<&Path>, format: Format) -> Outcome {
    let records = read_runs(runs)?;
    let tau = threshold.unwrap_or_else(|| compute_threshold(&records).threshold_ms);
    let table = assign_labels(&records, tau);
    match format {
        Format::Csv => write_label_table(sink(out)?, &table).map_err(|e| data("label table")(&e)),
        Format::Json => {
            let rows: Vec<_> = table
                .rows
                .iter()
                .map(|(id, ls)| {
                    let m: serde_json::Map<String, serde_json::Value> =
                        STUDIED_ORDERS.iter().zip(ls).map(|(c, l)| (c.to_string(), json!(l.to_string()))).collect();
                    json!({ "id": id, "labels": m })
                })
                .collect();
            emit(out, &to_json(&json!({ "threshold_ms": tau, "rows": rows })))
        }
    }
}

fn train(features: &Path, labels: &Path, out: &Path, folds: usize, holdout: f64, seed: u64) -> Outcome {
    if !(0.0..1.0).contains(&holdout) {
        return Err(Failure::Usage(format!("--holdout must lie in [0, 1), got {holdout}")));
    }
    if folds < 2 {
        return Err(Failure::Usage("--folds must be at least 2".into()));
    }
    let feats = read_feature_table(open(features)?).map_err(|e| data(features.display())(&e))?;
    let table = read_label_table(open(labels)?).map_err(|e| data(labels.display())(&e))?;
    let opts = TrainOptions { grid: Grid::default(), folds, seed, holdout };
    let bundle = train_bundle(&feats, &table, &opts).map_err(|e| data("training")(&e))?;
    for c in &bundle.configs {
        let f1 = c.holdout_f1.map_or_else(|| "-".to_string(), |f| format!("{f:.3}"));
        eprintln!("config {} ({}): cv accuracy {:.3}, holdout F1 {f1}", c.label, c.config, c.cv_accuracy);
    }
    emit(Some(out), &bundle.to_json())
}

fn load_bundle(model: &Path) -> Result<ModelBundle, Failure> {
    ModelBundle::from_json(&read_text(model)?).map_err(|e| data(model.display())(&e))
}

fn predict(model: &Path, file: &Path, format: Option<Format>) -> Outcome {
    let bundle = load_bundle(model)?;
    let fv = extract_features(&load(file)?);
    let sel = select_order_config(&fv, &bundle);
    let text = match format {
        Some(Format::Json) => to_json(&json!({ "config": sel.config_string(), "label": sel.config, "case": sel.case, "predictions": label_map(&sel.predictions) })),
        Some(Format::Csv) => {
            let mut s = String::from("config,prediction,chosen\n");
            for (i, p) in sel.predictions.iter().enumerate() {
                s.push_str(&format!("{},{},{}\n", STUDIED_ORDERS[i], good_bad(*p), i + 1 == sel.config));
            }
            s
        }
        None => {
            let mut s = format!("{}\n", sel.config_string());
            for (i, p) in sel.predictions.iter().enumerate() {
                s.push_str(&format!("{} {} {}\n", i + 1, STUDIED_ORDERS[i], good_bad(*p)));
            }
            s
        }
    };
    emit(None, &text)
}

fn good_bad(p: bool) -> &'static str {
    if p {
        "Good"
    } else {
        "Bad"
    }
}

fn label_map(preds: &[bool]) -> serde_json::Map<String, serde_json::Value> {
    STUDIED_ORDERS.iter().zip(preds).map(|(c, p)| (c.to_string(), json!(good_bad(*p)))).collect()
}

fn run(model: &Path, file: &Path, timeout: u64, compare_all: bool, format: Option<Format>) -> Outcome {
    let bundle = load_bundle(model)?;
    let doc = load(file)?;
    let sel = select_order_config(&extract_features(&doc), &bundle);
    let kb = doc.knowledge_base();
    let configs = OrderConfig::studied();
    let chosen = classify_kb(file, &kb, &configs[sel.config - 1], timeout)?;
    let ms = |r: &ClassifyResult| (!r.timed_out()).then_some(r.elapsed_ms);
    let mut report = json!({
        "config": sel.config_string(),
        "case": sel.case,
        "elapsed_ms": ms(&chosen),
    });
    let mut text = format!("{} {}\n", sel.config_string(), ms(&chosen).map_or("TIMEOUT".to_string(), |m| format!("{m:.1} ms")));
    if compare_all {
        let all: Vec<Option<f64>> = configs
            .iter()
            .map(|c| classify_kb(file, &kb, c, timeout).map(|r| ms(&r)))
            .collect::<Result<_, _>>()?;
        let finished: Vec<f64> = all.iter().flatten().copied().collect();
        let worst = if all.iter().any(Option::is_none) { Some(timeout as f64) } else { finished.iter().copied().reduce(f64::max) };
        let best = finished.iter().copied().reduce(f64::min);
        let selected = ms(&chosen);
        let vs_worst = selected.zip(worst).map(|(s, w)| w / s.max(1e-3));
        let vs_best = selected.zip(best).map(|(s, b)| s / b.max(1e-3));
        for (c, t) in STUDIED_ORDERS.iter().zip(&all) {
            text.push_str(&format!("  {c} {}\n", t.map_or("TIMEOUT".to_string(), |m| format!("{m:.1} ms"))));
        }
        text.push_str(&format!(
            "speedup vs worst: {}\nslowdown vs best: {}\n",
            vs_worst.map_or("-".into(), |v| format!("{v:.2}")),
            vs_best.map_or("-".into(), |v| format!("{v:.2}")),
        ));
        report["all_ms"] = json!(STUDIED_ORDERS.iter().zip(&all).map(|(c, t)| (c.to_string(), json!(t))).collect::<serde_json::Map<_, _>>());
        report["speedup_vs_worst"] = json!(vs_worst);
        report["slowdown_vs_best"] = json!(vs_best);
    }
    match format {
        Some(Format::Json) => emit(None, &to_json(&report))?,
        _ => emit(None, &text)?,
    }
    if chosen.timed_out() {
        return Err(Failure::Timeout(format!("classification with {} did not finish within {timeout} ms", sel.config_string())));
    }
    Ok(())
}
