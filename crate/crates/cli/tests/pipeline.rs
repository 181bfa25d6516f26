mod common;

use std::collections::BTreeMap;
use std::time::{Duration, SystemTime};

use common::*;
use scriptaffect::clustering::elbow_detect;
use scriptaffect::parser::CharacterDictionary;
use scriptaffect::EMOTION_COLUMNS;
use scriptaffect_cli::artifacts::ALL_ARTIFACTS;

#[test]
fn parse_matches_golden_dictionaries() {
    let out = tempfile::tempdir().unwrap();
    let o = run_fixture("parse", out.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let all: BTreeMap<String, CharacterDictionary> =
        serde_json::from_str(&read(&out.path().join("characters.json"))).unwrap();
    assert_eq!(all.len(), 3);
    for (movie, dict) in &all {
        let golden = read(&fixtures().join("golden").join(format!("{movie}.json")));
        assert_eq!(dict.to_json(), golden, "{movie}");
    }
    assert!(out.path().join("corpus.json").exists());
    assert!(!out.path().join("emotions.csv").exists());
}

#[test]
fn run_all_writes_every_artifact() {
    let out = tempfile::tempdir().unwrap();
    let o = run_fixture("run-all", out.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ALL_ARTIFACTS {
        assert!(out.path().join(name).exists(), "{name}");
    }
    let report: serde_json::Value = serde_json::from_str(&read(&out.path().join("report.json"))).unwrap();
    let summary = &report["summary"];
    assert_eq!(summary["characters"], 6);
    assert_eq!(summary["movies"], 3);
    assert_eq!(summary["female"], 3);
    assert_eq!(summary["male"], 3);
    let corpus = scriptaffect::Corpus::from_json(&read(&out.path().join("corpus.json"))).unwrap();
    assert_eq!(summary["dialogues"], corpus.summary().dialogues);
    assert_eq!(report["seed"], 42);

    // emotions.csv carries the 32 columns in canonical order
    let mut r = csv::Reader::from_path(out.path().join("emotions.csv")).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(&header[3..35], &EMOTION_COLUMNS.map(String::from)[..]);
    assert_eq!(csv_rows(&out.path().join("emotions.csv")).len(), 6);
    assert_eq!(csv_rows(&out.path().join("stats.csv")).len(), 32);

    // automatic k is the elbow of the curve that was written out
    let curve: Vec<(usize, f64)> = csv_rows(&out.path().join("ssecurve.csv"))
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(report["clustering"]["chosen_k"], elbow_detect(&curve).unwrap());
    let clusters = csv_rows(&out.path().join("clusters.csv"));
    let k = report["clustering"]["chosen_k"].as_u64().unwrap() as usize;
    let used: std::collections::BTreeSet<&str> = clusters.iter().map(|r| r[3].as_str()).collect();
    assert_eq!(used.len(), k);
}

#[test]
fn stages_compose_to_run_all() {
    let staged = tempfile::tempdir().unwrap();
    for stage in ["parse", "score", "stats", "cluster", "project", "words"] {
        let o = run_fixture(stage, staged.path(), &[]);
        assert!(o.status.success(), "{stage}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let whole = tempfile::tempdir().unwrap();
    assert!(run_fixture("run-all", whole.path(), &[]).status.success());
    for name in ALL_ARTIFACTS.iter().filter(|n| **n != "report.json") {
        assert_eq!(
            read(&staged.path().join(name)),
            read(&whole.path().join(name)),
            "{name}"
        );
    }
}

#[test]
fn missing_lexicon_names_the_path() {
    let out = tempfile::tempdir().unwrap();
    let f = fixtures();
    let o = bin()
        .args(["run-all", "--lexicon", "/no/such/lexicon.tsv", "--out"])
        .arg(out.path())
        .arg("--scripts")
        .arg(f.join("scripts"))
        .arg("--metadata")
        .arg(f.join("metadata.csv"))
        .output()
        .unwrap();
    assert!(!o.status.success());
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("/no/such/lexicon.tsv"), "{stderr}");
    assert!(!out.path().join("corpus.json").exists());
}

#[test]
fn later_stage_without_earlier_output_fails() {
    let out = tempfile::tempdir().unwrap();
    let o = run_fixture("cluster", out.path(), &[]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("emotions.csv"));
}

#[test]
fn stale_inputs_warn_or_fail_under_strict() {
    let root = tempfile::tempdir().unwrap();
    let src = root.path().join("src");
    std::fs::create_dir_all(src.join("scripts")).unwrap();
    for f in ["alpha.txt", "beta.txt", "gamma.jsonl"] {
        std::fs::copy(fixtures().join("scripts").join(f), src.join("scripts").join(f)).unwrap();
    }
    std::fs::copy(fixtures().join("metadata.csv"), src.join("metadata.csv")).unwrap();
    let out = root.path().join("out");
    let run = |stage: &str, strict: bool| {
        let mut c = bin();
        c.arg(stage)
            .arg("--scripts")
            .arg(src.join("scripts"))
            .arg("--metadata")
            .arg(src.join("metadata.csv"))
            .arg("--lexicon")
            .arg(fixtures().join("lexicon.tsv"))
            .arg("--out")
            .arg(&out);
        if strict {
            c.arg("--strict");
        }
        c.output().unwrap()
    };
    assert!(run("parse", false).status.success());
    // push the metadata's mtime past corpus.json
    let later = SystemTime::now() + Duration::from_secs(60);
    std::fs::File::options()
        .append(true)
        .open(src.join("metadata.csv"))
        .unwrap()
        .set_modified(later)
        .unwrap();

    let lenient = run("words", false);
    assert!(lenient.status.success());
    assert!(String::from_utf8_lossy(&lenient.stderr).contains("older than"));
    let strict = run("words", true);
    assert!(!strict.status.success());
    assert!(String::from_utf8_lossy(&strict.stderr).contains("corpus.json"));
}

#[test]
fn config_file_paths_are_relative_to_the_file() {
    let root = tempfile::tempdir().unwrap();
    let f = fixtures().canonicalize().unwrap();
    std::fs::write(
        root.path().join("run.toml"),
        format!(
            "script_dir = {:?}\nmetadata_path = {:?}\nlexicon_path = {:?}\noutput_dir = \"results\"\nk = 2\n",
            f.join("scripts"),
            f.join("metadata.csv"),
            f.join("lexicon.tsv")
        ),
    )
    .unwrap();
    let o = bin()
        .arg("run-all")
        .arg("--config")
        .arg(root.path().join("run.toml"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&read(&root.path().join("results/report.json"))).unwrap();
    assert_eq!(report["clustering"]["chosen_k"], 2);
    assert_eq!(report["clustering"]["k_mode"], "2");
}

#[test]
fn too_few_points_degrade_to_empty_tables() {
    let out = tempfile::tempdir().unwrap();
    // k larger than the six fixture characters
    let o = run_fixture("run-all", out.path(), &["--k", "9"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("cluster stage"));
    assert_eq!(read(&out.path().join("clusters.csv")), "movie,name,gender,kmeans_cluster,ward_cluster\n");
    assert!(csv_rows(&out.path().join("tsne.csv")).len() == 6);
}
