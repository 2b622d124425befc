use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gextext::formats;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn gextext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gextext"))
        .args(args)
        .env_remove("RUST_LOG")
        .env_remove("NCBI_API_KEY")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = gextext(args);
    assert!(
        out.status.success(),
        "gextext {args:?} failed\nstdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_exits_zero_for_every_subcommand() {
    assert!(gextext(&["--help"]).status.success());
    for sub in [
        "ingest",
        "infer",
        "glove",
        "ontosim",
        "geneoverlap",
        "eval",
        "synth",
        "fetch",
    ] {
        let out = gextext(&[sub, "--help"]);
        assert!(out.status.success(), "{sub} --help");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"), "{sub}");
    }
}

struct Pipeline {
    dir: TempDir,
}

impl Pipeline {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// synth, ingest, infer and eval on a small planted world.
    fn run(seed: &str) -> Self {
        let p = Pipeline {
            dir: tempfile::tempdir().unwrap(),
        };
        let world = p.path("world");
        ok(&[
            "synth",
            "--terms",
            "20",
            "--density",
            "0.15",
            "--chunks",
            "600",
            "--noise",
            "0",
            "--seed",
            seed,
            "--out-dir",
            s(&world),
        ]);
        ok(&[
            "ingest",
            "--corpus",
            s(&world.join("corpus.jsonl")),
            "--vocab",
            s(&world.join("vocab.txt")),
            "--out",
            s(&p.path("x.tsv")),
        ]);
        ok(&[
            "infer",
            "--occurrence",
            s(&p.path("x.tsv")),
            "--graph-out",
            s(&p.path("graph.tsv")),
            "--similarity-out",
            s(&p.path("geodesic.tsv")),
            "--stats-out",
            s(&p.path("stats.json")),
        ]);
        ok(&[
            "eval",
            "--pred",
            &format!("gextext={}", s(&p.path("geodesic.tsv"))),
            "--ref",
            &format!("truth={}", s(&world.join("true_similarity.tsv"))),
            "--occurrence",
            s(&p.path("x.tsv")),
            "--mask",
            "both",
            "--out",
            s(&p.path("report.tsv")),
            "--long-out",
            s(&p.path("long.tsv")),
            "--graph",
            s(&p.path("graph.tsv")),
            "--true-graph",
            s(&world.join("true_graph.tsv")),
        ]);
        p
    }
}

#[test]
fn planted_pipeline_end_to_end() {
    let p = Pipeline::run("7");
    let report = std::fs::read_to_string(p.path("report.tsv")).unwrap();
    let mut lines = report.lines();
    assert_eq!(lines.next(), Some("reference\trho\tp\tm_pairs\tmask"));
    let row: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert_eq!(row[0], "truth");
    assert_eq!(row[4], "all");
    let rho: f64 = row[1].parse().unwrap();
    assert!(rho >= 0.5, "rho {rho}");
    assert!(row[2].parse::<f64>().unwrap() < 1e-6);

    for name in [
        "x.tsv.manifest.json",
        "geodesic.tsv.manifest.json",
        "report.tsv.manifest.json",
    ] {
        let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.path(name)).unwrap()).unwrap();
        assert_eq!(m["tool"], "gextext");
        assert!(!m["outputs"].as_array().unwrap().is_empty(), "{name}");
    }
    let synth: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p.path("world/synth.manifest.json")).unwrap()).unwrap();
    assert_eq!(synth["seed"], 7);
    assert!(p.path("graph.tsv.isolated.txt").exists());
    assert!(p.path("long.tsv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let a = Pipeline::run("11");
    let b = Pipeline::run("11");
    for name in [
        "world/corpus.jsonl",
        "world/true_similarity.tsv",
        "x.tsv",
        "x.tsv.meta.json",
        "graph.tsv",
        "geodesic.tsv",
        "stats.json",
        "report.tsv",
        "long.tsv",
    ] {
        let (x, y) = (
            std::fs::read(a.path(name)).unwrap(),
            std::fs::read(b.path(name)).unwrap(),
        );
        assert!(x == y, "{name} differs between runs");
    }
    // Manifests name their own temp paths, so compare the hashes only.
    let hashes = |p: &Pipeline| -> Vec<String> {
        let m: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(p.path("report.tsv.manifest.json")).unwrap()).unwrap();
        m["outputs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|o| o["sha256"].to_string())
            .collect()
    };
    assert_eq!(hashes(&a), hashes(&b));
}

#[test]
fn infer_on_empty_occurrence_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("empty.tsv");
    std::fs::write(&x, "").unwrap();
    let sim = dir.path().join("sim.tsv");
    let out = gextext(&[
        "infer",
        "--occurrence",
        s(&x),
        "--graph-out",
        s(&dir.path().join("g.tsv")),
        "--similarity-out",
        s(&sim),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty occurrence matrix"));
    assert!(!sim.exists());
    assert!(!dir.path().join("g.tsv").exists());
}

#[test]
fn eval_with_mismatched_terms_warns_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("pred.tsv");
    let reference = dir.path().join("ref.tsv");
    std::fs::write(
        &pred,
        "geodesic\ta\tb\tc\td\tz\na\t1\t1\t0.5\t0\t0\nb\t1\t1\t1\t0.5\t0\nc\t0.5\t1\t1\t1\t0\nd\t0\t0.5\t1\t1\t0\nz\t0\t0\t0\t0\t1\n",
    )
    .unwrap();
    std::fs::write(
        &reference,
        "ontology\ta\tb\tc\td\na\t1\t0.9\t0.4\t0.1\nb\t0.9\t1\t0.8\t0.3\nc\t0.4\t0.8\t1\t0.7\nd\t0.1\t0.3\t0.7\t1\n",
    )
    .unwrap();
    let out_path = dir.path().join("report.tsv");
    let out = ok(&[
        "eval",
        "--pred",
        s(&pred),
        "--ref",
        s(&reference),
        "--out",
        s(&out_path),
    ]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("left out") && stderr.contains('z'), "{stderr}");
    let report = std::fs::read_to_string(&out_path).unwrap();
    let row: Vec<&str> = report.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(row[0], "ref");
    assert_eq!(row[3], "6");
}

#[test]
fn eval_with_several_predictions_adds_mean_rows() {
    let dir = tempfile::tempdir().unwrap();
    let m = "x\ta\tb\tc\na\t1\t0.2\t0.9\nb\t0.2\t1\t0.5\nc\t0.9\t0.5\t1\n";
    let reversed = "x\ta\tb\tc\na\t1\t0.9\t0.2\nb\t0.9\t1\t0.5\nc\t0.2\t0.5\t1\n";
    for (name, text) in [("p1.tsv", m), ("p2.tsv", m), ("r.tsv", reversed)] {
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    let out_path = dir.path().join("report.tsv");
    ok(&[
        "eval",
        "--pred",
        s(&dir.path().join("p1.tsv")),
        "--pred",
        s(&dir.path().join("p2.tsv")),
        "--ref",
        &format!("rev={}", s(&dir.path().join("r.tsv"))),
        "--out",
        s(&out_path),
    ]);
    let report = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[1], "p1:rev\t-1\t0\t3\tall");
    assert_eq!(lines[2], "p2:rev\t-1\t0\t3\tall");
    assert_eq!(lines[3], "mean:rev\t-1\tNA\t3\tall");
}

#[test]
fn ingest_medline_fixture_with_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.tsv");
    let out = ok(&[
        "ingest",
        "--corpus",
        s(&fixture("abstracts.medline")),
        "--vocab",
        s(&fixture("vocab.txt")),
        "--out",
        s(&x),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("chunks\t4"), "{stdout}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("chronic obstructive pulmonary disease"));
    let m = formats::read_occurrence(&x).unwrap();
    assert_eq!(m.chunk_ids(), &["31000001", "31000002", "31000004", "31000005"]);
    assert_eq!(
        m.terms().terms(),
        &["lung cancer", "cancer", "gout", "melanoma", "type 2 diabetes"]
    );

    let y = dir.path().join("y.tsv");
    ok(&[
        "ingest",
        "--corpus",
        s(&fixture("abstracts.medline")),
        "--vocab",
        s(&fixture("vocab.txt")),
        "--out",
        s(&y),
        "--sample",
        "3",
        "--seed",
        "5",
    ]);
    assert_eq!(formats::read_occurrence(&y).unwrap().n(), 3);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("y.tsv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["params"]["sample"], 3);
}

#[test]
fn unknown_corpus_extension_needs_format() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.dat");
    std::fs::copy(fixture("abstracts.jsonl"), &corpus).unwrap();
    let x = dir.path().join("x.tsv");
    let out = gextext(&[
        "ingest",
        "--corpus",
        s(&corpus),
        "--vocab",
        s(&fixture("vocab.txt")),
        "--out",
        s(&x),
    ]);
    assert_eq!(out.status.code(), Some(2));
    ok(&[
        "ingest",
        "--corpus",
        s(&corpus),
        "--format",
        "jsonl",
        "--vocab",
        s(&fixture("vocab.txt")),
        "--out",
        s(&x),
    ]);
}

#[test]
fn ontosim_and_geneoverlap_on_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let vocab = dir.path().join("onto_vocab.txt");
    let refs = dir.path().join("refs");
    ok(&[
        "ontosim",
        "--obo",
        s(&fixture("toy.obo")),
        "--vocab",
        s(&fixture("vocab.txt")),
        "--out-dir",
        s(&refs),
        "--vocab-out",
        s(&vocab),
    ]);
    assert_eq!(
        std::fs::read_to_string(&vocab).unwrap(),
        "cancer\ndisease\ngout\nlung cancer\n"
    );
    let lin = formats::read_similarity(formats::open(&refs.join("lin.tsv")).unwrap()).unwrap();
    assert_eq!(lin.labels(), &["lung cancer", "cancer", "gout"]);
    assert!((lin.get(0, 1) - 2.0 / 3.0).abs() < 1e-8);
    for metric in ["wang", "resnik", "relevance", "jiang"] {
        assert!(refs.join(format!("{metric}.tsv")).exists(), "{metric}");
    }
    assert!(refs.join("ontosim.manifest.json").exists());

    let genes = dir.path().join("genes.tsv");
    ok(&[
        "geneoverlap",
        "--annotations",
        s(&fixture("genes.tsv")),
        "--obo",
        s(&fixture("toy.obo")),
        "--vocab",
        s(&fixture("vocab.txt")),
        "--out",
        s(&genes),
    ]);
    let j = formats::read_similarity(formats::open(&genes).unwrap()).unwrap();
    let (lc, c) = (j.position("lung cancer").unwrap(), j.position("cancer").unwrap());
    assert!((j.get(lc, c) - 1.0 / 3.0).abs() < 1e-8);
    assert_eq!(
        j.get(j.position("melanoma").unwrap(), j.position("melanoma").unwrap()),
        0.0
    );
}

#[test]
fn glove_writes_cosine_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("glove.tsv");
    let emb = dir.path().join("vectors.tsv");
    let (corpus, vocab) = (fixture("abstracts.jsonl"), fixture("vocab.txt"));
    let args = [
        "glove",
        "--corpus",
        s(&corpus),
        "--vocab",
        s(&vocab),
        "--dims",
        "4",
        "--epochs",
        "5",
        "--similarity-out",
        s(&sim),
        "--embedding-out",
        s(&emb),
    ];
    ok(&args);
    let m = formats::read_similarity(formats::open(&sim).unwrap()).unwrap();
    assert_eq!(m.kind(), gextext::core::SimilarityKind::Cosine);
    assert!(m.position("lung cancer").is_some());
    let first = std::fs::read(&sim).unwrap();
    ok(&args);
    assert_eq!(std::fs::read(&sim).unwrap(), first);
}

#[test]
fn missing_input_is_a_usage_error() {
    let out = gextext(&[
        "infer",
        "--occurrence",
        "/nonexistent/x.tsv",
        "--graph-out",
        "/tmp/g.tsv",
        "--similarity-out",
        "/tmp/s.tsv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fetch_rejects_empty_query() {
    let dir = tempfile::tempdir().unwrap();
    let out = gextext(&["fetch", "--query", "  ", "--out", s(&dir.path().join("o.txt"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("query"));
}
