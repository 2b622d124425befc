//! Acceptance criteria, one line each. Runs without the libtest harness so
//! that every criterion prints its verdict; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use gextext::formats;
use gextext::input::tokenize_parallel;
use gextext::jsonl::{parse_jsonl, write_jsonl};
use gextext::medline::parse_medline;
use gextext_core::corpus::tokenize_corpus;
use gextext_core::eval::{edge_recovery, evaluate_similarity, Mask, ReportRow};
use gextext_core::glove::{
    cosine_similarity_matrix, train_glove, window_cooccurrence, CooccurrenceCounts, CorpusVocabulary, GloveParams,
    DEFAULT_WINDOW,
};
use gextext_core::graph::{all_pairs_hops, covariance_matrix, geodesic_similarity, infer_graph, PairCounts};
use gextext_core::ontology::{
    information_content, jaccard, semantic_similarity, wang_similarity, Metric, Ontology, TermRecord,
};
use gextext_core::stats::{average_ranks, pearson, spearman};
use gextext_core::synth::{synthesize_corpus, PlantedParams, PlantedWorld};
use gextext_core::vocab::build_occurrence_matrix;
use gextext_core::{Chunk, InferredGraph, OccurrenceMatrix, SimilarityKind, SimilarityMatrix, Vocabulary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fixed before any run; never tuned.
const SEED: u64 = 42;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed < Duration::from_secs(limit_secs)
}

fn labels(prefix: &str, p: usize) -> Vec<String> {
    (0..p).map(|i| format!("{prefix}{i:02}")).collect()
}

fn random_matrix(rng: &mut ChaCha8Rng) -> OccurrenceMatrix {
    let n = rng.random_range(2..=200);
    let p = rng.random_range(2..=40);
    let density: f64 = rng.random_range(0.02..0.6);
    let mut rows: Vec<Vec<u32>> = (0..n)
        .map(|_| (0..p as u32).filter(|_| rng.random_bool(density)).collect())
        .collect();
    for j in 0..p as u32 {
        if !rows.iter().any(|r| r.contains(&j)) {
            let k = rng.random_range(0..n);
            rows[k].push(j);
            rows[k].sort_unstable();
        }
    }
    OccurrenceMatrix::from_rows(labels("c", n), Vocabulary::from_terms(labels("t", p)), rows).unwrap()
}

#[allow(clippy::needless_range_loop)]
fn sign_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut pairs, mut mismatches, mut raw_mismatches, mut edges) = (0usize, 0usize, 0usize, 0usize);
    for _ in 0..100 {
        let x = random_matrix(&mut rng);
        let g = infer_graph(&PairCounts::from_matrix(&x));
        let cov = covariance_matrix(&x);
        let n2 = (x.n() * x.n()) as f64;
        for i in 0..x.p() {
            if g.has_edge(i, i) {
                mismatches += 1;
            }
            for j in i + 1..x.p() {
                pairs += 1;
                // Nonzero covariances are multiples of 1/n^2.
                let positive = cov[i][j] * n2 >= 0.5;
                mismatches += (g.has_edge(i, j) != positive) as usize;
                raw_mismatches += (g.has_edge(i, j) != (cov[i][j] > 0.0)) as usize;
                edges += g.has_edge(i, j) as usize;
            }
        }
    }
    let t = start.elapsed();
    Verdict::new(
        mismatches == 0 && within(t, 5),
        format!(
            "{pairs} pairs, {edges} edges, {mismatches} mismatches (raw float sign: {raw_mismatches}), {:.2}s",
            t.as_secs_f64()
        ),
    )
}

fn floyd_warshall(g: &InferredGraph) -> Vec<Vec<Option<u32>>> {
    let p = g.vertex_count();
    let mut d = vec![vec![None; p]; p];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
        for &j in g.neighbors(i) {
            row[j] = Some(1);
        }
    }
    for k in 0..p {
        for i in 0..p {
            for j in 0..p {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

fn geodesic_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut cells, mut mismatches) = (0usize, 0usize);
    for _ in 0..50 {
        let p = rng.random_range(1..=64);
        let density: f64 = rng.random_range(0.0..0.15);
        let mut edges = Vec::new();
        for a in 0..p {
            for b in a + 1..p {
                if rng.random_bool(density) {
                    edges.push((a, b));
                }
            }
        }
        let g = InferredGraph::from_edges(labels("v", p), edges).unwrap();
        let bfs = all_pairs_hops(&g);
        let fw = floyd_warshall(&g);
        for (a, row) in fw.iter().enumerate() {
            for (b, want) in row.iter().enumerate() {
                cells += 1;
                mismatches += (bfs.get(a, b) != *want) as usize;
            }
        }
    }
    let t = start.elapsed();
    Verdict::new(
        mismatches == 0 && within(t, 5),
        format!("{cells} distances, {mismatches} mismatches, {:.2}s", t.as_secs_f64()),
    )
}

/// The planted world plus everything inferred from it through the file
/// formats, shared by criteria 3 to 5.
struct Planted {
    world: PlantedWorld,
    counts: PairCounts,
    graph: InferredGraph,
    gextext: SimilarityMatrix,
    truth: SimilarityMatrix,
    build_time: Duration,
}

fn planted() -> Planted {
    let start = Instant::now();
    let world = synthesize_corpus(PlantedParams {
        seed: SEED,
        ..PlantedParams::default()
    })
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let corpus_path = dir.path().join("corpus.jsonl");
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &world.chunks).unwrap();
    std::fs::write(&corpus_path, &buf).unwrap();
    let chunks = parse_jsonl(formats::open(&corpus_path).unwrap()).unwrap();

    let vocab = Vocabulary::from_terms(world.terms().iter().cloned());
    let x = build_occurrence_matrix(&tokenize_parallel(&chunks), &vocab).unwrap();
    let x_path = dir.path().join("x.tsv");
    formats::write_occurrence(&x_path, &x).unwrap();
    let x = formats::read_occurrence(&x_path).unwrap();

    let counts = PairCounts::from_matrix(&x);
    let graph = infer_graph(&counts);
    let gextext = geodesic_similarity(&graph);
    let truth = geodesic_similarity(&world.true_graph);
    Planted {
        world,
        counts,
        graph,
        gextext,
        truth,
        build_time: start.elapsed(),
    }
}

fn row_summary(row: &ReportRow) -> String {
    match &row.outcome {
        Ok(c) => format!("rho {:.4} p {:.3e} over {} pairs", c.rho, c.p_value, row.m_pairs),
        Err(e) => format!("undefined ({e})"),
    }
}

fn planted_recovery(w: &Planted) -> Verdict {
    let start = Instant::now();
    let rec = edge_recovery(&w.graph, &w.world.true_graph);
    let refs = [("truth".to_string(), w.truth.clone())];
    let report = evaluate_similarity(&w.gextext, &refs, None, Mask::None).unwrap();
    let row = &report.rows[0];
    let t = w.build_time + start.elapsed();
    let corr_ok = matches!(&row.outcome, Ok(c) if c.rho >= 0.5 && c.p_value < 1e-6);
    Verdict::new(
        rec.f1 >= 0.8 && corr_ok && within(t, 10),
        format!(
            "edge F1 {:.4} (tp {} fp {} fn {}), {}, {:.2}s",
            rec.f1,
            rec.true_positives,
            rec.false_positives,
            rec.false_negatives,
            row_summary(row),
            t.as_secs_f64()
        ),
    )
}

fn baseline_margin(w: &Planted) -> Verdict {
    let start = Instant::now();
    let tokenized = tokenize_parallel(&w.world.chunks);
    let words = CorpusVocabulary::build(&tokenized, 1);
    let counts = window_cooccurrence(&tokenized, &words, DEFAULT_WINDOW);
    let params = GloveParams {
        seed: SEED,
        ..GloveParams::default()
    };
    let embedding = train_glove(&counts, words.len(), 50, &params).unwrap();
    let glove = cosine_similarity_matrix(&embedding.word_vectors(words.words()), w.world.terms())
        .unwrap()
        .matrix;
    let refs = [("truth".to_string(), w.truth.clone())];
    let rho = |m: &SimilarityMatrix| {
        evaluate_similarity(m, &refs, None, Mask::None).unwrap().rows[0]
            .outcome
            .as_ref()
            .map(|c| c.rho)
            .unwrap_or(f64::NAN)
    };
    let (g, c) = (rho(&w.gextext), rho(&glove));
    let t = w.build_time + start.elapsed();
    Verdict::new(
        g - c >= 0.1 && within(t, 60),
        format!(
            "gextext rho {g:.4}, glove-50 rho {c:.4}, margin {:.4}, {:.2}s",
            g - c,
            t.as_secs_f64()
        ),
    )
}

fn latent_information(w: &Planted) -> Verdict {
    let refs = [("truth".to_string(), w.truth.clone())];
    let fraction = w.counts.cooccurring_fraction();
    match evaluate_similarity(&w.gextext, &refs, Some(&w.counts), Mask::NonCooccurring) {
        Ok(report) => {
            let row = &report.rows[0];
            let corr_ok = matches!(&row.outcome, Ok(c) if c.rho >= 0.3 && c.p_value < 1e-3);
            Verdict::new(
                corr_ok && fraction < 0.15,
                format!("co-occurring fraction {fraction:.4}, masked {}", row_summary(row)),
            )
        }
        Err(e) => Verdict::new(
            false,
            format!("co-occurring fraction {fraction:.4}, masked evaluation failed: {e}"),
        ),
    }
}

fn ontology_golden() -> Verdict {
    let o = Ontology::new(vec![
        TermRecord::new("R", "root", &[]),
        TermRecord::new("A", "a", &["R"]),
        TermRecord::new("B", "b", &["R"]),
        TermRecord::new("A1", "a1", &["A"]),
    ])
    .unwrap();
    let ict = information_content(&o);
    let ln2 = std::f64::consts::LN_2;
    let cases = [
        (
            "lin(A1,A)",
            semantic_similarity(&o, &ict, Metric::Lin, "A1", "A").unwrap(),
            2.0 / 3.0,
        ),
        (
            "resnik(A,B)",
            semantic_similarity(&o, &ict, Metric::Resnik, "A", "B").unwrap(),
            0.0,
        ),
        (
            "jiang(A1,A)",
            semantic_similarity(&o, &ict, Metric::Jiang, "A1", "A").unwrap(),
            1.0 - ln2,
        ),
        (
            "relevance(A1,A)",
            semantic_similarity(&o, &ict, Metric::Relevance, "A1", "A").unwrap(),
            1.0 / 3.0,
        ),
        ("wang(A,B)", wang_similarity(&o, "A", "B", 0.8).unwrap(), 1.6 / 3.6),
    ];
    let worst = cases
        .iter()
        .map(|(_, got, want)| (got - want).abs())
        .fold(0.0, f64::max);
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
    let j = jaccard(&set(&["a", "b"]), &set(&["b", "c"]));
    Verdict::new(
        worst <= 1e-9 && j == 1.0 / 3.0,
        format!(
            "max deviation {worst:.2e} over {} metric values, jaccard {j}",
            cases.len()
        ),
    )
}

fn brute_force_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let less = x.iter().filter(|&&u| u < v).count() as f64;
            let equal = x.iter().filter(|&&u| u == v).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

fn spearman_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let m = rng.random_range(3..=60);
        let x: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let (rx, ry) = (brute_force_ranks(&x), brute_force_ranks(&y));
        assert!(rx.iter().chain(&ry).all(|r| r.fract() == 0.0), "tie in a tie-free draw");
        let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();
        let mf = m as f64;
        let formula = 1.0 - 6.0 * d2 / (mf * (mf * mf - 1.0));
        worst = worst.max((spearman(&x, &y).unwrap().rho - formula).abs());
    }
    let (mut rank_mismatches, mut tied_worst, mut tied_checked) = (0usize, 0.0f64, 0usize);
    while tied_checked < 100 {
        let m = rng.random_range(3..=40);
        let x: Vec<f64> = (0..m).map(|_| rng.random_range(0..5) as f64).collect();
        let y: Vec<f64> = (0..m).map(|_| rng.random_range(0..4) as f64).collect();
        let (rx, ry) = (brute_force_ranks(&x), brute_force_ranks(&y));
        rank_mismatches += (average_ranks(&x) != rx) as usize;
        let Some(want) = pearson(&rx, &ry) else { continue };
        tied_checked += 1;
        tied_worst = tied_worst.max((spearman(&x, &y).unwrap().rho - want).abs());
    }
    Verdict::new(
        worst <= 1e-12 && rank_mismatches == 0 && tied_worst <= 1e-12,
        format!(
            "tie-free max deviation {worst:.2e} over 1000, tied: {rank_mismatches} rank mismatches, rho deviation {tied_worst:.2e} over 100"
        ),
    )
}

const TOY_CORPUS: &[&str] = &[
    "Lung cancer is the leading cause of cancer death.",
    "Smoking raises the risk of lung cancer and chronic bronchitis.",
    "Melanoma is a skin cancer driven by ultraviolet exposure.",
    "BRAF mutations are common in melanoma and in colorectal cancer.",
    "Gout is an inflammatory arthritis caused by uric acid crystals.",
    "Obesity and type 2 diabetes raise the risk of gout.",
    "Type 2 diabetes is associated with obesity and insulin resistance.",
    "Breast cancer and ovarian cancer share BRCA1 mutations.",
    "Colorectal cancer screening reduces cancer mortality.",
    "Chronic bronchitis and emphysema follow long term smoking.",
    "Insulin resistance precedes type 2 diabetes in most patients.",
    "Uric acid levels are elevated in gout and in kidney disease.",
];

fn glove_sanity() -> Verdict {
    let chunks: Vec<Chunk> = TOY_CORPUS
        .iter()
        .enumerate()
        .map(|(i, t)| Chunk::new(i.to_string(), *t))
        .collect();
    let tokenized = tokenize_corpus(&chunks);
    let words = CorpusVocabulary::build(&tokenized, 1);
    let counts = window_cooccurrence(&tokenized, &words, DEFAULT_WINDOW);
    let params = GloveParams {
        epochs: 50,
        seed: SEED,
        ..GloveParams::default()
    };
    let a = train_glove(&counts, words.len(), 10, &params).unwrap();
    let b = train_glove(&counts, words.len(), 10, &params).unwrap();
    let bits = |e: &gextext_core::glove::Embedding| -> Vec<u64> {
        e.main
            .iter()
            .chain(&e.context)
            .chain(&e.bias_main)
            .chain(&e.bias_context)
            .map(|v| v.to_bits())
            .collect()
    };
    let identical = bits(&a) == bits(&b);
    let transitions = a.epoch_loss.len() - 1;
    let nonincreasing = a.epoch_loss.windows(2).filter(|w| w[1] <= w[0]).count();

    let mut single = CooccurrenceCounts::default();
    single.add(0, 1, 3.0);
    let fit = train_glove(
        &single,
        2,
        2,
        &GloveParams {
            epochs: 2000,
            seed: SEED,
            ..GloveParams::default()
        },
    )
    .unwrap();
    let residual = fit.residual(0, 1, 3.0).abs().max(fit.residual(1, 0, 3.0).abs());
    Verdict::new(
        identical && residual < 0.1 && nonincreasing * 10 >= transitions * 9,
        format!(
            "bit-identical {identical}, single-pair residual {residual:.2e}, loss nonincreasing in {nonincreasing}/{transitions} transitions"
        ),
    )
}

fn format_round_trips() -> Verdict {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../gextext/tests/fixtures");
    let medline = parse_medline(formats::open(&fixtures.join("abstracts.medline")).unwrap()).unwrap();
    let jsonl = parse_jsonl(formats::open(&fixtures.join("abstracts.jsonl")).unwrap()).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let p = 40;
    let values: Vec<f64> = (0..p * p)
        .map(|_| rng.random_range(-1.0..1.0) * 10f64.powi(rng.random_range(-6..3)))
        .collect();
    let m = SimilarityMatrix::from_fn(SimilarityKind::Cosine, labels("term ", p), |i, j| {
        if i == j {
            1.0
        } else {
            values[i * p + j]
        }
    });
    let mut buf = Vec::new();
    formats::write_similarity(&mut buf, &m).unwrap();
    let back = formats::read_similarity(buf.as_slice()).unwrap();
    let sig9 = |v: f64| format!("{v:.8e}");
    let mismatches = back
        .values()
        .iter()
        .zip(m.values())
        .filter(|(a, b)| sig9(**a) != sig9(**b))
        .count();
    let labels_ok = back.labels() == m.labels() && back.kind() == m.kind();
    Verdict::new(
        medline.chunks.len() == 4
            && medline.skipped_without_abstract == 1
            && jsonl.len() == 3
            && mismatches == 0
            && labels_ok,
        format!(
            "medline {} chunks ({} skipped), jsonl {} chunks, similarity TSV {} of {} values differ at 9 digits",
            medline.chunks.len(),
            medline.skipped_without_abstract,
            jsonl.len(),
            mismatches,
            m.values().len()
        ),
    )
}

fn run(id: u32, name: &str, f: impl FnOnce() -> Verdict) -> bool {
    let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Verdict::new(false, format!("panicked: {msg}"))
    });
    println!(
        "criterion {id} {name:<32} {}  {}",
        if verdict.pass { "PASS" } else { "FAIL" },
        verdict.detail
    );
    verdict.pass
}

fn main() {
    // libtest flags such as --nocapture may be passed through; none apply.
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !filter.is_empty() && !filter.iter().any(|f| "acceptance".contains(f.as_str())) {
        return;
    }
    let mut results = vec![
        run(1, "sign-oracle equivalence", sign_oracle),
        run(2, "geodesic oracle", geodesic_oracle),
    ];
    let world = catch_unwind(planted);
    match &world {
        Ok(w) => {
            results.push(run(3, "planted-graph recovery", || planted_recovery(w)));
            results.push(run(4, "gextext ahead of glove baseline", || baseline_margin(w)));
            results.push(run(5, "latent-information property", || latent_information(w)));
        }
        Err(_) => {
            for (id, name) in [
                (3, "planted-graph recovery"),
                (4, "gextext ahead of glove baseline"),
                (5, "latent-information property"),
            ] {
                results.push(run(id, name, || {
                    Verdict::new(false, "planted world could not be built")
                }));
            }
        }
    }
    results.push(run(6, "ontology metric golden values", ontology_golden));
    results.push(run(7, "spearman oracle", spearman_oracle));
    results.push(run(8, "glove sanity", glove_sanity));
    results.push(run(9, "format round-trips", format_round_trips));

    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
