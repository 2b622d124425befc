//! Subcommands. Each stage reads files, writes files, and leaves a
//! `*.manifest.json` next to its primary output.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gextext_core::eval::{edge_recovery, evaluate_similarity, EvalReport, Mask};
use gextext_core::glove::{
    cosine_similarity_matrix, train_glove, window_cooccurrence, CorpusVocabulary, GloveParams, DEFAULT_WINDOW,
};
use gextext_core::graph::{geodesic_similarity, graph_stats, infer_graph, PairCounts};
use gextext_core::ontology::{
    gene_overlap_similarity, information_content, reference_matrix, Metric, Ontology, DEFAULT_WANG_DECAY,
};
use gextext_core::synth::{synthesize_corpus, PlantedParams};
use gextext_core::vocab::build_occurrence_matrix;
use gextext_core::SimilarityMatrix;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fetch::{fetch_pubmed, FetchConfig, API_KEY_ENV, DEFAULT_BASE_URL};
use crate::formats;
use crate::input::{load_corpus, load_terms, resolve_format, sample_chunks, tokenize_parallel, CorpusFormat};
use crate::jsonl::write_jsonl;
use crate::manifest::{Manifest, Outputs};
use crate::obo::parse_obo;

#[derive(Debug, Parser)]
#[command(
    name = "gextext",
    version,
    about = "Disease similarity networks from term co-occurrence in text"
)]
pub struct Cli {
    /// Log more (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a corpus, match vocabulary terms, write the occurrence matrix.
    Ingest(IngestArgs),
    /// Infer the covariance-sign graph and its inverse-geodesic similarity.
    Infer(InferArgs),
    /// Train GloVe on a corpus and write term cosine similarities.
    Glove(GloveArgs),
    /// Ontology reference similarities (Wang, Resnik, Relevance, Jiang, Lin).
    Ontosim(OntosimArgs),
    /// Jaccard similarity of gene annotation profiles.
    Geneoverlap(GeneOverlapArgs),
    /// Spearman correlation of predicted similarities against references.
    Eval(EvalArgs),
    /// Generate a corpus from a planted random graph.
    Synth(SynthArgs),
    /// Download PubMed abstracts in Medline format.
    Fetch(FetchArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<CorpusFormat>,
    /// Keep a random subset of this many chunks.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// One term per line.
    #[arg(long)]
    pub vocab: PathBuf,
    /// Occurrence matrix TSV; a `.meta.json` sidecar is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    #[arg(long)]
    pub occurrence: PathBuf,
    /// Edge list TSV; isolated vertices go to `<path>.isolated.txt`.
    #[arg(long)]
    pub graph_out: PathBuf,
    #[arg(long)]
    pub similarity_out: PathBuf,
    /// Graph statistics as JSON.
    #[arg(long)]
    pub stats_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "terms", required = true, multiple = false)]
pub struct TermSource {
    /// Score every term of this vocabulary file.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Score the terms retained in this occurrence matrix.
    #[arg(long)]
    pub occurrence: Option<PathBuf>,
}

impl TermSource {
    fn path(&self) -> &Path {
        self.occurrence
            .as_deref()
            .or(self.vocab.as_deref())
            .expect("clap enforces one source")
    }

    fn load(&self) -> Result<Vec<String>> {
        load_terms(self.vocab.as_deref(), self.occurrence.as_deref())
    }

    fn record(&self, m: &mut Manifest) -> Result<()> {
        m.input(self.path())?;
        if let Some(occ) = &self.occurrence {
            m.input(&formats::occurrence_sidecar(occ))?;
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct GloveArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub terms: TermSource,
    #[arg(long, default_value_t = 50)]
    pub dims: usize,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    #[arg(long, default_value_t = GloveParams::default().epochs)]
    pub epochs: usize,
    #[arg(long, default_value_t = GloveParams::default().x_max)]
    pub x_max: f64,
    #[arg(long, default_value_t = GloveParams::default().alpha)]
    pub alpha: f64,
    #[arg(long, default_value_t = GloveParams::default().learning_rate)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 1)]
    pub min_count: u64,
    #[arg(long)]
    pub similarity_out: PathBuf,
    /// Word vectors (main + context) as TSV.
    #[arg(long)]
    pub embedding_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OntosimArgs {
    #[arg(long)]
    pub obo: PathBuf,
    #[arg(long, group = "terms")]
    pub vocab: Option<PathBuf>,
    #[arg(long, group = "terms")]
    pub occurrence: Option<PathBuf>,
    /// One `<metric>.tsv` per metric is written here.
    #[arg(long, requires = "terms")]
    pub out_dir: Option<PathBuf>,
    /// Comma-separated subset of wang,resnik,relevance,jiang,lin.
    #[arg(long, value_delimiter = ',', default_value = "wang,resnik,relevance,jiang,lin")]
    pub metrics: Vec<Metric>,
    #[arg(long, default_value_t = DEFAULT_WANG_DECAY)]
    pub wang_decay: f64,
    /// Write the ontology's term names as a vocabulary file.
    #[arg(long, required_unless_present = "out_dir")]
    pub vocab_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeneOverlapArgs {
    /// `term_id<TAB>gene_symbol` lines.
    #[arg(long)]
    pub annotations: PathBuf,
    #[command(flatten)]
    pub terms: TermSource,
    /// Maps annotation ids to term names; without it the first column is
    /// read as a term name.
    #[arg(long)]
    pub obo: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MaskChoice {
    None,
    NonCooccurring,
    Both,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted similarity matrix, as `name=path` or a bare path. Repeat for
    /// several runs; a mean row per reference is added.
    #[arg(long, required = true)]
    pub pred: Vec<String>,
    /// Reference similarity matrix as `name=path` or a bare path.
    #[arg(long = "ref", required = true)]
    pub refs: Vec<String>,
    #[arg(long, value_enum, default_value = "none")]
    pub mask: MaskChoice,
    /// Occurrence matrix for masking and the co-occurring pair fraction.
    #[arg(long)]
    pub occurrence: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Long-format TSV, one row per method, reference and mask.
    #[arg(long)]
    pub long_out: Option<PathBuf>,
    /// Inferred graph to score against `--true-graph`.
    #[arg(long, requires = "true_graph")]
    pub graph: Option<PathBuf>,
    #[arg(long, requires = "graph")]
    pub true_graph: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = PlantedParams::default().terms)]
    pub terms: usize,
    #[arg(long, default_value_t = PlantedParams::default().density)]
    pub density: f64,
    #[arg(long, default_value_t = PlantedParams::default().chunks)]
    pub chunks: usize,
    #[arg(long, default_value_t = PlantedParams::default().noise_rate)]
    pub noise: f64,
    #[arg(long, default_value_t = PlantedParams::default().filler_min)]
    pub filler_min: usize,
    #[arg(long, default_value_t = PlantedParams::default().filler_max)]
    pub filler_max: usize,
    #[arg(long, default_value_t = PlantedParams::default().seed)]
    pub seed: u64,
    /// Receives corpus.jsonl, vocab.txt, true_graph.tsv and true_similarity.tsv.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    #[arg(long)]
    pub query: String,
    #[arg(long, default_value_t = 10_000)]
    pub max_results: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = crate::fetch::MAX_BATCH)]
    pub batch_size: usize,
    #[arg(long, env = API_KEY_ENV, hide_env_values = true)]
    pub api_key: Option<String>,
    #[arg(long, hide = true, default_value = DEFAULT_BASE_URL)]
    pub base_url: String,
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Usage(format!("input file not found: {}", path.display())))
    }
}

fn write_with(path: &Path, f: impl FnOnce(&mut dyn std::io::Write) -> std::io::Result<()>) -> Result<()> {
    let mut out = formats::create(path)?;
    f(&mut out).map_err(|e| Error::io(path, e))?;
    std::io::Write::flush(&mut out).map_err(|e| Error::io(path, e))
}

/// `name=path` or a bare path named after its file stem.
fn named_path(arg: &str) -> (String, PathBuf) {
    match arg.split_once('=') {
        Some((name, path)) if !name.is_empty() && !Path::new(arg).exists() => (name.to_string(), PathBuf::from(path)),
        _ => {
            let path = PathBuf::from(arg);
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| arg.to_string());
            (name, path)
        }
    }
}

fn load_corpus_args(args: &CorpusArgs, m: &mut Manifest) -> Result<Vec<gextext_core::Chunk>> {
    let format = resolve_format(&args.corpus, args.format)?;
    m.input(&args.corpus)?;
    m.param("format", format.as_str()).param("sample", args.sample);
    let chunks = load_corpus(&args.corpus, format)?;
    match args.sample {
        Some(k) => sample_chunks(chunks, k, args.seed),
        None => Ok(chunks),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Infer(a) => infer(a),
        Command::Glove(a) => glove(a),
        Command::Ontosim(a) => ontosim(a),
        Command::Geneoverlap(a) => geneoverlap(a),
        Command::Eval(a) => eval(a),
        Command::Synth(a) => synth(a),
        Command::Fetch(a) => fetch(a),
    }
}

pub fn ingest(a: IngestArgs) -> Result<()> {
    require_file(&a.corpus.corpus)?;
    require_file(&a.vocab)?;
    let mut m = Manifest::new("ingest", a.corpus.sample.map(|_| a.corpus.seed));
    let chunks = load_corpus_args(&a.corpus, &mut m)?;
    m.input(&a.vocab)?;
    let vocab = formats::read_vocabulary(&a.vocab)?;
    let tokenized = tokenize_parallel(&chunks);
    let x = build_occurrence_matrix(&tokenized, &vocab)?;

    let mut outs = Outputs::new();
    outs.register(&a.out);
    outs.register(formats::occurrence_sidecar(&a.out));
    formats::write_occurrence(&a.out, &x)?;
    outs.commit(m, &a.out)?;
    println!(
        "chunks\t{}\nvocabulary terms\t{}\nmatched terms\t{}\nnonzero cells\t{}",
        x.n(),
        vocab.len(),
        x.p(),
        x.nnz()
    );
    Ok(())
}

pub fn infer(a: InferArgs) -> Result<()> {
    require_file(&a.occurrence)?;
    let mut m = Manifest::new("infer", None);
    let x = formats::read_occurrence(&a.occurrence)?;
    m.input(&a.occurrence)?
        .input(&formats::occurrence_sidecar(&a.occurrence))?;
    let pc = PairCounts::from_matrix(&x);
    let g = infer_graph(&pc);
    let sim = geodesic_similarity(&g);
    let stats = graph_stats(&g);

    let mut outs = Outputs::new();
    outs.register(&a.graph_out);
    outs.register(formats::isolated_sidecar(&a.graph_out));
    outs.register(&a.similarity_out);
    formats::write_graph(&a.graph_out, &g)?;
    write_with(&a.similarity_out, |w| formats::write_similarity(w, &sim))?;
    let stats_json = json!({
        "vertices": stats.vertices,
        "edges": stats.edges,
        "density": stats.density,
        "density_defined": stats.density_defined,
        "isolated_fraction": stats.isolated_fraction,
        "chunks": pc.n(),
        "cooccurring_pair_fraction": pc.cooccurring_fraction(),
    });
    if let Some(path) = &a.stats_out {
        outs.register(path);
        let text = serde_json::to_string_pretty(&stats_json).expect("stats serialize") + "\n";
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    outs.commit(m, &a.similarity_out)?;
    println!(
        "vertices\t{}\nedges\t{}\ndensity\t{}\nisolated fraction\t{}",
        stats.vertices,
        stats.edges,
        formats::format_sig9(stats.density),
        formats::format_sig9(stats.isolated_fraction)
    );
    Ok(())
}

pub fn glove(a: GloveArgs) -> Result<()> {
    require_file(&a.corpus.corpus)?;
    require_file(a.terms.path())?;
    if a.dims == 0 || a.window == 0 {
        return Err(Error::Usage("--dims and --window must be at least 1".into()));
    }
    let params = GloveParams {
        x_max: a.x_max,
        alpha: a.alpha,
        epochs: a.epochs,
        learning_rate: a.learning_rate,
        seed: a.corpus.seed,
    };
    let mut m = Manifest::new("glove", Some(a.corpus.seed));
    let chunks = load_corpus_args(&a.corpus, &mut m)?;
    a.terms.record(&mut m)?;
    m.param("dims", a.dims)
        .param("window", a.window)
        .param("epochs", a.epochs)
        .param("x_max", a.x_max)
        .param("alpha", a.alpha)
        .param("learning_rate", a.learning_rate)
        .param("min_count", a.min_count);
    let terms = a.terms.load()?;
    log::info!(
        "glove: {} chunks, {} terms, params {params:?}",
        chunks.len(),
        terms.len()
    );

    let tokenized = tokenize_parallel(&chunks);
    let words = CorpusVocabulary::build(&tokenized, a.min_count);
    let counts = window_cooccurrence(&tokenized, &words, a.window);
    let embedding = train_glove(&counts, words.len(), a.dims, &params)?;
    for (epoch, loss) in embedding.epoch_loss.iter().enumerate() {
        log::info!("epoch {}: loss {loss}", epoch + 1);
    }
    let vectors = embedding.word_vectors(words.words());
    let cosine = cosine_similarity_matrix(&vectors, &terms)?;
    if !cosine.dropped.is_empty() {
        log::warn!(
            "{} terms have no word vector and were dropped: {}",
            cosine.dropped.len(),
            cosine.dropped.join(", ")
        );
    }

    let mut outs = Outputs::new();
    outs.register(&a.similarity_out);
    write_with(&a.similarity_out, |w| formats::write_similarity(w, &cosine.matrix))?;
    if let Some(path) = &a.embedding_out {
        outs.register(path);
        write_with(path, |w| formats::write_word_vectors(w, &vectors))?;
    }
    outs.commit(m, &a.similarity_out)?;
    println!(
        "words\t{}\nnonzero pairs\t{}\nterms embedded\t{}\nfinal loss\t{}",
        words.len(),
        counts.len(),
        cosine.matrix.len(),
        embedding
            .epoch_loss
            .last()
            .map_or("NA".into(), |l| formats::format_sig9(*l))
    );
    Ok(())
}

/// Maps each term onto the ontology term with the same normalized name.
fn map_terms(o: &Ontology, terms: &[String]) -> (Vec<usize>, Vec<String>) {
    let index = o.name_index();
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut missing = Vec::new();
    for t in terms {
        match index.get(t) {
            Some(&i) => {
                ids.push(i);
                labels.push(t.clone());
            }
            None => missing.push(t.as_str()),
        }
    }
    if !missing.is_empty() {
        log::warn!(
            "{} terms not found in the ontology: {}",
            missing.len(),
            missing.join(", ")
        );
    }
    (ids, labels)
}

pub fn ontosim(a: OntosimArgs) -> Result<()> {
    require_file(&a.obo)?;
    for p in a.vocab.iter().chain(&a.occurrence) {
        require_file(p)?;
    }
    if !(a.wang_decay > 0.0 && a.wang_decay < 1.0) {
        return Err(gextext_core::Error::InvalidDecay(a.wang_decay).into());
    }
    let metrics: Vec<Metric> = a.metrics.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let mut m = Manifest::new("ontosim", None);
    m.input(&a.obo)?;
    let o = parse_obo(formats::open(&a.obo)?)?;
    let mut outs = Outputs::new();
    let mut primary = None;

    if let Some(path) = &a.vocab_out {
        let mut names: Vec<String> = o
            .name_index()
            .into_keys()
            .filter(|n| n.split(' ').count() <= 3)
            .collect();
        names.sort();
        outs.register(path);
        formats::write_lines(path, &names)?;
        primary.get_or_insert_with(|| path.clone());
        println!("vocabulary terms\t{}", names.len());
    }

    if let Some(dir) = &a.out_dir {
        let terms = load_terms(a.vocab.as_deref(), a.occurrence.as_deref())?;
        for p in a.vocab.iter().chain(&a.occurrence) {
            m.input(p)?;
        }
        let (ids, labels) = map_terms(&o, &terms);
        if ids.is_empty() {
            return Err(Error::Format("no term maps onto the ontology".into()));
        }
        let ict = information_content(&o);
        for &metric in &metrics {
            let matrix = reference_matrix(&o, &ict, metric, &ids, labels.clone(), a.wang_decay)?;
            let path = outs.register(dir.join(format!("{}.tsv", metric.as_str())));
            write_with(&path, |w| formats::write_similarity(w, &matrix))?;
        }
        primary = Some(dir.join("ontosim"));
        println!(
            "terms mapped\t{}/{}\nmetrics\t{}",
            ids.len(),
            terms.len(),
            metrics.len()
        );
    }
    m.param("metrics", metrics.iter().map(|x| x.as_str()).collect::<Vec<_>>())
        .param("wang_decay", a.wang_decay);
    outs.commit(m, &primary.expect("clap requires an output"))?;
    Ok(())
}

pub fn geneoverlap(a: GeneOverlapArgs) -> Result<()> {
    require_file(&a.annotations)?;
    require_file(a.terms.path())?;
    let mut m = Manifest::new("geneoverlap", None);
    m.input(&a.annotations)?;
    a.terms.record(&mut m)?;
    let terms = a.terms.load()?;
    let raw = formats::read_gene_annotations(formats::open(&a.annotations)?)?;
    let profiles = match &a.obo {
        Some(obo) => {
            require_file(obo)?;
            m.input(obo)?;
            let o = parse_obo(formats::open(obo)?)?;
            raw.rekey(|id| {
                o.index_of(id)
                    .ok()
                    .map(|i| gextext_core::corpus::normalize(o.name(i)).join(" "))
            })
        }
        None => raw.rekey(|name| Some(gextext_core::corpus::normalize(name).join(" "))),
    };
    let overlap = gene_overlap_similarity(&profiles, &terms);
    if !overlap.missing.is_empty() {
        log::warn!(
            "{} terms have no gene annotations and count as empty: {}",
            overlap.missing.len(),
            overlap.missing.join(", ")
        );
    }
    let mut outs = Outputs::new();
    outs.register(&a.out);
    write_with(&a.out, |w| formats::write_similarity(w, &overlap.matrix))?;
    outs.commit(m, &a.out)?;
    println!(
        "terms\t{}\nterms with genes\t{}",
        terms.len(),
        terms.len() - overlap.missing.len()
    );
    Ok(())
}

fn read_similarity_file(path: &Path) -> Result<SimilarityMatrix> {
    require_file(path)?;
    formats::read_similarity(formats::open(path)?).map_err(|e| match e {
        Error::Parse { line, message } => Error::Format(format!("{}:{line}: {message}", path.display())),
        other => other,
    })
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let preds: Vec<(String, PathBuf)> = a.pred.iter().map(|s| named_path(s)).collect();
    let refs: Vec<(String, PathBuf)> = a.refs.iter().map(|s| named_path(s)).collect();
    for (_, p) in preds.iter().chain(&refs) {
        require_file(p)?;
    }
    let masks: &[Mask] = match a.mask {
        MaskChoice::None => &[Mask::None],
        MaskChoice::NonCooccurring => &[Mask::NonCooccurring],
        MaskChoice::Both => &[Mask::None, Mask::NonCooccurring],
    };
    if a.mask != MaskChoice::None && a.occurrence.is_none() {
        return Err(Error::Usage("--mask non-cooccurring needs --occurrence".into()));
    }

    let mut m = Manifest::new("eval", None);
    for (_, p) in preds.iter().chain(&refs) {
        m.input(p)?;
    }
    let counts = match &a.occurrence {
        Some(path) => {
            require_file(path)?;
            m.input(path)?.input(&formats::occurrence_sidecar(path))?;
            Some(PairCounts::from_matrix(&formats::read_occurrence(path)?))
        }
        None => None,
    };
    let ref_mats: Vec<(String, SimilarityMatrix)> = refs
        .iter()
        .map(|(name, p)| Ok((name.clone(), read_similarity_file(p)?)))
        .collect::<Result<_>>()?;

    let mut reports: Vec<(String, EvalReport)> = Vec::new();
    for (name, path) in &preds {
        let pred = read_similarity_file(path)?;
        let mut merged: Option<EvalReport> = None;
        for &mask in masks {
            let report = match evaluate_similarity(&pred, &ref_mats, counts.as_ref(), mask) {
                Err(gextext_core::Error::NoNonCooccurringPairs) if a.mask == MaskChoice::Both => {
                    log::warn!("{name}: every evaluated pair co-occurs; no masked rows");
                    continue;
                }
                other => other?,
            };
            match merged.as_mut() {
                Some(r) => r.rows.extend(report.rows),
                None => merged = Some(report),
            }
        }
        let report = merged.expect("at least one mask");
        if !report.dropped_terms.is_empty() {
            log::warn!(
                "{name}: {} terms are missing from some input and were left out (intersection of {} terms): {}",
                report.dropped_terms.len(),
                report.terms.len(),
                report.dropped_terms.join(", ")
            );
        }
        if report.terms.len() * report.terms.len().saturating_sub(1) / 2 < 3 {
            return Err(gextext_core::Error::TooFewPairs(report.terms.len()).into());
        }
        reports.push((name.clone(), report));
    }
    m.param("mask", a.mask.to_possible_value().map(|v| v.get_name().to_string()));

    let mut outs = Outputs::new();
    outs.register(&a.out);
    write_with(&a.out, |w| formats::write_report(w, &reports))?;
    if let Some(path) = &a.long_out {
        outs.register(path);
        write_with(path, |w| formats::write_report_long(w, &reports))?;
    }

    let mut summary = String::new();
    for (name, report) in &reports {
        summary.push_str(&format!("{name}: {} terms", report.terms.len()));
        if let Some(f) = report.cooccurring_fraction {
            summary.push_str(&format!(", co-occurring pair fraction {}", formats::format_sig9(f)));
        }
        summary.push('\n');
        for row in &report.rows {
            match &row.outcome {
                Ok(c) => summary.push_str(&format!(
                    "  {:<24} {:<16} rho {:>8.4}  p {:<12.3e} pairs {}\n",
                    row.reference,
                    row.mask.as_str(),
                    c.rho,
                    c.p_value,
                    row.m_pairs
                )),
                Err(e) => summary.push_str(&format!(
                    "  {:<24} {:<16} undefined ({e}), pairs {}\n",
                    row.reference,
                    row.mask.as_str(),
                    row.m_pairs
                )),
            }
        }
    }

    if let (Some(g), Some(t)) = (&a.graph, &a.true_graph) {
        require_file(g)?;
        require_file(t)?;
        m.input(g)?.input(t)?;
        let rec = edge_recovery(&formats::read_graph(g)?, &formats::read_graph(t)?);
        summary.push_str(&format!(
            "edge recovery: tp {} fp {} fn {} precision {:.4} recall {:.4} f1 {:.4}\n",
            rec.true_positives, rec.false_positives, rec.false_negatives, rec.precision, rec.recall, rec.f1
        ));
    }
    outs.commit(m, &a.out)?;
    print!("{summary}");
    Ok(())
}

pub fn synth(a: SynthArgs) -> Result<()> {
    let params = PlantedParams {
        terms: a.terms,
        density: a.density,
        chunks: a.chunks,
        noise_rate: a.noise,
        filler_min: a.filler_min,
        filler_max: a.filler_max,
        seed: a.seed,
    };
    let world = synthesize_corpus(params)?;
    let mut m = Manifest::new("synth", Some(a.seed));
    m.param("terms", a.terms)
        .param("density", a.density)
        .param("chunks", a.chunks)
        .param("noise", a.noise)
        .param("filler_min", a.filler_min)
        .param("filler_max", a.filler_max);

    let mut outs = Outputs::new();
    let corpus = outs.register(a.out_dir.join("corpus.jsonl"));
    write_with(&corpus, |w| write_jsonl(w, &world.chunks))?;
    let vocab = outs.register(a.out_dir.join("vocab.txt"));
    formats::write_lines(&vocab, world.terms())?;
    let graph = a.out_dir.join("true_graph.tsv");
    outs.register(&graph);
    outs.register(formats::isolated_sidecar(&graph));
    formats::write_graph(&graph, &world.true_graph)?;
    let sim = outs.register(a.out_dir.join("true_similarity.tsv"));
    write_with(&sim, |w| {
        formats::write_similarity(w, &geodesic_similarity(&world.true_graph))
    })?;
    outs.commit(m, &a.out_dir.join("synth"))?;
    println!(
        "terms\t{}\nplanted edges\t{}\nchunks\t{}",
        world.terms().len(),
        world.true_graph.edge_count(),
        world.chunks.len()
    );
    Ok(())
}

pub fn fetch(a: FetchArgs) -> Result<()> {
    let config = FetchConfig {
        base_url: a.base_url.clone(),
        api_key: a.api_key.clone(),
        batch_size: a.batch_size,
        ..FetchConfig::default()
    };
    let mut m = Manifest::new("fetch", None);
    m.param("query", &a.query)
        .param("max_results", a.max_results)
        .param("batch_size", a.batch_size);
    let mut outs = Outputs::new();
    outs.register(&a.out);
    let n = fetch_pubmed(config, &a.query, a.max_results, &a.out)?;
    outs.commit(m, &a.out)?;
    println!("pmids\t{n}");
    Ok(())
}
