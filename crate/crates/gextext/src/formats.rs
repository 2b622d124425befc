//! Tab-separated stage outputs and their sidecars.
//!
//! * occurrence matrix: `chunk_id\tterm\tvalue` triples for nonzero cells,
//!   plus `<path>.meta.json` listing every chunk id and restricted term in
//!   order (rows with no term would otherwise be lost);
//! * graph: `term_a\tterm_b` edges with `term_a < term_b`, sorted, plus
//!   `<path>.isolated.txt` with one isolated vertex per line;
//! * similarity matrix: a header row `<kind>\t<label>...` then one row per
//!   label, values printed with 9 significant digits;
//! * word vectors: `word\tv1\t...\tvd`;
//! * gene annotations: `term_id\tgene_symbol`;
//! * evaluation report: `reference\trho\tp\tm_pairs\tmask`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use gextext_core::eval::EvalReport;
use gextext_core::glove::WordVectors;
use gextext_core::ontology::GeneProfileSet;
use gextext_core::{InferredGraph, OccurrenceMatrix, SimilarityKind, SimilarityMatrix, Vocabulary};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn occurrence_sidecar(path: &Path) -> PathBuf {
    sidecar(path, ".meta.json")
}

pub fn isolated_sidecar(path: &Path) -> PathBuf {
    sidecar(path, ".isolated.txt")
}

/// `%.9g`-style rendering: nine significant digits, trailing zeros trimmed,
/// scientific notation outside `1e-5 ..= 1e9`.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    if (-5..9).contains(&exp) {
        let body = if exp < 0 {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                format!("{}{}", digits, "0".repeat(int_len - digits.len()))
            } else {
                format!("{}.{}", &digits[..int_len], &digits[int_len..])
            }
        };
        format!("{sign}{body}")
    } else {
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("not a number: `{s}`")))
}

pub fn write_similarity(out: impl Write, m: &SimilarityMatrix) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    write!(out, "{}", m.kind().as_str())?;
    for label in m.labels() {
        write!(out, "\t{label}")?;
    }
    writeln!(out)?;
    for (i, label) in m.labels().iter().enumerate() {
        write!(out, "{label}")?;
        for v in m.row(i) {
            write!(out, "\t{}", format_sig9(*v))?;
        }
        writeln!(out)?;
    }
    out.flush()
}

/// Reads a similarity matrix. The corner cell names the kind; anything
/// unrecognised there is read as an ontology-derived reference.
pub fn read_similarity(reader: impl BufRead) -> Result<SimilarityMatrix> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format("empty similarity file".into()))?;
    let header = header.map_err(|e| Error::parse(1, e.to_string()))?;
    let mut cells = header.trim_end_matches('\r').split('\t');
    let kind = cells
        .next()
        .and_then(|c| c.parse::<SimilarityKind>().ok())
        .unwrap_or(SimilarityKind::Ontology);
    let labels: Vec<String> = cells.map(str::to_string).collect();
    let p = labels.len();
    let mut values = Vec::with_capacity(p * p);
    let mut rows = 0;
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut cells = line.split('\t');
        let label = cells.next().unwrap_or("");
        if rows >= p || label != labels[rows] {
            return Err(Error::parse(lineno, format!("unexpected row label `{label}`")));
        }
        let before = values.len();
        for cell in cells {
            values.push(parse_f64(cell, lineno)?);
        }
        if values.len() - before != p {
            return Err(Error::parse(lineno, format!("expected {p} values")));
        }
        rows += 1;
    }
    if rows != p {
        return Err(Error::Format(format!("{rows} rows for {p} labels")));
    }
    Ok(SimilarityMatrix::new(kind, labels, values)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct OccurrenceMeta {
    chunk_ids: Vec<String>,
    terms: Vec<String>,
}

pub fn write_occurrence(path: &Path, x: &OccurrenceMatrix) -> Result<Vec<PathBuf>> {
    let mut out = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(out, "chunk_id\tterm\tvalue").map_err(io)?;
    let terms = x.terms().terms();
    for (id, row) in x.chunk_ids().iter().zip(x.rows()) {
        for &j in row {
            writeln!(out, "{id}\t{}\t1", terms[j as usize]).map_err(io)?;
        }
    }
    out.flush().map_err(io)?;

    let meta_path = occurrence_sidecar(path);
    let meta = OccurrenceMeta {
        chunk_ids: x.chunk_ids().to_vec(),
        terms: terms.to_vec(),
    };
    let mut meta_out = create(&meta_path)?;
    serde_json::to_writer_pretty(&mut meta_out, &meta).map_err(|e| Error::Format(e.to_string()))?;
    writeln!(meta_out).map_err(|e| Error::io(&meta_path, e))?;
    meta_out.flush().map_err(|e| Error::io(&meta_path, e))?;
    Ok(vec![path.to_path_buf(), meta_path])
}

pub fn read_occurrence(path: &Path) -> Result<OccurrenceMatrix> {
    let mut triples = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() || (lineno == 1 && line.starts_with("chunk_id\t")) {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != 3 || cells[2] != "1" {
            return Err(Error::parse(lineno, "expected `chunk_id\\tterm\\t1`"));
        }
        triples.push((lineno, cells[0].to_string(), cells[1].to_string()));
    }
    if triples.is_empty() {
        return Err(gextext_core::Error::EmptyOccurrenceMatrix.into());
    }

    let meta_path = occurrence_sidecar(path);
    let meta: OccurrenceMeta = serde_json::from_reader(open(&meta_path)?)
        .map_err(|e| Error::Format(format!("{}: {e}", meta_path.display())))?;
    let chunk_index: BTreeMap<&str, usize> = meta
        .chunk_ids
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    if chunk_index.len() != meta.chunk_ids.len() {
        return Err(Error::Format("duplicate chunk id in sidecar".into()));
    }
    let vocab = Vocabulary::from_terms(meta.terms.iter().cloned());
    if vocab.len() != meta.terms.len() {
        return Err(Error::Format("duplicate term in sidecar".into()));
    }
    let mut rows = vec![Vec::new(); meta.chunk_ids.len()];
    for (lineno, chunk, term) in triples {
        let i = *chunk_index
            .get(chunk.as_str())
            .ok_or_else(|| Error::parse(lineno, format!("chunk `{chunk}` not in sidecar")))?;
        let j = vocab
            .position(&term)
            .ok_or_else(|| Error::parse(lineno, format!("term `{term}` not in sidecar")))?;
        rows[i].push(j as u32);
    }
    Ok(OccurrenceMatrix::from_rows(meta.chunk_ids, vocab, rows)?)
}

pub fn write_graph(path: &Path, g: &InferredGraph) -> Result<Vec<PathBuf>> {
    let terms = g.terms();
    let mut edges: Vec<(&str, &str)> = g
        .edges()
        .map(|(a, b)| {
            let (x, y) = (terms[a].as_str(), terms[b].as_str());
            if x <= y {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect();
    edges.sort_unstable();
    let mut out = create(path)?;
    for (a, b) in edges {
        writeln!(out, "{a}\t{b}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))?;

    let iso_path = isolated_sidecar(path);
    let mut isolated: Vec<&str> = g.isolated().map(|v| terms[v].as_str()).collect();
    isolated.sort_unstable();
    let mut out = create(&iso_path)?;
    for v in isolated {
        writeln!(out, "{v}").map_err(|e| Error::io(&iso_path, e))?;
    }
    out.flush().map_err(|e| Error::io(&iso_path, e))?;
    Ok(vec![path.to_path_buf(), iso_path])
}

/// Vertices come back in lexicographic order.
pub fn read_graph(path: &Path) -> Result<InferredGraph> {
    let mut vertices = BTreeSet::new();
    let mut edges = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(i + 1, "expected `term_a\\tterm_b`"))?;
        vertices.insert(a.to_string());
        vertices.insert(b.to_string());
        edges.push((a.to_string(), b.to_string()));
    }
    let iso_path = isolated_sidecar(path);
    if iso_path.exists() {
        for line in open(&iso_path)?.lines() {
            let line = line.map_err(|e| Error::io(&iso_path, e))?;
            let line = line.trim();
            if !line.is_empty() {
                vertices.insert(line.to_string());
            }
        }
    }
    let terms: Vec<String> = vertices.into_iter().collect();
    let index: BTreeMap<&str, usize> = terms.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    let edges: Vec<(usize, usize)> = edges
        .iter()
        .map(|(a, b)| (index[a.as_str()], index[b.as_str()]))
        .collect();
    Ok(InferredGraph::from_edges(terms, edges)?)
}

pub fn write_word_vectors(out: impl Write, v: &WordVectors) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    for (i, word) in v.words().iter().enumerate() {
        write!(out, "{word}")?;
        for x in v.vector(i) {
            write!(out, "\t{x}")?;
        }
        writeln!(out)?;
    }
    out.flush()
}

pub fn read_word_vectors(reader: impl BufRead) -> Result<WordVectors> {
    let mut words = Vec::new();
    let mut data = Vec::new();
    let mut dims = None;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.trim_end_matches('\r').split('\t');
        words.push(cells.next().unwrap_or_default().to_string());
        let before = data.len();
        for c in cells {
            data.push(parse_f64(c, lineno)?);
        }
        let d = data.len() - before;
        if *dims.get_or_insert(d) != d {
            return Err(Error::parse(lineno, "inconsistent vector length"));
        }
    }
    Ok(WordVectors::new(words, dims.unwrap_or(0), data)?)
}

/// `term_id\tgene_symbol` lines; blank lines, `#` comments and a
/// `term_id\tgene_symbol` header are skipped.
pub fn read_gene_annotations(reader: impl BufRead) -> Result<GeneProfileSet> {
    let mut profiles = GeneProfileSet::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') || (lineno == 1 && line == "term_id\tgene_symbol") {
            continue;
        }
        let (term, gene) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(lineno, "expected `term_id\\tgene_symbol`"))?;
        let (term, gene) = (term.trim(), gene.trim());
        if term.is_empty() || gene.is_empty() {
            return Err(Error::parse(lineno, "empty term id or gene symbol"));
        }
        profiles.insert(term, gene);
    }
    Ok(profiles)
}

/// One term per line, normalized; reports what was dropped.
pub fn read_vocabulary(path: &Path) -> Result<Vocabulary> {
    let lines: Vec<String> = open(path)?
        .lines()
        .collect::<std::io::Result<_>>()
        .map_err(|e| Error::io(path, e))?;
    let (vocab, dropped) = Vocabulary::load(&lines)?;
    for d in dropped {
        log::warn!(
            "{}:{}: dropped vocabulary line `{}` ({} tokens)",
            path.display(),
            d.line,
            d.text,
            d.tokens
        );
    }
    Ok(vocab)
}

pub fn write_lines<S: AsRef<str>>(path: &Path, lines: &[S]) -> Result<()> {
    let mut out = create(path)?;
    for l in lines {
        writeln!(out, "{}", l.as_ref()).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

const NA: &str = "NA";

/// Report rows. With several predictions each row is prefixed by the
/// prediction name, and a `mean:<reference>` row averages rho over the runs
/// that produced one; its p column is NA and `m_pairs` is the smallest run.
pub fn write_report(mut out: impl Write, reports: &[(String, EvalReport)]) -> std::io::Result<()> {
    writeln!(out, "reference\trho\tp\tm_pairs\tmask")?;
    let prefixed = reports.len() > 1;
    // (rho sum, runs, fewest pairs, mask) per reference row.
    let mut sums: BTreeMap<(usize, &str), (f64, usize, usize, &str)> = BTreeMap::new();
    for (method, report) in reports {
        for (k, row) in report.rows.iter().enumerate() {
            let name = if prefixed {
                format!("{method}:{}", row.reference)
            } else {
                row.reference.clone()
            };
            match &row.outcome {
                Ok(c) => {
                    writeln!(
                        out,
                        "{name}\t{}\t{}\t{}\t{}",
                        format_sig9(c.rho),
                        format_sig9(c.p_value),
                        row.m_pairs,
                        row.mask.as_str()
                    )?;
                    let e = sums
                        .entry((k, row.reference.as_str()))
                        .or_insert((0.0, 0, usize::MAX, row.mask.as_str()));
                    e.0 += c.rho;
                    e.1 += 1;
                    e.2 = e.2.min(row.m_pairs);
                }
                Err(_) => writeln!(out, "{name}\t{NA}\t{NA}\t{}\t{}", row.m_pairs, row.mask.as_str())?,
            }
        }
    }
    if prefixed {
        for ((_, reference), (sum, runs, pairs, mask)) in sums {
            writeln!(
                out,
                "mean:{reference}\t{}\t{NA}\t{pairs}\t{mask}",
                format_sig9(sum / runs as f64)
            )?;
        }
    }
    Ok(())
}

/// Long-format rows for plotting: `method\treference\tmask\trho\tp\tm_pairs`.
pub fn write_report_long(mut out: impl Write, reports: &[(String, EvalReport)]) -> std::io::Result<()> {
    writeln!(out, "method\treference\tmask\trho\tp\tm_pairs")?;
    for (method, report) in reports {
        for row in &report.rows {
            let (rho, p) = match &row.outcome {
                Ok(c) => (format_sig9(c.rho), format_sig9(c.p_value)),
                Err(_) => (NA.to_string(), NA.to_string()),
            };
            writeln!(
                out,
                "{method}\t{}\t{}\t{rho}\t{p}\t{}",
                row.reference,
                row.mask.as_str(),
                row.m_pairs
            )?;
        }
    }
    Ok(())
}
