//! Medline flat-file records (as returned by PubMed `efetch` with
//! `rettype=medline`). Only the `PMID` and `AB` tags are kept.

use std::collections::HashSet;
use std::io::BufRead;

use gextext_core::Chunk;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MedlineCorpus {
    pub chunks: Vec<Chunk>,
    /// Records with a PMID but no abstract.
    pub skipped_without_abstract: usize,
    /// Records with no PMID at all.
    pub skipped_without_pmid: usize,
}

#[derive(Default)]
struct Record {
    pmid: Option<String>,
    abstract_text: Option<String>,
    /// Tag of the most recent tag line; continuation lines extend it.
    last_tag: Option<String>,
}

impl Record {
    fn append(&mut self, tag: &str, value: &str) {
        let slot = match tag {
            "PMID" => &mut self.pmid,
            "AB" => &mut self.abstract_text,
            _ => return,
        };
        match slot {
            Some(existing) if !value.is_empty() => {
                if !existing.is_empty() {
                    existing.push(' ');
                }
                existing.push_str(value);
            }
            Some(_) => {}
            None => *slot = Some(value.to_string()),
        }
    }
}

/// Splits a `XXXX- value` line into its tag and value.
fn split_tag_line(line: &str) -> Option<(&str, &str)> {
    let tag = line.get(..4)?;
    let rest = line.get(4..)?;
    let value = rest.strip_prefix('-')?;
    let tag = tag.trim_end();
    if tag.is_empty() || !tag.chars().all(|c| c.is_ascii_alphanumeric()) {
        return None;
    }
    Some((tag, value.trim()))
}

pub fn parse_medline(reader: impl BufRead) -> Result<MedlineCorpus> {
    let mut out = MedlineCorpus::default();
    let mut seen = HashSet::new();
    let mut current: Option<Record> = None;

    let mut finish = |record: Record, out: &mut MedlineCorpus| -> Result<()> {
        match (record.pmid, record.abstract_text) {
            (Some(id), Some(text)) if !id.is_empty() => {
                if !seen.insert(id.clone()) {
                    return Err(Error::DuplicateId(id));
                }
                out.chunks.push(Chunk { id, text });
            }
            (Some(id), None) if !id.is_empty() => out.skipped_without_abstract += 1,
            _ => out.skipped_without_pmid += 1,
        }
        Ok(())
    };

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(record) = current.take() {
                finish(record, &mut out)?;
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("      ") {
            let Some(record) = current.as_mut() else {
                return Err(Error::parse(lineno, "continuation line outside a record"));
            };
            let Some(tag) = record.last_tag.clone() else {
                return Err(Error::parse(lineno, "continuation line before any tag"));
            };
            record.append(&tag, rest.trim());
            continue;
        }
        let Some((tag, value)) = split_tag_line(line) else {
            return Err(Error::parse(lineno, format!("malformed tag line `{line}`")));
        };
        let record = current.get_or_insert_with(Record::default);
        record.append(tag, value);
        record.last_tag = Some(tag.to_string());
    }
    if let Some(record) = current.take() {
        finish(record, &mut out)?;
    }
    Ok(out)
}
