//! The subset of OBO flat files needed for `is_a` hierarchies: `[Term]`
//! stanzas with `id`, `name`, `is_a` and `is_obsolete`.

use std::io::BufRead;

use gextext_core::ontology::{Ontology, TermRecord};

use crate::error::{Error, Result};

#[derive(Default)]
struct Stanza {
    start_line: usize,
    id: Option<String>,
    name: Option<String>,
    parents: Vec<String>,
    obsolete: bool,
}

/// First whitespace-separated token, ignoring any `!` comment.
fn reference(value: &str) -> &str {
    let value = value.split('!').next().unwrap_or("");
    value.split_whitespace().next().unwrap_or("")
}

pub fn parse_obo_records(reader: impl BufRead) -> Result<Vec<TermRecord>> {
    let mut records = Vec::new();
    let mut stanza: Option<Stanza> = None;
    let mut in_term = false;

    let flush = |stanza: Option<Stanza>, records: &mut Vec<TermRecord>| -> Result<()> {
        let Some(s) = stanza else { return Ok(()) };
        if s.obsolete {
            return Ok(());
        }
        let id =
            s.id.ok_or_else(|| Error::parse(s.start_line, "[Term] stanza without id"))?;
        records.push(TermRecord {
            name: s.name.unwrap_or_else(|| id.clone()),
            id,
            parents: s.parents,
        });
        Ok(())
    };

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let line = line.trim();
        if line.starts_with('[') {
            flush(stanza.take(), &mut records)?;
            in_term = line == "[Term]";
            if in_term {
                stanza = Some(Stanza {
                    start_line: lineno,
                    ..Stanza::default()
                });
            }
            continue;
        }
        let Some(s) = stanza.as_mut().filter(|_| in_term) else {
            continue;
        };
        let Some((key, value)) = line.split_once(':') else {
            continue;
        };
        let value = value.trim();
        match key.trim() {
            "id" => {
                let id = reference(value);
                if id.is_empty() {
                    return Err(Error::parse(lineno, "empty id"));
                }
                s.id = Some(id.to_string());
            }
            "name" => s.name = Some(value.to_string()),
            "is_a" => {
                let parent = reference(value);
                if parent.is_empty() {
                    return Err(Error::parse(lineno, "empty is_a target"));
                }
                s.parents.push(parent.to_string());
            }
            "is_obsolete" => s.obsolete = value == "true",
            _ => {}
        }
    }
    flush(stanza.take(), &mut records)?;
    Ok(records)
}

pub fn parse_obo(reader: impl BufRead) -> Result<Ontology> {
    Ok(Ontology::new(parse_obo_records(reader)?)?)
}
