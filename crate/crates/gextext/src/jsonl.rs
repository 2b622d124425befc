//! `{"id": "...", "text": "..."}` per line.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use gextext_core::Chunk;
use serde_json::Value;

use crate::error::{Error, Result};

pub fn parse_jsonl(reader: impl BufRead) -> Result<Vec<Chunk>> {
    let mut chunks = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let field = |name: &str| -> Result<String> {
            match value.get(name) {
                Some(Value::String(s)) => Ok(s.clone()),
                Some(_) => Err(Error::Format(format!("non-string {name} at line {lineno}"))),
                None => Err(Error::Format(format!("missing {name} at line {lineno}"))),
            }
        };
        let id = field("id")?;
        let text = field("text")?;
        if id.is_empty() {
            return Err(Error::Format(format!("empty id at line {lineno}")));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        chunks.push(Chunk { id, text });
    }
    Ok(chunks)
}

pub fn write_jsonl(mut out: impl Write, chunks: &[Chunk]) -> std::io::Result<()> {
    for chunk in chunks {
        let line = serde_json::json!({ "id": chunk.id, "text": chunk.text });
        writeln!(out, "{line}")?;
    }
    Ok(())
}
