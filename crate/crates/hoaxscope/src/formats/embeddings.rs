//! `dim=<d> count=<n>` header, then one `<id>\t<f1>\t...\t<fd>` line per
//! record.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use hoaxscope_core::negsample::EmbeddingRecord;

use super::{create, numbered_lines, open};
use crate::error::{Error, Result};

pub fn read_embeddings(path: &Path) -> Result<Vec<EmbeddingRecord>> {
    parse_embeddings(open(path)?, path)
}

fn header_field(token: Option<&str>, key: &str, path: &Path, line: usize) -> Result<usize> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(path, line, format!("header must read `dim=<d> count=<n>`, bad or missing {key}")))
}

pub fn parse_embeddings(reader: impl BufRead, path: &Path) -> Result<Vec<EmbeddingRecord>> {
    let lines = numbered_lines(reader, path)?;
    let Some((header_line, header)) = lines.first() else {
        return Err(Error::parse(path, 1, "empty embedding file"));
    };
    let mut tokens = header.split_whitespace();
    let dim = header_field(tokens.next(), "dim", path, *header_line)?;
    let count = header_field(tokens.next(), "count", path, *header_line)?;
    if dim == 0 {
        return Err(Error::parse(path, *header_line, "dim must be positive"));
    }

    let mut records = Vec::with_capacity(count);
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (line, text) in &lines[1..] {
        let mut fields = text.split('\t');
        let id = fields.next().unwrap_or_default().trim();
        if id.is_empty() {
            return Err(Error::parse(path, *line, "empty id"));
        }
        let vector = fields
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::parse(path, *line, format!("bad component: {e}")))?;
        if vector.len() != dim {
            return Err(Error::parse(path, *line, format!("expected {dim} components, found {}", vector.len())));
        }
        if let Some(prev) = seen.insert(id.to_string(), *line) {
            return Err(Error::parse(path, *line, format!("duplicate id {id:?} (first on line {prev})")));
        }
        let record = EmbeddingRecord::new(id, vector).map_err(|e| Error::parse(path, *line, e.to_string()))?;
        records.push(record);
    }
    if records.len() != count {
        return Err(Error::parse(
            path,
            *header_line,
            format!("header declares {count} records, file has {}", records.len()),
        ));
    }
    Ok(records)
}

/// Components use the shortest representation that parses back to the
/// same `f64`, so a write/read round trip is lossless.
pub fn write_embeddings(path: &Path, records: &[EmbeddingRecord]) -> Result<()> {
    let dim = hoaxscope_core::negsample::common_dim(records)?.unwrap_or(0);
    if dim == 0 {
        return Err(Error::Validation("no embeddings to write".into()));
    }
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "dim={dim} count={}", records.len()).map_err(io)?;
    for r in records {
        if r.id.contains(['\t', '\n']) {
            return Err(Error::Validation(format!("embedding id {:?} contains a tab or newline", r.id)));
        }
        write!(w, "{}", r.id).map_err(io)?;
        for v in &r.vector {
            write!(w, "\t{v}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}
