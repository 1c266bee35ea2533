//! On-disk formats. Line-delimited JSON for corpora, timelines and split
//! manifests; a tab-separated text format for embeddings; JSON for models
//! and reports; CSV for tabular plot data.

mod corpus;
mod embeddings;
mod manifest;
mod model;
mod tables;
mod timelines;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub use corpus::{load_corpus, parse_corpus, write_corpus};
pub use embeddings::{parse_embeddings, read_embeddings, write_embeddings};
pub use manifest::{read_manifest, write_manifest, ManifestEntry, ManifestHeader, Partition};
pub use model::{read_model, write_model, ModelFile};
pub use tables::CsvArtifact;
pub use timelines::{
    format_timestamp, parse_timestamp, parse_timelines, read_timelines, timeline_record, write_timelines,
    TimelineRecord,
};

use crate::error::{Error, Result};

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Non-blank lines with their 1-based line numbers.
pub(crate) fn numbered_lines(reader: impl BufRead, path: &Path) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

/// Writes `value` as pretty JSON followed by a newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::io(path, e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?).map_err(|e| Error::parse(path, e.line(), e.to_string()))
}
