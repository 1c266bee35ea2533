//! Split manifests: a header line, then one `{id, partition, view}` line
//! per article, train ids first, each partition in id order.

use std::io::Write;
use std::path::Path;

use hoaxscope_core::corpus::{DatasetSplit, RatioSetting, TextView};
use serde::{Deserialize, Serialize};

use super::{create, numbered_lines, open};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub format_version: u32,
    pub ratio: RatioSetting,
    pub view: TextView,
    pub seed: u64,
    pub test_fraction: f64,
    pub train: usize,
    pub test: usize,
    pub dropped: usize,
    /// Effective parameters of the run that wrote the manifest.
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partition {
    Train,
    Test,
    /// Left out because the view has no text for this article.
    Dropped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub partition: Partition,
    pub view: TextView,
}

#[derive(Serialize)]
struct HeaderLine<'a> {
    header: &'a ManifestHeader,
}

#[derive(Deserialize)]
struct HeaderLineOwned {
    header: ManifestHeader,
}

pub fn write_manifest(path: &Path, split: &DatasetSplit, config: serde_json::Value) -> Result<()> {
    let header = ManifestHeader {
        format_version: crate::FORMAT_VERSION,
        ratio: split.ratio,
        view: split.view,
        seed: split.seed,
        test_fraction: split.test_fraction,
        train: split.train.len(),
        test: split.test.len(),
        dropped: split.dropped.len(),
        config,
    };
    let mut w = create(path)?;
    let io = |e: std::io::Error| Error::io(path, e);
    serde_json::to_writer(&mut w, &HeaderLine { header: &header }).map_err(|e| io(e.into()))?;
    writeln!(w).map_err(io)?;
    let parts = [
        (Partition::Train, &split.train),
        (Partition::Test, &split.test),
        (Partition::Dropped, &split.dropped),
    ];
    for (partition, ids) in parts {
        for id in ids {
            let entry = ManifestEntry {
                id: id.clone(),
                partition,
                view: split.view,
            };
            serde_json::to_writer(&mut w, &entry).map_err(|e| io(e.into()))?;
            writeln!(w).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

pub fn read_manifest(path: &Path) -> Result<(ManifestHeader, Vec<ManifestEntry>)> {
    let lines = numbered_lines(open(path)?, path)?;
    let Some((first, text)) = lines.first() else {
        return Err(Error::parse(path, 1, "empty manifest"));
    };
    let header: HeaderLineOwned = serde_json::from_str(text).map_err(|e| Error::parse(path, *first, e.to_string()))?;
    let entries = lines[1..]
        .iter()
        .map(|(line, text)| serde_json::from_str(text).map_err(|e| Error::parse(path, *line, e.to_string())))
        .collect::<Result<Vec<ManifestEntry>>>()?;
    Ok((header.header, entries))
}
