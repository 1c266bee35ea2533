use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use chrono::DateTime;
use hoaxscope_core::corpus::Label;
use hoaxscope_core::timeline::{RevisionTimeline, Timestamp};
use serde::{Deserialize, Serialize};

use super::{create, numbered_lines, open};
use crate::error::{Error, Result};

/// One line of a timeline file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineRecord {
    pub article_id: String,
    pub label: Label,
    /// ISO-8601 UTC instants.
    pub timestamps: Vec<String>,
}

/// Parses an RFC 3339 / ISO-8601 instant with offset to whole UTC seconds.
pub fn parse_timestamp(s: &str) -> std::result::Result<Timestamp, String> {
    DateTime::parse_from_rfc3339(s.trim())
        .map(|dt| Timestamp(dt.timestamp()))
        .map_err(|e| format!("bad timestamp {s:?}: {e}"))
}

/// `YYYY-MM-DDTHH:MM:SSZ`.
pub fn format_timestamp(t: Timestamp) -> String {
    t.to_string()
}

pub fn timeline_record(t: &RevisionTimeline) -> TimelineRecord {
    TimelineRecord {
        article_id: t.article_id().to_string(),
        label: t.label(),
        timestamps: t.timestamps().iter().map(|&ts| format_timestamp(ts)).collect(),
    }
}

pub fn read_timelines(path: &Path) -> Result<Vec<RevisionTimeline>> {
    parse_timelines(open(path)?, path)
}

/// Timestamps are sorted on load; the stored order carries no meaning.
pub fn parse_timelines(reader: impl BufRead, path: &Path) -> Result<Vec<RevisionTimeline>> {
    let mut out = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (line, text) in numbered_lines(reader, path)? {
        let record: TimelineRecord =
            serde_json::from_str(&text).map_err(|e| Error::parse(path, line, e.to_string()))?;
        if record.timestamps.is_empty() {
            return Err(Error::Validation(format!(
                "{}: line {line}: timeline {} has no revisions",
                path.display(),
                record.article_id
            )));
        }
        let stamps = record
            .timestamps
            .iter()
            .map(|s| parse_timestamp(s))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|m| Error::parse(path, line, m))?;
        if let Some(prev) = seen.insert(record.article_id.clone(), line) {
            return Err(Error::Validation(format!(
                "{}: duplicate article_id {:?} on lines {prev} and {line}",
                path.display(),
                record.article_id
            )));
        }
        out.push(RevisionTimeline::from_unsorted(record.article_id, record.label, stamps)?);
    }
    Ok(out)
}

pub fn write_timelines(path: &Path, timelines: &[RevisionTimeline]) -> Result<()> {
    let mut w = create(path)?;
    for t in timelines {
        serde_json::to_writer(&mut w, &timeline_record(t)).map_err(|e| Error::io(path, e.into()))?;
        writeln!(w).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
