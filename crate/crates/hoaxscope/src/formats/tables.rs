use std::io::Write;
use std::path::Path;

use super::create;
use crate::error::{Error, Result};

/// A CSV file whose leading `#` lines carry the format version and the
/// effective run config, so the table stays traceable on its own.
pub struct CsvArtifact {
    writer: csv::Writer<std::io::BufWriter<std::fs::File>>,
    path: std::path::PathBuf,
}

impl CsvArtifact {
    pub fn create(path: &Path, config: &serde_json::Value, header: &[&str]) -> Result<Self> {
        let mut file = create(path)?;
        let io = |e| Error::io(path, e);
        writeln!(file, "# format_version={}", crate::FORMAT_VERSION).map_err(io)?;
        writeln!(file, "# config={config}").map_err(io)?;
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(header).map_err(|e| Error::io(path, e.into()))?;
        Ok(Self {
            writer,
            path: path.to_path_buf(),
        })
    }

    pub fn row<I, T>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(|e| Error::io(&self.path, e.into()))
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush().map_err(|e| Error::io(&self.path, e))
    }
}
