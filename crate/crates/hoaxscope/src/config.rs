//! Optional run-config file: `key = value` lines, `#` starts a comment.
//! Keys use the long flag names with `-` or `_`. A flag given on the
//! command line wins over the file; the file wins over built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    source: Option<std::path::PathBuf>,
}

fn canonical_key(key: &str) -> String {
    key.trim().replace('_', "-").to_ascii_lowercase()
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text, path)?;
        cfg.source = Some(path.to_path_buf());
        Ok(cfg)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split_once('#').map_or(raw, |(before, _)| before).trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::parse(path, i + 1, "expected `key = value`"));
            };
            let key = canonical_key(key);
            if key.is_empty() {
                return Err(Error::parse(path, i + 1, "empty key"));
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::parse(path, i + 1, format!("key {key:?} set twice")));
            }
        }
        Ok(Self { values, source: None })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(&canonical_key(key)).map(String::as_str)
    }

    /// `flag` if given, else the file's value for `key` parsed as `T`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| {
                let origin = self.source.as_ref().map_or("config".into(), |p| p.display().to_string());
                Error::Usage(format!("{origin}: bad value {v:?} for {key}: {e}"))
            }),
        }
    }

    /// As [`pick`](Self::pick), falling back to `default`.
    pub fn pick_or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }
}
