use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use hoaxscope_core::corpus::Article;
use serde_json::Value;

use super::{create, numbered_lines, open};
use crate::error::{Error, Result};

const REQUIRED: [&str; 4] = ["id", "title", "text", "label"];

/// Reads a line-delimited JSON corpus, keeping file order.
pub fn load_corpus(path: &Path) -> Result<Vec<Article>> {
    parse_corpus(open(path)?, path)
}

pub fn parse_corpus(reader: impl BufRead, path: &Path) -> Result<Vec<Article>> {
    let mut articles = Vec::new();
    let mut first_seen: HashMap<String, usize> = HashMap::new();
    for (line, text) in numbered_lines(reader, path)? {
        let value: Value = serde_json::from_str(&text).map_err(|e| Error::parse(path, line, e.to_string()))?;
        let Some(object) = value.as_object() else {
            return Err(Error::parse(path, line, "expected a JSON object"));
        };
        if let Some(field) = REQUIRED.iter().find(|f| object.get(**f).is_none_or(Value::is_null)) {
            return Err(Error::Validation(format!("{}: line {line}: missing {field}", path.display())));
        }
        let article: Article =
            serde_json::from_value(value).map_err(|e| Error::parse(path, line, e.to_string()))?;
        article
            .validate()
            .map_err(|e| Error::Validation(format!("{}: line {line}: {e}", path.display())))?;
        if let Some(prev) = first_seen.insert(article.id.clone(), line) {
            return Err(Error::Validation(format!(
                "{}: duplicate id {:?} on lines {prev} and {line}",
                path.display(),
                article.id
            )));
        }
        articles.push(article);
    }
    Ok(articles)
}

pub fn write_corpus(path: &Path, articles: &[Article]) -> Result<()> {
    let mut w = create(path)?;
    for a in articles {
        serde_json::to_writer(&mut w, a).map_err(|e| Error::io(path, e.into()))?;
        writeln!(w).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
