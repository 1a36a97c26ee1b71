//! Labeled corpora: loading, validation and per-category statistics.
//!
//! Two on-disk layouts are understood. JSONL holds one object per line with
//! `text`, `label` and an optional `id`; blank lines are skipped. The directory
//! layout is `<root>/<label>/<file>.txt`. Text must be valid UTF-8 in both.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fsutil;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("corpus contains no documents")]
    EmptyCorpus,
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("not a directory: {}", .0.display())]
    NotADirectory(PathBuf),
    #[error("unreadable file {}: {reason}", path.display())]
    UnreadableFile { path: PathBuf, reason: String },
    #[error("invalid document {id:?}: {reason}")]
    InvalidDocument { id: String, reason: String },
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// One raw document and its category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDocument {
    pub id: String,
    pub text: String,
    pub label: String,
}

impl LabeledDocument {
    /// Builds a document, rejecting blank text and empty or multi-line labels.
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: impl Into<String>) -> Result<Self, CorpusError> {
        let doc = LabeledDocument {
            id: id.into(),
            text: text.into(),
            label: label.into(),
        };
        doc.validate().map_err(|reason| CorpusError::InvalidDocument {
            id: doc.id.clone(),
            reason: reason.to_string(),
        })?;
        Ok(doc)
    }

    fn validate(&self) -> Result<(), &'static str> {
        if self.text.trim().is_empty() {
            return Err("text is empty");
        }
        if self.label.is_empty() {
            return Err("label is empty");
        }
        if self.label.contains(['\n', '\r']) {
            return Err("label contains a newline");
        }
        Ok(())
    }
}

/// A document whose label may be absent, as accepted by prediction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
    pub label: Option<String>,
}

/// An ordered, validated collection of labeled documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCorpus {
    documents: Vec<LabeledDocument>,
    labels: Vec<String>,
}

impl LabeledCorpus {
    pub fn new(documents: Vec<LabeledDocument>) -> Result<Self, CorpusError> {
        if documents.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            doc.validate().map_err(|reason| CorpusError::InvalidDocument {
                id: doc.id.clone(),
                reason: reason.to_string(),
            })?;
            if !seen.insert(doc.id.as_str()) {
                return Err(CorpusError::DuplicateId(doc.id.clone()));
            }
        }
        let labels: BTreeSet<&str> = documents.iter().map(|d| d.label.as_str()).collect();
        let labels = labels.into_iter().map(str::to_owned).collect();
        Ok(LabeledCorpus { documents, labels })
    }

    pub fn documents(&self) -> &[LabeledDocument] {
        &self.documents
    }

    /// Distinct labels in lexicographic order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LabeledDocument> {
        self.documents.iter()
    }

    pub fn into_documents(self) -> Vec<LabeledDocument> {
        self.documents
    }
}

impl<'a> IntoIterator for &'a LabeledCorpus {
    type Item = &'a LabeledDocument;
    type IntoIter = std::slice::Iter<'a, LabeledDocument>;

    fn into_iter(self) -> Self::IntoIter {
        self.documents.iter()
    }
}

/// Documents per label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryCounts {
    pub per_label: BTreeMap<String, usize>,
    pub total: usize,
}

pub fn split_stats(corpus: &LabeledCorpus) -> CategoryCounts {
    let mut per_label = BTreeMap::new();
    for doc in corpus {
        *per_label.entry(doc.label.clone()).or_insert(0) += 1;
    }
    CategoryCounts {
        per_label,
        total: corpus.len(),
    }
}

#[derive(Deserialize)]
struct JsonLine {
    text: String,
    label: Option<String>,
    id: Option<String>,
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CorpusError> {
    fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Iterates `(1-based line number, line)` over non-blank lines, failing on
/// the first line that is not valid UTF-8.
fn jsonl_lines(bytes: &[u8]) -> impl Iterator<Item = Result<(usize, &str), CorpusError>> {
    bytes.split(|&b| b == b'\n').enumerate().filter_map(|(i, raw)| {
        let line_no = i + 1;
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        match std::str::from_utf8(raw) {
            Ok(s) if s.trim().is_empty() => None,
            Ok(s) => Some(Ok((line_no, s))),
            Err(e) => Some(Err(CorpusError::MalformedLine {
                line: line_no,
                reason: format!("invalid UTF-8: {e}"),
            })),
        }
    })
}

fn file_name_of(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn parse_raw_jsonl(path: &Path, require_label: bool) -> Result<Vec<RawDocument>, CorpusError> {
    let bytes = read_bytes(path)?;
    let file_name = file_name_of(path);
    let mut docs = Vec::new();
    for item in jsonl_lines(&bytes) {
        let (line, text) = item?;
        let malformed = |reason: String| CorpusError::MalformedLine { line, reason };
        let parsed: JsonLine = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
        if require_label && parsed.label.is_none() {
            return Err(malformed("missing field `label`".into()));
        }
        if parsed.text.trim().is_empty() {
            return Err(malformed("text is empty".into()));
        }
        if let Some(label) = &parsed.label {
            if label.is_empty() || label.contains(['\n', '\r']) {
                return Err(malformed("label is empty or contains a newline".into()));
            }
        }
        let id = parsed.id.unwrap_or_else(|| format!("{file_name}:{line}"));
        docs.push(RawDocument {
            id,
            text: parsed.text,
            label: parsed.label,
        });
    }
    Ok(docs)
}

/// Loads a JSONL corpus, keeping line order. Missing ids become
/// `<filename>:<line-number>`.
pub fn load_jsonl(path: impl AsRef<Path>) -> Result<LabeledCorpus, CorpusError> {
    let docs = parse_raw_jsonl(path.as_ref(), true)?
        .into_iter()
        .map(|d| LabeledDocument {
            id: d.id,
            text: d.text,
            label: d.label.expect("label presence checked while parsing"),
        })
        .collect();
    LabeledCorpus::new(docs)
}

/// Loads JSONL where `label` is optional. Used for prediction input.
pub fn load_unlabeled_jsonl(path: impl AsRef<Path>) -> Result<Vec<RawDocument>, CorpusError> {
    let docs = parse_raw_jsonl(path.as_ref(), false)?;
    if docs.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut seen = HashSet::new();
    for d in &docs {
        if !seen.insert(d.id.as_str()) {
            return Err(CorpusError::DuplicateId(d.id.clone()));
        }
    }
    Ok(docs)
}

fn read_utf8_file(path: &Path) -> Result<String, CorpusError> {
    let bytes = fs::read(path).map_err(|e| CorpusError::UnreadableFile {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    String::from_utf8(bytes).map_err(|e| CorpusError::UnreadableFile {
        path: path.to_path_buf(),
        reason: format!("invalid UTF-8: {e}"),
    })
}

fn sorted_entries(dir: &Path) -> Result<Vec<(String, PathBuf)>, CorpusError> {
    let read = fs::read_dir(dir).map_err(|source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut entries = Vec::new();
    for entry in read {
        let entry = entry.map_err(|source| CorpusError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        let name = entry
            .file_name()
            .into_string()
            .map_err(|_| CorpusError::UnreadableFile {
                path: path.clone(),
                reason: "file name is not valid UTF-8".into(),
            })?;
        entries.push((name, path));
    }
    entries.sort();
    Ok(entries)
}

/// Loads a `<root>/<label>/<file>.txt` tree. Documents are ordered by
/// `(label, filename)`; ids are `<label>/<filename>`.
pub fn load_dir(path: impl AsRef<Path>) -> Result<LabeledCorpus, CorpusError> {
    let root = path.as_ref();
    if !root.is_dir() {
        return Err(CorpusError::NotADirectory(root.to_path_buf()));
    }
    let mut docs = Vec::new();
    for (label, label_dir) in sorted_entries(root)? {
        if !label_dir.is_dir() {
            continue;
        }
        for (file_name, file_path) in sorted_entries(&label_dir)? {
            let is_txt = file_path.extension().is_some_and(|e| e == "txt");
            if !is_txt || !file_path.is_file() {
                continue;
            }
            let text = read_utf8_file(&file_path)?;
            docs.push(LabeledDocument::new(
                format!("{label}/{file_name}"),
                text,
                label.clone(),
            )?);
        }
    }
    LabeledCorpus::new(docs)
}

/// Writes the canonical JSONL form (`id`, `text`, `label` on every line).
pub fn write_jsonl(corpus: &LabeledCorpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for doc in corpus {
        serde_json::to_writer(&mut out, doc).expect("serializing strings cannot fail");
        out.push(b'\n');
    }
    fsutil::write_atomic(path, &out).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}
