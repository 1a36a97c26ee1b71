//! Bengali text preprocessing.
//!
//! A document goes through sentence splitting, whitespace tokenization,
//! symbol stripping, Latin lowercasing, suffix stemming and stopword removal,
//! in that order. Sentences are kept because chi-square scoring counts
//! co-occurrence per sentence.
//!
//! The stemmer and the stopword list are data: [`SuffixTable`] and the stopword
//! set are loaded from text files, with defaults compiled in from `data/`.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::LabeledDocument;

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");
const DEFAULT_SUFFIXES: &str = include_str!("../data/suffixes.tsv");

/// Sentence delimiters: danda, question mark, exclamation mark, newline.
pub const SENTENCE_DELIMITERS: [char; 4] = ['।', '?', '!', '\n'];

#[derive(Debug, Error)]
pub enum TextprepError {
    #[error("suffix table line {line}: {reason}")]
    InvalidSuffixLine { line: usize, reason: String },
    #[error("duplicate suffix {0:?} in suffix table")]
    DuplicateSuffix(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Strip `suffix` when at least `min_stem_chars` characters remain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuffixRule {
    pub suffix: String,
    pub min_stem_chars: usize,
}

impl SuffixRule {
    fn check(&self) -> Result<(), &'static str> {
        if self.suffix.is_empty() || self.suffix.chars().any(char::is_whitespace) {
            return Err("suffix must be non-empty and contain no whitespace");
        }
        if self.min_stem_chars == 0 {
            return Err("minimum stem length must be at least 1");
        }
        Ok(())
    }

    fn strip<'a>(&self, token: &'a str) -> Option<&'a str> {
        let stem = token.strip_suffix(self.suffix.as_str())?;
        (stem.chars().count() >= self.min_stem_chars).then_some(stem)
    }
}

/// Suffix rules ordered by descending suffix length (in characters), so the
/// first applicable rule is the longest one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SuffixRule>", into = "Vec<SuffixRule>")]
pub struct SuffixTable {
    rules: Vec<SuffixRule>,
}

impl SuffixTable {
    pub fn new(mut rules: Vec<SuffixRule>) -> Result<Self, TextprepError> {
        let mut seen = BTreeSet::new();
        for (i, rule) in rules.iter().enumerate() {
            rule.check().map_err(|reason| TextprepError::InvalidSuffixLine {
                line: i + 1,
                reason: reason.into(),
            })?;
            if !seen.insert(rule.suffix.as_str()) {
                return Err(TextprepError::DuplicateSuffix(rule.suffix.clone()));
            }
        }
        // stable: equal-length suffixes keep file order
        rules.sort_by_key(|r| std::cmp::Reverse(r.suffix.chars().count()));
        Ok(SuffixTable { rules })
    }

    /// Parses `<suffix>\t<min_stem_length>` lines. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self, TextprepError> {
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| TextprepError::InvalidSuffixLine {
                line: line_no,
                reason: reason.to_string(),
            };
            let (suffix, min) = trimmed
                .split_once('\t')
                .ok_or_else(|| bad("expected <suffix><TAB><min stem length>"))?;
            let min_stem_chars = min
                .trim()
                .parse()
                .map_err(|_| bad("minimum stem length is not a non-negative integer"))?;
            let rule = SuffixRule {
                suffix: suffix.trim().to_string(),
                min_stem_chars,
            };
            rule.check().map_err(bad)?;
            rules.push(rule);
        }
        SuffixTable::new(rules)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TextprepError> {
        SuffixTable::parse(&read_text(path.as_ref())?)
    }

    pub fn rules(&self) -> &[SuffixRule] {
        &self.rules
    }

    fn applies_to(&self, token: &str) -> bool {
        self.rules.iter().any(|r| r.strip(token).is_some())
    }
}

impl Default for SuffixTable {
    fn default() -> Self {
        SuffixTable::parse(DEFAULT_SUFFIXES).expect("shipped suffix table is valid")
    }
}

impl TryFrom<Vec<SuffixRule>> for SuffixTable {
    type Error = TextprepError;

    fn try_from(rules: Vec<SuffixRule>) -> Result<Self, Self::Error> {
        SuffixTable::new(rules)
    }
}

impl From<SuffixTable> for Vec<SuffixRule> {
    fn from(table: SuffixTable) -> Self {
        table.rules
    }
}

fn read_text(path: &Path) -> Result<String, TextprepError> {
    std::fs::read_to_string(path).map_err(|source| TextprepError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses a stopword file: one token per line, `#` starts a comment line.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

pub fn load_stopwords(path: impl AsRef<Path>) -> Result<BTreeSet<String>, TextprepError> {
    Ok(parse_stopwords(&read_text(path.as_ref())?))
}

/// The default strip set: ASCII punctuation and digits, Bengali digits,
/// danda, quotation marks, dashes and a few other typographic symbols.
pub fn default_strip_symbols() -> BTreeSet<char> {
    let mut set: BTreeSet<char> = (0u8..128)
        .map(char::from)
        .filter(|c| c.is_ascii_punctuation() || c.is_ascii_digit())
        .collect();
    set.extend('০'..='৯');
    set.extend(['।', '॥']);
    set.extend(['‘', '’', '‚', '‛', '“', '”', '„', '‟', '«', '»', '‹', '›']);
    set.extend(['–', '—', '‐', '‑', '‒', '―', '…', '•', '·']);
    set
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub stopwords: BTreeSet<String>,
    pub suffix_table: SuffixTable,
    pub strip_symbols: BTreeSet<char>,
    pub enable_symbol_strip: bool,
    pub lowercase_latin: bool,
    pub enable_stemming: bool,
    pub enable_stopwords: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            stopwords: parse_stopwords(DEFAULT_STOPWORDS),
            suffix_table: SuffixTable::default(),
            strip_symbols: default_strip_symbols(),
            enable_symbol_strip: true,
            lowercase_latin: true,
            enable_stemming: true,
            enable_stopwords: true,
        }
    }
}

impl PreprocessConfig {
    /// Every step disabled: output tokens equal a plain whitespace split.
    pub fn passthrough() -> Self {
        PreprocessConfig {
            enable_symbol_strip: false,
            lowercase_latin: false,
            enable_stemming: false,
            enable_stopwords: false,
            ..PreprocessConfig::default()
        }
    }

    /// Hex SHA-256 of the canonical JSON form. Stored in model files so a
    /// model is never applied with a different preprocessing setup.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "TokenizedRepr")]
pub struct TokenizedDocument {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub sentences: Vec<Vec<String>>,
    #[serde(skip)]
    token_count: usize,
}

#[derive(Deserialize)]
struct TokenizedRepr {
    id: String,
    label: Option<String>,
    sentences: Vec<Vec<String>>,
}

impl From<TokenizedRepr> for TokenizedDocument {
    fn from(r: TokenizedRepr) -> Self {
        TokenizedDocument::new(r.id, r.label, r.sentences)
    }
}

impl TokenizedDocument {
    pub fn new(id: impl Into<String>, label: Option<String>, sentences: Vec<Vec<String>>) -> Self {
        let sentences: Vec<Vec<String>> = sentences.into_iter().filter(|s| !s.is_empty()).collect();
        let token_count = sentences.iter().map(Vec::len).sum();
        TokenizedDocument {
            id: id.into(),
            label,
            sentences,
            token_count,
        }
    }

    /// Total number of tokens over all sentences.
    pub fn token_count(&self) -> usize {
        self.token_count
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences.iter().flatten().map(String::as_str)
    }

    /// Text that preprocesses back to this document: tokens joined by spaces,
    /// sentences by newlines.
    pub fn to_text(&self) -> String {
        self.sentences
            .iter()
            .map(|s| s.join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Splits on danda, `?`, `!` and newline. Segments are trimmed and empty
/// ones dropped.
pub fn split_sentences(text: &str) -> Vec<&str> {
    text.split(SENTENCE_DELIMITERS)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn tokenize(sentence: &str) -> Vec<&str> {
    sentence.split_whitespace().collect()
}

pub fn strip_symbols(token: &str, strip_set: &BTreeSet<char>) -> String {
    token.chars().filter(|c| !strip_set.contains(c)).collect()
}

fn is_latin(c: char) -> bool {
    c.is_ascii_alphabetic() || ('\u{00C0}'..='\u{024F}').contains(&c)
}

/// Lowercases Latin-script letters; Bengali and everything else is untouched.
pub fn lowercase_latin(token: &str) -> String {
    let mut out = String::with_capacity(token.len());
    for c in token.chars() {
        if is_latin(c) && c.is_uppercase() {
            out.extend(c.to_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

/// Removes at most one suffix: the longest rule that leaves at least its
/// minimum stem length and whose resulting stem no rule would strip further.
/// The second condition makes `stem(stem(t)) == stem(t)` for every table.
pub fn stem<'a>(token: &'a str, table: &SuffixTable) -> &'a str {
    table
        .rules
        .iter()
        .filter_map(|rule| rule.strip(token))
        .find(|candidate| !table.applies_to(candidate))
        .unwrap_or(token)
}

pub fn remove_stopwords<S: AsRef<str>>(tokens: Vec<S>, stopwords: &BTreeSet<String>) -> Vec<S> {
    tokens.into_iter().filter(|t| !stopwords.contains(t.as_ref())).collect()
}

fn normalize_token(raw: &str, config: &PreprocessConfig) -> Option<String> {
    let mut token = if config.enable_symbol_strip {
        strip_symbols(raw, &config.strip_symbols)
    } else {
        raw.to_string()
    };
    if token.is_empty() {
        return None;
    }
    if config.lowercase_latin {
        token = lowercase_latin(&token);
    }
    if config.enable_stemming {
        let stemmed = stem(&token, &config.suffix_table);
        if stemmed.len() != token.len() {
            token.truncate(stemmed.len());
        }
    }
    if config.enable_stopwords && config.stopwords.contains(&token) {
        return None;
    }
    Some(token)
}

/// Runs the full pipeline on raw text.
pub fn preprocess_text(
    id: impl Into<String>,
    label: Option<String>,
    text: &str,
    config: &PreprocessConfig,
) -> TokenizedDocument {
    let sentences = split_sentences(text)
        .into_iter()
        .map(|sentence| {
            tokenize(sentence)
                .into_iter()
                .filter_map(|raw| normalize_token(raw, config))
                .collect::<Vec<_>>()
        })
        .collect();
    TokenizedDocument::new(id, label, sentences)
}

pub fn preprocess_document(doc: &LabeledDocument, config: &PreprocessConfig) -> TokenizedDocument {
    preprocess_text(doc.id.clone(), Some(doc.label.clone()), &doc.text, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stoplist(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn sentence_splitting() {
        assert_eq!(split_sentences("ক খ। গ ঘ?"), ["ক খ", "গ ঘ"]);
        assert_eq!(split_sentences("ক খ গ"), ["ক খ গ"]);
        assert!(split_sentences("।।").is_empty());
        assert_eq!(split_sentences("ক!খ\nগ"), ["ক", "খ", "গ"]);
    }

    #[test]
    fn tokenization() {
        assert_eq!(tokenize("আমি ভাত খাই"), ["আমি", "ভাত", "খাই"]);
        assert_eq!(tokenize("  ক   খ "), ["ক", "খ"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("ক\u{00A0}খ\tগ"), ["ক", "খ", "গ"]);
    }

    #[test]
    fn symbol_stripping() {
        let set = default_strip_symbols();
        assert_eq!(strip_symbols("ঢাকা,", &set), "ঢাকা");
        assert_eq!(strip_symbols("১২৩", &set), "");
        assert_eq!(strip_symbols("ক", &set), "ক");
        assert_eq!(strip_symbols("“খবর”", &set), "খবর");
        assert_eq!(strip_symbols("(2024)", &set), "");
    }

    #[test]
    fn stemming_with_shipped_table() {
        let table = SuffixTable::default();
        assert_eq!(stem("ছেলেরা", &table), "ছেলে");
        assert_eq!(stem("রা", &table), "রা");
        assert_eq!(stem("ভাত", &table), "ভাত");
        assert_eq!(stem("ছেলেদের", &table), "ছেলে");
        assert_eq!(stem("বইগুলো", &table), "বই");
        assert_eq!(stem("বাজারে", &table), "বাজার");
    }

    #[test]
    fn longest_applicable_rule_wins() {
        let table = SuffixTable::new(vec![
            SuffixRule {
                suffix: "b".into(),
                min_stem_chars: 1,
            },
            SuffixRule {
                suffix: "ab".into(),
                min_stem_chars: 1,
            },
        ])
        .unwrap();
        assert_eq!(table.rules()[0].suffix, "ab");
        assert_eq!(stem("xab", &table), "x");
        // "ab" would leave nothing, so the shorter rule applies
        assert_eq!(stem("ab", &table), "a");
    }

    #[test]
    fn stem_is_never_restemmable() {
        let table = SuffixTable::new(vec![
            SuffixRule {
                suffix: "s".into(),
                min_stem_chars: 1,
            },
            SuffixRule {
                suffix: "es".into(),
                min_stem_chars: 1,
            },
        ])
        .unwrap();
        // "boxes" - "es" = "box" is stable; "classes" - "es" = "class" ends in "s"
        assert_eq!(stem("boxes", &table), "box");
        assert_eq!(stem("classes", &table), "classe");
        assert_eq!(stem("classe", &table), "classe");
    }

    #[test]
    fn suffix_table_parsing() {
        let t = SuffixTable::parse("# c\nরা\t2\n\nগুলো\t2\n").unwrap();
        assert_eq!(t.rules()[0].suffix, "গুলো");
        assert!(matches!(
            SuffixTable::parse("রা 2\n"),
            Err(TextprepError::InvalidSuffixLine { line: 1, .. })
        ));
        assert!(matches!(
            SuffixTable::parse("রা\t2\nরা\t3\n"),
            Err(TextprepError::DuplicateSuffix(_))
        ));
        assert!(SuffixTable::parse("রা\t0\n").is_err());
    }

    #[test]
    fn shipped_table_is_sorted_by_descending_length() {
        let lens: Vec<usize> = SuffixTable::default()
            .rules()
            .iter()
            .map(|r| r.suffix.chars().count())
            .collect();
        assert!(lens.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn shipped_stoplist_contains_stems_of_its_entries() {
        let cfg = PreprocessConfig::default();
        for word in &cfg.stopwords {
            let s = stem(word, &cfg.suffix_table);
            assert!(cfg.stopwords.contains(s), "stem {s:?} of stopword {word:?} missing");
        }
    }

    #[test]
    fn stopword_removal() {
        let stops = stoplist(&["আমি"]);
        assert_eq!(remove_stopwords(vec!["আমি", "ভাত"], &stops), ["ভাত"]);
        assert!(remove_stopwords(Vec::<&str>::new(), &stops).is_empty());
        assert_eq!(remove_stopwords(vec!["ক", "খ"], &stops), ["ক", "খ"]);
    }

    #[test]
    fn full_pipeline_trace() {
        let cfg = PreprocessConfig {
            stopwords: stoplist(&["আমি"]),
            ..PreprocessConfig::default()
        };
        let doc = LabeledDocument::new("d", "আমি ভাত খাই। ১২৩", "Food").unwrap();
        let out = preprocess_document(&doc, &cfg);
        assert_eq!(out.sentences, vec![vec!["ভাত".to_string(), "খাই".to_string()]]);
        assert_eq!(out.token_count(), 2);
        assert_eq!(out.label.as_deref(), Some("Food"));
    }

    #[test]
    fn symbols_only_document_is_empty() {
        let doc = LabeledDocument::new("d", "১২৩, ৪৫! (67) ...", "X").unwrap();
        let out = preprocess_document(&doc, &PreprocessConfig::default());
        assert_eq!(out.token_count(), 0);
        assert!(out.sentences.is_empty());
    }

    #[test]
    fn passthrough_equals_whitespace_tokenization() {
        let text = "আমি ঢাকা, ছেলেরা Dhaka ১২৩";
        let out = preprocess_text("d", None, text, &PreprocessConfig::passthrough());
        let raw: Vec<String> = tokenize(text).into_iter().map(String::from).collect();
        assert_eq!(out.sentences, vec![raw]);
    }

    #[test]
    fn latin_tokens_are_lowercased() {
        let out = preprocess_text("d", None, "BBC News ঢাকা", &PreprocessConfig::default());
        let tokens: Vec<&str> = out.tokens().collect();
        assert_eq!(tokens, ["bbc", "news", "ঢাকা"]);
    }

    #[test]
    fn digest_tracks_config_changes() {
        let a = PreprocessConfig::default();
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        b.enable_stemming = false;
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn config_serde_round_trip() {
        let cfg = PreprocessConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: PreprocessConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    fn arb_text() -> impl Strategy<Value = String> {
        let pieces = prop::sample::select(vec![
            "ছেলেরা",
            "ছেলে",
            "বইগুলো",
            "আমি",
            "আমরা",
            "তাদের",
            "ঢাকা,",
            "১২৩",
            "খেলা!",
            "Dhaka",
            "NEWS.",
            "বাজারে",
            "মানুষকে",
            "দের",
            "রা",
            "।",
            "?",
            "\n",
            " ",
            "“",
            "(",
            "ক",
            "গুলো",
            "এবং",
            "কিন্তু",
            "ের",
            "ে",
        ]);
        prop::collection::vec(prop_oneof![pieces.prop_map(String::from), "[\\PC]{0,4}"], 0..30)
            .prop_map(|parts| parts.concat())
    }

    proptest! {
        #[test]
        fn preprocessing_is_idempotent(text in arb_text()) {
            let cfg = PreprocessConfig::default();
            let once = preprocess_text("d", None, &text, &cfg);
            let twice = preprocess_text("d", None, &once.to_text(), &cfg);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn no_token_contains_strip_chars_or_whitespace(text in arb_text()) {
            let cfg = PreprocessConfig::default();
            let out = preprocess_text("d", None, &text, &cfg);
            for token in out.tokens() {
                prop_assert!(!token.is_empty());
                prop_assert!(!token.chars().any(|c| c.is_whitespace() || cfg.strip_symbols.contains(&c)));
            }
            prop_assert_eq!(out.token_count(), out.sentences.iter().map(Vec::len).sum::<usize>());
        }

        #[test]
        fn stemming_is_idempotent(token in "[\\PC]{0,8}") {
            let table = SuffixTable::default();
            let once = stem(&token, &table);
            prop_assert_eq!(stem(once, &table), once);
        }

        #[test]
        fn preprocessing_is_deterministic(text in arb_text()) {
            let cfg = PreprocessConfig::default();
            let a = serde_json::to_vec(&preprocess_text("d", None, &text, &cfg)).unwrap();
            let b = serde_json::to_vec(&preprocess_text("d", None, &text, &cfg)).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
