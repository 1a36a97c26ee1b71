//! Feature spaces and document vectors.
//!
//! Two pipelines share the same [`Vocabulary`] and [`SparseVector`] types:
//!
//! * TF-IDF: every training unigram is a feature; a document is weighted by
//!   `count * idf` with `idf = ln((N + 1) / (DF + 1)) + 1` and scaled to unit
//!   Euclidean norm.
//! * Chi-square: each training document keeps its top-scoring terms under a
//!   sentence co-occurrence chi-square statistic; the feature space is the
//!   union of kept terms and documents are weighted by raw counts.
//!
//! ## Chi-square scoring
//!
//! Within one document, for a term `w` and every other distinct term `g`:
//!
//! * `freq(w, g)` is the number of sentences containing both `w` and `g`;
//! * `n_w` is the total token count of the sentences containing `w`;
//! * `p_g` is `count(g) / token_count(doc)`.
//!
//! `score(w) = Σ_g (freq(w, g) − p_g·n_w)² / (p_g·n_w)`. The expected count
//! `p_g·n_w` reads `n_w` as the size of `w`'s co-occurrence window. A literal
//! alternative would take `n_w` as the count of `w` alone; that reading is not
//! implemented.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::TokenizedDocument;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("no documents given")]
    NoDocuments,
    #[error("idf undefined for df={df}, n_docs={n_docs} (need 1 <= df <= n_docs)")]
    Domain { n_docs: usize, df: usize },
    #[error("top percent must be in (0, 100], got {0}")]
    InvalidTopPercent(f64),
    #[error("vocabulary line {line}: {reason}")]
    VocabularyFormat { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    Tfidf,
    Counts,
}

/// Feature selection / weighting pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    Tfidf,
    Chi2,
}

impl Selector {
    pub const ALL: [Selector; 2] = [Selector::Chi2, Selector::Tfidf];

    /// Chi-square selection weights by raw counts; TF-IDF by normalized TF-IDF.
    pub fn feature_mode(self) -> FeatureMode {
        match self {
            Selector::Tfidf => FeatureMode::Tfidf,
            Selector::Chi2 => FeatureMode::Counts,
        }
    }

    /// Name used in report rows, e.g. `CHI-SQUARE` in `CHI-SQUARE+SVM`.
    pub fn display_name(self) -> &'static str {
        match self {
            Selector::Tfidf => "TFIDF",
            Selector::Chi2 => "CHI-SQUARE",
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selector::Tfidf => "tfidf",
            Selector::Chi2 => "chi2",
        })
    }
}

impl FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tfidf" => Ok(Selector::Tfidf),
            "chi2" => Ok(Selector::Chi2),
            other => Err(format!("unknown selector {other:?} (expected tfidf or chi2)")),
        }
    }
}

/// Term → dense index map with document frequencies.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    n_docs: usize,
    index: HashMap<String, usize>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.doc_freq == other.doc_freq && self.n_docs == other.n_docs
    }
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    n_docs: usize,
    /// `(term, index, df)` triples in index order.
    terms: Vec<(String, usize, usize)>,
}

impl TryFrom<VocabularyRepr> for Vocabulary {
    type Error = FeatureError;

    fn try_from(r: VocabularyRepr) -> Result<Self, Self::Error> {
        Vocabulary::from_entries(r.terms, r.n_docs)
    }
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        VocabularyRepr {
            n_docs: v.n_docs,
            terms: v
                .terms
                .into_iter()
                .zip(v.doc_freq)
                .enumerate()
                .map(|(i, (t, df))| (t, i, df))
                .collect(),
        }
    }
}

impl Vocabulary {
    /// Builds from `(term, df)` pairs; indices follow lexicographic term order.
    pub fn from_doc_freq(doc_freq: BTreeMap<String, usize>, n_docs: usize) -> Result<Self, FeatureError> {
        let entries = doc_freq
            .into_iter()
            .enumerate()
            .map(|(i, (t, df))| (t, i, df))
            .collect();
        Vocabulary::from_entries(entries, n_docs)
    }

    /// Builds from `(term, index, df)` triples, checking that indices are
    /// exactly `0..len`, terms are distinct and `1 <= df <= n_docs`.
    pub fn from_entries(mut entries: Vec<(String, usize, usize)>, n_docs: usize) -> Result<Self, FeatureError> {
        if entries.is_empty() {
            return Err(FeatureError::EmptyVocabulary);
        }
        let bad = |reason: String| FeatureError::VocabularyFormat { line: 0, reason };
        entries.sort_by_key(|e| e.1);
        let mut terms = Vec::with_capacity(entries.len());
        let mut doc_freq = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for (expected, (term, idx, df)) in entries.into_iter().enumerate() {
            if idx != expected {
                return Err(bad(format!("indices are not dense: expected {expected}, found {idx}")));
            }
            if df < 1 || df > n_docs {
                return Err(bad(format!("df {df} of {term:?} outside 1..={n_docs}")));
            }
            if index.insert(term.clone(), idx).is_some() {
                return Err(bad(format!("duplicate term {term:?}")));
            }
            terms.push(term);
            doc_freq.push(df);
        }
        Ok(Vocabulary {
            terms,
            doc_freq,
            n_docs,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get(index).map(String::as_str)
    }

    pub fn doc_freq(&self, index: usize) -> Option<usize> {
        self.doc_freq.get(index).copied()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// IDF of the feature at `index`.
    pub fn idf(&self, index: usize) -> f64 {
        idf_unchecked(self.n_docs, self.doc_freq[index])
    }

    /// Text export: `#ndocs=<N>` then `<term>\t<index>\t<df>` per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("#ndocs={}\n", self.n_docs);
        for (i, (term, df)) in self.terms.iter().zip(&self.doc_freq).enumerate() {
            out.push_str(&format!("{term}\t{i}\t{df}\n"));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, FeatureError> {
        let mut lines = text.lines().enumerate();
        let header = lines.next().map(|(_, l)| l).unwrap_or_default();
        let n_docs = header
            .strip_prefix("#ndocs=")
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(|| FeatureError::VocabularyFormat {
                line: 1,
                reason: "expected header #ndocs=<N>".into(),
            })?;
        let mut entries = Vec::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| FeatureError::VocabularyFormat {
                line: i + 1,
                reason: reason.into(),
            };
            let mut parts = line.split('\t');
            let (Some(term), Some(idx), Some(df), None) = (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad("expected <term>\\t<index>\\t<df>"));
            };
            let idx = idx.parse().map_err(|_| bad("index is not an integer"))?;
            let df = df.parse().map_err(|_| bad("df is not an integer"))?;
            entries.push((term.to_string(), idx, df));
        }
        Vocabulary::from_entries(entries, n_docs)
    }
}

/// Document frequency of every token over `docs`.
fn document_frequencies(docs: &[TokenizedDocument]) -> BTreeMap<&str, usize> {
    let mut df = BTreeMap::new();
    for doc in docs {
        let distinct: BTreeSet<&str> = doc.tokens().collect();
        for t in distinct {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    df
}

pub fn build_vocabulary(docs: &[TokenizedDocument], min_df: usize) -> Result<Vocabulary, FeatureError> {
    if docs.is_empty() {
        return Err(FeatureError::NoDocuments);
    }
    let df = document_frequencies(docs)
        .into_iter()
        .filter(|&(_, n)| n >= min_df)
        .map(|(t, n)| (t.to_string(), n))
        .collect();
    Vocabulary::from_doc_freq(df, docs.len())
}

/// Smoothed inverse document frequency `ln((N + 1) / (DF + 1)) + 1`.
pub fn idf(n_docs: usize, df: usize) -> Result<f64, FeatureError> {
    if df < 1 || df > n_docs {
        return Err(FeatureError::Domain { n_docs, df });
    }
    Ok(idf_unchecked(n_docs, df))
}

fn idf_unchecked(n_docs: usize, df: usize) -> f64 {
    // (N+1)/(DF+1) = 1 + (N-DF)/(DF+1); ln_1p keeps DF = N at exactly 1.0
    let excess = (n_docs - df) as f64 / (df + 1) as f64;
    excess.ln_1p() + 1.0
}

/// Index/weight pairs, strictly ascending by index, with no zero weights.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self, String> {
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(format!("indices not strictly ascending at {}", w[1].0));
            }
        }
        if let Some(&(i, _)) = entries.iter().find(|e| e.1 == 0.0 || !e.1.is_finite()) {
            return Err(format!("zero or non-finite weight at index {i}"));
        }
        Ok(SparseVector { entries })
    }

    /// Drops zero weights from an index-sorted map.
    fn from_sorted_map(map: BTreeMap<usize, f64>) -> Self {
        SparseVector {
            entries: map.into_iter().filter(|e| e.1 != 0.0).collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt()
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum()
    }

    /// Dot product with a dense vector. Indices must be in range.
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| v * dense[i]).sum()
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        SparseVector {
            entries: self
                .entries
                .iter()
                .map(|&(i, v)| (i, v * factor))
                .filter(|e| e.1 != 0.0)
                .collect(),
        }
    }

    /// Debug export line: `<doc_id>\t<index>:<weight> ...`.
    pub fn to_debug_line(&self, doc_id: &str) -> String {
        let body: Vec<String> = self.entries.iter().map(|(i, w)| format!("{i}:{w}")).collect();
        format!("{doc_id}\t{}", body.join(" "))
    }
}

fn term_counts(doc: &TokenizedDocument, vocab: &Vocabulary) -> BTreeMap<usize, f64> {
    let mut counts = BTreeMap::new();
    for idx in doc.tokens().filter_map(|t| vocab.index_of(t)) {
        *counts.entry(idx).or_insert(0.0) += 1.0;
    }
    counts
}

/// Raw in-vocabulary term counts; out-of-vocabulary tokens are ignored.
pub fn count_vector(doc: &TokenizedDocument, vocab: &Vocabulary) -> SparseVector {
    SparseVector::from_sorted_map(term_counts(doc, vocab))
}

/// `count * idf`, scaled to unit Euclidean norm.
pub fn tfidf_vector(doc: &TokenizedDocument, vocab: &Vocabulary) -> SparseVector {
    let mut weights = term_counts(doc, vocab);
    for (idx, w) in weights.iter_mut() {
        *w *= vocab.idf(*idx);
    }
    let norm = weights.values().map(|w| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        for w in weights.values_mut() {
            *w /= norm;
        }
    }
    SparseVector::from_sorted_map(weights)
}

pub fn vectorize(doc: &TokenizedDocument, vocab: &Vocabulary, mode: FeatureMode) -> SparseVector {
    match mode {
        FeatureMode::Tfidf => tfidf_vector(doc, vocab),
        FeatureMode::Counts => count_vector(doc, vocab),
    }
}

pub fn vectorize_corpus(docs: &[TokenizedDocument], vocab: &Vocabulary, mode: FeatureMode) -> Vec<SparseVector> {
    docs.par_iter().map(|d| vectorize(d, vocab, mode)).collect()
}

/// Chi-square score of every term of one document.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ChiScoreTable {
    pub scores: BTreeMap<String, f64>,
}

impl ChiScoreTable {
    /// Terms ordered by score descending, ties by term ascending.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut ranked: Vec<(&str, f64)> = self.scores.iter().map(|(t, &s)| (t.as_str(), s)).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked
    }
}

/// Knobs for chi-square scoring and selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiOptions {
    /// Percentage of each document's distinct terms to keep, in (0, 100].
    pub top_percent: f64,
    /// Restrict the co-occurrence set to the k most frequent terms of the
    /// document (ties by term). `None` uses every distinct term.
    pub cooccur_top_k: Option<usize>,
}

impl Default for ChiOptions {
    fn default() -> Self {
        ChiOptions {
            top_percent: 30.0,
            cooccur_top_k: None,
        }
    }
}

pub fn chi_score_document(doc: &TokenizedDocument) -> ChiScoreTable {
    chi_score_document_with(doc, None)
}

pub fn chi_score_document_with(doc: &TokenizedDocument, cooccur_top_k: Option<usize>) -> ChiScoreTable {
    let total = doc.token_count();
    if total == 0 {
        return ChiScoreTable::default();
    }

    // local ids in lexicographic term order
    let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
    for t in doc.tokens() {
        let next = ids.len();
        ids.entry(t).or_insert(next);
    }
    let terms: Vec<&str> = {
        let mut v = vec![""; ids.len()];
        for (t, &i) in &ids {
            v[i] = t;
        }
        v
    };
    let d = terms.len();
    let mut count = vec![0usize; d];
    for t in doc.tokens() {
        count[ids[t]] += 1;
    }

    let in_g: Vec<bool> = match cooccur_top_k {
        None => vec![true; d],
        Some(k) => {
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&a, &b| count[b].cmp(&count[a]).then_with(|| terms[a].cmp(terms[b])));
            let mut mask = vec![false; d];
            for &i in order.iter().take(k) {
                mask[i] = true;
            }
            mask
        }
    };
    let g_count: usize = (0..d).filter(|&g| in_g[g]).map(|g| count[g]).sum();

    // distinct ids per sentence, plus sentence length in tokens
    let sentences: Vec<(Vec<usize>, usize)> = doc
        .sentences
        .iter()
        .map(|s| {
            let set: BTreeSet<usize> = s.iter().map(|t| ids[t.as_str()]).collect();
            (set.into_iter().collect(), s.len())
        })
        .collect();
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); d];
    for (si, (members, _)) in sentences.iter().enumerate() {
        for &w in members {
            containing[w].push(si);
        }
    }

    let total = total as f64;
    let mut freq = vec![0u32; d];
    let mut touched = Vec::new();
    let mut scores = BTreeMap::new();
    for w in 0..d {
        let n_w: usize = containing[w].iter().map(|&si| sentences[si].1).sum();
        let n_w = n_w as f64;
        for &si in &containing[w] {
            for &g in &sentences[si].0 {
                if g != w && in_g[g] {
                    if freq[g] == 0 {
                        touched.push(g);
                    }
                    freq[g] += 1;
                }
            }
        }
        // Terms never co-occurring with w contribute their expectation;
        // co-occurring ones swap that for (f - e)^2 / e.
        let g_mass = if in_g[w] { g_count - count[w] } else { g_count };
        let mut score = n_w * g_mass as f64 / total;
        for &g in &touched {
            let expected = n_w * count[g] as f64 / total;
            let f = f64::from(freq[g]);
            score += (f - expected) * (f - expected) / expected - expected;
            freq[g] = 0;
        }
        touched.clear();
        scores.insert(terms[w].to_string(), score.max(0.0));
    }
    ChiScoreTable { scores }
}

/// Number of terms kept out of `distinct` at `top_percent`.
pub fn kept_count(distinct: usize, top_percent: f64) -> usize {
    if distinct == 0 {
        return 0;
    }
    // guard against 30.0 * 10 / 100 landing a hair above 3
    let raw = top_percent * distinct as f64 / 100.0;
    ((raw - 1e-9).ceil() as usize).clamp(1, distinct)
}

/// Per-document chi-square selection; the vocabulary is the union of the
/// terms each document keeps, with DF and N over all of `docs`.
pub fn select_chi_features(docs: &[TokenizedDocument], options: &ChiOptions) -> Result<Vocabulary, FeatureError> {
    if docs.is_empty() {
        return Err(FeatureError::NoDocuments);
    }
    let top = options.top_percent;
    if !(top > 0.0 && top <= 100.0) {
        return Err(FeatureError::InvalidTopPercent(top));
    }
    let kept: Vec<Vec<String>> = docs
        .par_iter()
        .map(|doc| {
            let table = chi_score_document_with(doc, options.cooccur_top_k);
            let k = kept_count(table.scores.len(), top);
            table.ranked().into_iter().take(k).map(|(t, _)| t.to_string()).collect()
        })
        .collect();
    let selected: BTreeSet<&str> = kept.iter().flatten().map(String::as_str).collect();
    if selected.is_empty() {
        return Err(FeatureError::EmptyVocabulary);
    }
    let df = document_frequencies(docs)
        .into_iter()
        .filter(|(t, _)| selected.contains(t))
        .map(|(t, n)| (t.to_string(), n))
        .collect();
    Vocabulary::from_doc_freq(df, docs.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn doc(sentences: &[&[&str]]) -> TokenizedDocument {
        TokenizedDocument::new(
            "d",
            None,
            sentences
                .iter()
                .map(|s| s.iter().map(|t| t.to_string()).collect())
                .collect(),
        )
    }

    /// Direct evaluation of the scoring formula over explicit G.
    fn chi_oracle(doc: &TokenizedDocument) -> BTreeMap<String, f64> {
        let tokens: Vec<&str> = doc.tokens().collect();
        let distinct: BTreeSet<&str> = tokens.iter().copied().collect();
        let total = tokens.len() as f64;
        let mut out = BTreeMap::new();
        for &w in &distinct {
            let n_w: usize = doc
                .sentences
                .iter()
                .filter(|s| s.iter().any(|t| t == w))
                .map(Vec::len)
                .sum();
            let mut score = 0.0;
            for &g in distinct.iter().filter(|&&g| g != w) {
                let p_g = tokens.iter().filter(|&&t| t == g).count() as f64 / total;
                let freq = doc
                    .sentences
                    .iter()
                    .filter(|s| s.iter().any(|t| t == w) && s.iter().any(|t| t == g))
                    .count() as f64;
                let e = p_g * n_w as f64;
                if e > 0.0 {
                    score += (freq - e).powi(2) / e;
                }
            }
            out.insert(w.to_string(), score);
        }
        out
    }

    #[test]
    fn vocabulary_basics() {
        let docs = [doc(&[&["ক", "খ"]]), doc(&[&["খ"]])];
        let v = build_vocabulary(&docs, 1).unwrap();
        assert_eq!(v.terms(), ["ক", "খ"]);
        assert_eq!(v.doc_freq(0), Some(1));
        assert_eq!(v.doc_freq(1), Some(2));
        assert_eq!(v.n_docs(), 2);

        let v = build_vocabulary(&docs, 2).unwrap();
        assert_eq!(v.terms(), ["খ"]);
        assert_eq!(v.index_of("খ"), Some(0));

        assert_eq!(build_vocabulary(&docs, 3), Err(FeatureError::EmptyVocabulary));
        assert_eq!(build_vocabulary(&[], 1), Err(FeatureError::NoDocuments));
    }

    #[test]
    fn vocabulary_text_round_trip() {
        let docs = [doc(&[&["ক", "খ"], &["গ"]]), doc(&[&["খ"]])];
        let v = build_vocabulary(&docs, 1).unwrap();
        let text = v.to_text();
        assert!(text.starts_with("#ndocs=2\n"));
        assert!(text.contains("খ\t1\t2\n"));
        assert_eq!(Vocabulary::parse_text(&text).unwrap(), v);
        assert!(Vocabulary::parse_text("ক\t0\t1\n").is_err());
        assert!(Vocabulary::parse_text("#ndocs=1\nক\t1\t1\n").is_err());
        assert!(Vocabulary::parse_text("#ndocs=1\nক\t0\t2\n").is_err());
    }

    #[test]
    fn idf_values() {
        // values from an independent 30-digit evaluation
        assert_abs_diff_eq!(idf(15, 10).unwrap(), 1.374_693_449_441_410_7, epsilon = 1e-15);
        assert_abs_diff_eq!(idf(3, 1).unwrap(), 1.693_147_180_559_945_3, epsilon = 1e-15);
        assert_eq!(idf(7, 7).unwrap(), 1.0);
        assert_eq!(idf(5, 0), Err(FeatureError::Domain { n_docs: 5, df: 0 }));
        assert_eq!(idf(5, 6), Err(FeatureError::Domain { n_docs: 5, df: 6 }));
    }

    #[test]
    fn count_vectors() {
        let v = build_vocabulary(&[doc(&[&["ক", "খ"]])], 1).unwrap();
        let x = count_vector(&doc(&[&["ক", "ক", "খ"]]), &v);
        assert_eq!(x.entries(), [(0, 2.0), (1, 1.0)]);
        assert!(count_vector(&doc(&[&["ঘ"]]), &v).is_empty());
        assert!(count_vector(&doc(&[]), &v).is_empty());
    }

    #[test]
    fn tfidf_worked_example() {
        let v = build_vocabulary(&[doc(&[&["ক", "খ"]]), doc(&[&["খ"]])], 1).unwrap();
        let x = tfidf_vector(&doc(&[&["ক", "ক", "খ"]]), &v);
        // raw [2(ln(3/2)+1), 1]; norm sqrt(2.810930^2 + 1)
        let raw0 = 2.0 * ((1.5f64).ln() + 1.0);
        let norm = (raw0 * raw0 + 1.0).sqrt();
        assert_abs_diff_eq!(x.entries()[0].1, raw0 / norm, epsilon = 1e-12);
        assert_abs_diff_eq!(x.entries()[0].1, 0.942_155_624_663_236, epsilon = 1e-12);
        assert_abs_diff_eq!(x.entries()[1].1, 0.335_175_743_327_926, epsilon = 1e-12);

        let single = tfidf_vector(&doc(&[&["খ", "ঘ"]]), &v);
        assert_eq!(single.entries(), [(1, 1.0)]);
        assert!(tfidf_vector(&doc(&[]), &v).is_empty());
    }

    #[test]
    fn chi_examples() {
        let d = doc(&[&["ক", "খ"], &["ক", "গ"]]);
        let t = chi_score_document(&d);
        assert_eq!(t.scores["ক"], 0.0);
        assert_abs_diff_eq!(t.scores["খ"], 0.5, epsilon = 1e-12);
        assert_eq!(chi_oracle(&d), t.scores);

        let single = chi_score_document(&doc(&[&["ক"]]));
        assert_eq!(single.scores["ক"], 0.0);
        assert!(chi_score_document(&doc(&[])).scores.is_empty());
    }

    #[test]
    fn chi_cooccur_top_k_restricts_g() {
        // with G = {ক} only, খ's score is the ক term alone
        let d = doc(&[&["ক", "খ"], &["ক", "গ"], &["ক"]]);
        let all = chi_score_document(&d);
        let top1 = chi_score_document_with(&d, Some(1));
        // ক: count 3 of 5, n_খ = 2, expected 1.2, freq 1 → 0.04/1.2
        assert_abs_diff_eq!(top1.scores["খ"], 0.04 / 1.2, epsilon = 1e-12);
        assert!(top1.scores["খ"] <= all.scores["খ"]);
        // ক itself is the only member of G, so its score has no terms
        assert_eq!(top1.scores["ক"], 0.0);
    }

    #[test]
    fn kept_count_arithmetic() {
        assert_eq!(kept_count(10, 30.0), 3);
        assert_eq!(kept_count(7, 30.0), 3);
        assert_eq!(kept_count(1, 30.0), 1);
        assert_eq!(kept_count(9, 100.0), 9);
        assert_eq!(kept_count(0, 30.0), 0);
    }

    #[test]
    fn selection_keeps_top_terms_per_document() {
        let tokens: Vec<String> = (0..10).map(|i| format!("t{i}")).collect();
        // t0 in every sentence so it co-occurs with everything
        let sentences: Vec<Vec<String>> = tokens[1..].iter().map(|t| vec!["t0".to_string(), t.clone()]).collect();
        let d = TokenizedDocument::new("d", None, sentences);
        let opts = ChiOptions {
            top_percent: 30.0,
            cooccur_top_k: None,
        };
        let v = select_chi_features(std::slice::from_ref(&d), &opts).unwrap();
        assert_eq!(v.len(), 3);

        let a = doc(&[&["a1", "a2"], &["a3"]]);
        let b = doc(&[&["b1", "b2"]]);
        let all = ChiOptions {
            top_percent: 100.0,
            cooccur_top_k: None,
        };
        let v = select_chi_features(&[a, b], &all).unwrap();
        assert_eq!(v.len(), 5);
    }

    #[test]
    fn selection_rejects_bad_input() {
        let d = [doc(&[&["ক"]])];
        for bad in [0.0, -1.0, 100.5, f64::NAN] {
            let opts = ChiOptions {
                top_percent: bad,
                cooccur_top_k: None,
            };
            assert!(matches!(
                select_chi_features(&d, &opts),
                Err(FeatureError::InvalidTopPercent(_))
            ));
        }
        let empty = [doc(&[]), doc(&[])];
        assert_eq!(
            select_chi_features(&empty, &ChiOptions::default()),
            Err(FeatureError::EmptyVocabulary)
        );
    }

    #[test]
    fn vectorize_corpus_modes() {
        let docs = [doc(&[&["ক", "ক", "খ"]]), doc(&[&["খ"]]), doc(&[&["গ", "খ"]])];
        let v = build_vocabulary(&docs, 1).unwrap();
        let tfidf = vectorize_corpus(&docs, &v, FeatureMode::Tfidf);
        assert_eq!(tfidf.len(), 3);
        assert_eq!(tfidf[1], tfidf_vector(&docs[1], &v));
        for x in &tfidf {
            assert_abs_diff_eq!(x.norm(), 1.0, epsilon = 1e-9);
        }
        let counts = vectorize_corpus(&docs, &v, FeatureMode::Counts);
        assert!(counts
            .iter()
            .flat_map(|x| x.iter())
            .all(|(_, w)| w > 0.0 && w.fract() == 0.0));
    }

    #[test]
    fn sparse_vector_validation() {
        assert!(SparseVector::new(vec![(0, 1.0), (2, 0.5)]).is_ok());
        assert!(SparseVector::new(vec![(2, 1.0), (1, 0.5)]).is_err());
        assert!(SparseVector::new(vec![(1, 1.0), (1, 0.5)]).is_err());
        assert!(SparseVector::new(vec![(1, 0.0)]).is_err());
        let x = SparseVector::new(vec![(0, 1.5), (3, 2.0)]).unwrap();
        assert_eq!(x.to_debug_line("doc1"), "doc1\t0:1.5 3:2");
        assert_eq!(x.dot(&[2.0, 0.0, 0.0, 1.0]), 5.0);
    }

    fn arb_doc() -> impl Strategy<Value = TokenizedDocument> {
        let term = prop::sample::select(vec!["a", "b", "c", "d", "e", "f"]);
        prop::collection::vec(prop::collection::vec(term, 0..6), 0..6).prop_map(|ss| {
            TokenizedDocument::new(
                "d",
                None,
                ss.into_iter()
                    .map(|s| s.into_iter().map(String::from).collect())
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn idf_strictly_decreasing_in_df(n in 2usize..1_000_000, a in 1usize..1_000_000, b in 1usize..1_000_000) {
            let (lo, hi) = (a.min(b) % n + 1, a.max(b) % n + 1);
            prop_assume!(lo < hi);
            prop_assert!(idf(n, lo).unwrap() > idf(n, hi).unwrap());
        }

        #[test]
        fn idf_of_ubiquitous_term_is_one(n in 1usize..10_000_000) {
            prop_assert_eq!(idf(n, n).unwrap(), 1.0);
        }

        #[test]
        fn chi_matches_oracle(d in arb_doc()) {
            let fast = chi_score_document(&d);
            let slow = chi_oracle(&d);
            prop_assert_eq!(fast.scores.len(), slow.len());
            for (t, s) in &slow {
                prop_assert!((fast.scores[t] - s).abs() <= 1e-9, "{t}: {} vs {s}", fast.scores[t]);
            }
        }

        #[test]
        fn chi_invariant_under_sentence_order(d in arb_doc(), seed in any::<u64>()) {
            let mut sentences = d.sentences.clone();
            let len = sentences.len();
            if len > 1 {
                sentences.rotate_left((seed as usize) % len);
            }
            let shuffled = TokenizedDocument::new("d", None, sentences);
            let a = chi_score_document(&d);
            let b = chi_score_document(&shuffled);
            for (t, s) in &a.scores {
                prop_assert!((b.scores[t] - s).abs() <= 1e-9);
            }
        }

        #[test]
        fn full_selection_equals_vocabulary(docs in prop::collection::vec(arb_doc(), 1..6)) {
            prop_assume!(docs.iter().any(|d| d.token_count() > 0));
            let all = ChiOptions { top_percent: 100.0, cooccur_top_k: None };
            prop_assert_eq!(select_chi_features(&docs, &all).unwrap(), build_vocabulary(&docs, 1).unwrap());
        }

        #[test]
        fn tfidf_has_unit_norm(docs in prop::collection::vec(arb_doc(), 1..6), probe in arb_doc()) {
            prop_assume!(docs.iter().any(|d| d.token_count() > 0));
            let v = build_vocabulary(&docs, 1).unwrap();
            let x = tfidf_vector(&probe, &v);
            if !x.is_empty() {
                prop_assert!((x.norm() - 1.0).abs() <= 1e-9);
            }
        }

        #[test]
        fn vocabulary_indices_are_deterministic(docs in prop::collection::vec(arb_doc(), 1..6)) {
            prop_assume!(docs.iter().any(|d| d.token_count() > 0));
            let a = build_vocabulary(&docs, 1).unwrap();
            let mut rev = docs.clone();
            rev.reverse();
            prop_assert_eq!(a, build_vocabulary(&rev, 1).unwrap());
        }
    }
}
