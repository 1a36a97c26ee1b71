//! Seeded toy corpora with one disjoint keyword pool per category.
//!
//! Words are built from consonant/vowel-sign syllables ending in a bare
//! consonant and are kept only if the default preprocessing leaves them
//! unchanged, so every generated token reaches the feature stage intact.
//! The word pools do not depend on the seed; document contents do.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{LabeledCorpus, LabeledDocument};
use crate::textprep::{preprocess_text, PreprocessConfig};

pub const CATEGORIES: [&str; 12] = [
    "Accident",
    "Art",
    "Crime",
    "Economics",
    "Education",
    "Entertainment",
    "Environment",
    "International",
    "Opinion",
    "Politics",
    "Science and Technology",
    "Sports",
];

const CONSONANTS: [char; 24] = [
    'ক', 'খ', 'গ', 'ঘ', 'চ', 'ছ', 'জ', 'ঝ', 'ট', 'ঠ', 'ড', 'ণ', 'ত', 'থ', 'দ', 'ধ', 'ন', 'প', 'ফ', 'ব', 'ভ', 'ম', 'ল',
    'স',
];
const VOWEL_SIGNS: [char; 5] = ['া', 'ি', 'ু', 'ো', 'ী'];
const POOL_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub categories: Vec<String>,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub keywords_per_class: usize,
    /// Size of the pool shared by all categories.
    pub filler_terms: usize,
    pub sentences_per_doc: usize,
    pub words_per_sentence: usize,
    /// Probability that a token is drawn from the document's keyword pool.
    pub keyword_share: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            categories: CATEGORIES.iter().map(|c| c.to_string()).collect(),
            train_per_class: 20,
            test_per_class: 5,
            keywords_per_class: 5,
            filler_terms: 20,
            sentences_per_doc: 3,
            words_per_sentence: 6,
            keyword_share: 0.5,
        }
    }
}

/// Keyword pools (one per category) and the shared filler pool.
#[derive(Debug, Clone, PartialEq)]
pub struct WordPools {
    pub keywords: Vec<Vec<String>>,
    pub filler: Vec<String>,
}

fn random_word(rng: &mut ChaCha8Rng) -> String {
    let mut w = String::new();
    for _ in 0..2 {
        w.push(*CONSONANTS.choose(rng).unwrap());
        w.push(*VOWEL_SIGNS.choose(rng).unwrap());
    }
    w.push(*CONSONANTS.choose(rng).unwrap());
    w
}

fn survives(word: &str, config: &PreprocessConfig) -> bool {
    let doc = preprocess_text("w", None, word, config);
    doc.tokens().eq([word])
}

pub fn word_pools(spec: &SyntheticSpec) -> WordPools {
    let config = PreprocessConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(POOL_SEED);
    let needed = spec.categories.len() * spec.keywords_per_class + spec.filler_terms;
    let mut words: Vec<String> = Vec::with_capacity(needed);
    while words.len() < needed {
        let w = random_word(&mut rng);
        if !words.contains(&w) && survives(&w, &config) {
            words.push(w);
        }
    }
    let filler = words.split_off(spec.categories.len() * spec.keywords_per_class);
    let keywords = words.chunks(spec.keywords_per_class).map(<[String]>::to_vec).collect();
    WordPools { keywords, filler }
}

fn document(rng: &mut ChaCha8Rng, spec: &SyntheticSpec, keywords: &[String], filler: &[String]) -> String {
    let mut sentences = Vec::with_capacity(spec.sentences_per_doc);
    for s in 0..spec.sentences_per_doc {
        let words: Vec<&str> = (0..spec.words_per_sentence)
            .map(|i| {
                // the first token of every document is a keyword
                let keyword = (s == 0 && i == 0) || filler.is_empty() || rng.random_bool(spec.keyword_share);
                let pool = if keyword { keywords } else { filler };
                pool.choose(rng).unwrap().as_str()
            })
            .collect();
        sentences.push(words.join(" "));
    }
    let mut text = sentences.join("। ");
    text.push('।');
    text
}

/// Returns `(train, test)` corpora. Ids are `train-<c>-<n>` and `test-<c>-<n>`
/// with `c` the category index.
pub fn generate(spec: &SyntheticSpec, seed: u64) -> (LabeledCorpus, LabeledCorpus) {
    assert!(spec.categories.len() >= 2 && spec.keywords_per_class >= 1);
    assert!(spec.train_per_class >= 1 && spec.test_per_class >= 1);
    assert!(spec.sentences_per_doc >= 1 && spec.words_per_sentence >= 1);
    let pools = word_pools(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (c, label) in spec.categories.iter().enumerate() {
        for (split, count, out) in [
            ("train", spec.train_per_class, &mut train),
            ("test", spec.test_per_class, &mut test),
        ] {
            for n in 0..count {
                let text = document(&mut rng, spec, &pools.keywords[c], &pools.filler);
                out.push(
                    LabeledDocument::new(format!("{split}-{c}-{n}"), text, label.clone())
                        .expect("generated documents are valid"),
                );
            }
        }
    }
    (
        LabeledCorpus::new(train).expect("non-empty with unique ids"),
        LabeledCorpus::new(test).expect("non-empty with unique ids"),
    )
}
