//! Fixtures shared by the criterion benchmarks.

use doccat_core::models::preprocess_corpus;
use doccat_core::synthetic::{generate, SyntheticSpec};
use doccat_core::textprep::{PreprocessConfig, TokenizedDocument};
use doccat_core::LabeledCorpus;

pub struct Fixture {
    pub train: LabeledCorpus,
    pub test: LabeledCorpus,
    pub tokenized: Vec<TokenizedDocument>,
}

/// Synthetic corpus with `docs_per_class` training documents per category
/// and longer documents than the test default.
pub fn fixture(docs_per_class: usize) -> Fixture {
    let spec = SyntheticSpec {
        train_per_class: docs_per_class,
        sentences_per_doc: 8,
        words_per_sentence: 12,
        ..SyntheticSpec::default()
    };
    let (train, test) = generate(&spec, 42);
    let tokenized = preprocess_corpus(&train, &PreprocessConfig::default());
    Fixture { train, test, tokenized }
}
