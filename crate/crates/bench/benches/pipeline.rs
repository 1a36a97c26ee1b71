use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use doccat_bench::fixture;
use doccat_core::eval::evaluate;
use doccat_core::features::{build_vocabulary, select_chi_features, vectorize_corpus, ChiOptions, FeatureMode};
use doccat_core::models::{preprocess_corpus, train, Classifier, PipelineConfig, TrainHyperparams};
use doccat_core::textprep::PreprocessConfig;
use doccat_core::Selector;

fn features(c: &mut Criterion) {
    let fx = fixture(100);
    let config = PreprocessConfig::default();
    let vocab = build_vocabulary(&fx.tokenized, 1).unwrap();
    let mut group = c.benchmark_group("features");
    group.bench_function("preprocess", |b| {
        b.iter(|| preprocess_corpus(black_box(&fx.train), &config))
    });
    group.bench_function("tfidf_vocabulary", |b| {
        b.iter(|| build_vocabulary(black_box(&fx.tokenized), 1))
    });
    group.bench_function("tfidf_vectorize", |b| {
        b.iter(|| vectorize_corpus(black_box(&fx.tokenized), &vocab, FeatureMode::Tfidf))
    });
    group.bench_function("chi2_select", |b| {
        b.iter(|| select_chi_features(black_box(&fx.tokenized), &ChiOptions::default()))
    });
    group.finish();
}

fn classifiers(c: &mut Criterion) {
    let fx = fixture(50);
    let hyper = TrainHyperparams::default();
    let mut group = c.benchmark_group("train");
    group.sample_size(10);
    for selector in Selector::ALL {
        let pipeline = PipelineConfig::with_selector(selector);
        for classifier in Classifier::ALL {
            let name = doccat_core::models::method_name(selector, classifier);
            group.bench_function(name, |b| {
                b.iter(|| train(&pipeline, classifier, black_box(&fx.train), &hyper))
            });
        }
    }
    group.finish();

    let model = train(&PipelineConfig::default(), Classifier::Svm, &fx.train, &hyper)
        .unwrap()
        .model;
    c.bench_function("evaluate/TFIDF+SVM", |b| {
        b.iter(|| evaluate(&model, black_box(&fx.test)))
    });
}

criterion_group!(benches, features, classifiers);
criterion_main!(benches);
