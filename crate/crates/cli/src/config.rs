//! Hyperparameter resolution: command-line flags, then the `--config` file,
//! then built-in defaults.
//!
//! The config file holds `key = value` lines. `#` starts a comment. Keys use
//! the long flag names without dashes: `features`, `model`, `nb-alpha`,
//! `sgd-alpha`, `sgd-epochs`, `svm-c`, `chi-top-percent`, `seed`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::Args;
use doccat_core::features::ChiOptions;
use doccat_core::{Classifier, Selector, TrainHyperparams};

/// Marks errors that map to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const KEYS: [&str; 8] = [
    "features",
    "model",
    "nb-alpha",
    "sgd-alpha",
    "sgd-epochs",
    "svm-c",
    "chi-top-percent",
    "seed",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("config line {line_no}: expected key = value")))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(UsageError(format!("config line {line_no}: unknown key {key:?}")));
            }
            let value = value.trim().trim_matches('"').to_string();
            if values.insert(key.to_string(), (line_no, value)).is_some() {
                return Err(UsageError(format!("config line {line_no}: duplicate key {key:?}")));
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        Ok(ConfigFile::parse(&text)?)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, UsageError>
    where
        T::Err: fmt::Display,
    {
        self.values
            .get(key)
            .map(|(line, v)| {
                v.parse::<T>()
                    .map_err(|e| UsageError(format!("config line {line}: bad value for {key}: {e}")))
            })
            .transpose()
    }
}

/// Hyperparameter flags shared by `train` and `benchmark`.
#[derive(Debug, Clone, Default, Args)]
pub struct HyperArgs {
    /// Lidstone smoothing for Naive Bayes [default: 0.01]
    #[arg(long)]
    pub nb_alpha: Option<f64>,
    /// L2 regularization for SGD [default: 0.0001]
    #[arg(long)]
    pub sgd_alpha: Option<f64>,
    /// Passes over the training set for SGD [default: 50]
    #[arg(long)]
    pub sgd_epochs: Option<usize>,
    /// SVM soft-margin penalty [default: 1.0]
    #[arg(long)]
    pub svm_c: Option<f64>,
    /// Percentage of each document's terms kept by chi-square selection, in (0, 100] [default: 30]
    #[arg(long)]
    pub chi_top_percent: Option<f64>,
    /// Seed for every random choice [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// key = value file with defaults for the flags above
    #[arg(long, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub selector: Option<Selector>,
    pub classifier: Option<Classifier>,
    pub hyper: TrainHyperparams,
    pub chi: ChiOptions,
}

fn pick<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>, UsageError>
where
    T::Err: fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key),
    }
}

pub fn resolve(
    flags: &HyperArgs,
    selector: Option<Selector>,
    classifier: Option<Classifier>,
    file: &ConfigFile,
) -> Result<Resolved, UsageError> {
    let defaults = TrainHyperparams::default();
    let hyper = TrainHyperparams {
        nb_alpha: pick(flags.nb_alpha, file, "nb-alpha")?.unwrap_or(defaults.nb_alpha),
        sgd_alpha: pick(flags.sgd_alpha, file, "sgd-alpha")?.unwrap_or(defaults.sgd_alpha),
        sgd_epochs: pick(flags.sgd_epochs, file, "sgd-epochs")?.unwrap_or(defaults.sgd_epochs),
        svm_c: pick(flags.svm_c, file, "svm-c")?.unwrap_or(defaults.svm_c),
        seed: pick(flags.seed, file, "seed")?.unwrap_or(defaults.seed),
        ..defaults
    };
    hyper.validate().map_err(|e| UsageError(e.to_string()))?;

    let top_percent =
        pick(flags.chi_top_percent, file, "chi-top-percent")?.unwrap_or(ChiOptions::default().top_percent);
    if !(top_percent > 0.0 && top_percent <= 100.0) {
        return Err(UsageError(format!(
            "chi-top-percent must be in (0, 100], got {top_percent}"
        )));
    }
    let selector = match selector {
        Some(s) => Some(s),
        None => file.get::<Selector>("features")?,
    };
    let classifier = match classifier {
        Some(c) => Some(c),
        None => file.get::<Classifier>("model")?,
    };
    Ok(Resolved {
        selector,
        classifier,
        hyper,
        chi: ChiOptions {
            top_percent,
            ..ChiOptions::default()
        },
    })
}
