#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use doccat_core::corpus::write_jsonl;
use doccat_core::synthetic::{generate, SyntheticSpec};

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn doccat(args: &[&str]) -> Run {
    doccat_env(args, &[])
}

pub fn doccat_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_doccat"));
    cmd.args(args).env("NO_COLOR", "1").env_remove("SOURCE_DATE_EPOCH");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output { status, stdout, stderr } = cmd.output().expect("binary runs");
    Run {
        code: status.code().expect("exited normally"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

/// Writes the default synthetic train/test split as JSONL.
pub fn synthetic_split(dir: &Path, seed: u64) -> (PathBuf, PathBuf) {
    let (train, test) = generate(&SyntheticSpec::default(), seed);
    let train_path = dir.join("train.jsonl");
    let test_path = dir.join("test.jsonl");
    write_jsonl(&train, &train_path).unwrap();
    write_jsonl(&test, &test_path).unwrap();
    (train_path, test_path)
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
