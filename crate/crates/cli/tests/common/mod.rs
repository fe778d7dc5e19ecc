#![allow(dead_code)]

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::Command;

use isospec::synth::gaussian_space;
use isospec::EmbeddingSpace;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn isospec(args: &[&str]) -> Run {
    isospec_env(args, &[])
}

/// Runs the binary with a clean `ISOSPEC_*` environment plus `env`.
pub fn isospec_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut c = Command::new(env!("CARGO_BIN_EXE_isospec"));
    for (k, _) in std::env::vars() {
        if k.starts_with("ISOSPEC_") {
            c.env_remove(k);
        }
    }
    c.args(args).envs(env.iter().copied());
    let out = c.output().expect("spawn isospec");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn write_space(dir: &Path, name: &str, space: &EmbeddingSpace) -> PathBuf {
    let p = dir.join(name);
    let mut w = BufWriter::new(File::create(&p).unwrap());
    space.write_word2vec(&mut w, None).unwrap();
    w.flush().unwrap();
    p
}

pub fn gaussian_file(dir: &Path, name: &str, n: usize, d: usize, seed: u64) -> PathBuf {
    write_space(dir, name, &gaussian_space("x", n, d, seed))
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Data rows of a CSV document (header skipped).
pub fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

pub fn write_pairs(dir: &Path, rows: &[(String, String, &str, f64)]) -> PathBuf {
    let path = dir.join("pairs.csv");
    let mut s = String::from("lang_a,lang_b,measure,value,params_json\n");
    for (a, b, m, v) in rows {
        s.push_str(&format!("{a},{b},{m},{v},{{}}\n"));
    }
    std::fs::write(&path, s).unwrap();
    path
}

pub fn write_perf(dir: &Path, rows: &[(String, String, f64)], ling: Option<&[[f64; 3]]>) -> PathBuf {
    let path = dir.join("perf.csv");
    let mut s = String::from(if ling.is_some() {
        "source,target,task,score,phy,typ,geo\n"
    } else {
        "source,target,task,score\n"
    });
    for (i, (a, b, score)) in rows.iter().enumerate() {
        s.push_str(&format!("{a},{b},bli,{score}"));
        if let Some(l) = ling {
            s.push_str(&format!(",{},{},{}", l[i][0], l[i][1], l[i][2]));
        }
        s.push('\n');
    }
    std::fs::write(&path, s).unwrap();
    path
}
