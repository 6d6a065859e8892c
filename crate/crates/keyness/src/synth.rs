//! Synthetic corpus files: `corpus.ndjson`, `truth.csv`, `authors.csv`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use keyness_core::synth::{generate_corpus, SynthConfig, SynthCorpus};
use keyness_core::Comment;

use crate::error::{csv_err, json_err, unreadable, unwritable, Result};

pub const CORPUS_FILE: &str = "corpus.ndjson";
pub const TRUTH_FILE: &str = "truth.csv";
pub const AUTHORS_FILE: &str = "authors.csv";

pub fn read_config(path: &Path) -> Result<SynthConfig> {
    let text = fs::read_to_string(path).map_err(unreadable(path))?;
    serde_json::from_str(&text).map_err(json_err(path))
}

pub fn write_ndjson(path: &Path, comments: &[Comment]) -> Result<()> {
    let file = File::create(path).map_err(unwritable(path))?;
    let mut w = BufWriter::new(file);
    for c in comments {
        serde_json::to_writer(&mut w, c).map_err(json_err(path))?;
        w.write_all(b"\n").map_err(unwritable(path))?;
    }
    w.flush().map_err(unwritable(path))
}

pub fn write_corpus(dir: &Path, corpus: &SynthCorpus) -> Result<()> {
    fs::create_dir_all(dir).map_err(unwritable(dir))?;
    write_ndjson(&dir.join(CORPUS_FILE), &corpus.comments)?;

    let path = dir.join(TRUTH_FILE);
    let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
    w.write_record(["subreddit", "term", "direction"]).map_err(csv_err(&path))?;
    for ((sub, term), dir) in &corpus.truth.gendered {
        w.write_record([sub.as_str(), term.as_str(), dir.as_str()]).map_err(csv_err(&path))?;
    }
    w.flush().map_err(unwritable(&path))?;

    let path = dir.join(AUTHORS_FILE);
    let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
    w.write_record(["author", "gender"]).map_err(csv_err(&path))?;
    for (author, g) in &corpus.truth.authors {
        w.write_record([author.as_str(), g.map_or("", |g| g.as_str())]).map_err(csv_err(&path))?;
    }
    w.flush().map_err(unwritable(&path))
}

/// Generates the corpus for `cfg` and writes it under `dir`.
pub fn synthesize(cfg: &SynthConfig, dir: &Path) -> Result<SynthCorpus> {
    let corpus = generate_corpus(cfg)?;
    write_corpus(dir, &corpus)?;
    Ok(corpus)
}
