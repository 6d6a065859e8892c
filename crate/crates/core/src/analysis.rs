//! The full in-memory chain: filter, infer gender, sample, count, test.
//!
//! The std crate runs the same stages in parallel over files; this sequential
//! version is what the synthetic validation runs use.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::assoc::{associate, AssocError, AssociationRun, DEFAULT_ALPHA};
use crate::genderlex::{infer_gender, GenderLexicon};
use crate::ingest::{filter_comment, Comment, FilterOutcome, IngestStats};
use crate::sampler::{SampleMode, Sampler};
use crate::termcount::{count_terms, top_subreddits, SubredditStats, TermTable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub mode: SampleMode,
    pub seed: u64,
    pub alpha: f64,
    /// Restrict testing to the largest forums; `None` tests all.
    pub top_n: Option<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { mode: SampleMode::Subreddit, seed: 0, alpha: DEFAULT_ALPHA, top_n: None }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Analysis {
    pub ingest: IngestStats,
    pub gendered: u64,
    pub tables: BTreeMap<String, TermTable>,
    /// Forums selected for testing, largest first.
    pub selected: Vec<String>,
    pub runs: BTreeMap<String, AssociationRun>,
    /// Forums whose test was undefined.
    pub skipped: Vec<AssocError>,
}

impl Analysis {
    pub fn stats(&self) -> Vec<SubredditStats> {
        self.tables.values().filter_map(TermTable::stats).collect()
    }
}

/// Tests the selected forums. Undefined tests are reported, not fatal.
pub fn run_associations(
    tables: &BTreeMap<String, TermTable>,
    selected: &[String],
    alpha: f64,
) -> (BTreeMap<String, AssociationRun>, Vec<AssocError>) {
    let mut runs = BTreeMap::new();
    let mut skipped = Vec::new();
    for sub in selected {
        match associate(&tables[sub], alpha) {
            Ok(run) => {
                runs.insert(sub.clone(), run);
            }
            Err(e) => skipped.push(e),
        }
    }
    (runs, skipped)
}

/// Forums to test: the `top_n` largest, or all of them by size.
pub fn select_subreddits(stats: &[SubredditStats], top_n: Option<usize>) -> Vec<String> {
    let k = top_n.unwrap_or(stats.len());
    top_subreddits(stats, k).unwrap_or_else(|e| e.available)
}

pub fn analyze<I>(comments: I, lexicon: &GenderLexicon, config: &AnalysisConfig) -> Analysis
where
    I: IntoIterator<Item = Comment>,
{
    let mut ingest = IngestStats::default();
    let mut gendered = 0;
    let mut sampler = Sampler::new(config.mode, config.seed);
    for comment in comments {
        let outcome = filter_comment(&comment);
        ingest.record(outcome);
        if outcome != FilterOutcome::Accepted {
            continue;
        }
        if let Some(gender) = infer_gender(&comment.author, lexicon).gender() {
            gendered += 1;
            sampler.offer(comment, gender);
        }
    }
    let samples = sampler.into_samples();
    let tables = count_terms(&samples);
    let stats: Vec<SubredditStats> = tables.values().filter_map(TermTable::stats).collect();
    let selected = select_subreddits(&stats, config.top_n);
    let (runs, skipped) = run_associations(&tables, &selected, config.alpha);
    Analysis { ingest, gendered, tables, selected, runs, skipped }
}
