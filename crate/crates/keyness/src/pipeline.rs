//! Parallel pipeline stages over files, and the `run` configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use keyness_core::analysis::select_subreddits;
use keyness_core::assoc::{associate, AssocError, AssociationRun, DEFAULT_ALPHA};
use keyness_core::genderlex::{infer_gender, GenderLexicon};
use keyness_core::report::RunSummary;
use keyness_core::sampler::{SampleMode, Sampler};
use keyness_core::simil::{cluster, similarity_matrix, tfidf_vectors, TfIdfConfig};
use keyness_core::termcount::{count_terms, merge_tables, TermTable};
use keyness_core::{IngestStats, SampledComment, SubredditStats};
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{json_err, unreadable, unwritable, Error, Result};
use crate::report::{summary_markdown, write_reports, ReportOptions, SUMMARY_MD};
use crate::{assoc, ingest, lexicon, samples, simil, tables};

const COUNT_CHUNK: usize = 4096;

/// Output of the ingest, gender and sampling stages.
#[derive(Debug, Clone)]
pub struct Sampled {
    pub ingest: IngestStats,
    /// Accepted comments whose author matched the lexicon.
    pub gendered: u64,
    pub samples: Vec<SampledComment>,
}

/// Streams the files, keeps gendered comments and reduces them to one per
/// sample key. The result does not depend on file order or chunking.
pub fn sample_files<P: AsRef<Path>>(
    paths: &[P],
    lexicon: &GenderLexicon,
    mode: SampleMode,
    seed: u64,
) -> Result<Sampled> {
    let mut sampler = Sampler::new(mode, seed);
    let mut gendered = 0u64;
    let ingest = ingest::stream_corpus(paths, |chunk| {
        let (n, shard) = chunk
            .into_par_iter()
            .filter_map(|c| infer_gender(&c.author, lexicon).gender().map(|g| (c, g)))
            .fold(
                || (0u64, Sampler::new(mode, seed)),
                |(n, mut s), (c, g)| {
                    s.offer(c, g);
                    (n + 1, s)
                },
            )
            .reduce(
                || (0, Sampler::new(mode, seed)),
                |(n1, mut a), (n2, b)| {
                    a.merge(b);
                    (n1 + n2, a)
                },
            );
        gendered += n;
        sampler.merge(shard);
    })?;
    Ok(Sampled { ingest, gendered, samples: sampler.into_samples() })
}

/// Per-forum presence tables, counted in parallel.
pub fn count_samples(samples: &[SampledComment]) -> BTreeMap<String, TermTable> {
    samples.par_chunks(COUNT_CHUNK).map(count_terms).reduce(BTreeMap::new, |mut a, b| {
        merge_tables(&mut a, b);
        a
    })
}

/// Tests the selected forums in parallel. Undefined tests are logged and skipped.
pub fn associate_all(
    tables: &BTreeMap<String, TermTable>,
    selected: &[String],
    alpha: f64,
) -> (BTreeMap<String, AssociationRun>, Vec<AssocError>) {
    let outcomes: Vec<_> = selected.par_iter().map(|sub| associate(&tables[sub], alpha)).collect();
    let mut runs = BTreeMap::new();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(run) => {
                runs.insert(run.subreddit.clone(), run);
            }
            Err(e) => {
                log::warn!("skipping: {e}");
                skipped.push(e);
            }
        }
    }
    (runs, skipped)
}

/// Forums to test, with a warning when fewer than `top_n` exist.
pub fn choose_subreddits(stats: &[SubredditStats], top_n: Option<usize>) -> Vec<String> {
    let selected = select_subreddits(stats, top_n);
    if let Some(k) = top_n {
        if k > selected.len() {
            log::warn!("asked for the top {k} subreddits but only {} have sampled comments", selected.len());
        }
    }
    selected
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_top_n() -> Option<usize> {
    Some(100)
}

fn default_display_terms() -> usize {
    ReportOptions::default().display_terms
}

fn default_example_terms() -> usize {
    ReportOptions::default().example_terms
}

fn default_true() -> bool {
    true
}

/// Settings for `run`, read from JSON. Relative paths are taken from the
/// config file's directory.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// NDJSON comment dumps.
    pub inputs: Vec<PathBuf>,
    /// Lexicon CSV. Takes precedence over the census files.
    #[serde(default)]
    pub lexicon: Option<PathBuf>,
    /// Census name tables; both or neither. With neither and no `lexicon`,
    /// the bundled 1990 tables are used.
    #[serde(default)]
    pub male_names: Option<PathBuf>,
    #[serde(default)]
    pub female_names: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub mode: SampleMode,
    /// Largest forums to test; `null` tests every forum.
    #[serde(default = "default_top_n")]
    pub top_n: Option<usize>,
    pub out: PathBuf,
    #[serde(default)]
    pub themes: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub write_tables: bool,
    #[serde(default)]
    pub write_samples: bool,
    #[serde(default)]
    pub similarity: bool,
    #[serde(default)]
    pub cluster: bool,
    #[serde(default)]
    pub tfidf: TfIdfConfig,
    #[serde(default = "default_display_terms")]
    pub display_terms: usize,
    #[serde(default = "default_example_terms")]
    pub example_terms: usize,
}

impl RunConfig {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(unreadable(path))?;
        let mut cfg = Self::from_json(&text).map_err(json_err(path))?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new("")));
        cfg.validate()?;
        Ok(cfg)
    }

    /// Joins every relative path onto `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.inputs.iter_mut().for_each(fix);
        for p in [&mut self.lexicon, &mut self.male_names, &mut self.female_names, &mut self.themes] {
            p.iter_mut().for_each(fix);
        }
        fix(&mut self.out);
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::Config("no input files".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        if self.male_names.is_some() != self.female_names.is_some() {
            return Err(Error::Config("male_names and female_names go together".into()));
        }
        if self.top_n == Some(0) {
            return Err(Error::Config("top_n must be at least 1".into()));
        }
        Ok(())
    }

    fn load_lexicon(&self) -> Result<(GenderLexicon, String)> {
        if let Some(path) = &self.lexicon {
            return Ok((lexicon::read_lexicon(path)?, path.display().to_string()));
        }
        if let (Some(m), Some(f)) = (&self.male_names, &self.female_names) {
            return Ok((lexicon::build_from_census_files(m, f)?, format!("{} + {}", m.display(), f.display())));
        }
        Ok((lexicon::bundled_lexicon(), "bundled 1990 census".into()))
    }

    fn echo(&self, lexicon_source: String) -> Vec<(String, String)> {
        let inputs: Vec<String> = self.inputs.iter().map(|p| p.display().to_string()).collect();
        let mode = match self.mode {
            SampleMode::Subreddit => "subreddit",
            SampleMode::Site => "site",
        };
        vec![
            ("inputs".into(), inputs.join(", ")),
            ("lexicon".into(), lexicon_source),
            ("mode".into(), mode.into()),
            ("seed".into(), self.seed.to_string()),
            ("alpha".into(), self.alpha.to_string()),
            ("top_n".into(), self.top_n.map_or("all".into(), |k| k.to_string())),
        ]
    }
}

/// Everything a `run` produced, for callers that want more than files.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub tables: BTreeMap<String, TermTable>,
    pub runs: BTreeMap<String, AssociationRun>,
    pub skipped: Vec<AssocError>,
}

/// Runs every stage and writes the outputs under `cfg.out`:
/// `summary.md`, `female_share.{csv,md}`, `terms/`, `assoc/`, and optionally
/// `tables/`, `samples.ndjson`, `similarity.csv`, `dendrogram.json`.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let (lex, lexicon_source) = cfg.load_lexicon()?;
    log::info!("lexicon: {} names", lex.len());
    let out = &cfg.out;
    fs::create_dir_all(out).map_err(unwritable(out))?;

    let sampled = sample_files(&cfg.inputs, &lex, cfg.mode, cfg.seed)?;
    log::info!(
        "read {} records, accepted {}, gendered {}, sampled {}",
        sampled.ingest.records_read,
        sampled.ingest.records_accepted,
        sampled.gendered,
        sampled.samples.len()
    );
    if cfg.write_samples {
        samples::write_samples(&out.join("samples.ndjson"), &sampled.samples)?;
    }

    let tables = count_samples(&sampled.samples);
    drop(sampled.samples);
    if cfg.write_tables {
        tables::write_tables(&out.join("tables"), &tables)?;
    }
    let stats: Vec<SubredditStats> = tables.values().filter_map(TermTable::stats).collect();
    let selected = choose_subreddits(&stats, cfg.top_n);
    let (runs, skipped) = associate_all(&tables, &selected, cfg.alpha);
    assoc::write_runs(&out.join("assoc"), &runs)?;

    if cfg.similarity || cfg.cluster {
        let chosen: BTreeMap<String, TermTable> = selected.iter().map(|s| (s.clone(), tables[s].clone())).collect();
        match tfidf_vectors(&chosen, cfg.tfidf) {
            Ok(vectors) => {
                simil::warn_if_empty(&vectors);
                let (labels, matrix) = similarity_matrix(&vectors);
                simil::write_matrix(&out.join(simil::MATRIX_FILE), &labels, &matrix)?;
                if cfg.cluster {
                    let d = cluster(&vectors).expect("at least two vectors");
                    simil::write_dendrogram(&out.join(simil::DENDROGRAM_FILE), &d)?;
                }
            }
            Err(e) => log::warn!("skipping similarity: {e}"),
        }
    }

    let themes = cfg.themes.as_deref().map(crate::report::read_themes).transpose()?;
    let selected_stats: Vec<SubredditStats> =
        stats.iter().filter(|s| selected.contains(&s.subreddit)).cloned().collect();
    let opts = ReportOptions { display_terms: cfg.display_terms, example_terms: cfg.example_terms };
    write_reports(out, &selected_stats, &runs, themes.as_ref(), opts)?;

    let summary = RunSummary {
        ingest: sampled.ingest,
        gendered: sampled.gendered,
        sampled_female: stats.iter().map(|s| s.female_total).sum(),
        sampled_male: stats.iter().map(|s| s.male_total).sum(),
        lexicon_size: lex.len(),
        subreddits_analysed: runs.len(),
        significant_terms: runs.values().map(AssociationRun::n_significant).sum(),
        config: cfg.echo(lexicon_source),
    };
    let summary_path = out.join(SUMMARY_MD);
    fs::write(&summary_path, summary_markdown(&summary)).map_err(unwritable(&summary_path))?;
    Ok(RunOutput { summary, tables, runs, skipped })
}
