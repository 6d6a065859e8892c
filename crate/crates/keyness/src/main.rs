use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use keyness::pipeline::{associate_all, choose_subreddits, count_samples, sample_files};
use keyness::report::{read_themes, write_reports, ReportOptions};
use keyness::{assoc, lexicon, samples, simil, synth, tables};
use keyness_core::sampler::SampleMode;
use keyness_core::simil::{cluster, similarity_matrix, tfidf_vectors, IdfWeighting, TfIdfConfig, TfWeighting};
use keyness_core::termcount::TermTable;
use keyness_core::SubredditStats;

#[derive(Parser)]
#[command(name = "keyness", version, about = "Gendered term analysis of NDJSON comment dumps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a first-name lexicon from census name tables.
    BuildLexicon {
        #[arg(long)]
        male: PathBuf,
        #[arg(long)]
        female: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Keep one gendered comment per author, subreddit (or site) and month.
    Sample {
        #[arg(long, default_value = "subreddit")]
        mode: SampleMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lexicon CSV; the bundled 1990 census lexicon when omitted.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// NDJSON comment files.
        #[arg(long = "in", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
    },
    /// Count term presence per subreddit and gender.
    Count {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Chi-squared tests with Benjamini-Hochberg per subreddit.
    Assoc {
        #[arg(long)]
        tables: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
        /// Only the N largest subreddits.
        #[arg(long)]
        top: Option<usize>,
    },
    /// TF-IDF cosine similarity between subreddits.
    Simil {
        #[arg(long)]
        tables: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write an average-linkage dendrogram.
        #[arg(long)]
        cluster: bool,
        /// Use 1 + ln(presence) instead of raw presence counts.
        #[arg(long)]
        log_tf: bool,
        /// Use ln(1 + N/df) instead of ln(N/df).
        #[arg(long)]
        smooth_idf: bool,
    },
    /// Female-share table and per-subreddit term reports.
    Report {
        /// Totals CSV written by `count`.
        #[arg(long)]
        stats: PathBuf,
        /// Directory written by `assoc`.
        #[arg(long)]
        assoc: PathBuf,
        /// CSV `subreddit,theme`.
        #[arg(long)]
        themes: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 30)]
        top: usize,
        #[arg(long, default_value_t = 5)]
        examples: usize,
    },
    /// Generate a synthetic corpus with planted gendered terms.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::BuildLexicon { male, female, out } => {
            let lex = lexicon::build_from_census_files(&male, &female)?;
            lexicon::write_lexicon(&out, &lex)?;
            log::info!(
                "{} names ({} female, {} male); reference list has {}",
                lex.len(),
                lex.count(keyness_core::Gender::Female),
                lex.count(keyness_core::Gender::Male),
                keyness_core::report::REFERENCE_LEXICON_SIZE
            );
        }
        Command::Sample { mode, seed, lexicon: path, out, inputs } => {
            let lex = match path {
                Some(p) => lexicon::read_lexicon(&p)?,
                None => lexicon::bundled_lexicon(),
            };
            let sampled = sample_files(&inputs, &lex, mode, seed)?;
            samples::write_samples(&out, &sampled.samples)?;
            let i = &sampled.ingest;
            log::info!(
                "read {}, accepted {}, gendered {}, sampled {}",
                i.records_read,
                i.records_accepted,
                sampled.gendered,
                sampled.samples.len()
            );
        }
        Command::Count { input, out } => {
            let sampled = samples::read_samples(&input)?;
            let t = count_samples(&sampled);
            tables::write_tables(&out, &t)?;
            log::info!("{} subreddits, {} comments", t.len(), sampled.len());
        }
        Command::Assoc { tables: dir, alpha, out, top } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                bail!("alpha {alpha} outside (0, 1)");
            }
            let t = tables::read_tables(&dir)?;
            let stats: Vec<SubredditStats> = t.values().filter_map(TermTable::stats).collect();
            let selected = choose_subreddits(&stats, top);
            let (runs, _) = associate_all(&t, &selected, alpha);
            assoc::write_runs(&out, &runs)?;
            let significant: usize = runs.values().map(|r| r.n_significant()).sum();
            log::info!("{} subreddits tested, {significant} significant terms", runs.len());
        }
        Command::Simil { tables: dir, out, cluster: want_tree, log_tf, smooth_idf } => {
            let t = tables::read_tables(&dir)?;
            let cfg = TfIdfConfig {
                tf: if log_tf { TfWeighting::Log } else { TfWeighting::Presence },
                idf: if smooth_idf { IdfWeighting::Smooth } else { IdfWeighting::Plain },
            };
            let vectors = tfidf_vectors(&t, cfg)?;
            simil::warn_if_empty(&vectors);
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let (labels, matrix) = similarity_matrix(&vectors);
            simil::write_matrix(&out.join(simil::MATRIX_FILE), &labels, &matrix)?;
            if want_tree {
                simil::write_dendrogram(&out.join(simil::DENDROGRAM_FILE), &cluster(&vectors)?)?;
            }
        }
        Command::Report { stats, assoc: dir, themes, out, top, examples } => {
            let stats = tables::read_totals(&stats)?;
            let runs = assoc::read_runs(&dir)?;
            let themes: Option<BTreeMap<String, String>> = themes.as_deref().map(read_themes).transpose()?;
            let opts = ReportOptions { display_terms: top, example_terms: examples };
            write_reports(&out, &stats, &runs, themes.as_ref(), opts)?;
        }
        Command::Synth { config, out } => {
            let cfg = synth::read_config(&config)?;
            let corpus = synth::synthesize(&cfg, &out)?;
            log::info!("{} comments, {} planted pairs", corpus.comments.len(), corpus.truth.gendered.len());
        }
        Command::Run { config } => {
            let cfg = keyness::RunConfig::load(&config)?;
            let output = keyness::run(&cfg)?;
            log::info!(
                "{} subreddits tested, {} significant terms; outputs in {}",
                output.summary.subreddits_analysed,
                output.summary.significant_terms,
                cfg.out.display()
            );
        }
    }
    Ok(())
}
