//! Report rows: forum share tables, significant-term listings and run funnels.
//!
//! Rendering to CSV and Markdown lives in the std crate; everything here is
//! plain data plus the percentage formatting both renderers share.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::assoc::{AssociationRun, TermAssociation};
use crate::ingest::IngestStats;
use crate::termcount::{rank_by_size, SubredditStats};

/// Printed with every significance report.
pub const INDEPENDENCE_CAVEAT: &str = "Caveat: Benjamini-Hochberg assumes independent tests. \
Term presences here are not independent (authors comment in many months, quote and imitate \
one another, and reply to the same posts), so read the significant terms as leads to check, \
not as established differences.";

/// First-name lexicon size reported for the original US 1990 census analysis.
pub const REFERENCE_LEXICON_SIZE: usize = 4772;

/// Formats a fraction as a percentage, rounding half up at `decimals` places.
///
/// `format_percent(0.2649, 1) == "26.5%"`.
pub fn format_percent(fraction: f64, decimals: u32) -> String {
    let scale = 10u64.pow(decimals);
    // The nudge keeps decimal halves like 26.45 from rounding down after binary error.
    let scaled = libm::floor(fraction * 100.0 * scale as f64 + 0.5 + 1e-9);
    let scaled = if scaled < 0.0 { 0 } else { scaled as u64 };
    let mut out = String::new();
    let _ = write!(out, "{}", scaled / scale);
    if decimals > 0 {
        let _ = write!(out, ".{:0width$}", scaled % scale, width = decimals as usize);
    }
    out.push('%');
    out
}

/// One line of the forum table.
#[derive(Debug, Clone, PartialEq)]
pub struct SubredditReportRow {
    /// 1-based position by sampled comment count.
    pub rank: usize,
    pub subreddit: String,
    pub comments: u64,
    pub female_share: f64,
    /// `None` when no association run exists for the forum.
    pub n_significant: Option<usize>,
    /// Strongest significant terms, up to the requested count.
    pub example_terms: Vec<String>,
    pub theme: Option<String>,
}

impl SubredditReportRow {
    pub fn female_share_text(&self) -> String {
        format_percent(self.female_share, 1)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShareTable {
    pub rows: Vec<SubredditReportRow>,
    /// Forums that had statistics but no association run.
    pub missing_runs: Vec<String>,
}

/// Builds the forum table, ordered by increasing female share (within each
/// theme when themes are supplied; unthemed forums come last).
pub fn female_share_table(
    stats: &[SubredditStats],
    runs: &BTreeMap<String, AssociationRun>,
    themes: Option<&BTreeMap<String, String>>,
    example_terms: usize,
) -> ShareTable {
    let mut table = ShareTable::default();
    for (idx, s) in rank_by_size(stats).into_iter().enumerate() {
        let run = runs.get(&s.subreddit);
        if run.is_none() {
            table.missing_runs.push(s.subreddit.clone());
        }
        table.rows.push(SubredditReportRow {
            rank: idx + 1,
            subreddit: s.subreddit.clone(),
            comments: s.sampled_comments(),
            female_share: s.female_share(),
            n_significant: run.map(AssociationRun::n_significant),
            example_terms: run
                .map(|r| r.significant().take(example_terms).map(|t| t.term.clone()).collect())
                .unwrap_or_default(),
            theme: themes.and_then(|t| t.get(&s.subreddit).cloned()),
        });
    }
    table.rows.sort_by(|x, y| {
        let by_theme = match (&x.theme, &y.theme) {
            (Some(a), Some(b)) => a.cmp(b),
            (Some(_), None) => core::cmp::Ordering::Less,
            (None, Some(_)) => core::cmp::Ordering::Greater,
            (None, None) => core::cmp::Ordering::Equal,
        };
        by_theme.then_with(|| x.female_share.total_cmp(&y.female_share)).then_with(|| x.subreddit.cmp(&y.subreddit))
    });
    table
}

/// Significant terms of one forum, strongest first.
#[derive(Debug, Clone, PartialEq)]
pub struct TermReport {
    pub subreddit: String,
    pub alpha: f64,
    pub candidates: usize,
    pub female_total: u64,
    pub male_total: u64,
    pub rows: Vec<TermAssociation>,
    /// How many rows a short listing shows.
    pub display_limit: usize,
}

impl TermReport {
    pub fn displayed(&self) -> &[TermAssociation] {
        &self.rows[..self.rows.len().min(self.display_limit)]
    }
}

pub fn term_report(run: &AssociationRun, display_limit: usize) -> TermReport {
    // Results are already ordered by descending statistic.
    TermReport {
        subreddit: run.subreddit.clone(),
        alpha: run.alpha,
        candidates: run.candidates(),
        female_total: run.female_total,
        male_total: run.male_total,
        rows: run.significant().cloned().collect(),
        display_limit,
    }
}

/// Stage totals of a pipeline run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunSummary {
    pub ingest: IngestStats,
    /// Accepted comments whose author matched the lexicon.
    pub gendered: u64,
    pub sampled_female: u64,
    pub sampled_male: u64,
    pub lexicon_size: usize,
    pub subreddits_analysed: usize,
    pub significant_terms: usize,
    /// `key = value` echo of the settings, in order.
    pub config: Vec<(String, String)>,
}

impl RunSummary {
    pub fn sampled(&self) -> u64 {
        self.sampled_female + self.sampled_male
    }

    /// `(stage, count)` from records read down to sampled comments.
    pub fn funnel(&self) -> [(&'static str, u64); 4] {
        [
            ("read", self.ingest.records_read),
            ("accepted", self.ingest.records_accepted),
            ("gendered", self.gendered),
            ("sampled", self.sampled()),
        ]
    }

    pub fn female_share(&self) -> Option<f64> {
        (self.sampled() > 0).then(|| self.sampled_female as f64 / self.sampled() as f64)
    }
}
