//! CSV and Markdown rendering of share tables, term reports and run summaries.
//!
//! Every renderer returns a `String` built only from its arguments, so equal
//! inputs give equal bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use keyness_core::assoc::AssociationRun;
use keyness_core::report::{
    female_share_table, format_percent, term_report, RunSummary, ShareTable, TermReport, INDEPENDENCE_CAVEAT,
    REFERENCE_LEXICON_SIZE,
};
use keyness_core::SubredditStats;

use crate::assoc::file_stems;
use crate::error::{csv_err, unwritable, Error, Result};

pub const SHARE_CSV: &str = "female_share.csv";
pub const SHARE_MD: &str = "female_share.md";
pub const SUMMARY_MD: &str = "summary.md";
pub const TERMS_DIR: &str = "terms";

fn csv_string(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv of strings is utf-8")
}

fn md_cell(s: &str) -> String {
    s.replace('\\', "\\\\").replace('|', "\\|").replace(['\n', '\r'], " ")
}

fn md_row(out: &mut String, cells: &[String]) {
    out.push('|');
    for c in cells {
        let _ = write!(out, " {} |", c);
    }
    out.push('\n');
}

fn md_rule(out: &mut String, n: usize) {
    out.push('|');
    for _ in 0..n {
        out.push_str("---|");
    }
    out.push('\n');
}

fn has_themes(table: &ShareTable) -> bool {
    table.rows.iter().any(|r| r.theme.is_some())
}

pub fn share_table_csv(table: &ShareTable) -> String {
    let header = ["subreddit", "comments", "female_share", "significant_terms", "example_terms", "theme", "size_rank"];
    let rows = table.rows.iter().map(|r| {
        vec![
            r.subreddit.clone(),
            r.comments.to_string(),
            r.female_share_text(),
            r.n_significant.map(|n| n.to_string()).unwrap_or_default(),
            r.example_terms.join("; "),
            r.theme.clone().unwrap_or_default(),
            r.rank.to_string(),
        ]
    });
    csv_string(std::iter::once(header.iter().map(|s| s.to_string()).collect()).chain(rows))
}

pub fn share_table_markdown(table: &ShareTable) -> String {
    let themed = has_themes(table);
    let mut out = String::from("# Female share by subreddit\n\n");
    out.push_str("Sampled comments (at most one per user, subreddit and month), ordered by increasing female share");
    out.push_str(if themed { " within each theme.\n\n" } else { ".\n\n" });
    let mut header: Vec<String> =
        ["Subreddit", "Comments", "Female", "Significant terms", "Example terms"].map(String::from).to_vec();
    if themed {
        header.push("Theme".into());
    }
    md_row(&mut out, &header);
    md_rule(&mut out, header.len());
    for r in &table.rows {
        let mut cells = vec![
            md_cell(&r.subreddit),
            r.comments.to_string(),
            r.female_share_text(),
            r.n_significant.map(|n| n.to_string()).unwrap_or_default(),
            md_cell(&r.example_terms.join(", ")),
        ];
        if themed {
            cells.push(md_cell(r.theme.as_deref().unwrap_or("")));
        }
        md_row(&mut out, &cells);
    }
    if !table.missing_runs.is_empty() {
        let _ = write!(out, "\nNo association run for: {}.\n", table.missing_runs.join(", "));
    }
    let _ = write!(out, "\n{INDEPENDENCE_CAVEAT}\n");
    out
}

/// Full listing: every significant term, with a blank `label` column for
/// analyst coding.
pub fn term_report_csv(report: &TermReport) -> String {
    let header =
        ["term", "direction", "f_with", "f_total", "female_pct", "m_with", "m_total", "male_pct", "chi2", "p", "label"];
    let rows = report.rows.iter().map(|t| {
        vec![
            t.term.clone(),
            t.direction.to_string(),
            t.a.to_string(),
            t.female_total().to_string(),
            format_percent(t.female_rate(), 2),
            t.c.to_string(),
            t.male_total().to_string(),
            format_percent(t.male_rate(), 2),
            t.chi2.to_string(),
            t.p.to_string(),
            String::new(),
        ]
    });
    csv_string(std::iter::once(header.iter().map(|s| s.to_string()).collect()).chain(rows))
}

pub fn term_report_markdown(report: &TermReport) -> String {
    let mut out = format!("# {}\n\n", md_cell(&report.subreddit));
    let _ = writeln!(
        out,
        "Significant terms: {} of {} candidates (Benjamini-Hochberg, alpha {}).",
        report.rows.len(),
        report.candidates,
        report.alpha
    );
    let _ = writeln!(out, "Sampled comments: {} female, {} male.\n", report.female_total, report.male_total);
    let header = ["Term", "Direction", "Female with", "Female %", "Male with", "Male %", "Chi-squared", "p"];
    md_row(&mut out, &header.map(String::from));
    md_rule(&mut out, header.len());
    for t in report.displayed() {
        md_row(
            &mut out,
            &[
                md_cell(&t.term),
                t.direction.to_string(),
                t.a.to_string(),
                format_percent(t.female_rate(), 2),
                t.c.to_string(),
                format_percent(t.male_rate(), 2),
                format!("{:.3}", t.chi2),
                format!("{:.3e}", t.p),
            ],
        );
    }
    if report.displayed().len() < report.rows.len() {
        let _ = writeln!(out, "\nShowing the strongest {} of {}.", report.displayed().len(), report.rows.len());
    }
    let _ = write!(out, "\n{INDEPENDENCE_CAVEAT}\n");
    out
}

pub fn summary_markdown(s: &RunSummary) -> String {
    let mut out = String::from("# Run summary\n\n");
    md_row(&mut out, &["Stage".into(), "Comments".into()]);
    md_rule(&mut out, 2);
    for (stage, n) in s.funnel() {
        md_row(&mut out, &[stage.into(), n.to_string()]);
    }
    let i = &s.ingest;
    let _ = writeln!(
        out,
        "\nRejected at ingest: {} malformed, {} empty, {} deleted, {} URL only.",
        i.rejected_malformed, i.rejected_empty, i.rejected_deleted, i.rejected_url_only
    );
    match s.female_share() {
        Some(share) => {
            let _ = writeln!(
                out,
                "Female share of sampled comments: {} ({} female, {} male).",
                format_percent(share, 1),
                s.sampled_female,
                s.sampled_male
            );
        }
        None => out.push_str("Female share of sampled comments: n/a (nothing sampled).\n"),
    }
    let _ = writeln!(out, "Lexicon names: {} (reference list: {}).", s.lexicon_size, REFERENCE_LEXICON_SIZE);
    let _ =
        writeln!(out, "Subreddits analysed: {}. Significant terms: {}.", s.subreddits_analysed, s.significant_terms);
    if !s.config.is_empty() {
        out.push_str("\n## Configuration\n\n");
        md_row(&mut out, &["Setting".into(), "Value".into()]);
        md_rule(&mut out, 2);
        for (k, v) in &s.config {
            md_row(&mut out, &[md_cell(k), md_cell(v)]);
        }
    }
    let _ = write!(out, "\n{INDEPENDENCE_CAVEAT}\n");
    out
}

/// Reads an analyst theme file with columns `subreddit,theme`.
pub fn read_themes(path: &Path) -> Result<BTreeMap<String, String>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let headers = r.headers().map_err(csv_err(path))?.clone();
    if headers.len() < 2 || &headers[0] != "subreddit" || &headers[1] != "theme" {
        return Err(Error::Format {
            path: path.to_path_buf(),
            line: 1,
            message: "expected header subreddit,theme".into(),
        });
    }
    let mut out = BTreeMap::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        let theme = rec[1].trim();
        if !theme.is_empty() {
            out.insert(rec[0].to_string(), theme.to_string());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportOptions {
    /// Rows shown in each Markdown term report.
    pub display_terms: usize,
    /// Example terms per forum in the share table.
    pub example_terms: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { display_terms: 30, example_terms: 5 }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(unwritable(path))
}

/// Writes the share table and one term report pair per run under `dir`.
pub fn write_reports(
    dir: &Path,
    stats: &[SubredditStats],
    runs: &BTreeMap<String, AssociationRun>,
    themes: Option<&BTreeMap<String, String>>,
    opts: ReportOptions,
) -> Result<ShareTable> {
    let table = female_share_table(stats, runs, themes, opts.example_terms);
    for sub in &table.missing_runs {
        log::warn!("subreddit {sub:?} has statistics but no association run; its term columns are blank");
    }
    fs::create_dir_all(dir).map_err(unwritable(dir))?;
    write_file(&dir.join(SHARE_CSV), &share_table_csv(&table))?;
    write_file(&dir.join(SHARE_MD), &share_table_markdown(&table))?;
    let terms_dir = dir.join(TERMS_DIR);
    fs::create_dir_all(&terms_dir).map_err(unwritable(&terms_dir))?;
    let stems = file_stems(runs.keys().map(String::as_str));
    for (sub, run) in runs {
        let report = term_report(run, opts.display_terms);
        let stem = &stems[sub.as_str()];
        write_file(&terms_dir.join(format!("{stem}.csv")), &term_report_csv(&report))?;
        write_file(&terms_dir.join(format!("{stem}.md")), &term_report_markdown(&report))?;
    }
    Ok(table)
}
