//! Tokenizer and per-forum, per-gender term presence tables.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::genderlex::Gender;
use crate::sampler::SampledComment;

fn is_joiner(c: char) -> bool {
    c == '\'' || c == '-'
}

fn push_token(raw: &str, out: &mut Vec<String>) {
    let token = raw.trim_matches(is_joiner);
    if token.chars().any(char::is_alphabetic) {
        out.push(token.to_lowercase());
    }
}

/// Splits text into lowercase words.
///
/// A word is a maximal run of letters, apostrophes and hyphens with the
/// apostrophes and hyphens trimmed off both ends, so `re-read` and
/// `handmaid's` survive whole. Digits and other symbols separate words.
/// A typographic apostrophe (U+2019) counts as `'`.
pub fn tokenize(body: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    for ch in body.chars() {
        let ch = if ch == '\u{2019}' { '\'' } else { ch };
        if ch.is_alphabetic() || is_joiner(ch) {
            current.push(ch);
        } else if !current.is_empty() {
            push_token(&current, &mut out);
            current.clear();
        }
    }
    if !current.is_empty() {
        push_token(&current, &mut out);
    }
    out
}

/// Distinct terms of a body, sorted.
pub fn distinct_terms(body: &str) -> Vec<String> {
    let mut terms = tokenize(body);
    terms.sort_unstable();
    terms.dedup();
    terms
}

/// Comments containing a term, by author gender.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Presence {
    pub f_with: u64,
    pub m_with: u64,
}

impl Presence {
    pub fn total(&self) -> u64 {
        self.f_with + self.m_with
    }

    fn bump(&mut self, gender: Gender) {
        match gender {
            Gender::Female => self.f_with += 1,
            Gender::Male => self.m_with += 1,
        }
    }
}

/// One forum's sampled comment totals and term presence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermTable {
    pub subreddit: String,
    pub female_total: u64,
    pub male_total: u64,
    pub presence: BTreeMap<String, Presence>,
}

impl TermTable {
    pub fn new(subreddit: impl Into<String>) -> Self {
        TermTable { subreddit: subreddit.into(), female_total: 0, male_total: 0, presence: BTreeMap::new() }
    }

    pub fn total(&self) -> u64 {
        self.female_total + self.male_total
    }

    pub fn gender_total(&self, gender: Gender) -> u64 {
        match gender {
            Gender::Female => self.female_total,
            Gender::Male => self.male_total,
        }
    }

    /// Counts one comment. Each distinct term counts once however often it occurs.
    pub fn add_comment(&mut self, gender: Gender, body: &str) {
        match gender {
            Gender::Female => self.female_total += 1,
            Gender::Male => self.male_total += 1,
        }
        for term in distinct_terms(body) {
            match self.presence.get_mut(&term) {
                Some(p) => p.bump(gender),
                None => {
                    let mut p = Presence::default();
                    p.bump(gender);
                    self.presence.insert(term, p);
                }
            }
        }
    }

    /// Adds another shard's counts for the same forum.
    pub fn merge(&mut self, other: TermTable) {
        debug_assert_eq!(self.subreddit, other.subreddit);
        self.female_total += other.female_total;
        self.male_total += other.male_total;
        for (term, p) in other.presence {
            let slot = self.presence.entry(term).or_default();
            slot.f_with += p.f_with;
            slot.m_with += p.m_with;
        }
    }

    /// Checks the count bounds every table must satisfy.
    pub fn is_consistent(&self) -> bool {
        self.presence.values().all(|p| p.f_with <= self.female_total && p.m_with <= self.male_total && p.total() >= 1)
    }

    pub fn stats(&self) -> Option<SubredditStats> {
        SubredditStats::new(&self.subreddit, self.female_total, self.male_total)
    }
}

/// Builds one table per forum from sampled comments.
pub fn count_terms<'a, I>(samples: I) -> BTreeMap<String, TermTable>
where
    I: IntoIterator<Item = &'a SampledComment>,
{
    let mut tables: BTreeMap<String, TermTable> = BTreeMap::new();
    for s in samples {
        let sub = &s.comment.subreddit;
        if !tables.contains_key(sub) {
            tables.insert(sub.clone(), TermTable::new(sub.clone()));
        }
        tables.get_mut(sub).expect("inserted above").add_comment(s.gender, &s.comment.body);
    }
    tables
}

/// Merges two per-forum table maps.
pub fn merge_tables(into: &mut BTreeMap<String, TermTable>, from: BTreeMap<String, TermTable>) {
    for (sub, table) in from {
        match into.get_mut(&sub) {
            Some(existing) => existing.merge(table),
            None => {
                into.insert(sub, table);
            }
        }
    }
}

/// Participation summary of one forum.
#[derive(Debug, Clone, PartialEq)]
pub struct SubredditStats {
    pub subreddit: String,
    pub female_total: u64,
    pub male_total: u64,
}

impl SubredditStats {
    /// `None` when the forum has no sampled comments.
    pub fn new(subreddit: impl Into<String>, female_total: u64, male_total: u64) -> Option<Self> {
        (female_total + male_total > 0).then(|| SubredditStats {
            subreddit: subreddit.into(),
            female_total,
            male_total,
        })
    }

    pub fn sampled_comments(&self) -> u64 {
        self.female_total + self.male_total
    }

    pub fn female_share(&self) -> f64 {
        self.female_total as f64 / self.sampled_comments() as f64
    }
}

/// Orders forums by sampled comment count, largest first, ties alphabetical.
pub fn rank_by_size(stats: &[SubredditStats]) -> Vec<&SubredditStats> {
    let mut ranked: Vec<&SubredditStats> = stats.iter().collect();
    ranked.sort_by(|a, b| b.sampled_comments().cmp(&a.sampled_comments()).then_with(|| a.subreddit.cmp(&b.subreddit)));
    ranked
}

/// More forums were requested than exist; `available` holds all of them in rank order.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("requested the top {requested} subreddits but only {} exist", available.len())]
pub struct KTooLarge {
    pub requested: usize,
    pub available: Vec<String>,
}

/// The `k` forums with the most sampled comments.
pub fn top_subreddits(stats: &[SubredditStats], k: usize) -> Result<Vec<String>, KTooLarge> {
    let ranked: Vec<String> = rank_by_size(stats).into_iter().map(|s| s.subreddit.clone()).collect();
    if k > ranked.len() {
        return Err(KTooLarge { requested: k, available: ranked });
    }
    Ok(ranked.into_iter().take(k).collect())
}
