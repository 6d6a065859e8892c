//! Comment records and the filters applied before anything else looks at them.

use alloc::string::String;
use core::ops::{Add, AddAssign};

/// One comment from a dump.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Comment {
    pub id: String,
    pub author: String,
    pub subreddit: String,
    pub created_utc: i64,
    pub body: String,
}

/// Why a parsed comment was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    Empty,
    Deleted,
    UrlOnly,
}

/// Outcome of [`filter_comment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterOutcome {
    Accepted,
    Rejected(RejectReason),
}

/// Bodies the dump uses for comments that no longer exist.
pub const DELETION_SENTINELS: [&str; 2] = ["[deleted]", "[removed]"];

const URL_PREFIXES: [&str; 3] = ["http://", "https://", "www."];

/// Classifies a comment body. Depends on nothing but the body text.
pub fn filter_body(body: &str) -> FilterOutcome {
    let trimmed = body.trim();
    if trimmed.is_empty() {
        return FilterOutcome::Rejected(RejectReason::Empty);
    }
    if DELETION_SENTINELS.contains(&trimmed) {
        return FilterOutcome::Rejected(RejectReason::Deleted);
    }
    let single_token = !trimmed.contains(char::is_whitespace);
    if single_token && URL_PREFIXES.iter().any(|p| starts_with_ignore_case(trimmed, p)) {
        return FilterOutcome::Rejected(RejectReason::UrlOnly);
    }
    FilterOutcome::Accepted
}

/// Applies the comment-level filters: not empty, not deleted, not a bare URL.
pub fn filter_comment(comment: &Comment) -> FilterOutcome {
    filter_body(&comment.body)
}

fn starts_with_ignore_case(s: &str, prefix: &str) -> bool {
    s.len() >= prefix.len() && s.as_bytes()[..prefix.len()].eq_ignore_ascii_case(prefix.as_bytes())
}

/// Funnel counters for one or more ingested files.
///
/// Counters merge by addition, so shards can be read in any order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IngestStats {
    pub records_read: u64,
    pub records_accepted: u64,
    pub rejected_malformed: u64,
    pub rejected_deleted: u64,
    pub rejected_empty: u64,
    pub rejected_url_only: u64,
}

impl IngestStats {
    pub fn record_malformed(&mut self) {
        self.records_read += 1;
        self.rejected_malformed += 1;
    }

    /// Counts one parsed record according to its filter outcome.
    pub fn record(&mut self, outcome: FilterOutcome) {
        self.records_read += 1;
        match outcome {
            FilterOutcome::Accepted => self.records_accepted += 1,
            FilterOutcome::Rejected(RejectReason::Empty) => self.rejected_empty += 1,
            FilterOutcome::Rejected(RejectReason::Deleted) => self.rejected_deleted += 1,
            FilterOutcome::Rejected(RejectReason::UrlOnly) => self.rejected_url_only += 1,
        }
    }

    pub fn rejected(&self) -> u64 {
        self.rejected_malformed + self.rejected_deleted + self.rejected_empty + self.rejected_url_only
    }

    /// `records_read == records_accepted + rejected()`.
    pub fn is_balanced(&self) -> bool {
        self.records_read == self.records_accepted + self.rejected()
    }
}

impl AddAssign for IngestStats {
    fn add_assign(&mut self, rhs: Self) {
        self.records_read += rhs.records_read;
        self.records_accepted += rhs.records_accepted;
        self.rejected_malformed += rhs.rejected_malformed;
        self.rejected_deleted += rhs.rejected_deleted;
        self.rejected_empty += rhs.rejected_empty;
        self.rejected_url_only += rhs.rejected_url_only;
    }
}

impl Add for IngestStats {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl core::iter::Sum for IngestStats {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}
