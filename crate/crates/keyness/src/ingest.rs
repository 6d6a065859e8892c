//! NDJSON comment dumps: record parsing, filtering and chunked streaming.
//!
//! Lines are read sequentially and parsed in parallel in fixed-size chunks,
//! so accepted comments come out in file order and the counters do not
//! depend on the thread count.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use keyness_core::ingest::{filter_comment, FilterOutcome};
use keyness_core::{Comment, IngestStats};
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{unreadable, Result};

/// Lines parsed per parallel batch.
pub const CHUNK_LINES: usize = 1 << 15;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed record: {reason}")]
pub struct MalformedRecord {
    pub reason: String,
}

#[derive(Deserialize)]
struct RawComment {
    id: String,
    author: String,
    subreddit: String,
    created_utc: i64,
    body: String,
}

/// Parses one NDJSON line. Unknown fields are ignored.
pub fn parse_record(line: &str) -> Result<Comment, MalformedRecord> {
    let raw: RawComment = serde_json::from_str(line).map_err(|e| MalformedRecord { reason: e.to_string() })?;
    for (field, value) in [("id", &raw.id), ("author", &raw.author), ("subreddit", &raw.subreddit)] {
        if value.is_empty() {
            return Err(MalformedRecord { reason: format!("empty `{field}`") });
        }
    }
    Ok(Comment {
        id: raw.id,
        author: raw.author,
        subreddit: raw.subreddit,
        created_utc: raw.created_utc,
        body: raw.body,
    })
}

enum LineOutcome {
    Malformed,
    Filtered(FilterOutcome),
    Accepted(Comment),
}

fn classify(line: &[u8]) -> LineOutcome {
    let Ok(text) = std::str::from_utf8(line) else {
        return LineOutcome::Malformed;
    };
    match parse_record(text) {
        Err(_) => LineOutcome::Malformed,
        Ok(comment) => match filter_comment(&comment) {
            FilterOutcome::Accepted => LineOutcome::Accepted(comment),
            rejected => LineOutcome::Filtered(rejected),
        },
    }
}

fn process_chunk(lines: &[Vec<u8>], stats: &mut IngestStats) -> Vec<Comment> {
    let outcomes: Vec<LineOutcome> = lines.par_iter().map(|l| classify(l)).collect();
    let mut accepted = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        match outcome {
            LineOutcome::Malformed => stats.record_malformed(),
            LineOutcome::Filtered(o) => stats.record(o),
            LineOutcome::Accepted(c) => {
                stats.record(FilterOutcome::Accepted);
                accepted.push(c);
            }
        }
    }
    accepted
}

/// Reads NDJSON from `reader`, handing accepted comments to `on_chunk` in
/// input order. Malformed lines (bad JSON, bad UTF-8, missing or mistyped
/// fields) are counted and skipped.
pub fn read_ndjson<R: BufRead>(mut reader: R, mut on_chunk: impl FnMut(Vec<Comment>)) -> std::io::Result<IngestStats> {
    let mut stats = IngestStats::default();
    let mut lines: Vec<Vec<u8>> = Vec::with_capacity(CHUNK_LINES);
    loop {
        let mut buf = Vec::new();
        let n = reader.read_until(b'\n', &mut buf)?;
        if n == 0 {
            break;
        }
        while matches!(buf.last(), Some(b'\n' | b'\r')) {
            buf.pop();
        }
        lines.push(buf);
        if lines.len() == CHUNK_LINES {
            on_chunk(process_chunk(&lines, &mut stats));
            lines.clear();
        }
    }
    if !lines.is_empty() {
        on_chunk(process_chunk(&lines, &mut stats));
    }
    Ok(stats)
}

/// Streams every file in order. Stops at the first unreadable path.
pub fn stream_corpus<P: AsRef<Path>>(paths: &[P], mut on_chunk: impl FnMut(Vec<Comment>)) -> Result<IngestStats> {
    let mut total = IngestStats::default();
    for path in paths {
        let path = path.as_ref();
        let file = File::open(path).map_err(unreadable(path))?;
        let stats = read_ndjson(BufReader::with_capacity(1 << 20, file), &mut on_chunk).map_err(unreadable(path))?;
        log::debug!("{}: {:?}", path.display(), stats);
        total += stats;
    }
    Ok(total)
}

/// Reads whole files into memory.
pub fn read_corpus<P: AsRef<Path>>(paths: &[P]) -> Result<(Vec<Comment>, IngestStats)> {
    let mut comments = Vec::new();
    let stats = stream_corpus(paths, |chunk| comments.extend(chunk))?;
    Ok((comments, stats))
}
