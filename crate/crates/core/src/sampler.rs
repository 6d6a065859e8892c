//! Keeps at most one comment per author, forum and calendar month.
//!
//! Instead of drawing from a stateful RNG, each comment gets a keyed 64-bit
//! SipHash of `(seed, author, forum, month, id)` and the smallest hash in a
//! key wins. Selection is then uniform over a key's comments for a random
//! seed, and does not depend on arrival order or on how the input was sharded.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::hash::Hasher;
use core::str::FromStr;

use hashbrown::HashMap;
use siphasher::sip::SipHasher24;

use crate::genderlex::Gender;
use crate::ingest::Comment;

const SECONDS_PER_DAY: i64 = 86_400;
const HASH_KEY1: u64 = 0x6b65_796e_6573_7331;

/// A UTC calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    pub year: i32,
    /// 1 through 12.
    pub month: u8,
}

impl YearMonth {
    pub fn new(year: i32, month: u8) -> Option<Self> {
        (1..=12).contains(&month).then_some(YearMonth { year, month })
    }

    /// Epoch seconds of the first instant of the month.
    pub fn start_utc(self) -> i64 {
        days_from_civil(i64::from(self.year), u32::from(self.month), 1) * SECONDS_PER_DAY
    }

    pub fn next(self) -> Self {
        if self.month == 12 {
            YearMonth { year: self.year + 1, month: 1 }
        } else {
            YearMonth { year: self.year, month: self.month + 1 }
        }
    }

    pub fn seconds(self) -> i64 {
        self.next().start_utc() - self.start_utc()
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expected YYYY-MM")]
pub struct ParseYearMonthError;

impl FromStr for YearMonth {
    type Err = ParseYearMonthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (y, m) = s.split_once('-').ok_or(ParseYearMonthError)?;
        let year = y.parse().map_err(|_| ParseYearMonthError)?;
        let month = m.parse().map_err(|_| ParseYearMonthError)?;
        YearMonth::new(year, month).ok_or(ParseYearMonthError)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for YearMonth {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for YearMonth {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = <alloc::borrow::Cow<'de, str>>::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// Proleptic Gregorian conversions after H. Hinnant's `chrono`-compatible algorithms.
fn civil_from_days(days: i64) -> (i64, u32) {
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let month = if mp < 10 { mp + 3 } else { mp - 9 };
    let year = yoe + era * 400 + i64::from(month <= 2);
    (year, month as u32)
}

fn days_from_civil(year: i64, month: u32, day: u32) -> i64 {
    let year = if month <= 2 { year - 1 } else { year };
    let era = year.div_euclid(400);
    let yoe = year - era * 400;
    let mp = i64::from((month + 9) % 12);
    let doy = (153 * mp + 2) / 5 + i64::from(day) - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

/// The UTC calendar month containing `created_utc`.
pub fn month_key(created_utc: i64) -> YearMonth {
    let (year, month) = civil_from_days(created_utc.div_euclid(SECONDS_PER_DAY));
    YearMonth { year: year as i32, month: month as u8 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SampleMode {
    /// One comment per (author, subreddit, month).
    #[default]
    #[cfg_attr(feature = "serde", serde(alias = "per-subreddit"))]
    Subreddit,
    /// One comment per (author, month) across the whole site.
    #[cfg_attr(feature = "serde", serde(alias = "whole-site"))]
    Site,
}

impl FromStr for SampleMode {
    type Err = &'static str;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "subreddit" | "per-subreddit" => Ok(SampleMode::Subreddit),
            "site" | "whole-site" => Ok(SampleMode::Site),
            _ => Err("expected `subreddit` or `site`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleKey {
    pub author: String,
    /// Absent in whole-site mode.
    pub subreddit: Option<String>,
    pub month: YearMonth,
}

impl SampleKey {
    pub fn of(comment: &Comment, mode: SampleMode) -> Self {
        SampleKey {
            author: comment.author.clone(),
            subreddit: match mode {
                SampleMode::Subreddit => Some(comment.subreddit.clone()),
                SampleMode::Site => None,
            },
            month: month_key(comment.created_utc),
        }
    }
}

/// A comment that survived sampling, with its author's inferred gender.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampledComment {
    pub comment: Comment,
    pub gender: Gender,
    pub key: SampleKey,
}

fn write_field(h: &mut SipHasher24, bytes: &[u8]) {
    h.write_u64(bytes.len() as u64);
    h.write(bytes);
}

/// Keyed hash that ranks comments within a sample key.
pub fn selection_hash(seed: u64, key: &SampleKey, comment_id: &str) -> u64 {
    let mut h = SipHasher24::new_with_keys(seed, HASH_KEY1);
    write_field(&mut h, key.author.as_bytes());
    write_field(&mut h, key.subreddit.as_deref().unwrap_or("").as_bytes());
    h.write_i32(key.month.year);
    h.write_u8(key.month.month);
    write_field(&mut h, comment_id.as_bytes());
    h.finish()
}

#[derive(Debug, Clone)]
struct Candidate {
    hash: u64,
    comment: Comment,
    gender: Gender,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        (self.hash, &self.comment.id) < (other.hash, &other.comment.id)
    }
}

/// Streaming per-key minimum. Shards can be sampled separately and merged.
#[derive(Debug, Clone)]
pub struct Sampler {
    mode: SampleMode,
    seed: u64,
    best: HashMap<SampleKey, Candidate>,
}

impl Sampler {
    pub fn new(mode: SampleMode, seed: u64) -> Self {
        Sampler { mode, seed, best: HashMap::new() }
    }

    pub fn mode(&self) -> SampleMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of distinct keys seen so far.
    pub fn len(&self) -> usize {
        self.best.len()
    }

    pub fn is_empty(&self) -> bool {
        self.best.is_empty()
    }

    pub fn offer(&mut self, comment: Comment, gender: Gender) {
        let key = SampleKey::of(&comment, self.mode);
        let hash = selection_hash(self.seed, &key, &comment.id);
        self.insert(key, Candidate { hash, comment, gender });
    }

    fn insert(&mut self, key: SampleKey, candidate: Candidate) {
        use hashbrown::hash_map::Entry;
        match self.best.entry(key) {
            Entry::Vacant(slot) => {
                slot.insert(candidate);
            }
            Entry::Occupied(mut slot) => {
                if candidate.beats(slot.get()) {
                    slot.insert(candidate);
                }
            }
        }
    }

    /// Folds another shard in. Both must share mode and seed.
    pub fn merge(&mut self, other: Sampler) {
        assert!(self.mode == other.mode && self.seed == other.seed, "merging samplers with different mode or seed");
        if self.best.len() < other.best.len() {
            let mine = core::mem::replace(&mut self.best, other.best);
            for (key, candidate) in mine {
                self.insert(key, candidate);
            }
        } else {
            for (key, candidate) in other.best {
                self.insert(key, candidate);
            }
        }
    }

    /// The surviving comments, ordered by key.
    pub fn into_samples(self) -> Vec<SampledComment> {
        let mut out: Vec<SampledComment> = self
            .best
            .into_iter()
            .map(|(key, c)| SampledComment { comment: c.comment, gender: c.gender, key })
            .collect();
        out.sort_unstable_by(|a, b| a.key.cmp(&b.key));
        out
    }
}

/// Samples a whole stream of gendered comments in one go.
pub fn select_samples<I>(comments: I, mode: SampleMode, seed: u64) -> Vec<SampledComment>
where
    I: IntoIterator<Item = (Comment, Gender)>,
{
    let mut sampler = Sampler::new(mode, seed);
    for (comment, gender) in comments {
        sampler.offer(comment, gender);
    }
    sampler.into_samples()
}
