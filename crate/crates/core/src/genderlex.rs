//! First-name gender lexicon built from census name-frequency tables, and
//! username-to-gender inference against it.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Only names among this many most popular are kept.
pub const POPULARITY_CUTOFF: u32 = 10_000;
/// Minimum share of a name's bearers that must have the majority gender.
pub const MIN_DOMINANCE: f64 = 0.90;

const DOMINANCE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Gender {
    Female,
    Male,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Female => "female",
            Gender::Male => "male",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            s if s.eq_ignore_ascii_case("female") || s.eq_ignore_ascii_case("f") => Some(Gender::Female),
            s if s.eq_ignore_ascii_case("male") || s.eq_ignore_ascii_case("m") => Some(Gender::Male),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Gender::Female => Gender::Male,
            Gender::Male => Gender::Female,
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: expected `NAME FREQ CUMFREQ RANK`, got {text:?}")]
    MalformedLexiconRow { line: usize, text: String },
    #[error("line {line}: bad frequency {text:?}")]
    BadFrequency { line: usize, text: String },
    #[error("invalid lexicon entry for {name:?}: {reason}")]
    InvalidEntry { name: String, reason: &'static str },
}

/// One row of a census first-name distribution table.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusRow {
    /// Lowercased name.
    pub name: String,
    /// Percentage frequency within that gender's sample.
    pub freq: f64,
    pub cum_freq: f64,
    pub rank: u32,
}

/// Parses a whitespace-separated `NAME FREQ CUMFREQ RANK` table. Blank lines are skipped.
pub fn parse_census_table(text: &str) -> Result<Vec<CensusRow>, LexiconError> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let malformed = || LexiconError::MalformedLexiconRow { line, text: raw.to_string() };
        let cols: Vec<&str> = raw.split_whitespace().collect();
        let [name, freq, cum_freq, rank] = cols[..] else {
            return Err(malformed());
        };
        if !name.chars().all(char::is_alphabetic) {
            return Err(malformed());
        }
        let freq: f64 = freq
            .parse()
            .ok()
            .filter(|f: &f64| f.is_finite() && *f >= 0.0)
            .ok_or_else(|| LexiconError::BadFrequency { line, text: freq.to_string() })?;
        let cum_freq: f64 = cum_freq.parse().map_err(|_| malformed())?;
        let rank: u32 = rank.parse().map_err(|_| malformed())?;
        rows.push(CensusRow { name: name.to_lowercase(), freq, cum_freq, rank });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LexiconEntry {
    pub gender: Gender,
    /// Share of the name's bearers with the majority gender, in `[0.9, 1.0]`.
    pub dominance: f64,
    /// 1-based rank by combined popularity.
    pub popularity_rank: u32,
}

/// Immutable map from lowercase first name to its dominant gender.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GenderLexicon {
    entries: BTreeMap<String, LexiconEntry>,
}

impl GenderLexicon {
    /// Builds the lexicon from the male and female census tables.
    ///
    /// Names are ranked by the sum of their male and female percentage
    /// frequencies (ties alphabetical); the top [`POPULARITY_CUTOFF`] are kept,
    /// and of those only names whose majority gender accounts for at least
    /// [`MIN_DOMINANCE`] of the summed frequency.
    pub fn build(male: &[CensusRow], female: &[CensusRow]) -> Self {
        let mut freqs: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
        for row in male {
            freqs.entry(&row.name).or_default().0 += row.freq;
        }
        for row in female {
            freqs.entry(&row.name).or_default().1 += row.freq;
        }

        let mut ranked: Vec<(&str, f64, f64)> =
            freqs.into_iter().filter(|(_, (m, f))| m + f > 0.0).map(|(name, (m, f))| (name, m, f)).collect();
        // Stable sort over alphabetically ordered input keeps ties alphabetical.
        ranked.sort_by(|x, y| (y.1 + y.2).total_cmp(&(x.1 + x.2)));

        let entries = ranked
            .into_iter()
            .zip(1u32..)
            .take_while(|(_, rank)| *rank <= POPULARITY_CUTOFF)
            .filter_map(|((name, m, f), rank)| {
                let (gender, top) = if m >= f { (Gender::Male, m) } else { (Gender::Female, f) };
                let dominance = top / (m + f);
                (dominance + DOMINANCE_EPS >= MIN_DOMINANCE).then(|| {
                    let entry = LexiconEntry { gender, dominance: dominance.min(1.0), popularity_rank: rank };
                    (name.to_string(), entry)
                })
            })
            .collect();
        GenderLexicon { entries }
    }

    /// Parses both census tables and builds the lexicon.
    pub fn from_census(male_table: &str, female_table: &str) -> Result<Self, LexiconError> {
        let male = parse_census_table(male_table)?;
        let female = parse_census_table(female_table)?;
        Ok(Self::build(&male, &female))
    }

    /// Assembles a lexicon from stored entries, checking every invariant.
    pub fn from_entries<I, S>(entries: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = (S, LexiconEntry)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (name, entry) in entries {
            let name: String = name.into();
            let invalid = |reason| LexiconError::InvalidEntry { name: name.clone(), reason };
            if name.is_empty() || !name.chars().all(|c| c.is_alphabetic() && !c.is_uppercase()) {
                return Err(invalid("name must be non-empty, lowercase and alphabetic"));
            }
            if !(entry.dominance + DOMINANCE_EPS >= MIN_DOMINANCE && entry.dominance <= 1.0) {
                return Err(invalid("dominance outside [0.9, 1.0]"));
            }
            if entry.popularity_rank == 0 || entry.popularity_rank > POPULARITY_CUTOFF {
                return Err(invalid("popularity rank outside 1..=10000"));
            }
            if map.insert(name.clone(), entry).is_some() {
                return Err(invalid("duplicate name"));
            }
        }
        Ok(GenderLexicon { entries: map })
    }

    pub fn get(&self, name: &str) -> Option<&LexiconEntry> {
        self.entries.get(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in alphabetical order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &LexiconEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn count(&self, gender: Gender) -> usize {
        self.entries.values().filter(|e| e.gender == gender).count()
    }
}

/// Result of matching a username against the lexicon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InferredGender<'a> {
    Gendered { gender: Gender, name: &'a str },
    Ungendered,
}

impl InferredGender<'_> {
    pub fn gender(&self) -> Option<Gender> {
        match self {
            InferredGender::Gendered { gender, .. } => Some(*gender),
            InferredGender::Ungendered => None,
        }
    }
}

/// Pulls the likely first name off the front of a username.
///
/// Takes the leading run of letters and stops at the first digit, the first
/// character that is neither letter nor digit, or an uppercase letter right
/// after a lowercase one (`MikeTheWall` gives `mike`, `Mike33` gives `mike`).
/// Consecutive capitals do not split, so `MIKE42` also gives `mike`.
pub fn extract_first_name(username: &str) -> Option<String> {
    let mut name = String::new();
    let mut prev_lower = false;
    for ch in username.chars() {
        if !ch.is_alphabetic() || (prev_lower && ch.is_uppercase()) {
            break;
        }
        prev_lower = ch.is_lowercase();
        name.extend(ch.to_lowercase());
    }
    (!name.is_empty()).then_some(name)
}

/// Infers a commenter's gender from the first name at the front of their username.
pub fn infer_gender<'a>(username: &str, lexicon: &'a GenderLexicon) -> InferredGender<'a> {
    extract_first_name(username)
        .and_then(|candidate| lexicon.entries.get_key_value(candidate.as_str()))
        .map_or(InferredGender::Ungendered, |(name, entry)| InferredGender::Gendered { gender: entry.gender, name })
}
