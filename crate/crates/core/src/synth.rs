//! Seeded synthetic comment corpora with planted gendered terms.
//!
//! Every comment draws each vocabulary term independently. A planted effect
//! moves the female presence rate of one term in one forum on the logit
//! scale: `logistic(logit(base) + shift)`. Usernames are a name stem followed
//! by digits, so the real lexicon path recovers each author's gender.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assoc::AssociationRun;
use crate::genderlex::{infer_gender, Gender, GenderLexicon};
use crate::ingest::Comment;
use crate::sampler::YearMonth;
use crate::termcount::tokenize;

/// Body used for comments that drew no vocabulary term. Tokenizes to nothing.
pub const EMPTY_BODY: &str = "...";

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubredditSpec {
    pub name: String,
    /// Chance that a female user comments in this forum in a given month.
    pub female_activity: f64,
    pub male_activity: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VocabTerm {
    pub term: String,
    /// Base presence probability per comment, in (0, 1).
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlantedEffect {
    pub term: String,
    pub subreddit: String,
    /// Log-odds shift applied to female presence. Positive favours women.
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SynthConfig {
    pub n_female_users: u32,
    pub n_male_users: u32,
    /// Users whose names match nothing; their comments are dropped downstream.
    #[cfg_attr(feature = "serde", serde(default))]
    pub n_ungendered_users: u32,
    pub months: u32,
    #[cfg_attr(feature = "serde", serde(default = "default_start"))]
    pub start_month: YearMonth,
    /// After each comment in an active user-month, chance of one more.
    #[cfg_attr(feature = "serde", serde(default))]
    pub repeat_prob: f64,
    pub subreddits: Vec<SubredditSpec>,
    pub vocabulary: Vec<VocabTerm>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub planted_effects: Vec<PlantedEffect>,
    pub female_names: Vec<String>,
    pub male_names: Vec<String>,
    /// Share of comments replaced by deleted or bare-URL bodies.
    #[cfg_attr(feature = "serde", serde(default))]
    pub noise_rate: f64,
    pub seed: u64,
}

#[cfg(feature = "serde")]
fn default_start() -> YearMonth {
    YearMonth { year: 2018, month: 1 }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

fn invalid(msg: String) -> SynthError {
    SynthError::InvalidConfig(msg)
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let prob = |x: f64| (0.0..=1.0).contains(&x);
        if self.months == 0 {
            return Err(invalid("months must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.repeat_prob) || !(0.0..1.0).contains(&self.noise_rate) {
            return Err(invalid("repeat_prob and noise_rate must lie in [0, 1)".into()));
        }
        if self.female_names.is_empty() || self.male_names.is_empty() {
            return Err(invalid("name pools must not be empty".into()));
        }
        for name in self.female_names.iter().chain(&self.male_names) {
            if name.is_empty() || !name.chars().all(char::is_alphabetic) {
                return Err(invalid(format!("name stem {name:?} must be alphabetic")));
            }
        }
        if self.subreddits.is_empty() {
            return Err(invalid("no subreddits".into()));
        }
        let mut subs = BTreeSet::new();
        for s in &self.subreddits {
            if !prob(s.female_activity) || !prob(s.male_activity) {
                return Err(invalid(format!("activity of {} outside [0, 1]", s.name)));
            }
            if s.name.is_empty() || !subs.insert(s.name.as_str()) {
                return Err(invalid(format!("subreddit name {:?} empty or repeated", s.name)));
            }
        }
        let mut terms = BTreeSet::new();
        for v in &self.vocabulary {
            if !(v.rate > 0.0 && v.rate < 1.0) {
                return Err(invalid(format!("rate of {:?} outside (0, 1)", v.term)));
            }
            if tokenize(&v.term) != [v.term.clone()] {
                return Err(invalid(format!("term {:?} is not a single lowercase word", v.term)));
            }
            if !terms.insert(v.term.as_str()) {
                return Err(invalid(format!("term {:?} repeated", v.term)));
            }
        }
        for e in &self.planted_effects {
            if !terms.contains(e.term.as_str()) || !subs.contains(e.subreddit.as_str()) {
                return Err(invalid(format!("planted effect {}/{} not in vocabulary/subreddits", e.subreddit, e.term)));
            }
            if !e.shift.is_finite() {
                return Err(invalid(format!("planted effect {}/{} has a non-finite shift", e.subreddit, e.term)));
            }
        }
        Ok(())
    }

    /// Checks that every name stem resolves to its intended gender.
    pub fn check_pools(&self, lexicon: &GenderLexicon) -> Result<(), SynthError> {
        let pools = [(Gender::Female, &self.female_names), (Gender::Male, &self.male_names)];
        for (gender, pool) in pools {
            for stem in pool {
                let probe = format!("{stem}1");
                if infer_gender(&probe, lexicon).gender() != Some(gender) {
                    return Err(invalid(format!("name stem {stem:?} does not resolve to {gender}")));
                }
            }
        }
        Ok(())
    }

    /// Female presence rate of `term` in `subreddit`.
    pub fn female_rate(&self, term: &str, subreddit: &str) -> f64 {
        let base = self.base_rate(term);
        match self.planted_effects.iter().find(|e| e.term == term && e.subreddit == subreddit) {
            Some(e) => shifted_rate(base, e.shift),
            None => base,
        }
    }

    pub fn base_rate(&self, term: &str) -> f64 {
        self.vocabulary.iter().find(|v| v.term == term).map_or(0.0, |v| v.rate)
    }
}

pub fn logit(p: f64) -> f64 {
    libm::log(p / (1.0 - p))
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

/// `logistic(logit(base) + shift)`.
pub fn shifted_rate(base: f64, shift: f64) -> f64 {
    logistic(logit(base) + shift)
}

/// Planted truth for a generated corpus.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    /// (subreddit, term) pairs with a nonzero shift, and the favoured gender.
    pub gendered: BTreeMap<(String, String), Gender>,
    /// Every author's true gender; `None` for deliberately unmatched names.
    pub authors: BTreeMap<String, Option<Gender>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub comments: Vec<Comment>,
    pub truth: GroundTruth,
}

/// Calls `hit` for each index in `0..n` independently with probability `p`,
/// jumping between hits with geometric gaps.
fn for_each_hit<R: Rng>(rng: &mut R, n: usize, p: f64, mut hit: impl FnMut(usize)) {
    if n == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..n).for_each(hit);
        return;
    }
    let log_q = libm::log1p(-p);
    let mut i = 0usize;
    while i < n {
        let u: f64 = 1.0 - rng.gen::<f64>();
        let gap = libm::floor(libm::log(u) / log_q);
        if gap >= (n - i) as f64 {
            break;
        }
        i += gap as usize;
        hit(i);
        i += 1;
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Noise {
    None,
    Deleted,
    Url,
}

/// Generates the corpus described by `cfg`. Same config, same bytes.
pub fn generate_corpus(cfg: &SynthConfig) -> Result<SynthCorpus, SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut truth = GroundTruth::default();
    for e in &cfg.planted_effects {
        if e.shift != 0.0 {
            let dir = if e.shift > 0.0 { Gender::Female } else { Gender::Male };
            truth.gendered.insert((e.subreddit.clone(), e.term.clone()), dir);
        }
    }

    let mut users: Vec<(String, Option<Gender>)> = Vec::new();
    let total_gendered = cfg.n_female_users + cfg.n_male_users;
    for i in 0..total_gendered {
        let (gender, pool) =
            if i < cfg.n_female_users { (Gender::Female, &cfg.female_names) } else { (Gender::Male, &cfg.male_names) };
        let stem = &pool[rng.gen_range(0..pool.len())];
        users.push((format!("{stem}{}", 1000 + i), Some(gender)));
    }
    for i in 0..cfg.n_ungendered_users {
        users.push((format!("_anon{i}"), None));
    }
    for (name, gender) in &users {
        truth.authors.insert(name.clone(), *gender);
    }

    // Comment skeletons: (user, subreddit index, time, noise).
    let mut skeletons: Vec<(usize, usize, i64, Noise)> = Vec::new();
    let mut month = cfg.start_month;
    for _ in 0..cfg.months {
        let start = month.start_utc();
        let span = month.seconds();
        for (u, (_, gender)) in users.iter().enumerate() {
            for (s, spec) in cfg.subreddits.iter().enumerate() {
                let activity = match gender {
                    Some(Gender::Female) => spec.female_activity,
                    Some(Gender::Male) => spec.male_activity,
                    None => 0.5 * (spec.female_activity + spec.male_activity),
                };
                if !rng.gen_bool(activity) {
                    continue;
                }
                loop {
                    let t = start + rng.gen_range(0..span);
                    let noise = if cfg.noise_rate > 0.0 && rng.gen_bool(cfg.noise_rate) {
                        if rng.gen_bool(0.5) {
                            Noise::Deleted
                        } else {
                            Noise::Url
                        }
                    } else {
                        Noise::None
                    };
                    skeletons.push((u, s, t, noise));
                    if cfg.repeat_prob == 0.0 || !rng.gen_bool(cfg.repeat_prob) {
                        break;
                    }
                }
            }
        }
        month = month.next();
    }

    // Group comment indices by (subreddit, gender slot) so each term is drawn per group.
    let slot = |g: Option<Gender>| match g {
        Some(Gender::Female) => 0,
        Some(Gender::Male) => 1,
        None => 2,
    };
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); cfg.subreddits.len() * 3];
    for (idx, (u, s, _, _)) in skeletons.iter().enumerate() {
        groups[s * 3 + slot(users[*u].1)].push(idx);
    }
    let mut terms: Vec<Vec<u32>> = vec![Vec::new(); skeletons.len()];
    for (j, v) in cfg.vocabulary.iter().enumerate() {
        for (s, spec) in cfg.subreddits.iter().enumerate() {
            let female_rate = cfg.female_rate(&v.term, &spec.name);
            for (g, rate) in [(0, female_rate), (1, v.rate), (2, v.rate)] {
                let members = &groups[s * 3 + g];
                for_each_hit(&mut rng, members.len(), rate, |k| terms[members[k]].push(j as u32));
            }
        }
    }

    let comments = skeletons
        .into_iter()
        .zip(terms)
        .enumerate()
        .map(|(idx, ((u, s, created_utc, noise), words))| {
            let id = format!("s{idx:x}");
            let body = match noise {
                Noise::Deleted => String::from("[deleted]"),
                Noise::Url => format!("https://example.com/{id}"),
                Noise::None if words.is_empty() => String::from(EMPTY_BODY),
                Noise::None => {
                    let mut body = String::new();
                    for (k, j) in words.iter().enumerate() {
                        if k > 0 {
                            body.push(' ');
                        }
                        body.push_str(&cfg.vocabulary[*j as usize].term);
                    }
                    body
                }
            };
            Comment { id, author: users[u].0.clone(), subreddit: cfg.subreddits[s].name.clone(), created_utc, body }
        })
        .collect();
    Ok(SynthCorpus { comments, truth })
}

/// Discovery accounting against planted truth.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FdrOutcome {
    pub discoveries: usize,
    pub false_discoveries: usize,
    /// Planted pairs found with the right direction.
    pub true_discoveries: usize,
    pub planted: usize,
    /// False discoveries over `max(1, discoveries)`.
    pub fdr: f64,
    /// True discoveries over planted pairs; 0 when nothing was planted.
    pub recall: f64,
}

/// Scores the significant terms of a set of runs. A discovery with the wrong
/// direction counts as false.
pub fn empirical_fdr<'a, I>(runs: I, truth: &GroundTruth) -> FdrOutcome
where
    I: IntoIterator<Item = &'a AssociationRun>,
{
    let mut out = FdrOutcome { planted: truth.gendered.len(), ..Default::default() };
    for run in runs {
        for t in run.significant() {
            out.discoveries += 1;
            let key = (run.subreddit.clone(), t.term.clone());
            if truth.gendered.get(&key) == Some(&t.direction) {
                out.true_discoveries += 1;
            } else {
                out.false_discoveries += 1;
            }
        }
    }
    out.fdr = out.false_discoveries as f64 / out.discoveries.max(1) as f64;
    out.recall = if out.planted == 0 { 0.0 } else { out.true_discoveries as f64 / out.planted as f64 };
    out
}

/// Alphabetic pseudo-word for vocabulary index `i` (`vaa`, `vab`, ...).
pub fn pseudo_word(i: usize) -> String {
    let mut letters = Vec::new();
    let mut n = i;
    loop {
        letters.push(b'a' + (n % 26) as u8);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    while letters.len() < 2 {
        letters.push(b'a');
    }
    letters.push(b'v');
    letters.reverse();
    String::from_utf8(letters).expect("ascii")
}
