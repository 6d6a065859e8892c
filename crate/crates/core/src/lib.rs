//! Allocation-only algorithms for finding terms that one group of commenters
//! uses significantly more often than another, forum by forum.
//!
//! The crate is `no_std` (it needs `alloc`). Reading dumps, writing tables and
//! the command line live in the `keyness` companion crate.
//!
//! The stages, in pipeline order:
//!
//! - [`ingest`]: comment records and the comment-level filters.
//! - [`genderlex`]: first-name lexicon from census name tables, username matching.
//! - [`sampler`]: one comment per (author, forum, month), chosen by keyed hash.
//! - [`termcount`]: tokenizer and per-forum, per-gender presence tables.
//! - [`assoc`]: 2x2 chi-squared tests, power pruning and Benjamini-Hochberg.
//! - [`simil`]: TF-IDF forum vectors, cosine similarity, average-linkage clustering.
//! - [`report`]: table rows and percentage rendering.
//! - [`synth`]: synthetic corpora with planted effects, for validation.
//! - [`analysis`]: the in-memory chain tying the stages together.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod assoc;
pub mod genderlex;
pub mod ingest;
pub mod report;
pub mod sampler;
pub mod simil;
pub mod synth;
pub mod termcount;

pub use assoc::{AssociationRun, TermAssociation};
pub use genderlex::{Gender, GenderLexicon, InferredGender};
pub use ingest::{Comment, IngestStats};
pub use sampler::{SampleKey, SampleMode, SampledComment, YearMonth};
pub use termcount::{SubredditStats, TermTable};
