//! File formats, parallel pipeline stages and the `keyness` command line on
//! top of `keyness-core`.

pub mod assoc;
pub mod error;
pub mod ingest;
pub mod lexicon;
pub mod pipeline;
pub mod report;
pub mod samples;
pub mod simil;
pub mod synth;
pub mod tables;

pub use error::{Error, Result};
pub use pipeline::{run, RunConfig, RunOutput};
