use std::io;
use std::path::{Path, PathBuf};

use keyness_core::genderlex::LexiconError;
use keyness_core::synth::SynthError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    FileUnreadable { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    FileUnwritable { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}:{line}: {message}")]
    Format { path: PathBuf, line: usize, message: String },
    #[error("{path}: {source}")]
    Lexicon { path: PathBuf, source: LexiconError },
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn unreadable(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::FileUnreadable { path: path.to_path_buf(), source }
}

pub(crate) fn unwritable(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::FileUnwritable { path: path.to_path_buf(), source }
}

pub(crate) fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

pub(crate) fn json_err(path: &Path) -> impl FnOnce(serde_json::Error) -> Error + '_ {
    move |source| Error::Json { path: path.to_path_buf(), source }
}
