use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot decode {path}: {reason}")]
    Decode { path: PathBuf, reason: String },

    #[error("class directory {0} contains no supported images (.ppm/.pgm)")]
    EmptyClassDir(PathBuf),

    #[error("directory {dir} is not under the manifest root {root}")]
    OutsideRoot { dir: PathBuf, root: PathBuf },

    #[error("duplicate relative path in manifest: {0}")]
    DuplicatePath(String),

    #[error("class {label} has only {count} samples; splitting needs at least 3")]
    InsufficientClassSamples { label: String, count: usize },

    #[error("split '{0}' contains no samples")]
    EmptySplit(String),

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error("manifest parse error in {path}: {reason}")]
    ManifestParse { path: PathBuf, reason: String },

    #[error(transparent)]
    Autodiff(#[from] fz_autodiff::AutodiffError),
}

impl DataError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, DataError>;
