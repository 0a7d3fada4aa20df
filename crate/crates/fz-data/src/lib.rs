//! Dataset preparation: fusing class directories into a two-class manifest,
//! deterministic stratified splitting, PPM/PGM image loading, augmentation
//! with the standard ImageNet normalization, synthetic corpus generation,
//! and batch iteration.

#![forbid(unsafe_code)]

mod augment;
mod batch;
mod error;
mod fuse;
mod manifest;
mod ppm;
mod split;
mod synthetic;

pub use augment::{augment, denormalize, hflip, normalize, resize_bilinear, AugmentConfig};
pub use batch::{batch_iter, Batch, BatchIter, BatchSettings};
pub use error::{DataError, Result};
pub use fuse::{fuse_datasets, FuseDirs};
pub use manifest::{ClassCounts, DatasetManifest, Label, Modality, SampleRecord, Split};
pub use ppm::{load_image, write_ppm};
pub use split::split_dataset;
pub use synthetic::{generate_synthetic, SyntheticSpec};
