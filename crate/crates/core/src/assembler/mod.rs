//! Threshold search, assembly of `H(f)` and classification of levels.

pub mod analyze;
pub mod assemble;
pub mod hset;
pub mod threshold;

pub use hset::{
    classify_t, component_bound, component_count_check, Classification, HSet, HSource, Interval,
    StabilityLabel,
};
pub use threshold::{snap_to, threshold_with, LevelVerdict, ThresholdEstimate};
pub use analyze::{analyze, assemble_H, classify_levels, Analysis, Checks, LevelReport};
pub use assemble::{assemble_in, level_scan, Assembly, EndpointEvidence, PunctureCheck, ScanEntry};
