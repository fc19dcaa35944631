//! Multimodal crop-type classification at parcel level.
//!
//! The pipeline turns irregular, cloud-contaminated Earth-observation series
//! into smoothed per-season signals, extracts windowed statistical features,
//! and feeds them - together with crop rotation history and local crop
//! distribution - into a family of recurrent models that predict the crop
//! grown on a parcel in a target season. A hierarchical crop taxonomy drives
//! label aggregation for evaluation at several granularities.
//!
//! Module map:
//! - [`signal`]: Hampel outlier flagging, gap-filling, Whittaker smoothing
//!   with V-curve lambda selection and expectile (envelope) iteration.
//! - [`features`]: sliding-window statistical functionals, feature
//!   normalization, crop one-hot vocabulary, neighborhood crop distribution.
//! - [`taxonomy`]: hierarchical crop codes and threshold-driven label
//!   aggregation.
//! - [`kernels`]: dense math substrate - parameter arrays, layer
//!   forward/backward passes, LSTM cells, attention pooling, Adam.
//! - [`model`]: the eight classifier variants assembled from kernels.
//! - [`train`]: splits, mini-batch training, early-season augmentation,
//!   transfer and few-shot protocols.
//! - [`eval`]: multi-level metrics, confusion matrices, early-season curves.
//! - [`synth`]: synthetic multi-country dataset generation with known
//!   ground truth.
//! - [`ingest`]: dataset file formats and parcel record assembly.
//! - [`pipeline`]: glue that runs raw records through smoothing and
//!   featurization into model-ready samples.

pub mod eval;
pub mod features;
pub mod ingest;
pub mod kernels;
pub mod model;
pub mod pipeline;
pub mod rng;
pub mod signal;
pub mod synth;
pub mod taxonomy;
pub mod train;

/// Days per cropping season (Oct 1 of year n to Sep 30 of year n+1).
///
/// Leap days are ignored throughout: day-of-season 0 is always Oct 1 and a
/// season always spans 365 days, matching the fixed 4-day output grid.
pub const SEASON_DAYS: i64 = 365;

/// Output grid step for smoothed series, in days.
pub const OUTPUT_STEP_DAYS: i64 = 4;

/// Samples per season on the 4-day output grid: ceil(365 / 4).
pub const SEASON_GRID_LEN: usize = 92;
