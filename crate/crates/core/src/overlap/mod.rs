//! Covering-word counts, the Monte Carlo overlap-number estimator and the
//! exact value spectrum.

pub mod count;
pub mod estimate;
pub mod spectrum;

pub use count::{count_covering_words, count_covering_words_at, CoverCount};
pub use estimate::{
    estimate_overlap_number, DepthRow, EstimateMethod, FitWindow, OverlapEstimate, OverlapParams, SlopeFit,
};
pub use spectrum::{multiplicity_entropy_bound, value_spectrum, SpectrumEntry, ValueSpectrum, DEFAULT_NODE_BUDGET};
