//! Monte Carlo decay events and the estimators that turn them back into
//! correlation functions.

pub mod estimator;
pub mod io;
pub mod sampler;
pub mod stats;

pub use estimator::{
    estimate_correlation, estimate_correlation_hemisphere, estimate_leggett_lhs, ErrorMethod, EstimatedCorrelation,
    LeggettEstimate, MIN_EVENTS,
};
pub use io::{read_events, write_events};
pub use sampler::{sample_pair_decay, sample_single_decay, sample_single_decays, EventSample};
pub use stats::ks_uniform;
