//! Bell (CH, CHSH) and Leggett-type inequalities for biased and unsharp
//! spin measurements, applied to entangled hyperon pairs whose weak decays
//! act as POVMs with unsharpness equal to the decay asymmetry `α`.
//!
//! Layers, bottom up:
//!
//! - [`quantum`]: directions, Pauli algebra, two-qubit states.
//! - [`povm`]: measurement elements `(1 + jη + jα σ·n)/2` and decay Kraus
//!   operators built from S/P-wave amplitudes.
//! - [`geometry`]: the triple-measurement settings for the Leggett test.
//! - [`correlations`]: closed-form predictions plus 4×4 trace oracles.
//! - [`inequalities`]: bound evaluators and closed-form violation conditions.
//! - [`catalog`]: hyperon decay table and η_c / χ_c0 production channels.
//! - [`simulation`]: event generation, estimators, event files.
//! - [`lhv`]: a local hidden-variable model that must never violate.
//! - [`analysis`]: predictions, scans, simulation summaries, self-checks.
//!
//! Runnable examples live in `examples/`, one per capability:
//! `povm_measurement`, `settings_geometry`, `bell_povm`, `leggett_scan`,
//! `chi_c0_parity`, `event_simulation`, `local_model`.
//!
//! ```
//! use leggett_povm::catalog::Catalog;
//! use leggett_povm::inequalities::{leggett_violation_condition, max_leggett_lhs};
//!
//! let ch = Catalog::builtin().resolve("SigmaPlus").unwrap();
//! let (a, b) = (ch.alpha_a(), ch.alpha_b());
//! assert!(leggett_violation_condition(a, b));
//! assert!((max_leggett_lhs(a, b) - 2.0289).abs() < 1e-4);
//! ```

// `!(x <= tol)` is used on purpose so that NaN counts as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops over parallel setting triples read better than zipped iterators.
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod catalog;
pub mod correlations;
pub mod error;
pub mod geometry;
pub mod inequalities;
pub mod lhv;
pub mod povm;
pub mod quantum;
pub mod simulation;

pub use error::{Error, Result};
pub use quantum::Direction;
