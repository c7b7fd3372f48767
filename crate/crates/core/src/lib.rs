//! Pareto-NRPA: nested rollout policy adaptation for multi-objective
//! discrete optimization.
//!
//! The crate is organised bottom-up:
//!
//! - [`pareto`]: dominance, non-dominated sorting, crowding distance and the
//!   non-dominated archive.
//! - [`problem`]: the sequential decision problem abstraction, with the
//!   bi-objective TSP with time windows in [`tsptw`], small enumerable trees in
//!   [`toy`] and exhaustive front enumeration in [`oracle`].
//! - [`policy`] and [`search`]: softmax playouts, policy adaptation, classical
//!   single-objective NRPA and the multi-policy Pareto variant.
//! - [`metrics`]: hypervolume, overall spread, spacing and run aggregation.
//! - [`experiment`]: seeded, budgeted experiment runs and report emission.

pub mod error;
pub mod experiment;
pub mod metrics;
pub mod oracle;
pub mod pareto;
pub mod policy;
pub mod problem;
pub mod search;
pub mod toy;
pub mod tsptw;

pub use error::{Error, Result};
pub use pareto::{ObjectiveVector, ParetoArchive, Solution};
pub use policy::{PolicySet, PolicyTable};
pub use problem::{Evaluation, Problem};
pub use search::{AdaptStrategy, EvalCounter, SearchConfig};

/// Seedable generator used for every stochastic decision in a run.
///
/// ChaCha8 is portable across platforms and stable across `rand_chacha`
/// patch releases, so a seed fully determines a run.
pub type SearchRng = rand_chacha::ChaCha8Rng;

/// Identifier of [`SearchRng`] written into report metadata.
pub const RNG_NAME: &str = "ChaCha8Rng/rand_chacha-0.3";
