//! Simulation and verification laboratory for random walk in random scenery
//! (RWRS) with stretched-exponential sceneries.
//!
//! The walk `S` is a simple symmetric walk on `Z^d` started at the origin and
//! the scenery `(Y_z)` is an i.i.d. field with Weibull-type upper tails. The
//! process of interest is
//!
//! ```text
//! Z_n = sum_{k<n} Y_{S_k} = sum_z Y_z * l_n(z)
//! ```
//!
//! where `l_n(z)` is the local time of the walk at `z`. The crate provides
//!
//! * [`scenery`]: exact scenery laws with closed-form tails and samplers,
//! * [`walk`]: lattice walks with local-time tracking and return-time sampling,
//! * [`rates`]: scale functions, rate functions and asymptotic constants,
//! * [`estimators`]: rare-event estimators for `P(Z_n > n t)` and relatives,
//! * [`oracle`]: exact and high-precision small-scale reference computations,
//! * [`mc`]: seeded, shard-independent Monte Carlo plumbing.

pub mod error;
pub mod estimators;
pub mod mc;
pub mod oracle;
pub mod rates;
pub mod scenery;
pub mod special;
pub mod walk;

pub use error::{Error, Result};
pub use estimators::{Method, TailEstimate, WeightedSumBound};
pub use mc::McConfig;
pub use rates::RateParams;
pub use scenery::{Family, SceneryDist};
pub use walk::{LocalTimeField, ReturnTimes, WalkKind, WalkSpec};

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
