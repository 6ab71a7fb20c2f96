//! Online resource reservation in a network of servers with inter-server job
//! transfers.
//!
//! Each time slot an operator reserves an integer number of resource units
//! per server, observes the job requests, moves surplus jobs between servers
//! at a transfer cost and pays a violation cost for every job left unserved.
//! The crate provides:
//!
//! - [`model`]: action/request spaces, polynomial cost families, total cost
//!   evaluation and the uniform per-component cost bound.
//! - [`transfer`]: an exact integer solver for the per-slot job-transfer
//!   problem plus a brute-force oracle.
//! - [`ew_policy`]: the exponentially weighted randomized policy in its
//!   full-information, discounted and budget-limited (random exploration)
//!   forms.
//! - [`rl_policy`]: a softmax n-armed bandit baseline.
//! - [`harness`]: request scenarios, regret accounting, the high-probability
//!   regret bound and the experiment loop.
//! - [`cli`]: config files, CSV/manifest persistence and the `netreserve`
//!   subcommands.

pub mod cli;
pub mod distribution;
pub mod error;
pub mod ew_policy;
pub mod harness;
pub mod model;
pub mod policy;
pub mod rl_policy;
pub mod transfer;

pub use distribution::Distribution;
pub use error::{Error, Result};
pub use model::{
    ActionSpace, CostBreakdown, CostEvaluator, CostModel, CostTable, ExactCosts, IntBox,
    Polynomial, RequestBounds, RequestVector, ReservationVector,
};
pub use policy::{Observation, ReservationPolicy};
pub use transfer::{TransferPlan, TransferSolution};

/// Deterministic generator used for every random draw in a run.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Version string recorded in run manifests.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
