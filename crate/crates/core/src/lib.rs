//! Greedy sparse approximation over finite normalized dictionaries.
//!
//! The crate runs Pure Greedy, Orthogonal Matching Pursuit and its weak
//! variant with exact projections, computes restricted isometry and
//! coherence constants, finds best `n`-term approximations by exhaustive
//! search, and checks the recovery and instance-optimality inequalities of
//! greedy algorithms on concrete instances.
//!
//! Every numerical routine is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, which is what the file
//! formats and the command-line tool use.

pub mod analysis;
pub mod combinations;
pub mod dictionary;
pub mod error;
pub mod greedy;
pub mod io;
pub mod oracle;
pub mod rip;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Dictionary = dictionary::Dictionary<f64>;
pub type SparseVector = dictionary::SparseVector<f64>;
pub type RipEstimate = rip::RipEstimate<f64>;
pub type GreedyConfig = greedy::GreedyConfig<f64>;
pub type GreedyTrace = greedy::GreedyTrace<f64>;
pub type Projection = greedy::Projection<f64>;
pub type OracleResult = oracle::OracleResult<f64>;

pub type Dictionary32 = dictionary::Dictionary<f32>;
pub type SparseVector32 = dictionary::SparseVector<f32>;
pub type GreedyTrace32 = greedy::GreedyTrace<f32>;

pub use analysis::{CheckReport, TheoremConstants};
pub use greedy::{Algorithm, SelectionMode};
pub use rip::RipKind;
