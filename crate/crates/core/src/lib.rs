//! Credible evidence fusion over agent networks.
//!
//! The crate implements two fusion pipelines over the same evidence algebra:
//!
//! * **CCEF** — centralized credible evidence fusion: pairwise evidence
//!   differences, credibility scoring, discounting, and Dempster combination,
//!   all computed with every piece of evidence in one place.
//! * **PCEF** — the privacy-preserving distributed counterpart. Neighboring
//!   agents compute pairwise differences through two-party protocols that
//!   never expose raw evidence, localize the partial difference matrix by
//!   consensus, recover the missing entries with rank-adaptive low-rank
//!   completion, and fuse by average consensus over weight assignments with
//!   self-canceling noise and credibility compensation.
//!
//! Numeric kernels are generic over the [`scalar::Real`] scalar; the aliases
//! below fix `f64`, the working precision of the shipped pipelines.

pub mod baseline;
pub mod completion;
pub mod edm;
pub mod error;
pub mod evidence;
pub mod fusion;
pub mod io;
pub mod network;
pub mod protocol;
pub mod scalar;
pub mod scenario;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision aliases used by the harness, the CLI, and most callers.
pub type MassFunction64 = evidence::MassFunction<f64>;
pub type PignisticVector64 = evidence::PignisticVector<f64>;
pub type CommonalityVector64 = evidence::CommonalityVector<f64>;
pub type WeightAssignment64 = evidence::WeightAssignment<f64>;
pub type Credibility64 = evidence::Credibility<f64>;
pub type Edmm64 = edm::Edmm<f64>;
pub type PartialEdmm64 = network::PartialEdmm<f64>;
pub type ConsensusMatrix64 = network::ConsensusMatrix<f64>;
pub type CompletionParams64 = completion::CompletionParams<f64>;
pub type CcefResult64 = baseline::CcefResult<f64>;
