use thiserror::Error;

/// Errors surfaced by the fusion pipeline and its building blocks.
#[derive(Debug, Error)]
pub enum Error {
    /// A commonality vector did not invert to a valid mass function.
    #[error("not a mass function: {0}")]
    NonMass(String),

    /// Weight assignments are undefined for dogmatic evidence (no mass on
    /// the full frame).
    #[error("dogmatic evidence: mass on the full frame is below 1e-12")]
    DogmaticEvidence,

    /// Dempster combination met (numerically) total conflict.
    #[error("total conflict: no common support left after combination")]
    TotalConflict,

    /// Two vectors that must agree in length do not.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// The pairwise difference protocol was asked to run across a non-edge.
    #[error("agents {0} and {1} are not neighbors")]
    NotNeighbors(usize, usize),

    /// The communication graph must be connected.
    #[error("graph is not connected")]
    DisconnectedGraph,

    /// The retraction could not produce the requested rank.
    #[error("rank collapse: wanted rank {expected}, only {got} usable singular values")]
    RankCollapse { expected: usize, got: usize },

    /// A rank-increase direction vanished on the observed mask.
    #[error("degenerate rank-increase direction on the observed mask")]
    DegenerateDirection,

    /// Consensus states did not agree tightly enough to finalize.
    #[error("consensus not reached: max state gap {gap:e} exceeds {tol:e}")]
    NotConverged { gap: f64, tol: f64 },

    /// A noise schedule with zero scale would have no finite-time effect.
    #[error("noise scale must be positive for a finite-time-effect schedule")]
    ZeroNoise,

    /// Bad run configuration (unknown key, unparsable value, out of range).
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
