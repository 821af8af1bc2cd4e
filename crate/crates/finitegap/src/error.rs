//! Crate-wide error type. Variants carry the originating subsystem in their
//! message so CLI consumers can map failures to diagnostics without matching
//! on structure.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("elliptic: degenerate lattice (Im(omega3/omega1) = {imag_ratio:e} not positive beyond precision)")]
    DegenerateLattice { imag_ratio: f64 },

    #[error("elliptic: precision {0:e} outside (0, 1e-4]")]
    InvalidPrecision(f64),

    #[error("elliptic: argument within {tol:e} of a lattice pole")]
    PoleAtLatticePoint { tol: f64 },

    #[error("elliptic: alpha lies on the period lattice")]
    AlphaOnLattice,

    #[error("{context}: iteration failed to converge after {iters} steps (last residual {residual:e})")]
    NoConvergence {
        context: &'static str,
        iters: usize,
        residual: f64,
    },

    #[error("model: evaluation point within tolerance of a potential singularity")]
    PoleAtSingularity,

    #[error("model: characteristic roots differ by {observed:?}, expected the integer gap {expected}")]
    ResonanceMismatch { expected: u32, observed: (f64, f64) },

    #[error("model: b1 coincides with a branch point e_i")]
    B1AtBranchPoint,

    #[error("model: invalid potential spec: {0}")]
    InvalidSpec(String),

    #[error("deltas: iterate left the admissible set ({0})")]
    ConstraintViolation(String),

    #[error("xi: singular pair {pair} is not apparent at this E (frobenius residual {residual:e})")]
    NotApparent { pair: usize, residual: f64 },

    #[error("xi: nullspace of the product-equation system is empty")]
    EmptyNullspace,

    #[error("xi: deltas fail the stationarity residual test (max residual {0:e})")]
    DeltasNotApparent(f64),

    #[error("xi: family construction degenerate ({0})")]
    DegenerateFamily(String),

    #[error("monodromy: dimension of even doubly-periodic solutions is two at this E")]
    DegenerateFamilyE,

    #[error("monodromy: eigenfunction magnitude below precision at the evaluation point")]
    ZeroEigenfunction,

    #[error("monodromy: integration path passes within {dist:e} of a zero or pole of Xi")]
    PathThroughSingularity { dist: f64 },

    #[error("monodromy: lost the branch of {what} during continuation")]
    BranchTrackingFailure { what: &'static str },

    #[error("monodromy: E-path passes within {dist:e} of a branch point of sqrt(-Q)")]
    PathThroughBranchPoint { dist: f64 },

    #[error("monodromy: expected {expected} Bethe roots, found {found}")]
    RootCountMismatch { expected: usize, found: usize },

    #[error("monodromy: rational fit ill-conditioned ({0})")]
    FitIllConditioned(String),

    #[error("painleve: denominator vanishes at this tau")]
    DenominatorVanishes,

    #[error("painleve: l-family {0:?} not supported by the closed-form map")]
    UnsupportedLFamily([u32; 4]),

    #[error("painleve: delta1 branch jumped across the stencil (step {step:e})")]
    BranchJumpDetected { step: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
