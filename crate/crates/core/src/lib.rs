//! Exact-arithmetic engine for local Levi normal forms of polynomial-truncated
//! Poisson structures and Lie algebroids.
//!
//! The crate computes, over the rationals (or Gaussian rationals), a coordinate
//! change that brings a Poisson bracket table with semisimple-times-solvable
//! linear part into Levi normal form: the brackets between Levi-block
//! coordinates, and between Levi-block and radical-block coordinates, become
//! exactly linear up to the truncation degree. The iteration solves one
//! Chevalley-Eilenberg cohomology problem per degree window, using explicit
//! Casimir-based homotopy operators, and doubles the normalized degree range
//! at every step.
//!
//! All algebra is exact; floating point appears only in norm diagnostics.
//! The crate is `no_std` (with `alloc`); IO, serialization and the command
//! line live in the companion `levinorm-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algebroid;
pub mod cohom;
pub mod levi;
pub mod liealg;
pub mod linalg;
pub mod modp;
pub mod poisson;
pub mod poly;
pub mod sample;
pub mod scalar;
pub mod window;

pub use algebroid::AlgebroidData;
pub use cohom::Cochain;
pub use levi::{LeviRunState, NormalizeOptions, NormalizeOutcome, Schedule};
pub use poisson::PoissonTable;
pub use liealg::{CasimirElement, LeviAlgebraData, StructureConstants};
pub use poly::{Monomial, PolyMap, Polynomial};
pub use scalar::{GaussRat, Rat, Scalar};
pub use window::{ModuleWindow, WindowKind};

/// Errors shared across the engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Operands disagree on variable count or block layout.
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// An argument violated a documented precondition.
    InvalidArgument(alloc::string::String),
    /// Structure constants fail a Lie-algebra invariant.
    InvalidAlgebra(alloc::string::String),
    /// The declared Levi factor has a degenerate Killing form.
    NotSemisimple,
    /// A map expected to be `Id + higher order` is not.
    NotNearIdentity,
    /// A cochain expected to be a cocycle is not; carries the slot where the
    /// defect was detected.
    NotACocycle(alloc::string::String),
    /// A linear system expected to be consistent is not.
    NotACoboundary,
    /// The bracket table is not Poisson to the required order.
    NotPoisson {
        i: usize,
        j: usize,
        k: usize,
    },
    /// Requested step count does not fit inside the truncation degree.
    ScheduleError(alloc::string::String),
    /// Internal invariant violated (indicates invalid input further up).
    Internal(alloc::string::String),
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InvalidAlgebra(msg) => write!(f, "invalid Lie algebra data: {msg}"),
            Error::NotSemisimple => write!(f, "Levi factor not semisimple (Killing form degenerate)"),
            Error::NotNearIdentity => write!(f, "map is not of the form Id + (degree >= 2)"),
            Error::NotACocycle(msg) => write!(f, "not a cocycle: {msg}"),
            Error::NotACoboundary => write!(f, "linear system inconsistent: not a coboundary"),
            Error::NotPoisson { i, j, k } => {
                write!(f, "Jacobi identity fails on triple ({i}, {j}, {k})")
            }
            Error::ScheduleError(msg) => write!(f, "schedule error: {msg}"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
