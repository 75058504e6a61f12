//! Numerical toolkit for the correspondence between inhomogeneous twisted
//! XXX spin chains and the classical Ruijsenaars-Schneider (RS) particle
//! system, together with its non-relativistic limit: the Gaudin magnet and
//! the Calogero-Moser (CM) system.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensorspace`]: dense operators on `(C^2)^N`, magnon sectors, the
//!   Heisenberg Hamiltonian.
//! * [`chain`]: L-operator, R-matrix, transfer matrix, non-local and Gaudin
//!   Hamiltonians.
//! * [`spectra`]: exact diagonalization, joint spectra sector by sector.
//! * [`classical`]: RS/CM Lax matrices, characteristic polynomials, integrals
//!   of motion and trajectory integration.
//! * [`duality`]: forward checks of the spectral correspondence and the
//!   inverse polynomial system for the quantum eigenvalues.
//! * [`bethe`]: Bethe equations and eigenvalue formulas, cross-checked against
//!   exact diagonalization.
//! * [`checks`]: a compact invariant battery used by the command line tool.

pub mod bethe;
pub mod chain;
pub mod checks;
pub mod classical;
pub mod duality;
pub mod linalg;
pub mod spectra;
pub mod tensorspace;

pub use num_complex::Complex64 as C64;

pub use chain::{ChainParams, GaudinParams};
pub use classical::{ClassicalState, LaxKind, LaxMatrix, PolyCoeffs};
pub use duality::{DualityReport, InverseSolution};
pub use spectra::JointSpectrumRecord;
pub use tensorspace::{QuantumOperator, SectorBasis};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<C64>;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("site index {site} out of range 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },
    #[error("need at least {min} sites, got {sites}")]
    TooFewSites { sites: usize, min: usize },
    #[error("{sites} sites exceeds the dense limit of {max}")]
    TooManySites { sites: usize, max: usize },
    #[error("permutation needs two distinct sites, got {0} twice")]
    SameSite(usize),
    #[error("sector M={m} out of range 0..={n}")]
    SectorOutOfRange { m: usize, n: usize },
    #[error("points {i} and {j} coincide")]
    CoincidentPoints { i: usize, j: usize },
    #[error("points {i} and {j} differ by +-eta (not in general position)")]
    ShiftCollision { i: usize, j: usize },
    #[error("deformation parameter eta must be nonzero")]
    ZeroEta,
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite input")]
    NonFinite,
    #[error("eigensolver did not converge on a {dim}x{dim} matrix")]
    EigenNoConvergence { dim: usize },
    #[error("random combination stayed degenerate after {attempts} draws")]
    DegenerateCombination { attempts: usize },
    #[error("ordered-product and residue Hamiltonians disagree at site {site} by {deviation:e}")]
    HamiltonianMismatch { site: usize, deviation: f64 },
    #[error("velocity of particle {i} is zero; momentum undefined")]
    ZeroVelocity { i: usize },
    #[error("trajectory came within tolerance of the singular set (pair {i},{j}) at t = {time}")]
    NearCollision { time: f64, i: usize, j: usize, last: Box<classical::ClassicalState> },
    #[error("interpolation nodes are not distinct")]
    RepeatedNodes,
    #[error("newton iteration failed from all {starts} starts")]
    NoConvergence { starts: usize },
    #[error("records do not belong to the given parameters: {0}")]
    ParamsMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
