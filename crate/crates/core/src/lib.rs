//! Statistical distances, quantum Fisher information and speed-limit checks
//! for finite-dimensional quantum systems.
//!
//! Reduced Planck's constant is an explicit `hbar` argument wherever a
//! generator is turned into a unitary; pass `1.0` for natural units.

pub mod counterexample;
pub mod distances;
pub mod error;
pub mod information;
pub mod linalg;
pub mod sampling;
pub mod search;
pub mod speedlimit;

pub use distances::{DensityMatrix, DistanceConvention, ProbDist, PureState};
pub use error::{Error, Result};
pub use information::{Observable, Povm, QfiGap};
pub use linalg::{c64, ComplexMatrix, SpectralDecomposition, C64};
pub use speedlimit::{BoundReport, CurvePoint, EvolutionScenario, QuantumState, RateReport};
