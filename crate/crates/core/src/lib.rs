//! Entanglement witnesses for N-qubit Dicke states.
//!
//! The crate builds diagonal witnesses of the form `Σ_i ω_i Π_i − |D^N_k⟩⟨D^N_k|`
//! (with `Π_i` the projector onto the `i`-excitation sector), computes their
//! white-noise tolerance, and certifies them spectrally by taking partial
//! transposes over qubit subsets.
//!
//! Layout:
//! - [`combinatorics`]: exact binomials and the brute-force overlap oracles.
//! - [`dicke`]: Dicke vectors, sector projectors, Schmidt coefficients.
//! - [`witness`]: closed-form witness families.
//! - [`upsilon`]: biseparable-overlap maximization for W-state witnesses.
//! - [`verification`]: dense partial transposes, eigenvalues, PPT reports.
//! - [`robustness`]: critical noise fractions and comparison tables.

pub mod combinatorics;
pub mod dicke;
pub mod error;
pub mod robustness;
pub mod upsilon;
pub mod verification;
pub mod witness;

pub use combinatorics::{binomial, BinomialTable, Rational};
pub use dicke::{DickeSpec, SchmidtDecomposition, StateVector};
pub use error::{Error, Result};
pub use robustness::RobustnessRecord;
pub use upsilon::UpsilonResult;
pub use verification::{DenseSymmetric, PptReport};
pub use witness::{DiagonalWitness, Family, LambdaMax};
