//! Quantum potential and generalized uncertainty bounds.
//!
//! A pure state is handled in polar form ψ = Ω·exp(iS/ħ) sampled on a uniform
//! grid of dimension at most 3. From it the crate computes the quantum
//! potential Q, its mean value ⟨Q⟩, the matrix **Q**, the nonclassical
//! momentum covariance Ṽnc, the classical/nonclassical split of the momentum
//! covariance, and the family of lower bounds L_Q(T₀) on ⟨Q⟩. Gaussian states
//! are also treated exactly through their symplectic matrices, and mixed
//! states through convex decompositions and 1-D density grids.

pub mod error;
pub mod bounds;
pub mod covariance;
pub mod figures;
pub mod gaussian;
pub mod mixed;
pub mod numerics;
pub mod specfun;
pub mod qpotential;
pub mod states;

pub use error::{Error, Result};
