//! Two degenerate cavity modes coupled to a two-level atom under pure phase
//! decoherence.
//!
//! The crate provides:
//!
//! * [`linalg`] — a self-contained dense complex kernel (Jacobi Hermitian
//!   eigensolver, PSD square root, Kronecker products, partial traces);
//! * [`model`] — parameters, the excitation-truncated number basis and all
//!   operators of the model;
//! * [`dynamics`] — the dephasing master equation solved two independent
//!   ways (fixed-step RK4 and an exact spectral propagator), plus the
//!   series-weight operators in spectral and algebraic form;
//! * [`closedform`] — the exact solution for vacuum-field initial states
//!   and the entanglement/probability formulas that follow from it;
//! * [`entanglement`] — Wootters concurrence and the reductions of the full
//!   state to effective qubit pairs;
//! * [`cli`] — the command-line front end (figures, verify, evolve, steady).

pub mod cli;
pub mod closedform;
pub mod dynamics;
pub mod entanglement;
pub mod linalg;
pub mod model;

#[cfg(test)]
pub(crate) mod oracles;

pub use linalg::{ComplexMatrix, DensityMatrix};
pub use model::{FockAtomBasis, ModelParams};
