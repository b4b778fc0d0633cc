//! Two-qubit concurrence and the reductions of the full model state to
//! effective qubit pairs.
//!
//! The concurrence of a two-qubit density matrix is
//! `C = max(λ₁ − λ₂ − λ₃ − λ₄, 0)` with the λᵢ the square roots, in
//! decreasing order, of the eigenvalues of
//! `R = ρ (σy⊗σy) ρ* (σy⊗σy)`. This module computes the spectrum through
//! the Hermitian route — the λᵢ² are the eigenvalues of `√ρ · ρ̃ · √ρ` —
//! which keeps everything on the Jacobi solver; see
//! [`TwoQubitState::concurrence_lambdas`] for the conditioning detail.
//! Complex conjugation is taken in the stored computational basis of the
//! state.

use num_complex::Complex64;
use thiserror::Error;

use crate::closedform::{effective_basis_vectors, EffectiveState, EFFECTIVE_BASIS_LABELS};
use crate::linalg::{
    c64, dot, hermitian_eig, psd_sqrt, ComplexMatrix, DensityMatrix, LinalgError, EIG_TOL,
};
use crate::model::{
    reduced_atom_mode_state, reduced_field_state, CavityMode, FockAtomBasis, ModelParams,
};

/// Largest tolerated population outside the targeted two-qubit subspace.
pub const SUBSPACE_RESIDUAL_TOL: f64 = 1e-8;
/// Validation tolerance on two-qubit states.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum EntanglementError {
    #[error("state leaves the effective two-qubit subspace: residual population {residual:.3e} exceeds {SUBSPACE_RESIDUAL_TOL:.1e}")]
    SubspaceResidual { residual: f64 },
    #[error("invalid two-qubit state: {reason}")]
    InvalidState { reason: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A 4×4 density matrix over a documented product basis, with the residual
/// population discarded by the extraction that produced it.
#[derive(Debug, Clone)]
pub struct TwoQubitState {
    matrix: ComplexMatrix,
    labels: [&'static str; 4],
    residual: f64,
}

impl TwoQubitState {
    pub fn new(
        matrix: ComplexMatrix,
        labels: [&'static str; 4],
    ) -> Result<Self, EntanglementError> {
        Self::with_residual(matrix, labels, 0.0)
    }

    fn with_residual(
        matrix: ComplexMatrix,
        labels: [&'static str; 4],
        residual: f64,
    ) -> Result<Self, EntanglementError> {
        if matrix.rows() != 4 || matrix.cols() != 4 {
            return Err(EntanglementError::InvalidState {
                reason: format!("expected 4x4, got {}x{}", matrix.rows(), matrix.cols()),
            });
        }
        DensityMatrix::new(matrix.clone(), STATE_TOL).map_err(|e| {
            EntanglementError::InvalidState {
                reason: e.to_string(),
            }
        })?;
        Ok(Self {
            matrix,
            labels,
            residual,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[&'static str; 4] {
        &self.labels
    }

    /// Population outside the extraction subspace, recorded for audit.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Wootters concurrence, clamped to [0, 1].
    pub fn concurrence(&self) -> Result<f64, EntanglementError> {
        let l = self.concurrence_lambdas()?;
        Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
    }

    /// The four λᵢ, nonnegative and sorted descending.
    ///
    /// Computed as the singular values of `B = √ρ (σy⊗σy) conj(√ρ)`, whose
    /// squares are exactly the eigenvalues of the Hermitian product
    /// `√ρ·ρ̃·√ρ`. The singular values come from the Jacobi solver on the
    /// Hermitian embedding `[[0, B], [B†, 0]]` (eigenvalues ±λᵢ), which
    /// keeps absolute round-off at machine level instead of the √ε blow-up
    /// that squaring would cause on rank-deficient states.
    pub fn concurrence_lambdas(&self) -> Result<[f64; 4], EntanglementError> {
        let root = psd_sqrt(&self.matrix)?;
        let b = &(&root * &spin_flip_operator()) * &root.conj();
        let mut embedding = ComplexMatrix::zeros(8, 8);
        for i in 0..4 {
            for j in 0..4 {
                embedding.set(i, 4 + j, b.get(i, j));
                embedding.set(4 + i, j, b.get(j, i).conj());
            }
        }
        let eig = hermitian_eig(&embedding, EIG_TOL)?;
        let mut lambdas = [0.0_f64; 4];
        for (slot, &value) in lambdas.iter_mut().zip(eig.eigenvalues.iter().rev()) {
            *slot = value.max(0.0);
        }
        Ok(lambdas)
    }
}

/// `σy⊗σy` in the stored basis.
fn spin_flip_operator() -> ComplexMatrix {
    let mut yy = ComplexMatrix::zeros(4, 4);
    yy.set(0, 3, c64(-1.0, 0.0));
    yy.set(1, 2, c64(1.0, 0.0));
    yy.set(2, 1, c64(1.0, 0.0));
    yy.set(3, 0, c64(-1.0, 0.0));
    yy
}

fn compress_onto_span(
    rho: &ComplexMatrix,
    vectors: &[Option<Vec<Complex64>>; 4],
    labels: [&'static str; 4],
) -> Result<TwoQubitState, EntanglementError> {
    let mut m = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let value = match (&vectors[i], &vectors[j]) {
                (Some(vi), Some(vj)) => dot(vi, &rho.mul_vec(vj)),
                _ => c64(0.0, 0.0),
            };
            m.set(i, j, value);
        }
    }
    let in_span = m.trace().re;
    let residual = rho.trace().re - in_span;
    if residual > SUBSPACE_RESIDUAL_TOL {
        return Err(EntanglementError::SubspaceResidual { residual });
    }
    let renormalized = m.scale(c64(1.0 / in_span, 0.0)).hermitized();
    TwoQubitState::with_residual(renormalized, labels, residual.max(0.0))
}

/// Atom vs. both fields as a qubit pair: the state compressed onto the four
/// effective vectors (vacuum/bright-photon ⊗ atom level), renormalized by
/// the in-subspace trace.
pub fn extract_atom_field_qubits(
    rho: &DensityMatrix,
    p: &ModelParams,
    basis: &FockAtomBasis,
) -> Result<TwoQubitState, EntanglementError> {
    let vectors = effective_basis_vectors(p, basis);
    compress_onto_span(rho.matrix(), &vectors, EFFECTIVE_BASIS_LABELS)
}

/// The closed-form effective state reinterpreted directly as a two-qubit
/// state (same basis, no compression needed).
pub fn two_qubit_from_effective(
    state: &EffectiveState,
) -> Result<TwoQubitState, EntanglementError> {
    TwoQubitState::new(state.matrix().clone(), EFFECTIVE_BASIS_LABELS)
}

const FIELD_LABELS: [&str; 4] = ["|00>", "|01>", "|10>", "|11>"];
const MODE_ATOM_LABELS: [&str; 4] = ["|0,g>", "|0,e>", "|1,g>", "|1,e>"];

/// Photon-number qubits for a two-mode field state: keeps the
/// `{0,1} ⊗ {0,1}` photon block (basis `|00⟩,|01⟩,|10⟩,|11⟩`), renormalized.
///
/// `mode_dims` are the per-mode dimensions of the input matrix.
pub fn extract_field_qubits(
    rho_fields: &ComplexMatrix,
    mode_dims: (usize, usize),
) -> Result<TwoQubitState, EntanglementError> {
    let (ma, mb) = mode_dims;
    if rho_fields.rows() != ma * mb || rho_fields.cols() != ma * mb {
        return Err(EntanglementError::InvalidState {
            reason: format!(
                "field state is {}x{}, expected {}",
                rho_fields.rows(),
                rho_fields.cols(),
                ma * mb
            ),
        });
    }
    if ma < 2 || mb < 2 {
        return Err(EntanglementError::InvalidState {
            reason: "each mode needs at least the photon numbers {0, 1}".into(),
        });
    }
    let mut m = ComplexMatrix::zeros(4, 4);
    for na in 0..2 {
        for nb in 0..2 {
            for oa in 0..2 {
                for ob in 0..2 {
                    m.set(
                        na * 2 + nb,
                        oa * 2 + ob,
                        rho_fields.get(na * mb + nb, oa * mb + ob),
                    );
                }
            }
        }
    }
    let in_block = m.trace().re;
    let residual = rho_fields.trace().re - in_block;
    if residual > SUBSPACE_RESIDUAL_TOL {
        return Err(EntanglementError::SubspaceResidual { residual });
    }
    let renormalized = m.scale(c64(1.0 / in_block, 0.0)).hermitized();
    TwoQubitState::with_residual(renormalized, FIELD_LABELS, residual.max(0.0))
}

/// Mode ⊗ atom qubit pair from a reduced (mode, atom) state; the photon
/// {0,1} block is the leading 4×4 of the mode ⊗ atom product ordering.
fn extract_mode_atom_qubits(rho: &ComplexMatrix) -> Result<TwoQubitState, EntanglementError> {
    let mut m = ComplexMatrix::zeros(4, 4);
    for n in 0..2 {
        for a in 0..2 {
            for on in 0..2 {
                for oa in 0..2 {
                    m.set(n * 2 + a, on * 2 + oa, rho.get(n * 2 + a, on * 2 + oa));
                }
            }
        }
    }
    let in_block = m.trace().re;
    let residual = rho.trace().re - in_block;
    if residual > SUBSPACE_RESIDUAL_TOL {
        return Err(EntanglementError::SubspaceResidual { residual });
    }
    let renormalized = m.scale(c64(1.0 / in_block, 0.0)).hermitized();
    TwoQubitState::with_residual(renormalized, MODE_ATOM_LABELS, residual.max(0.0))
}

/// The three pairwise concurrences extracted from one full state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseConcurrences {
    /// Atom with mode a (mode b traced out).
    pub atom_mode_a: f64,
    /// Atom with mode b (mode a traced out).
    pub atom_mode_b: f64,
    /// Atom with both fields.
    pub atom_fields: f64,
}

pub fn pairwise_concurrences(
    rho: &DensityMatrix,
    p: &ModelParams,
    basis: &FockAtomBasis,
) -> Result<PairwiseConcurrences, EntanglementError> {
    let reduced_a = reduced_atom_mode_state(rho.matrix(), basis, CavityMode::A)?;
    let reduced_b = reduced_atom_mode_state(rho.matrix(), basis, CavityMode::B)?;
    let atom_mode_a = extract_mode_atom_qubits(&reduced_a)?.concurrence()?;
    let atom_mode_b = extract_mode_atom_qubits(&reduced_b)?.concurrence()?;
    let atom_fields = extract_atom_field_qubits(rho, p, basis)?.concurrence()?;
    Ok(PairwiseConcurrences {
        atom_mode_a,
        atom_mode_b,
        atom_fields,
    })
}

/// Field-field concurrence of a full model state: traces out the atom and
/// extracts the photon-number qubits.
pub fn field_concurrence(
    rho: &DensityMatrix,
    basis: &FockAtomBasis,
) -> Result<f64, EntanglementError> {
    let mode_dim = basis.n_max() as usize + 1;
    let fields = reduced_field_state(rho.matrix(), basis)?;
    extract_field_qubits(&fields, (mode_dim, mode_dim))?.concurrence()
}
