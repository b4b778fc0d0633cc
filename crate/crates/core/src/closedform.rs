//! Closed-form evolution for vacuum fields with the atom initially excited
//! (or in a diagonal ground/excited mixture), and the entanglement measures
//! that follow from it.
//!
//! With `Ω = √(Δ² + 4g²)` and the dephasing envelope
//! `E(t) = exp(−γtΩ²/2)`, the evolved state lives on the four vectors
//! `|vac⟩⊗|e⟩`, `|vac⟩⊗|g⟩`, `|β⟩⊗|e⟩`, `|β⟩⊗|g⟩`, where
//! `|β⟩ = (g_a|10⟩ + g_b|01⟩)/g` is the shared single photon in the bright
//! mode. For the excited start the nonzero coefficients are
//!
//! ```text
//! A(t) = [1 + Δ²/Ω² + (1 − Δ²/Ω²) cos(Ωt) E(t)] / 2      (vac,e population)
//! B(t) = (g/Ω) { (Δ/Ω)[1 − cos(Ωt) E(t)] + i sin(Ωt) E(t) }   (coherence)
//! D(t) = (2g²/Ω²)[1 − cos(Ωt) E(t)]                      (bright,g population)
//! ```
//!
//! A ground-state admixture δ rides along unchanged and scales everything
//! else by (1 − δ). The concurrence between the atom and the fields is
//! `2(1−δ)|B(t)|`; between the two fields it is
//! `(1−δ)·4|g_a g_b|/Ω²·[1 − cos(Ωt) E(t)]`.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{c64, outer, ComplexMatrix, DensityMatrix, LinalgError, C_ZERO};
use crate::model::{AtomLevel, BasisState, FockAtomBasis, ModelParams};

pub const EFFECTIVE_BASIS_LABELS: [&str; 4] = ["vac,e", "vac,g", "bright,e", "bright,g"];

#[derive(Debug, Error)]
pub enum ClosedFormError {
    #[error("no stationary state exists for γ = 0")]
    NoStationaryState,
    #[error("basis with n_max = {n_max} cannot represent the populated effective vector {label}")]
    UnrepresentableState { n_max: u32, label: &'static str },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

struct Coefficients {
    excited_pop: f64,
    coherence: Complex64,
    ground_pop: f64,
}

fn coefficients(p: &ModelParams, t: f64, coherence_sign: f64) -> Coefficients {
    let om = p.big_omega();
    let g = p.g();
    let dr = p.delta() / om;
    let envelope = (-0.5 * p.gamma() * t * om * om).exp();
    let (sin_t, cos_t) = (om * t).sin_cos();
    let damped_cos = cos_t * envelope;
    Coefficients {
        excited_pop: 0.5 * (1.0 + dr * dr + (1.0 - dr * dr) * damped_cos),
        coherence: (g / om) * c64(dr * (1.0 - damped_cos), coherence_sign * sin_t * envelope),
        ground_pop: 2.0 * g * g / (om * om) * (1.0 - damped_cos),
    }
}

/// Evolved state expressed on the four effective basis vectors, in the order
/// of [`EFFECTIVE_BASIS_LABELS`].
#[derive(Debug, Clone)]
pub struct EffectiveState {
    matrix: ComplexMatrix,
    params: ModelParams,
    time: f64,
}

impl EffectiveState {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn purity(&self) -> f64 {
        crate::linalg::trace_of_product(&self.matrix, &self.matrix).re
    }

    pub fn trace_re(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Embeds the effective 4×4 state into the truncated number basis.
    pub fn to_full(&self, basis: &FockAtomBasis) -> Result<DensityMatrix, ClosedFormError> {
        let vectors = effective_basis_vectors(&self.params, basis);
        let dim = basis.dim();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for i in 0..4 {
            for j in 0..4 {
                let v = self.matrix.get(i, j);
                if v == C_ZERO {
                    continue;
                }
                match (&vectors[i], &vectors[j]) {
                    (Some(vi), Some(vj)) => {
                        let block = outer(vi, vj);
                        out = &out + &block.scale(v);
                    }
                    _ => {
                        let missing = if vectors[i].is_none() { i } else { j };
                        return Err(ClosedFormError::UnrepresentableState {
                            n_max: basis.n_max(),
                            label: EFFECTIVE_BASIS_LABELS[missing],
                        });
                    }
                }
            }
        }
        Ok(DensityMatrix::new(out, 1e-12)?)
    }
}

/// The four effective basis vectors in truncated-basis coordinates; `None`
/// where the basis cannot represent the vector (it then carries no weight in
/// any state this module produces).
pub fn effective_basis_vectors(
    p: &ModelParams,
    basis: &FockAtomBasis,
) -> [Option<Vec<Complex64>>; 4] {
    let vac = |atom: AtomLevel| {
        basis.unit_vector(&BasisState {
            n_a: 0,
            n_b: 0,
            atom,
        })
    };
    let bright = |atom: AtomLevel| -> Option<Vec<Complex64>> {
        let g = p.g();
        let ia = basis.index_of(&BasisState {
            n_a: 1,
            n_b: 0,
            atom,
        })?;
        let ib = basis.index_of(&BasisState {
            n_a: 0,
            n_b: 1,
            atom,
        })?;
        let mut v = vec![C_ZERO; basis.dim()];
        v[ia] = c64(p.g_a() / g, 0.0);
        v[ib] = c64(p.g_b() / g, 0.0);
        Some(v)
    };
    [
        vac(AtomLevel::Excited),
        vac(AtomLevel::Ground),
        bright(AtomLevel::Excited),
        bright(AtomLevel::Ground),
    ]
}

/// Exact evolved state for the vacuum-field start with ground admixture
/// `delta_mix` on the atom.
pub fn closed_state(p: &ModelParams, t: f64, delta_mix: f64) -> EffectiveState {
    closed_state_with_coherence_sign(p, t, delta_mix, 1.0)
}

/// Fault-injection variant used by the verification command's mutation mode:
/// `coherence_sign = -1` flips the sign of the oscillatory coherence term.
pub fn closed_state_with_coherence_sign(
    p: &ModelParams,
    t: f64,
    delta_mix: f64,
    coherence_sign: f64,
) -> EffectiveState {
    assert!(t >= 0.0, "time must be nonnegative");
    assert!(
        (0.0..=1.0).contains(&delta_mix),
        "ground admixture must lie in [0, 1]"
    );
    let c = coefficients(p, t, coherence_sign);
    let w = 1.0 - delta_mix;
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 0, c64(w * c.excited_pop, 0.0));
    m.set(1, 1, c64(delta_mix, 0.0));
    m.set(3, 3, c64(w * c.ground_pop, 0.0));
    m.set(0, 3, c.coherence * w);
    m.set(3, 0, c.coherence.conj() * w);
    EffectiveState {
        matrix: m,
        params: *p,
        time: t,
    }
}

/// Probability of finding the atom in the ground state:
/// `δ + (1−δ)·(2g²/Ω²)[1 − cos(Ωt) E(t)]`.
pub fn ground_probability(p: &ModelParams, t: f64, delta_mix: f64) -> f64 {
    let c = coefficients(p, t, 1.0);
    (delta_mix + (1.0 - delta_mix) * c.ground_pop).clamp(0.0, 1.0)
}

/// Concurrence between the atom and the pair of field modes: `2(1−δ)|B(t)|`.
pub fn concurrence_atom_fields(p: &ModelParams, t: f64, delta_mix: f64) -> f64 {
    let c = coefficients(p, t, 1.0);
    (2.0 * (1.0 - delta_mix) * c.coherence.norm()).clamp(0.0, 1.0)
}

/// Concurrence between the two field modes:
/// `(1−δ)·(4|g_a g_b|/Ω²)[1 − cos(Ωt) E(t)]`.
pub fn concurrence_fields(p: &ModelParams, t: f64, delta_mix: f64) -> f64 {
    let om = p.big_omega();
    let envelope = (-0.5 * p.gamma() * t * om * om).exp();
    let value = 4.0 * (p.g_a() * p.g_b()).abs() / (om * om) * (1.0 - (om * t).cos() * envelope);
    ((1.0 - delta_mix) * value).clamp(0.0, 1.0)
}

/// Reduced two-field state with each mode truncated to photon numbers
/// {0, 1}, in the product order `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn field_state_closed(p: &ModelParams, t: f64, delta_mix: f64) -> ComplexMatrix {
    let c = coefficients(p, t, 1.0);
    let w = 1.0 - delta_mix;
    let g2 = p.g() * p.g();
    let wa = p.g_a() * p.g_a() / g2;
    let wb = p.g_b() * p.g_b() / g2;
    let cross = p.g_a() * p.g_b() / g2;
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 0, c64(delta_mix + w * c.excited_pop, 0.0));
    m.set(2, 2, c64(w * c.ground_pop * wa, 0.0));
    m.set(1, 1, c64(w * c.ground_pop * wb, 0.0));
    m.set(2, 1, c64(w * c.ground_pop * cross, 0.0));
    m.set(1, 2, c64(w * c.ground_pop * cross, 0.0));
    m
}

/// Long-time limits for γ > 0, where the oscillatory envelope has decayed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryValues {
    pub concurrence_atom_fields: f64,
    pub concurrence_fields: f64,
    pub ground_probability: f64,
}

pub fn stationary_values(
    p: &ModelParams,
    delta_mix: f64,
) -> Result<StationaryValues, ClosedFormError> {
    if p.gamma() == 0.0 {
        return Err(ClosedFormError::NoStationaryState);
    }
    let om2 = p.big_omega() * p.big_omega();
    let g = p.g();
    let w = 1.0 - delta_mix;
    Ok(StationaryValues {
        concurrence_atom_fields: w * 2.0 * g * p.delta().abs() / om2,
        concurrence_fields: w * 4.0 * (p.g_a() * p.g_b()).abs() / om2,
        ground_probability: delta_mix + w * 2.0 * g * g / om2,
    })
}

/// Evaluation time at which the transient envelope satisfies
/// `E(t) ≤ e^{-10}`, used as the finite-time stand-in for the long-time
/// limit.
pub fn stationary_time_proxy(p: &ModelParams) -> f64 {
    let om2 = p.big_omega() * p.big_omega();
    (20.0 / (p.gamma() * om2)).max(200.0)
}
