//! Physical model: two degenerate cavity modes coupled to a two-level atom.
//!
//! The Hamiltonian on the truncated number basis is
//!
//! ```text
//! H = ω_a a†a + ω_b b†b + (ω₀/2)(|e⟩⟨e| − |g⟩⟨g|)
//!     + g_a (a |e⟩⟨g| + a† |g⟩⟨e|) + g_b (b |e⟩⟨g| + b† |g⟩⟨e|)
//! ```
//!
//! Only the bright combination c = (g_a a + g_b b)/g couples to the atom;
//! the dark combination d = (g_b a − g_a b)/g decouples. Two excitation
//! counters commute with H: the bright-sector number c†c + |e⟩⟨e| and the
//! dark-mode number d†d. Their sum is the total excitation number, which is
//! why truncating the basis by total excitation is exact for initial states
//! inside the kept sectors.

use std::collections::HashMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    c64, hermitian_matrix_function, partial_trace, psd_sqrt, ComplexMatrix, DensityMatrix,
    LinalgError, C_ZERO, KERNEL_TOL,
};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Physical constants of the model with derived quantities.
///
/// `g = √(g_a² + g_b²)` is the collective coupling, `Δ = ω₀ − ω` the
/// atom-field detuning and `Ω = √(Δ² + 4g²)` the generalized Rabi frequency
/// of the single-excitation sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega_a: f64,
    omega_b: f64,
    omega0: f64,
    g_a: f64,
    g_b: f64,
    gamma: f64,
}

impl ModelParams {
    /// The two mode frequencies must be equal (degenerate modes are the only
    /// case the model covers); the collective coupling must be nonzero and
    /// the dephasing rate nonnegative.
    pub fn new(
        omega_a: f64,
        omega_b: f64,
        omega0: f64,
        g_a: f64,
        g_b: f64,
        gamma: f64,
    ) -> Result<Self, ModelError> {
        if omega_a != omega_b {
            return Err(ModelError::InvalidParams(format!(
                "mode frequencies must be equal (degenerate modes), got ω_a={omega_a}, ω_b={omega_b}"
            )));
        }
        if g_a * g_a + g_b * g_b <= 0.0 {
            return Err(ModelError::InvalidParams(
                "couplings must satisfy g_a² + g_b² > 0".into(),
            ));
        }
        if gamma < 0.0 || !gamma.is_finite() {
            return Err(ModelError::InvalidParams(format!(
                "dephasing rate must be nonnegative, got {gamma}"
            )));
        }
        Ok(Self {
            omega_a,
            omega_b,
            omega0,
            g_a,
            g_b,
            gamma,
        })
    }

    /// Construction from the detuning: `ω₀ = ω + Δ`.
    pub fn from_detuning(
        omega: f64,
        delta: f64,
        g_a: f64,
        g_b: f64,
        gamma: f64,
    ) -> Result<Self, ModelError> {
        Self::new(omega, omega, omega + delta, g_a, g_b, gamma)
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }

    pub fn omega_b(&self) -> f64 {
        self.omega_b
    }

    /// Common mode frequency ω.
    pub fn omega(&self) -> f64 {
        self.omega_a
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn g_a(&self) -> f64 {
        self.g_a
    }

    pub fn g_b(&self) -> f64 {
        self.g_b
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Collective coupling `g = √(g_a² + g_b²)`.
    pub fn g(&self) -> f64 {
        self.g_a.hypot(self.g_b)
    }

    /// Detuning `Δ = ω₀ − ω`.
    pub fn delta(&self) -> f64 {
        self.omega0 - self.omega_a
    }

    /// Generalized Rabi frequency `Ω = √(Δ² + 4g²)`.
    pub fn big_omega(&self) -> f64 {
        self.delta().hypot(2.0 * self.g())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomLevel {
    Ground,
    Excited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CavityMode {
    A,
    B,
}

/// One basis vector `|n_a, n_b⟩ ⊗ |atom⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub n_a: u32,
    pub n_b: u32,
    pub atom: AtomLevel,
}

impl BasisState {
    pub fn total_excitation(&self) -> u32 {
        self.n_a + self.n_b + u32::from(self.atom == AtomLevel::Excited)
    }
}

/// Truncated number basis ordered by total excitation N, then by n_a
/// descending, then ground before excited. Dimension is `(n_max + 1)²`.
#[derive(Debug, Clone)]
pub struct FockAtomBasis {
    n_max: u32,
    states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
}

impl FockAtomBasis {
    pub fn new(n_max: u32) -> Self {
        let mut states = Vec::new();
        for n in 0..=n_max {
            for n_a in (0..=n).rev() {
                states.push(BasisState {
                    n_a,
                    n_b: n - n_a,
                    atom: AtomLevel::Ground,
                });
                if n_a < n {
                    states.push(BasisState {
                        n_a,
                        n_b: n - 1 - n_a,
                        atom: AtomLevel::Excited,
                    });
                }
            }
        }
        let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Self {
            n_max,
            states,
            index,
        }
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> BasisState {
        self.states[i]
    }

    pub fn index_of(&self, s: &BasisState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Unit amplitude vector for a basis state, if representable.
    pub fn unit_vector(&self, s: &BasisState) -> Option<Vec<Complex64>> {
        self.index_of(s).map(|i| {
            let mut v = vec![C_ZERO; self.dim()];
            v[i] = c64(1.0, 0.0);
            v
        })
    }

    /// Subsystem dimensions `[n_max+1, n_max+1, 2]` of the enclosing product
    /// space (mode a ⊗ mode b ⊗ atom, ground = 0, excited = 1).
    pub fn product_dims(&self) -> [usize; 3] {
        let m = self.n_max as usize + 1;
        [m, m, 2]
    }

    fn product_index(&self, s: &BasisState) -> usize {
        let m = self.n_max as usize + 1;
        let atom = usize::from(s.atom == AtomLevel::Excited);
        (s.n_a as usize * m + s.n_b as usize) * 2 + atom
    }
}

/// Applies `amp · |target⟩⟨source|` to a matrix under construction, skipping
/// targets outside the truncated basis.
fn add_transition(
    out: &mut ComplexMatrix,
    basis: &FockAtomBasis,
    target: BasisState,
    source_idx: usize,
    amp: f64,
) {
    if let Some(i) = basis.index_of(&target) {
        out.add_at(i, source_idx, c64(amp, 0.0));
    }
}

/// Coupling part of the Hamiltonian:
/// `g_a (a |e⟩⟨g| + a† |g⟩⟨e|) + g_b (b |e⟩⟨g| + b† |g⟩⟨e|)`.
///
/// Every term conserves the total excitation number, so the truncated matrix
/// is exact on the kept sectors.
pub fn interaction_hamiltonian(p: &ModelParams, basis: &FockAtomBasis) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(basis.dim(), basis.dim());
    for (j, s) in basis.states().iter().enumerate() {
        match s.atom {
            AtomLevel::Ground => {
                if s.n_a >= 1 {
                    let t = BasisState {
                        n_a: s.n_a - 1,
                        atom: AtomLevel::Excited,
                        ..*s
                    };
                    add_transition(&mut h, basis, t, j, p.g_a * (s.n_a as f64).sqrt());
                }
                if s.n_b >= 1 {
                    let t = BasisState {
                        n_b: s.n_b - 1,
                        atom: AtomLevel::Excited,
                        ..*s
                    };
                    add_transition(&mut h, basis, t, j, p.g_b * (s.n_b as f64).sqrt());
                }
            }
            AtomLevel::Excited => {
                let t = BasisState {
                    n_a: s.n_a + 1,
                    atom: AtomLevel::Ground,
                    ..*s
                };
                add_transition(&mut h, basis, t, j, p.g_a * (s.n_a as f64 + 1.0).sqrt());
                let t = BasisState {
                    n_b: s.n_b + 1,
                    atom: AtomLevel::Ground,
                    ..*s
                };
                add_transition(&mut h, basis, t, j, p.g_b * (s.n_b as f64 + 1.0).sqrt());
            }
        }
    }
    h
}

/// Full Hamiltonian, built termwise on the truncated basis.
pub fn build_hamiltonian(p: &ModelParams, basis: &FockAtomBasis) -> ComplexMatrix {
    let mut h = interaction_hamiltonian(p, basis);
    for (j, s) in basis.states().iter().enumerate() {
        let sign = if s.atom == AtomLevel::Excited {
            1.0
        } else {
            -1.0
        };
        let diag = p.omega_a * s.n_a as f64 + p.omega_b * s.n_b as f64 + 0.5 * p.omega0 * sign;
        h.add_at(j, j, c64(diag, 0.0));
    }
    h
}

/// The two conserved excitation counters `(bright, dark)`:
///
/// ```text
/// bright = (g_a² a†a + g_b² b†b)/g² + (g_a g_b/g²)(a†b + ab†) + |e⟩⟨e|
/// dark   = (g_b² a†a + g_a² b†b)/g² − (g_a g_b/g²)(a†b + ab†)
/// ```
///
/// Both commute with the Hamiltonian and sum to the total excitation number.
pub fn conserved_excitations(
    p: &ModelParams,
    basis: &FockAtomBasis,
) -> (ComplexMatrix, ComplexMatrix) {
    let g2 = p.g() * p.g();
    let wa = p.g_a * p.g_a / g2;
    let wb = p.g_b * p.g_b / g2;
    let cross = p.g_a * p.g_b / g2;

    let mut bright = ComplexMatrix::zeros(basis.dim(), basis.dim());
    let mut dark = ComplexMatrix::zeros(basis.dim(), basis.dim());
    for (j, s) in basis.states().iter().enumerate() {
        let (na, nb) = (s.n_a as f64, s.n_b as f64);
        let excited = f64::from(s.atom == AtomLevel::Excited);
        bright.add_at(j, j, c64(wa * na + wb * nb + excited, 0.0));
        dark.add_at(j, j, c64(wb * na + wa * nb, 0.0));

        // a†b and ab† exchange one photon between the modes
        if s.n_b >= 1 {
            let t = BasisState {
                n_a: s.n_a + 1,
                n_b: s.n_b - 1,
                ..*s
            };
            let amp = cross * ((s.n_a as f64 + 1.0) * s.n_b as f64).sqrt();
            add_transition(&mut bright, basis, t, j, amp);
            add_transition(&mut dark, basis, t, j, -amp);
        }
        if s.n_a >= 1 {
            let t = BasisState {
                n_a: s.n_a - 1,
                n_b: s.n_b + 1,
                ..*s
            };
            let amp = cross * (s.n_a as f64 * (s.n_b as f64 + 1.0)).sqrt();
            add_transition(&mut bright, basis, t, j, amp);
            add_transition(&mut dark, basis, t, j, -amp);
        }
    }
    (bright, dark)
}

/// Total excitation number `a†a + b†b + |e⟩⟨e|` (diagonal on this basis).
pub fn total_excitation_operator(basis: &FockAtomBasis) -> ComplexMatrix {
    let mut n = ComplexMatrix::zeros(basis.dim(), basis.dim());
    for (j, s) in basis.states().iter().enumerate() {
        n.set(j, j, c64(s.total_excitation() as f64, 0.0));
    }
    n
}

/// Atomic inversion `|e⟩⟨e| − |g⟩⟨g|` (diagonal ±1).
pub fn atom_inversion_operator(basis: &FockAtomBasis) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(basis.dim(), basis.dim());
    for (j, s) in basis.states().iter().enumerate() {
        let v = if s.atom == AtomLevel::Excited {
            1.0
        } else {
            -1.0
        };
        m.set(j, j, c64(v, 0.0));
    }
    m
}

/// Bright-mode annihilator `c = (g_a a + g_b b)/g`.
pub fn bright_mode_annihilator(p: &ModelParams, basis: &FockAtomBasis) -> ComplexMatrix {
    let g = p.g();
    let mut c = ComplexMatrix::zeros(basis.dim(), basis.dim());
    for (j, s) in basis.states().iter().enumerate() {
        if s.n_a >= 1 {
            let t = BasisState {
                n_a: s.n_a - 1,
                ..*s
            };
            add_transition(&mut c, basis, t, j, p.g_a / g * (s.n_a as f64).sqrt());
        }
        if s.n_b >= 1 {
            let t = BasisState {
                n_b: s.n_b - 1,
                ..*s
            };
            add_transition(&mut c, basis, t, j, p.g_b / g * (s.n_b as f64).sqrt());
        }
    }
    c
}

/// Ladder operators of the effective spin algebra.
///
/// `plus = c |e⟩⟨g| / √K`, `minus = plus†`, `zero = (|e⟩⟨e| − |g⟩⟨g|)/2`,
/// where `K` is the bright excitation counter. `1/√K` is realized as a
/// Moore–Penrose pseudo-inverse: eigenvalues below 1e-12 map to zero, which
/// leaves the ladder operators annihilating the kernel of `K`.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub plus: ComplexMatrix,
    pub minus: ComplexMatrix,
    pub zero: ComplexMatrix,
}

pub fn spin_operators(p: &ModelParams, basis: &FockAtomBasis) -> Result<SpinOperators, ModelError> {
    let (bright, _) = conserved_excitations(p, basis);
    let inv_sqrt = hermitian_matrix_function(&bright, |l| {
        if l > KERNEL_TOL {
            c64(1.0 / l.sqrt(), 0.0)
        } else {
            C_ZERO
        }
    })?;

    // Combined bright-photon absorption with atomic excitation: conserves the
    // total excitation number, so it is exact on the truncated basis.
    let g = p.g();
    let mut flip_up = ComplexMatrix::zeros(basis.dim(), basis.dim());
    for (j, s) in basis.states().iter().enumerate() {
        if s.atom != AtomLevel::Ground {
            continue;
        }
        if s.n_a >= 1 {
            let t = BasisState {
                n_a: s.n_a - 1,
                atom: AtomLevel::Excited,
                ..*s
            };
            add_transition(&mut flip_up, basis, t, j, p.g_a / g * (s.n_a as f64).sqrt());
        }
        if s.n_b >= 1 {
            let t = BasisState {
                n_b: s.n_b - 1,
                atom: AtomLevel::Excited,
                ..*s
            };
            add_transition(&mut flip_up, basis, t, j, p.g_b / g * (s.n_b as f64).sqrt());
        }
    }

    let plus = &flip_up * &inv_sqrt;
    let minus = plus.adjoint();
    let zero = atom_inversion_operator(basis).scale(c64(0.5, 0.0));
    Ok(SpinOperators { plus, minus, zero })
}

/// Hamiltonian rebuilt from the conserved counters and the spin ladder:
///
/// ```text
/// H = ω (K_bright + K_dark − 1/2) + Δ S₀ + g √K_bright (S₊ + S₋)
/// ```
///
/// With the pseudo-inverse convention for the ladder operators this equals
/// [`build_hamiltonian`] on the whole truncated space.
pub fn algebraic_hamiltonian(
    p: &ModelParams,
    basis: &FockAtomBasis,
) -> Result<ComplexMatrix, ModelError> {
    let (bright, dark) = conserved_excitations(p, basis);
    let spin = spin_operators(p, basis)?;
    let sqrt_bright = psd_sqrt(&bright)?;

    let mut shifted = &bright + &dark;
    for i in 0..basis.dim() {
        shifted.add_at(i, i, c64(-0.5, 0.0));
    }
    let mut h = shifted.scale(c64(p.omega(), 0.0));
    h = &h + &spin.zero.scale(c64(p.delta(), 0.0));
    let ladder = &spin.plus + &spin.minus;
    h = &h + &(&sqrt_bright * &ladder).scale(c64(p.g(), 0.0));
    Ok(h)
}

/// Initial preparations: cavity vacuum with the atom excited, or with the
/// atom in the diagonal mixture `δ|g⟩⟨g| + (1−δ)|e⟩⟨e|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialKind {
    ExcitedVacuum,
    ThermalVacuum(f64),
}

pub fn initial_state(
    kind: InitialKind,
    basis: &FockAtomBasis,
) -> Result<DensityMatrix, ModelError> {
    let delta_mix = match kind {
        InitialKind::ExcitedVacuum => 0.0,
        InitialKind::ThermalVacuum(d) => {
            if !(0.0..=1.0).contains(&d) {
                return Err(ModelError::InvalidParams(format!(
                    "ground-state admixture must lie in [0, 1], got {d}"
                )));
            }
            d
        }
    };
    let ground = basis
        .index_of(&BasisState {
            n_a: 0,
            n_b: 0,
            atom: AtomLevel::Ground,
        })
        .expect("vacuum ground state is always in the basis");
    let excited = basis.index_of(&BasisState {
        n_a: 0,
        n_b: 0,
        atom: AtomLevel::Excited,
    });
    let mut m = ComplexMatrix::zeros(basis.dim(), basis.dim());
    m.set(ground, ground, c64(delta_mix, 0.0));
    match excited {
        Some(e) => m.set(e, e, c64(1.0 - delta_mix, 0.0)),
        None if delta_mix < 1.0 => {
            return Err(ModelError::InvalidParams(
                "basis with n_max = 0 cannot hold an excited atom".into(),
            ))
        }
        None => {}
    }
    Ok(DensityMatrix::new(m, 1e-12)?)
}

/// Embeds a truncated-basis operator into the full product space
/// (mode a ⊗ mode b ⊗ atom); entries outside the kept sectors are zero.
pub fn embed_in_product_space(m: &ComplexMatrix, basis: &FockAtomBasis) -> ComplexMatrix {
    let dims = basis.product_dims();
    let total = dims.iter().product();
    let mut out = ComplexMatrix::zeros(total, total);
    for (i, si) in basis.states().iter().enumerate() {
        let pi = basis.product_index(si);
        for (j, sj) in basis.states().iter().enumerate() {
            let v = m.get(i, j);
            if v != C_ZERO {
                out.set(pi, basis.product_index(sj), v);
            }
        }
    }
    out
}

/// Two-mode field state: embeds into the product space and traces out the
/// atom. Result lives on mode a ⊗ mode b with `(n_max+1)²` dimensions.
pub fn reduced_field_state(
    rho: &ComplexMatrix,
    basis: &FockAtomBasis,
) -> Result<ComplexMatrix, LinalgError> {
    let dims = basis.product_dims();
    partial_trace(&embed_in_product_space(rho, basis), &dims, &[0, 1])
}

/// Atom plus one cavity mode, the other mode traced out. Result lives on
/// mode ⊗ atom with `2(n_max+1)` dimensions.
pub fn reduced_atom_mode_state(
    rho: &ComplexMatrix,
    basis: &FockAtomBasis,
    mode: CavityMode,
) -> Result<ComplexMatrix, LinalgError> {
    let dims = basis.product_dims();
    let keep = match mode {
        CavityMode::A => [0usize, 2],
        CavityMode::B => [1usize, 2],
    };
    partial_trace(&embed_in_product_space(rho, basis), &dims, &keep)
}

/// Probability of finding the atom in the ground state.
pub fn ground_population(rho: &ComplexMatrix, basis: &FockAtomBasis) -> f64 {
    basis
        .states()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.atom == AtomLevel::Ground)
        .map(|(i, _)| rho.get(i, i).re)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, outer, rebuild_from_eig, EIG_TOL};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        &(a * b) - &(b * a)
    }

    fn ket(basis: &FockAtomBasis, n_a: u32, n_b: u32, atom: AtomLevel) -> Vec<Complex64> {
        basis
            .unit_vector(&BasisState { n_a, n_b, atom })
            .expect("state in basis")
    }

    fn params(g_a: f64, g_b: f64, delta: f64, gamma: f64) -> ModelParams {
        ModelParams::from_detuning(1.0, delta, g_a, g_b, gamma).unwrap()
    }

    #[test]
    fn params_reject_unequal_mode_frequencies() {
        assert!(ModelParams::new(1.0, 1.1, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, 1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn derived_quantities() {
        let p = params(1.0, 2.0, 3.0, 0.1);
        assert!((p.g() - 5.0_f64.sqrt()).abs() < 1e-15);
        assert!((p.delta() - 3.0).abs() < 1e-15);
        assert!((p.big_omega() - (9.0 + 20.0_f64).sqrt()).abs() < 1e-15);
        assert!(p.big_omega() >= p.delta().abs());
        assert!(p.big_omega() >= 2.0 * p.g());
    }

    #[test]
    fn basis_ordering_and_dimension() {
        let basis = FockAtomBasis::new(2);
        assert_eq!(basis.dim(), 9);
        let expect = [
            (0, 0, AtomLevel::Ground),
            (1, 0, AtomLevel::Ground),
            (0, 1, AtomLevel::Ground),
            (0, 0, AtomLevel::Excited),
            (2, 0, AtomLevel::Ground),
            (1, 1, AtomLevel::Ground),
            (1, 0, AtomLevel::Excited),
            (0, 2, AtomLevel::Ground),
            (0, 1, AtomLevel::Excited),
        ];
        for (i, &(n_a, n_b, atom)) in expect.iter().enumerate() {
            assert_eq!(basis.state(i), BasisState { n_a, n_b, atom });
        }
        for n_max in 0..4 {
            assert_eq!(
                FockAtomBasis::new(n_max).dim(),
                ((n_max + 1) * (n_max + 1)) as usize
            );
        }
    }

    #[test]
    fn hamiltonian_matrix_elements() {
        let p = params(1.3, 0.7, 0.5, 0.0);
        let basis = FockAtomBasis::new(2);
        let h = build_hamiltonian(&p, &basis);
        let e00 = ket(&basis, 0, 0, AtomLevel::Excited);
        let g10 = ket(&basis, 1, 0, AtomLevel::Ground);
        // ⟨00,e|H|00,e⟩ = ω₀/2
        let diag = crate::linalg::dot(&e00, &h.mul_vec(&e00));
        assert!((diag.re - 0.5 * p.omega0()).abs() < 1e-15);
        // ⟨10,g|H|00,e⟩ = g_a
        let coupling = crate::linalg::dot(&g10, &h.mul_vec(&e00));
        assert!((coupling - c64(p.g_a(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hamiltonian_single_excitation_block_matches_hand_expansion() {
        // Termwise hand expansion of the five Hamiltonian terms on the three
        // states (1,0,g), (0,1,g), (0,0,e) at ω=1, ω₀=1, g_a=1, g_b=2.
        let p = params(1.0, 2.0, 0.0, 0.0);
        let basis = FockAtomBasis::new(2);
        let h = build_hamiltonian(&p, &basis);
        let block: Vec<usize> = [
            BasisState {
                n_a: 1,
                n_b: 0,
                atom: AtomLevel::Ground,
            },
            BasisState {
                n_a: 0,
                n_b: 1,
                atom: AtomLevel::Ground,
            },
            BasisState {
                n_a: 0,
                n_b: 0,
                atom: AtomLevel::Excited,
            },
        ]
        .iter()
        .map(|s| basis.index_of(s).unwrap())
        .collect();
        // diag: ω·n_a + ω·n_b ± ω₀/2; off-diag: a†|g⟩⟨e| gives g_a, b†|g⟩⟨e| gives g_b
        let expect =
            ComplexMatrix::from_real_rows(&[&[0.5, 0.0, 1.0], &[0.0, 0.5, 2.0], &[1.0, 2.0, 0.5]]);
        for (bi, &i) in block.iter().enumerate() {
            for (bj, &j) in block.iter().enumerate() {
                assert!(
                    (h.get(i, j) - expect.get(bi, bj)).norm() < 1e-15,
                    "mismatch at block ({bi},{bj})"
                );
            }
        }
    }

    #[test]
    fn conserved_counter_actions() {
        let p = params(1.0, 2.0, 0.0, 0.0);
        let basis = FockAtomBasis::new(2);
        let (bright, dark) = conserved_excitations(&p, &basis);

        // excited atom over vacuum carries one bright excitation
        let e00 = ket(&basis, 0, 0, AtomLevel::Excited);
        let be = bright.mul_vec(&e00);
        for (i, v) in be.iter().enumerate() {
            let expect = if e00[i] != C_ZERO {
                c64(1.0, 0.0)
            } else {
                C_ZERO
            };
            assert!((v - expect).norm() < 1e-15);
        }

        // absolute ground state is annihilated
        let g00 = ket(&basis, 0, 0, AtomLevel::Ground);
        assert!(bright.mul_vec(&g00).iter().all(|v| v.norm() < 1e-15));

        // the shared single photon lives in the bright mode only
        let g = p.g();
        let mut phi_g = vec![C_ZERO; basis.dim()];
        phi_g[basis
            .index_of(&BasisState {
                n_a: 1,
                n_b: 0,
                atom: AtomLevel::Ground,
            })
            .unwrap()] = c64(p.g_a() / g, 0.0);
        phi_g[basis
            .index_of(&BasisState {
                n_a: 0,
                n_b: 1,
                atom: AtomLevel::Ground,
            })
            .unwrap()] = c64(p.g_b() / g, 0.0);
        assert!(dark.mul_vec(&phi_g).iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn conservation_laws_random_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = params(
                rng.gen_range(0.2..3.0),
                rng.gen_range(0.2..3.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(0.0..0.5),
            );
            let n_max = rng.gen_range(1..=3);
            let basis = FockAtomBasis::new(n_max);
            let h = build_hamiltonian(&p, &basis);
            let (bright, dark) = conserved_excitations(&p, &basis);
            assert!(commutator(&h, &bright).max_abs() <= 1e-12);
            assert!(commutator(&h, &dark).max_abs() <= 1e-12);
            // counters sum to the total excitation number
            let total = &bright + &dark;
            assert!(total.max_abs_diff(&total_excitation_operator(&basis)) <= 1e-12);
            // bright counter is c†c plus the atomic excitation projector
            let c = bright_mode_annihilator(&p, &basis);
            let mut ctc = &c.adjoint() * &c;
            for (i, s) in basis.states().iter().enumerate() {
                if s.atom == AtomLevel::Excited {
                    ctc.add_at(i, i, c64(1.0, 0.0));
                }
            }
            assert!(ctc.max_abs_diff(&bright) <= 1e-12);
        }
    }

    #[test]
    fn spin_ladder_actions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let p = params(rng.gen_range(0.3..2.0), rng.gen_range(0.3..2.0), 0.0, 0.0);
            let basis = FockAtomBasis::new(2);
            let spin = spin_operators(&p, &basis).unwrap();

            // raising the shared photon returns the bare excited atom
            let g = p.g();
            let mut phi_g = vec![C_ZERO; basis.dim()];
            phi_g[basis
                .index_of(&BasisState {
                    n_a: 1,
                    n_b: 0,
                    atom: AtomLevel::Ground,
                })
                .unwrap()] = c64(p.g_a() / g, 0.0);
            phi_g[basis
                .index_of(&BasisState {
                    n_a: 0,
                    n_b: 1,
                    atom: AtomLevel::Ground,
                })
                .unwrap()] = c64(p.g_b() / g, 0.0);
            let raised = spin.plus.mul_vec(&phi_g);
            let e00 = ket(&basis, 0, 0, AtomLevel::Excited);
            for (a, b) in raised.iter().zip(&e00) {
                assert!((a - b).norm() < 1e-12);
            }

            // zero acts as +1/2 on the excited atom
            let halves = spin.zero.mul_vec(&e00);
            for (a, b) in halves.iter().zip(&e00) {
                assert!((a - b * c64(0.5, 0.0)).norm() < 1e-15);
            }

            assert!(spin.minus.max_abs_diff(&spin.plus.adjoint()) < 1e-15);
        }
    }

    #[test]
    fn su2_commutators_off_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let p = params(
                rng.gen_range(0.3..2.0),
                rng.gen_range(0.3..2.0),
                rng.gen_range(-2.0..2.0),
                0.0,
            );
            let basis = FockAtomBasis::new(2);
            let spin = spin_operators(&p, &basis).unwrap();
            let (bright, _) = conserved_excitations(&p, &basis);
            let eig = hermitian_eig(&bright, EIG_TOL).unwrap();
            let proj = rebuild_from_eig(&eig, |l| {
                if l > KERNEL_TOL {
                    c64(1.0, 0.0)
                } else {
                    C_ZERO
                }
            });

            let raise_comm = &commutator(&spin.zero, &spin.plus) - &spin.plus;
            let lower_comm = &commutator(&spin.zero, &spin.minus) + &spin.minus;
            let pm = &commutator(&spin.plus, &spin.minus) - &spin.zero.scale(c64(2.0, 0.0));
            for m in [raise_comm, lower_comm, pm] {
                let restricted = &(&proj * &m) * &proj;
                assert!(restricted.max_abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn su2_commutator_on_single_excitation_sector() {
        let p = params(1.0, 1.0, 0.0, 0.0);
        let basis = FockAtomBasis::new(2);
        let spin = spin_operators(&p, &basis).unwrap();
        let (bright, _) = conserved_excitations(&p, &basis);
        let eig = hermitian_eig(&bright, EIG_TOL).unwrap();
        let off_kernel = rebuild_from_eig(&eig, |l| {
            if l > KERNEL_TOL {
                c64(1.0, 0.0)
            } else {
                C_ZERO
            }
        });
        // restrict to total excitation 1 as well
        let mut sector = ComplexMatrix::zeros(basis.dim(), basis.dim());
        for (i, s) in basis.states().iter().enumerate() {
            if s.total_excitation() == 1 {
                sector.set(i, i, c64(1.0, 0.0));
            }
        }
        let proj = &sector * &off_kernel;
        let pm = &commutator(&spin.plus, &spin.minus) - &spin.zero.scale(c64(2.0, 0.0));
        let restricted = &(&proj.adjoint() * &pm) * &proj;
        assert!(restricted.max_abs() <= 1e-10);
    }

    #[test]
    fn algebraic_hamiltonian_matches_direct_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..10 {
            let p = params(
                rng.gen_range(0.3..2.0),
                rng.gen_range(0.3..2.0),
                rng.gen_range(-3.0..3.0),
                0.0,
            );
            for n_max in [1, 2, 3] {
                let basis = FockAtomBasis::new(n_max);
                let direct = build_hamiltonian(&p, &basis);
                let algebraic = algebraic_hamiltonian(&p, &basis).unwrap();
                assert!(
                    direct.max_abs_diff(&algebraic) <= 1e-10,
                    "forms disagree at n_max={n_max}"
                );
            }
        }
    }

    #[test]
    fn algebraic_hamiltonian_on_absolute_ground() {
        let p = params(1.0, 1.0, 0.5, 0.0);
        let basis = FockAtomBasis::new(2);
        let g00 = basis
            .index_of(&BasisState {
                n_a: 0,
                n_b: 0,
                atom: AtomLevel::Ground,
            })
            .unwrap();
        let direct = build_hamiltonian(&p, &basis);
        let algebraic = algebraic_hamiltonian(&p, &basis).unwrap();
        for h in [&direct, &algebraic] {
            assert!((h.get(g00, g00).re + 0.5 * p.omega0()).abs() < 1e-12);
        }
    }

    #[test]
    fn initial_states() {
        let basis = FockAtomBasis::new(2);
        let excited = initial_state(InitialKind::ExcitedVacuum, &basis).unwrap();
        let e00 = ket(&basis, 0, 0, AtomLevel::Excited);
        assert!(excited.matrix().max_abs_diff(&outer(&e00, &e00)) < 1e-15);

        // full ground-state admixture is stationary under the dynamics
        let ground = initial_state(InitialKind::ThermalVacuum(1.0), &basis).unwrap();
        let g00 = ket(&basis, 0, 0, AtomLevel::Ground);
        assert!(ground.matrix().max_abs_diff(&outer(&g00, &g00)) < 1e-15);

        let half = initial_state(InitialKind::ThermalVacuum(0.5), &basis).unwrap();
        assert!((half.matrix().get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((half.matrix().get(3, 3).re - 0.5).abs() < 1e-15);
        assert!((half.purity() - 0.5).abs() < 1e-15);

        assert!(initial_state(InitialKind::ThermalVacuum(1.5), &basis).is_err());
        assert!(initial_state(InitialKind::ThermalVacuum(-0.1), &basis).is_err());
    }

    #[test]
    fn reduced_states_of_product_preparation() {
        let basis = FockAtomBasis::new(2);
        let rho = initial_state(InitialKind::ExcitedVacuum, &basis).unwrap();
        let fields = reduced_field_state(rho.matrix(), &basis).unwrap();
        // two-mode vacuum
        assert!((fields.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((fields.trace().re - 1.0).abs() < 1e-15);

        let atom_a = reduced_atom_mode_state(rho.matrix(), &basis, CavityMode::A).unwrap();
        // atom excited, mode a empty: product index (n_a=0, atom=e) = 1
        assert!((atom_a.get(1, 1).re - 1.0).abs() < 1e-15);
        assert!((ground_population(rho.matrix(), &basis) - 0.0).abs() < 1e-15);
    }
}
