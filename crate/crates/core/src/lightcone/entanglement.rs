//! Two-atom state after the interaction, post-selection on "no photon left", and the
//! pulse that balances the two branches into a maximally entangled pair.
//!
//! Basis of [`TwoAtomState`]: `a·|E₁G₂⟩|0⟩ + b·|G₁E₂⟩|0⟩ + γ·|G₁G₂⟩|φ⊥⟩`, where |φ⊥⟩ is
//! the (collapsed) state with an emitted photon.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the normalization invariants.
const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoAtomState {
    pub a: Complex64,
    pub b: Complex64,
    pub gamma: Complex64,
}

impl TwoAtomState {
    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() + self.gamma.norm_sqr()
    }
}

/// Builds the state from the transfer amplitude b and the photon-escape probability p_γ,
/// with a real and non-negative by convention.
pub fn assemble_two_atom_state(b: Complex64, p_gamma: f64) -> Result<TwoAtomState> {
    if !(b.re.is_finite() && b.im.is_finite()) {
        return Err(Error::param("transfer amplitude b must be finite"));
    }
    if !(0.0..=1.0).contains(&p_gamma) {
        return Err(Error::param(format!(
            "emission probability {p_gamma} must lie in [0, 1]"
        )));
    }
    let total = b.norm_sqr() + p_gamma;
    if total >= 1.0 {
        return Err(Error::OverUnity(total));
    }
    Ok(TwoAtomState {
        a: Complex64::new((1.0 - total).sqrt(), 0.0),
        b,
        gamma: Complex64::new(p_gamma.sqrt(), 0.0),
    })
}

/// Largest eigenvalue of the 2×2 Gram matrix of two column vectors.
fn top_singular_sqr(col0: &[Complex64], col1: &[Complex64]) -> f64 {
    let p: f64 = col0.iter().map(|z| z.norm_sqr()).sum();
    let q: f64 = col1.iter().map(|z| z.norm_sqr()).sum();
    let c: Complex64 = col0.iter().zip(col1).map(|(x, y)| x.conj() * y).sum();
    0.5 * (p + q) + (0.25 * (p - q).powi(2) + c.norm_sqr()).sqrt()
}

/// Best fidelity |⟨Ψ₁|⟨Ψ₂|ψ⟩|² against product states of (atom 1 + field) and atom 2.
///
/// The state is a 4×2 matrix (atom 1 ⊗ field) × (atom 2) and the optimum is its largest
/// squared singular value, here max(|a|² + |γ|², |b|²).
pub fn max_product_fidelity(state: &TwoAtomState) -> f64 {
    let zero = Complex64::new(0.0, 0.0);
    let norm = state.norm_sqr();
    if norm <= 0.0 {
        return 0.0;
    }
    let TwoAtomState { a, b, gamma } = *state;
    // Rows (atom 1, field) = E0, G0, Gφ, Eφ; columns atom 2 = G, E.
    let atom2_ground = [a, zero, gamma, zero];
    let atom2_excited = [zero, b, zero, zero];
    top_singular_sqr(&atom2_ground, &atom2_excited) / norm
}

/// Two-qubit state `a′|E₁G₂⟩ + b′|G₁E₂⟩` with the probability of having reached it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostSelectedState {
    pub a: Complex64,
    pub b: Complex64,
    /// Probability of the post-selection chain that produced this state.
    pub success: f64,
}

impl PostSelectedState {
    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }
}

/// Keeps the events in which no photon remains.
pub fn post_select(state: &TwoAtomState) -> Result<PostSelectedState> {
    let kept = state.a.norm_sqr() + state.b.norm_sqr();
    if !(kept > 0.0) {
        return Err(Error::ZeroSupport);
    }
    let total = state.norm_sqr();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::NumericalValidity(format!(
            "two-atom state has norm {total}, expected 1"
        )));
    }
    let s = kept.sqrt();
    Ok(PostSelectedState {
        a: state.a / s,
        b: state.b / s,
        success: kept,
    })
}

/// Output of [`balance_to_maximal`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Balanced {
    /// Balanced state; its `success` is the product over the whole chain.
    pub state: PostSelectedState,
    /// Mixing of the transfer pulse, cos θ = |b′/a′|.
    pub cos_theta: f64,
    /// Probability that atom 2 is not left in |F₂⟩, 2|b′|².
    pub stage_success: f64,
}

/// Moves the |E₁G₂⟩ branch partly out of the computational space (|G₂⟩ → |F₂⟩ with
/// amplitude sin θ) and keeps the events where atom 2 was not transferred, leaving equal
/// weights on both branches. Relative phases are preserved.
pub fn balance_to_maximal(state: &PostSelectedState) -> Result<Balanced> {
    let (ma, mb) = (state.a.norm(), state.b.norm());
    if mb == 0.0 {
        return Err(Error::ZeroBranch("b' = 0".into()));
    }
    if ma < mb {
        return Err(Error::param(format!(
            "balancing acts on the larger branch and needs |a'| >= |b'| (got {ma} < {mb})"
        )));
    }
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NumericalValidity(format!(
            "post-selected state has norm {norm}, expected 1"
        )));
    }
    let cos_theta = mb / ma;
    let kept_a = state.a * cos_theta;
    let stage_success = kept_a.norm_sqr() + state.b.norm_sqr();
    let s = stage_success.sqrt();
    Ok(Balanced {
        state: PostSelectedState {
            a: kept_a / s,
            b: state.b / s,
            success: state.success * stage_success,
        },
        cos_theta,
        stage_success,
    })
}

/// Pure-state concurrence 2|a′||b′| of the normalized state.
pub fn concurrence(state: &PostSelectedState) -> f64 {
    let n = state.norm_sqr();
    if n <= 0.0 {
        return 0.0;
    }
    (2.0 * state.a.norm() * state.b.norm() / n).clamp(0.0, 1.0)
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    h(p) + h(1.0 - p)
}

/// Mutual information in bits between energy-basis readouts of the two atoms.
///
/// The outcomes (E₁,G₂) and (G₁,E₂) are perfectly anti-correlated, so I(X;Y) = H(X).
pub fn mutual_information(state: &PostSelectedState) -> f64 {
    let n = state.norm_sqr();
    if n <= 0.0 {
        return 0.0;
    }
    binary_entropy((state.a.norm_sqr() / n).clamp(0.0, 1.0))
}
