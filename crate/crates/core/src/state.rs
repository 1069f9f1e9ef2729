//! Superpositions and mixtures of generalized coherent states.
//!
//! A term `|η, F⟩` is the oscillator ground state squeezed/rotated by the
//! frame `F` and then translated to `η`. Its wavefunction is
//!
//! ```text
//! ψ(q) = (Re A / πħ)^{1/4} exp[−A (q − η_q)² / 2ħ + i η_p (q − η_q/2) / ħ]
//! ```
//!
//! where the complex width `A` is fixed by `F` (`A = 1` for the identity
//! frame). This phase convention makes `|η, I⟩ = T_η |0⟩` with the
//! translation operator `T_ξ = exp(i ξ∧x̂ / ħ)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gauss::{CompensatedSum, GaussForm, WaveParams};
use crate::phase::{skew, PhaseVector, SymplecticMatrix};

/// One generalized coherent state: a center plus a symplectic frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GaussianState {
    pub center: PhaseVector,
    pub frame: SymplecticMatrix,
}

impl GaussianState {
    pub fn coherent(center: PhaseVector) -> Self {
        Self { center, frame: SymplecticMatrix::IDENTITY }
    }

    pub fn squeezed(center: PhaseVector, frame: SymplecticMatrix) -> Self {
        Self { center, frame }
    }

    /// Complex width `A` of the position wavefunction.
    ///
    /// The Wigner function is `exp(−(x−η)ᵀG(x−η)/ħ)/πħ` with `G = (F Fᵀ)⁻¹`;
    /// matching it to the Gaussian above gives `A = (1 + i G_pq) / G_pp`.
    pub fn width(&self) -> Complex64 {
        let f = self.frame.matrix();
        let ff = f * f.transpose();
        // (F Fᵀ)⁻¹ with det = 1
        let (g_pp, g_pq) = (ff.0[1][1], -ff.0[0][1]);
        Complex64::new(1.0, g_pq) / g_pp
    }

    pub(crate) fn wave(&self, hbar: f64) -> WaveParams {
        WaveParams::new(self.width(), self.center, hbar)
    }
}

/// A weighted term of a superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub amplitude: Complex64,
    pub state: GaussianState,
}

/// The pure state `Σ a_n |η_n, F_n⟩` together with `ħ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superposition {
    hbar: f64,
    terms: Vec<Term>,
}

fn check_hbar(hbar: f64) -> Result<()> {
    if hbar.is_finite() && hbar > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("hbar = {hbar} must be positive")))
    }
}

impl Superposition {
    pub fn new(hbar: f64, terms: Vec<Term>) -> Result<Self> {
        check_hbar(hbar)?;
        if terms.is_empty() {
            return Err(Error::InvalidInput("superposition needs at least one term".into()));
        }
        for t in &terms {
            t.state.center.checked("center")?;
            if !(t.amplitude.re.is_finite() && t.amplitude.im.is_finite()) {
                return Err(Error::InvalidInput("amplitude is not finite".into()));
            }
        }
        if terms.iter().all(|t| t.amplitude.norm() == 0.0) {
            return Err(Error::InvalidInput("all amplitudes vanish".into()));
        }
        Ok(Self { hbar, terms })
    }

    /// Superposition of plain coherent states from `(amplitude, center)` pairs.
    pub fn coherent(hbar: f64, terms: &[(Complex64, PhaseVector)]) -> Result<Self> {
        Self::new(
            hbar,
            terms.iter().map(|&(amplitude, c)| Term { amplitude, state: GaussianState::coherent(c) }).collect(),
        )
    }

    /// Equal-amplitude coherent states at `centers`, normalized.
    pub fn uniform(hbar: f64, centers: &[PhaseVector]) -> Result<Self> {
        let terms: Vec<_> = centers.iter().map(|&c| (Complex64::new(1.0, 0.0), c)).collect();
        normalize(&Self::coherent(hbar, &terms)?)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn centers(&self) -> Vec<PhaseVector> {
        self.terms.iter().map(|t| t.state.center).collect()
    }

    pub fn all_identity_frames(&self) -> bool {
        self.terms.iter().all(|t| t.state.frame.is_identity())
    }

    /// `⟨self|other⟩`, summed over all pairs of components.
    pub fn inner_product(&self, other: &Superposition) -> Result<Complex64> {
        if (self.hbar - other.hbar).abs() > 1e-15 * self.hbar {
            return Err(Error::InvalidInput("states have different hbar".into()));
        }
        let mut acc = CompensatedSum::default();
        for m in &self.terms {
            let wm = m.state.wave(self.hbar);
            for n in &other.terms {
                let wn = n.state.wave(self.hbar);
                acc.add(m.amplitude.conj() * n.amplitude * overlap(&wm, &wn));
            }
        }
        Ok(acc.total())
    }

    /// `⟨Ψ|Ψ⟩` including all cross overlaps.
    pub fn norm_sqr(&self) -> f64 {
        self.inner_product(self).map(|z| z.re).unwrap_or(f64::NAN)
    }
}

/// `⟨ψ_m|ψ_n⟩ = ∫ ψ_m*(q) ψ_n(q) dq` in closed form.
pub(crate) fn overlap(wm: &WaveParams, wn: &WaveParams) -> Complex64 {
    let mut f = GaussForm::zero(1);
    f.add_wavefunction(wn, &[1.0], 0.0, false);
    f.add_wavefunction(wm, &[1.0], 0.0, true);
    f.integrate_first().expect("Gaussian widths have positive real part").into_scalar()
}

/// Rescales amplitudes so that `⟨Ψ|Ψ⟩ = 1`; phases are kept.
pub fn normalize(state: &Superposition) -> Result<Superposition> {
    let n = state.norm_sqr();
    if !(n >= 1e-300) {
        return Err(Error::ZeroNorm(n));
    }
    let s = 1.0 / n.sqrt();
    let terms = state.terms.iter().map(|t| Term { amplitude: t.amplitude * s, ..*t }).collect();
    Ok(Superposition { hbar: state.hbar, terms })
}

/// `T_ξ |Ψ⟩`: centers move by `ξ`, and each amplitude picks up
/// `exp(i ξ∧η_n / 2ħ)` from `T_ξ T_η = exp(i ξ∧η / 2ħ) T_{ξ+η}`.
pub fn translate_state(state: &Superposition, xi: PhaseVector) -> Superposition {
    let h = state.hbar;
    let terms = state
        .terms
        .iter()
        .map(|t| {
            let phase = Complex64::from_polar(1.0, skew(xi, t.state.center) / (2.0 * h));
            Term {
                amplitude: t.amplitude * phase,
                state: GaussianState { center: t.state.center + xi, frame: t.state.frame },
            }
        })
        .collect();
    Superposition { hbar: h, terms }
}

/// Re-centers the state so that `eta` becomes the origin.
///
/// Implemented as the translation `T_{−η}`, so the chord function only gains
/// the unimodular factor `exp(−i η∧ξ/ħ)` and the blind spots stay put.
pub fn shift_origin(state: &Superposition, eta: PhaseVector) -> Superposition {
    translate_state(state, -eta)
}

/// Applies the metaplectic image of `s` to the state.
///
/// Centers map as `η → Sη` and frames as `F → SF`. A Gaussian of width `A`
/// acquires the factor `(α + iβA)^{−1/2}` (with `α = S_qq`, `β = S_qp`), whose
/// phase differs between components with different frames and is folded
/// into the amplitudes.
pub fn apply_symplectic(state: &Superposition, s: &SymplecticMatrix) -> Superposition {
    let m = s.matrix();
    let (alpha, beta) = (m.0[1][1], m.0[1][0]);
    let terms = state
        .terms
        .iter()
        .map(|t| {
            let a = t.state.width();
            let factor = (Complex64::new(alpha, 0.0) + Complex64::new(0.0, beta) * a).sqrt().inv();
            let phase = factor / factor.norm();
            Term {
                amplitude: t.amplitude * phase,
                state: GaussianState { center: s.apply(t.state.center), frame: s.compose(&t.state.frame) },
            }
        })
        .collect();
    Superposition { hbar: state.hbar, terms }
}

/// Classical mixture `Σ w_n |η_n, F_n⟩⟨η_n, F_n|` with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedEnsemble {
    hbar: f64,
    terms: Vec<(f64, GaussianState)>,
}

impl MixedEnsemble {
    pub fn new(hbar: f64, terms: Vec<(f64, GaussianState)>) -> Result<Self> {
        check_hbar(hbar)?;
        if terms.is_empty() {
            return Err(Error::InvalidInput("ensemble needs at least one member".into()));
        }
        if terms.iter().any(|(w, s)| !(w.is_finite() && *w >= 0.0) || !s.center.is_finite()) {
            return Err(Error::InvalidInput("weights must be finite and nonnegative".into()));
        }
        let total: f64 = terms.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { hbar, terms })
    }

    /// The mixture built from the same components with weights `|a_n|²`.
    pub fn from_superposition(state: &Superposition) -> Self {
        let total: f64 = state.terms.iter().map(|t| t.amplitude.norm_sqr()).sum();
        let terms = state.terms.iter().map(|t| (t.amplitude.norm_sqr() / total, t.state)).collect();
        Self { hbar: state.hbar, terms }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn terms(&self) -> &[(f64, GaussianState)] {
        &self.terms
    }
}
