//! Markovian decoherence of chord functions.
//!
//! For a quadratic Hamiltonian `H(x) = x·Hx` and linear Lindblad operators
//! `L_j(x) = (l'_j + i l''_j)·x` with `α = Σ l''_j∧l'_j = 0`, the chord
//! function obeys
//!
//! ```text
//! ∂χ/∂t = −(2JHξ)·∇χ − (1/2ħ) Σ_j [(l'_j·ξ)² + (l''_j·ξ)²] χ
//! ```
//!
//! whose solution is the classically transported initial chord function
//! times a shrinking Gaussian: `χ_t(ξ) = χ_0(R_{−t}ξ) exp(−ξ·M_tξ/ħ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chord::ChordFunction;
use crate::error::{Error, Result};
use crate::grid::{fourier_2d, FieldGrid, FieldKind, GridWindow};
use crate::phase::{skew, Mat2, PhaseVector};
use crate::state::Superposition;

pub mod analytic;
pub mod lifting;

pub use analytic::{CorrelationField, EvolvedWigner};
pub use lifting::{
    lifting_ratio, lifting_time, positivity_time, scan_line, Line, LiftingCriterion, LiftingReport, LiftingResult,
    LineScan, LineScanSeries, PositivityOptions, ToleranceScale,
};

/// Default number of Simpson panels for `M_t`.
pub const DEFAULT_PANELS: usize = 200;

/// Couplings with `|α|` above this are treated as dissipative.
pub const ALPHA_TOL: f64 = 1e-12;

/// Overall constant applied to the raw `M_t` quadrature (whose integrand
/// carries a prefactor 2). Fixed so that for `H = 0` the Gaussian factor
/// solves the chord master equation, giving `M_t = (t/2) Σ (l'l'ᵀ + l''l''ᵀ)`.
pub const M_CALIBRATION: f64 = 0.25;

/// Complex linear coupling `l = l' + i l''`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub re: PhaseVector,
    pub im: PhaseVector,
}

impl Coupling {
    /// Hermitian coupling with real symbol `l·x`.
    pub fn hermitian(l: PhaseVector) -> Self {
        Self { re: l, im: PhaseVector::ZERO }
    }
}

/// Quadratic Hamiltonian and linear Lindblad operators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LindbladModel {
    h: Mat2,
    couplings: Vec<Coupling>,
}

impl LindbladModel {
    pub fn new(h: Mat2, couplings: Vec<Coupling>) -> Result<Self> {
        if !h.is_finite() || !h.is_symmetric(1e-12) {
            return Err(Error::InvalidInput("Hamiltonian matrix must be finite and symmetric".into()));
        }
        for c in &couplings {
            c.re.checked("coupling")?;
            c.im.checked("coupling")?;
        }
        Ok(Self { h, couplings })
    }

    /// `H = 0` with Hermitian couplings `√γ p̂` and `√γ q̂`.
    pub fn position_momentum(gamma: f64) -> Self {
        let s = gamma.sqrt();
        Self {
            h: Mat2::ZERO,
            couplings: vec![Coupling::hermitian(PhaseVector::new(s, 0.0)), Coupling::hermitian(PhaseVector::new(0.0, s))],
        }
    }

    pub fn with_hamiltonian(mut self, h: Mat2) -> Result<Self> {
        if !h.is_finite() || !h.is_symmetric(1e-12) {
            return Err(Error::InvalidInput("Hamiltonian matrix must be finite and symmetric".into()));
        }
        self.h = h;
        Ok(self)
    }

    /// Every coupling multiplied by `factor`.
    pub fn scaled_couplings(&self, factor: f64) -> Self {
        let couplings = self.couplings.iter().map(|c| Coupling { re: c.re.scale(factor), im: c.im.scale(factor) }).collect();
        Self { h: self.h, couplings }
    }

    pub fn hamiltonian(&self) -> Mat2 {
        self.h
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    /// `Λ = Σ (l'l'ᵀ + l''l''ᵀ)`.
    pub fn diffusion(&self) -> Mat2 {
        self.couplings.iter().fold(Mat2::ZERO, |acc, c| acc + Mat2::outer(c.re, c.re) + Mat2::outer(c.im, c.im))
    }

    fn require_conservative(&self) -> Result<()> {
        let a = dissipation_coeff(self);
        if a.abs() > ALPHA_TOL {
            return Err(Error::DissipativeUnsupported(a));
        }
        Ok(())
    }
}

/// `α = Σ_j l''_j ∧ l'_j`.
pub fn dissipation_coeff(model: &LindbladModel) -> f64 {
    model.couplings.iter().map(|c| skew(c.im, c.re)).sum()
}

/// Linear Hamiltonian flow `R_t = exp(2JHt)`.
pub fn propagator_matrix(h: &Mat2, t: f64) -> Mat2 {
    (Mat2::J * *h).scale(2.0 * t).exp()
}

/// Gaussian decoherence factor `exp(−ξ·M_tξ/ħ)` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoherenceGaussian {
    pub t: f64,
    pub m: Mat2,
    /// Simpson panels used after doubling to agreement.
    pub panels: usize,
}

impl DecoherenceGaussian {
    pub fn factor(&self, xi: PhaseVector, hbar: f64) -> f64 {
        (-self.m.quad(xi) / hbar).exp()
    }
}

fn simpson_m(model: &LindbladModel, t: f64, panels: usize) -> Mat2 {
    let lambda = model.diffusion();
    let integrand = |s: f64| {
        let r = propagator_matrix(&model.h, s - t);
        r.transpose() * lambda * r
    };
    let h = t / panels as f64;
    let mut acc = integrand(0.0) + integrand(t);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc = acc + integrand(k as f64 * h).scale(w);
    }
    acc.scale(2.0 * h / 3.0 * M_CALIBRATION)
}

/// `M_t` by composite Simpson quadrature, doubling `panels` until two
/// successive results agree within `1e-10`.
pub fn decoherence_matrix(model: &LindbladModel, t: f64, panels: usize) -> Result<DecoherenceGaussian> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(DecoherenceGaussian { t, m: Mat2::ZERO, panels: 0 });
    }
    let mut n = panels.max(2);
    n += n % 2;
    let mut prev = simpson_m(model, t, n);
    for _ in 0..12 {
        let next = simpson_m(model, t, 2 * n);
        n *= 2;
        let d = (next - prev).max_abs();
        if d <= 1e-10 * next.max_abs().max(1.0) {
            let m = next;
            let sym = 0.5 * (m.0[0][1] + m.0[1][0]);
            return Ok(DecoherenceGaussian { t, m: Mat2::new(m.0[0][0], sym, sym, m.0[1][1]), panels: n });
        }
        prev = next;
    }
    Err(Error::NoConvergence { iterations: n, residual: 0.0 })
}

/// The evolved chord function of one state at one time, compiled for
/// repeated evaluation.
#[derive(Debug, Clone)]
pub struct EvolvedChord {
    chord: ChordFunction,
    back: Mat2,
    gauss: DecoherenceGaussian,
}

impl EvolvedChord {
    pub fn new(state: &Superposition, model: &LindbladModel, t: f64) -> Result<Self> {
        model.require_conservative()?;
        let gauss = decoherence_matrix(model, t, DEFAULT_PANELS)?;
        Ok(Self { chord: ChordFunction::new(state)?, back: propagator_matrix(&model.h, -t), gauss })
    }

    pub fn eval(&self, xi: PhaseVector) -> Complex64 {
        self.chord.eval(self.back.apply(xi)) * self.gauss.factor(xi, self.chord.hbar())
    }

    pub fn decoherence(&self) -> &DecoherenceGaussian {
        &self.gauss
    }
}

/// `χ_t(ξ) = χ_0(R_{−t}ξ) exp(−ξ·M_tξ/ħ)`.
pub fn evolved_chord(state: &Superposition, model: &LindbladModel, xi: PhaseVector, t: f64) -> Result<Complex64> {
    xi.checked("chord")?;
    Ok(EvolvedChord::new(state, model, t)?.eval(xi))
}

/// `C(ξ, t) = FT{|χ_t|²}` on the window's own points.
pub fn evolved_correlation(state: &Superposition, model: &LindbladModel, window: GridWindow, t: f64) -> Result<FieldGrid> {
    let f = EvolvedChord::new(state, model, t)?;
    let g = FieldGrid::sample(window, FieldKind::ChordIntensity, |x| Complex64::new(f.eval(x).norm_sqr(), 0.0))?;
    let c = fourier_2d(&g, state.hbar())?;
    if c.imaginary_ratio() > 1e-9 {
        return Err(Error::ImaginaryResidue(c.imaginary_ratio()));
    }
    Ok(c)
}

/// Wigner function at time `t` by the discrete transform of `χ_t`.
pub fn evolved_wigner_grid(state: &Superposition, model: &LindbladModel, window: GridWindow, t: f64) -> Result<FieldGrid> {
    let f = EvolvedChord::new(state, model, t)?;
    let g = FieldGrid::sample(window, FieldKind::Chord, |x| f.eval(x))?;
    fourier_2d(&g, state.hbar())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dissipation_examples() {
        let m = LindbladModel::position_momentum(1.0);
        assert_eq!(dissipation_coeff(&m), 0.0);
        let d = LindbladModel::new(
            Mat2::ZERO,
            vec![Coupling { re: PhaseVector::new(1.0, 0.0), im: PhaseVector::new(0.0, 1.0) }],
        )
        .unwrap();
        assert_eq!(dissipation_coeff(&d), -1.0);
        let s = Superposition::uniform(0.1, &[PhaseVector::ZERO]).unwrap();
        assert!(matches!(evolved_chord(&s, &d, PhaseVector::ZERO, 1.0), Err(Error::DissipativeUnsupported(_))));
    }

    #[test]
    fn propagator_cases() {
        assert_eq!(propagator_matrix(&Mat2::ZERO, 3.0), Mat2::IDENTITY);
        let r = propagator_matrix(&Mat2::diag(0.5, 0.5), 0.7);
        assert!((r - Mat2::rotation(0.7)).max_abs() < 1e-14);
        let h = Mat2::new(0.3, -0.8, -0.8, 0.1);
        let prod = propagator_matrix(&h, 1.3) * propagator_matrix(&h, -1.3);
        assert!((prod - Mat2::IDENTITY).max_abs() < 1e-12);
        assert!((propagator_matrix(&h, 1.3).det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn m_anchor_and_rotation_invariance() {
        let m = LindbladModel::position_momentum(1.0);
        for t in [0.0, 0.1, 1.0, 2.5] {
            let g = decoherence_matrix(&m, t, DEFAULT_PANELS).unwrap();
            assert!((g.m - Mat2::IDENTITY.scale(t / 2.0)).max_abs() < 1e-12, "t = {t}");
            let rot = m.clone().with_hamiltonian(Mat2::diag(0.5, 0.5)).unwrap();
            let g = decoherence_matrix(&rot, t, DEFAULT_PANELS).unwrap();
            assert!((g.m - Mat2::IDENTITY.scale(t / 2.0)).max_abs() < 1e-12, "t = {t}");
        }
        assert!(matches!(decoherence_matrix(&m, -1.0, 10), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn m_is_monotone_for_a_squeezing_hamiltonian() {
        let m = LindbladModel::new(Mat2::new(0.0, 0.4, 0.4, 0.0), vec![Coupling::hermitian(PhaseVector::new(0.3, 1.0))]).unwrap();
        let a = decoherence_matrix(&m, 0.5, DEFAULT_PANELS).unwrap().m;
        let b = decoherence_matrix(&m, 0.9, DEFAULT_PANELS).unwrap().m;
        let d = b - a;
        assert!(d.trace() > 0.0 && d.det() >= -1e-14);
    }
}
