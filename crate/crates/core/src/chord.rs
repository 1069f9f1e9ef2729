//! Chord functions, Wigner functions and translation correlations.
//!
//! The chord function of a pure state is
//!
//! ```text
//! χ(ξ) = ∫ dq ψ(q + ξ_q/2) ψ*(q − ξ_q/2) exp(−i ξ_p q / ħ) = ⟨Ψ|T_{−ξ}|Ψ⟩
//! ```
//!
//! and splits into `(N+1)²` pairwise complex Gaussians, each evaluated here
//! in closed form. [`chord_quadrature`] integrates the same expression
//! numerically and serves as an independent check.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gauss::{CompensatedSum, Gauss2, GaussForm, WaveParams};
use crate::phase::{skew, PhaseVector};
use crate::state::{MixedEnsemble, Superposition};

/// Accepted deviation of `χ(0)` from one for a normalized state.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Pairwise closed-form representation of `χ(ξ)` for one state.
#[derive(Debug, Clone)]
pub struct ChordFunction {
    hbar: f64,
    pairs: Vec<(Complex64, Gauss2)>,
}

impl ChordFunction {
    /// Compiles the pairwise terms; fails with `NotNormalized` unless `χ(0) = 1`.
    pub fn new(state: &Superposition) -> Result<Self> {
        let f = Self::unchecked(state);
        let c0 = f.eval(PhaseVector::ZERO);
        if (c0.re - 1.0).abs() > NORMALIZATION_TOL || c0.im.abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(c0.re));
        }
        Ok(f)
    }

    pub(crate) fn unchecked(state: &Superposition) -> Self {
        let hbar = state.hbar();
        let waves: Vec<WaveParams> = state.terms().iter().map(|t| t.state.wave(hbar)).collect();
        let mut pairs = Vec::with_capacity(waves.len() * waves.len());
        // variables (q, ξ_p, ξ_q); n outer, m inner
        for (n, wn) in waves.iter().enumerate() {
            for (m, wm) in waves.iter().enumerate() {
                let coef = state.terms()[n].amplitude * state.terms()[m].amplitude.conj();
                let mut f = GaussForm::zero(3);
                f.add_wavefunction(wn, &[1.0, 0.0, 0.5], 0.0, false);
                f.add_wavefunction(wm, &[1.0, 0.0, -0.5], 0.0, true);
                f.add_bilinear(0, 1, Complex64::new(0.0, -1.0 / hbar));
                let g = f.integrate_first().expect("pair integrand decays").into_gauss2();
                pairs.push((coef, g));
            }
        }
        Self { hbar, pairs }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub(crate) fn pairs(&self) -> &[(Complex64, Gauss2)] {
        &self.pairs
    }

    pub fn eval(&self, xi: PhaseVector) -> Complex64 {
        let mut acc = CompensatedSum::default();
        for (coef, g) in &self.pairs {
            acc.add(coef * g.value(xi));
        }
        let z = acc.total();
        // χ(0) = ⟨Ψ|Ψ⟩ is real; the conjugate pair terms only cancel to rounding.
        if xi == PhaseVector::ZERO {
            Complex64::new(z.re, 0.0)
        } else {
            z
        }
    }

    /// `χ(ξ)` together with `(∂χ/∂ξ_p, ∂χ/∂ξ_q)`.
    pub fn eval_with_gradient(&self, xi: PhaseVector) -> (Complex64, [Complex64; 2]) {
        let mut v = CompensatedSum::default();
        let mut dp = CompensatedSum::default();
        let mut dq = CompensatedSum::default();
        for (coef, g) in &self.pairs {
            let t = coef * g.value(xi);
            let [gp, gq] = g.exponent_gradient(xi);
            v.add(t);
            dp.add(t * gp);
            dq.add(t * gq);
        }
        (v.total(), [dp.total(), dq.total()])
    }

    /// `Σ |term|`: the scale against which cancellation in `χ` is measured.
    pub fn term_scale(&self, xi: PhaseVector) -> f64 {
        self.pairs.iter().map(|(c, g)| (c * g.value(xi)).norm()).sum()
    }
}

/// Exact chord function `χ(ξ)` of a normalized state.
pub fn chord_exact(state: &Superposition, xi: PhaseVector) -> Result<Complex64> {
    xi.checked("chord")?;
    Ok(ChordFunction::new(state)?.eval(xi))
}

/// Pure-state correlation `C(ξ) = |⟨Ψ|Ψ_ξ⟩|² = |χ(ξ)|²`.
pub fn correlation_pure(state: &Superposition, xi: PhaseVector) -> Result<f64> {
    Ok(chord_exact(state, xi)?.norm_sqr())
}

/// Step resolving both the Gaussian width and the fastest phase oscillation.
pub fn default_quadrature_step(state: &Superposition) -> f64 {
    let h = state.hbar();
    let max_p = state.centers().iter().fold(0.0_f64, |a, c| a.max(c.p.abs()));
    (h.sqrt() / 20.0).min(h / (10.0 * (1.0 + max_p)))
}

/// Half-width beyond the outermost centers where all wavefunctions are
/// below `1e-14` of their peak.
pub fn default_quadrature_halfwidth(state: &Superposition) -> f64 {
    let min_re = state.terms().iter().map(|t| t.state.width().re).fold(f64::INFINITY, f64::min);
    9.0 * (state.hbar() / min_re).sqrt()
}

/// Composite-Simpson evaluation of the chord integral from the position
/// wavefunctions. Independent of the closed-form pair assembly.
pub fn chord_quadrature(state: &Superposition, xi: PhaseVector, step: f64, halfwidth: f64) -> Result<Complex64> {
    xi.checked("chord")?;
    if !(step > 0.0 && halfwidth > 0.0) {
        return Err(Error::InvalidInput("step and halfwidth must be positive".into()));
    }
    let h = state.hbar();
    let max_p = state.centers().iter().fold(0.0_f64, |a, c| a.max(c.p.abs()));
    let limit = h / (10.0 * max_p + 1.0);
    if step > limit {
        return Err(Error::BadQuadrature { step, limit });
    }
    let waves: Vec<(Complex64, WaveParams)> =
        state.terms().iter().map(|t| (t.amplitude, t.state.wave(h))).collect();
    let psi = |q: f64| waves.iter().map(|(a, w)| a * w.eval(q)).sum::<Complex64>();
    let qs: Vec<f64> = state.centers().iter().map(|c| c.q).collect();
    let lo = qs.iter().cloned().fold(f64::INFINITY, f64::min) - 0.5 * xi.q.abs() - halfwidth;
    let hi = qs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 0.5 * xi.q.abs() + halfwidth;
    let mut panels = ((hi - lo) / step).ceil() as usize;
    panels += panels % 2;
    let dq = (hi - lo) / panels as f64;
    let integrand = |q: f64| {
        psi(q + 0.5 * xi.q) * psi(q - 0.5 * xi.q).conj() * Complex64::from_polar(1.0, -xi.p * q / h)
    };
    let mut acc = CompensatedSum::default();
    for k in 0..=panels {
        let w = if k == 0 || k == panels {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.add(integrand(lo + k as f64 * dq) * w);
    }
    Ok(acc.total() * (dq / 3.0))
}

/// Pairwise closed-form Wigner function.
#[derive(Debug, Clone)]
pub struct WignerFunction {
    hbar: f64,
    pairs: Vec<(Complex64, Gauss2)>,
}

impl WignerFunction {
    pub fn new(state: &Superposition) -> Result<Self> {
        ChordFunction::new(state)?;
        let hbar = state.hbar();
        let waves: Vec<WaveParams> = state.terms().iter().map(|t| t.state.wave(hbar)).collect();
        let mut pairs = Vec::with_capacity(waves.len() * waves.len());
        // W(p, q) = (2πħ)⁻¹ ∫ dy ψ(q + y/2) ψ*(q − y/2) exp(−i p y / ħ); variables (y, p, q)
        for (n, wn) in waves.iter().enumerate() {
            for (m, wm) in waves.iter().enumerate() {
                let coef = state.terms()[n].amplitude * state.terms()[m].amplitude.conj();
                let mut f = GaussForm::zero(3);
                f.add_wavefunction(wn, &[0.5, 0.0, 1.0], 0.0, false);
                f.add_wavefunction(wm, &[-0.5, 0.0, 1.0], 0.0, true);
                f.add_bilinear(0, 1, Complex64::new(0.0, -1.0 / hbar));
                f.add_constant(Complex64::new(-(2.0 * PI * hbar).ln(), 0.0));
                pairs.push((coef, f.integrate_first().expect("pair integrand decays").into_gauss2()));
            }
        }
        Ok(Self { hbar, pairs })
    }

    /// Complex assembly before the imaginary residue is discarded.
    pub fn eval_complex(&self, x: PhaseVector) -> Complex64 {
        let mut acc = CompensatedSum::default();
        for (coef, g) in &self.pairs {
            acc.add(coef * g.value(x));
        }
        acc.total()
    }

    pub fn eval(&self, x: PhaseVector) -> Result<f64> {
        let w = self.eval_complex(x);
        let tol = 1e-9 / (PI * self.hbar);
        if w.im.abs() > tol {
            return Err(Error::ImaginaryResidue(w.im));
        }
        Ok(w.re)
    }
}

/// Exact Wigner function `W(x)` of a normalized state.
pub fn wigner_exact(state: &Superposition, x: PhaseVector) -> Result<f64> {
    x.checked("phase-space point")?;
    WignerFunction::new(state)?.eval(x)
}

/// Chord function of a single centered member: `exp(−|F⁻¹ξ|²/4ħ)`.
fn centered_chord(frame_inv_xi: PhaseVector, hbar: f64) -> f64 {
    (-frame_inv_xi.norm_sqr() / (4.0 * hbar)).exp()
}

/// Chord function of a classical mixture:
/// `Σ w_n χ_n(ξ) exp(i η_n∧ξ / ħ)` with `χ_n` centered at the origin.
pub fn chord_mixture(ens: &MixedEnsemble, xi: PhaseVector) -> Complex64 {
    let h = ens.hbar();
    let mut acc = CompensatedSum::default();
    for (w, s) in ens.terms() {
        let local = centered_chord(s.frame.inverse().apply(xi), h);
        acc.add(Complex64::from_polar(w * local, skew(s.center, xi) / h));
    }
    acc.total()
}
