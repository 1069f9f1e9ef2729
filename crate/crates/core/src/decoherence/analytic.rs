//! Closed-form evolved correlations and Wigner functions.
//!
//! Each pairwise chord term stays a complex Gaussian under the evolution, so
//! the symplectic Fourier integrals defining `C(ξ, t)` and `W_t(x)` can be
//! carried out exactly term by term. These fields are what the line scans
//! and positivity searches evaluate; the grid transforms in the parent
//! module compute the same quantities independently.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{decoherence_matrix, propagator_matrix, LindbladModel, DEFAULT_PANELS};
use crate::chord::ChordFunction;
use crate::error::Result;
use crate::gauss::{CompensatedSum, Gauss2, GaussForm};
use crate::phase::PhaseVector;
use crate::state::Superposition;

/// Pair forms of `χ_t(ξ)`: `χ_0` pairs composed with `R_{−t}` and damped.
fn evolved_pairs(state: &Superposition, model: &LindbladModel, t: f64, damping: f64) -> Result<Vec<(Complex64, Gauss2)>> {
    model.require_conservative()?;
    let chord = ChordFunction::new(state)?;
    let back = propagator_matrix(&model.hamiltonian(), -t);
    let m = decoherence_matrix(model, t, DEFAULT_PANELS)?.m;
    let h = state.hbar();
    Ok(chord
        .pairs()
        .iter()
        .map(|(c, g)| (*c, g.compose_linear(&back).sub_real_quadratic(&m, damping / h)))
        .collect())
}

/// `(2πħ)⁻¹ ∫ dη exp(i η∧ζ/ħ) exp(form(η))` as a form in `ζ`.
fn symplectic_ft(form: &Gauss2, hbar: f64, extra_log: f64) -> Gauss2 {
    // variables (η_p, η_q, ζ_p, ζ_q); η∧ζ = η_p ζ_q − η_q ζ_p
    let mut f = GaussForm::embed(form, 4, 0, 1);
    f.add_bilinear(0, 3, Complex64::new(0.0, 1.0 / hbar));
    f.add_bilinear(1, 2, Complex64::new(0.0, -1.0 / hbar));
    f.add_constant(Complex64::new(-(2.0 * PI * hbar).ln() + extra_log, 0.0));
    f.integrate_first()
        .and_then(|g| g.integrate_first())
        .expect("evolved pair forms decay")
        .into_gauss2()
}

/// `C(ξ, t) = FT{|χ_t|²}(ξ)` in closed form.
#[derive(Debug, Clone)]
pub struct CorrelationField {
    hbar: f64,
    terms: Vec<(Complex64, Gauss2)>,
}

impl CorrelationField {
    pub fn new(state: &Superposition, model: &LindbladModel, t: f64) -> Result<Self> {
        let h = state.hbar();
        let pairs = evolved_pairs(state, model, t, 1.0)?;
        let mut terms = Vec::with_capacity(pairs.len() * pairs.len());
        for (ca, ga) in &pairs {
            for (cb, gb) in &pairs {
                let prod = ga.add(&gb.conj());
                terms.push((ca * cb.conj(), symplectic_ft(&prod, h, 0.0)));
            }
        }
        Ok(Self { hbar: h, terms })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn eval(&self, xi: PhaseVector) -> f64 {
        let mut acc = CompensatedSum::default();
        for (c, g) in &self.terms {
            acc.add(c * g.value(xi));
        }
        acc.total().re
    }

    /// `C(0, t) = tr ρ_t²`.
    pub fn purity(&self) -> f64 {
        self.eval(PhaseVector::ZERO)
    }
}

/// `W_t(x) = (2πħ)⁻² ∫ dξ exp(i ξ∧x/ħ) χ_t(ξ)` in closed form.
#[derive(Debug, Clone)]
pub struct EvolvedWigner {
    terms: Vec<(Complex64, Gauss2)>,
}

impl EvolvedWigner {
    pub fn new(state: &Superposition, model: &LindbladModel, t: f64) -> Result<Self> {
        let h = state.hbar();
        let pairs = evolved_pairs(state, model, t, 1.0)?;
        let extra = -(2.0 * PI * h).ln();
        Ok(Self { terms: pairs.iter().map(|(c, g)| (*c, symplectic_ft(g, h, extra))).collect() })
    }

    pub fn eval(&self, x: PhaseVector) -> f64 {
        self.eval_with_scale(x).0
    }

    /// `W_t(x)` together with `Σ |term|`, the magnitude against which the
    /// rounding error of the assembled value is measured.
    pub fn eval_with_scale(&self, x: PhaseVector) -> (f64, f64) {
        let mut acc = CompensatedSum::default();
        let mut scale = 0.0;
        for (c, g) in &self.terms {
            let v = c * g.value(x);
            scale += v.norm();
            acc.add(v);
        }
        (acc.total().re, scale)
    }
}
