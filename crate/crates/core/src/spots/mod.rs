//! Blind spots: zeros of the chord function.
//!
//! Near the origin a superposition of well-separated Gaussians behaves like
//! a set of point scatterers, `χ(ξ) ≈ G(ξ) Σ w_n exp(i η_n∧ξ/ħ)` with
//! `w_n = |a_n|²`. For three terms the phasor sum vanishes on two oblique
//! lattices fixed by triangle closure ([`lattice`]). The exact zeros are
//! found by Newton iteration on the full chord function ([`newton`]), and
//! the nodal lines of `Re χ` and `Im χ` can be traced on a grid ([`nodal`]).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::{skew, PhaseVector};
use crate::state::Superposition;

pub mod lattice;
pub mod newton;
pub mod nodal;

pub use lattice::{hexagonal_lattice, recover_centers, sublattice_nodes, BlindSpotLattice, IndexRange, LatticeNode};
pub use newton::{
    find_spots_generic, find_spots_with, newton_refine, newton_refine_with, RefinedSpot, SearchRect, SpotSearch,
};
pub use nodal::{trace_nodal_lines, NodalLineSet, NodalPart};

/// Point-scatterer data of the small-chord approximation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffractionModel {
    hbar: f64,
    weights: Vec<f64>,
    centers: Vec<PhaseVector>,
}

impl DiffractionModel {
    /// Builds a model from raw weights and absolute centers. Weights are
    /// rescaled to sum to one and centers are taken relative to the first.
    pub fn new(hbar: f64, weights: &[f64], centers: &[PhaseVector]) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidInput(format!("hbar must be positive, got {hbar}")));
        }
        if weights.is_empty() || weights.len() != centers.len() {
            return Err(Error::InvalidInput("weights and centers must be non-empty and of equal length".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidInput("weights must be finite and nonnegative".into()));
        }
        for c in centers {
            c.checked("center")?;
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidInput("weights sum to zero".into()));
        }
        let origin = centers[0];
        Ok(Self {
            hbar,
            weights: weights.iter().map(|w| w / total).collect(),
            centers: centers.iter().map(|&c| c - origin).collect(),
        })
    }

    /// Weights `|a_n|²` and relative centers of a superposition.
    pub fn from_superposition(state: &Superposition) -> Result<Self> {
        let w: Vec<f64> = state.terms().iter().map(|t| t.amplitude.norm_sqr()).collect();
        Self::new(state.hbar(), &w, &state.centers())
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn centers(&self) -> &[PhaseVector] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Small-chord approximation `Σ w_n exp(i η_n∧ξ / ħ)`.
pub fn small_chord(model: &DiffractionModel, xi: PhaseVector) -> Complex64 {
    model
        .weights
        .iter()
        .zip(&model.centers)
        .map(|(&w, &c)| Complex64::from_polar(w, skew(c, xi) / model.hbar))
        .sum()
}

/// Which of the two mirror-image closure triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `θ1 ∈ (π, 2π)`; labels sublattice A.
    Plus,
    /// Complex conjugate of `Plus`; labels sublattice B.
    Minus,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::Plus => "A",
            Branch::Minus => "B",
        }
    }
}

/// Phases `θ1, θ2` (with `θ0 = 0`) at which three weighted phasors close.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub branch: Branch,
}

impl TriangleAngles {
    /// `|w0 + w1 e^{iθ1} + w2 e^{iθ2}|`.
    pub fn closure_residual(&self, w: [f64; 3]) -> f64 {
        (Complex64::new(w[0], 0.0) + Complex64::from_polar(w[1], self.theta1) + Complex64::from_polar(w[2], self.theta2))
            .norm()
    }
}

/// Both closure triangles with sides `w0, w1, w2`.
///
/// The first phasor lies on the positive real axis; the vertex joining the
/// second and third phasors is placed by the law of cosines. Returns
/// `(plus, minus)`.
pub fn triangle_close(w0: f64, w1: f64, w2: f64) -> Result<(TriangleAngles, TriangleAngles)> {
    let w = [w0, w1, w2];
    if w.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidInput(format!("triangle sides must be positive, got {w:?}")));
    }
    let max = w0.max(w1).max(w2);
    if max > (w0 + w1 + w2) - max {
        return Err(Error::NoClosure(w0, w1, w2));
    }
    // P = w0 + w1 e^{iθ1} satisfies |P| = w2 and |P − w0| = w1
    let x = (w0 * w0 + w2 * w2 - w1 * w1) / (2.0 * w0);
    let y = ((w2 - x) * (w2 + x)).max(0.0).sqrt();
    let angles = |y: f64, branch| {
        let theta1 = y.atan2(x - w0).rem_euclid(2.0 * PI);
        let theta2 = (-y).atan2(-x).rem_euclid(2.0 * PI);
        TriangleAngles { theta1, theta2, branch }
    };
    Ok((angles(-y, Branch::Plus), angles(y, Branch::Minus)))
}
