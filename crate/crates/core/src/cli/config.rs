//! JSON run configuration with a strict schema.
//!
//! Points are written as `[p, q]` pairs and matrices as row-major
//! `[[a, b], [c, d]]`. Unknown keys anywhere in the file are rejected.

use num_complex::Complex64;
use serde::Deserialize;

use crate::decoherence::{Coupling, LindbladModel, ToleranceScale};
use crate::error::{Error, Result};
use crate::grid::{FieldKind, GridWindow};
use crate::phase::{Mat2, PhaseVector, SymplecticMatrix};
use crate::spots::Branch;
use crate::state::{normalize, GaussianState, Superposition, Term};

pub type Pair = [f64; 2];

fn pv(x: Pair) -> PhaseVector {
    PhaseVector::new(x[0], x[1])
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub amplitude: Pair,
    pub center: Pair,
    #[serde(default)]
    pub frame: Option<[Pair; 2]>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub re: Pair,
    #[serde(default)]
    pub im: Pair,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladSpec {
    #[serde(default)]
    pub h: [Pair; 2],
    pub couplings: Vec<CouplingSpec>,
}

/// A rectangle `p × q` sampled on `shape = [rows, cols]` nodes.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub p: Pair,
    pub q: Pair,
    pub shape: [usize; 2],
}

impl WindowSpec {
    pub fn window(&self) -> Result<GridWindow> {
        GridWindow::new((self.p[0], self.p[1]), (self.q[0], self.q[1]), self.shape[0], self.shape[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Chord,
    Wigner,
    Corr,
}

impl GridKind {
    pub fn field_kind(self) -> FieldKind {
        match self {
            GridKind::Chord => FieldKind::Chord,
            GridKind::Wigner => FieldKind::Wigner,
            GridKind::Corr => FieldKind::Correlation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub kind: GridKind,
    pub window: WindowSpec,
    /// Evolution time; nonzero values need a `lindblad` block.
    #[serde(default)]
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpotsSpec {
    /// Search rectangle for the grid scan; defaults to `|ξ_p|, |ξ_q| ≤ 3√ħ`.
    #[serde(default)]
    pub p: Option<Pair>,
    #[serde(default)]
    pub q: Option<Pair>,
    /// Scan step; defaults to `√ħ / 40`.
    #[serde(default)]
    pub grid_step: Option<f64>,
    /// Lattice indices `[−k_range, k_range]²` for three-term states.
    #[serde(default = "default_k_range")]
    pub k_range: i64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_seed_threshold")]
    pub seed_threshold: f64,
}

impl Default for SpotsSpec {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

fn default_k_range() -> i64 {
    2
}
fn default_tol() -> f64 {
    crate::spots::newton::DEFAULT_TOL
}
fn default_max_iter() -> usize {
    crate::spots::newton::DEFAULT_MAX_ITER
}
fn default_seed_threshold() -> f64 {
    crate::spots::newton::DEFAULT_SEED_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSpec {
    #[serde(default)]
    pub point: Pair,
    pub direction: Pair,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositivitySpec {
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_pos_tol")]
    pub tol: f64,
    #[serde(default = "default_scale")]
    pub scale: ToleranceScale,
}

fn default_t_max() -> f64 {
    10.0
}
fn default_pos_tol() -> f64 {
    1e-6
}
fn default_scale() -> ToleranceScale {
    ToleranceScale::Local
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecohereSpec {
    pub line: LineSpec,
    pub s_range: Pair,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub times: Vec<f64>,
    /// Spot whose lifting is measured; defaults to the nearest lattice
    /// zero on the line (three-term states only).
    #[serde(default)]
    pub spot: Option<Pair>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Emit the lifting/positivity summary (three-term states).
    #[serde(default = "default_true")]
    pub summary: bool,
    #[serde(default)]
    pub positivity: Option<PositivitySpec>,
}

fn default_samples() -> usize {
    401
}
fn default_epsilon() -> f64 {
    1e-3
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasuredSpot {
    pub xi: Pair,
    pub k1: i64,
    pub k2: i64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvertSpec {
    /// Triangle sides `|a_n|²`; taken from `states` when absent.
    #[serde(default)]
    pub weights: Option<[f64; 3]>,
    #[serde(default = "default_branch")]
    pub branch: Branch,
    pub spots: [MeasuredSpot; 2],
}

fn default_branch() -> Branch {
    Branch::Plus
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    /// Chord window for the Fourier self-reciprocity check.
    pub window: WindowSpec,
    #[serde(default = "default_check_points")]
    pub points: usize,
}

fn default_check_points() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub hbar: f64,
    #[serde(default)]
    pub states: Vec<StateSpec>,
    /// Rescale amplitudes so that the state has unit norm.
    #[serde(default = "default_true")]
    pub normalize: bool,
    #[serde(default)]
    pub lindblad: Option<LindbladSpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub spots: Option<SpotsSpec>,
    #[serde(default)]
    pub decohere: Option<DecohereSpec>,
    #[serde(default)]
    pub invert: Option<InvertSpec>,
    #[serde(default)]
    pub check: Option<CheckSpec>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))
    }

    pub fn superposition(&self) -> Result<Superposition> {
        let mut terms = Vec::with_capacity(self.states.len());
        for s in &self.states {
            let frame = match s.frame {
                Some(m) => SymplecticMatrix::new(Mat2([m[0], m[1]]))?,
                None => SymplecticMatrix::IDENTITY,
            };
            terms.push(Term {
                amplitude: Complex64::new(s.amplitude[0], s.amplitude[1]),
                state: GaussianState::squeezed(pv(s.center), frame),
            });
        }
        let state = Superposition::new(self.hbar, terms)?;
        if self.normalize {
            normalize(&state)
        } else {
            Ok(state)
        }
    }

    pub fn lindblad_model(&self) -> Result<LindbladModel> {
        let spec = self.lindblad.as_ref().ok_or_else(|| missing("lindblad"))?;
        let couplings = spec.couplings.iter().map(|c| Coupling { re: pv(c.re), im: pv(c.im) }).collect();
        LindbladModel::new(Mat2(spec.h), couplings)
    }
}

pub(crate) fn missing(block: &str) -> Error {
    Error::InvalidInput(format!("config has no `{block}` block"))
}

pub(crate) fn point(x: Pair) -> PhaseVector {
    pv(x)
}
