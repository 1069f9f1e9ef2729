//! Exact zeros of the chord function by damped Newton iteration.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Branch;
use crate::chord::ChordFunction;
use crate::error::{Error, Result};
use crate::phase::PhaseVector;
use crate::state::Superposition;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 50;
pub const DEFAULT_SEED_THRESHOLD: f64 = 1e-2;

/// A converged zero of `χ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinedSpot {
    pub xi: PhaseVector,
    /// `|χ(ξ)|` at the returned point.
    pub residual: f64,
    pub iterations: usize,
    pub seed: PhaseVector,
    pub lattice_index: Option<(i64, i64, Branch)>,
}

/// Jacobian of `ξ ↦ (Re χ, Im χ)`, rows `(Re, Im)` and columns `(p, q)`.
fn jacobian(g: [Complex64; 2]) -> [[f64; 2]; 2] {
    [[g[0].re, g[1].re], [g[0].im, g[1].im]]
}

/// Newton step solving `J δ = −F`.
///
/// Where `J` has rank one (for instance where `χ` is real along a whole
/// region) the minimum-norm least-squares step `−Jᵀ F / ‖J‖²` is taken; it
/// moves straight onto the nodal line of the surviving component.
fn newton_step(j: [[f64; 2]; 2], f: Complex64) -> Result<PhaseVector> {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let frob = j.iter().flatten().map(|v| v * v).sum::<f64>();
    if frob < 1e-300 || !frob.is_finite() {
        return Err(Error::SingularJacobian(det, frob.sqrt()));
    }
    let (fr, fi) = (f.re, f.im);
    if det.abs() > 1e-10 * frob {
        Ok(PhaseVector::new(-(j[1][1] * fr - j[0][1] * fi) / det, -(-j[1][0] * fr + j[0][0] * fi) / det))
    } else {
        Ok(PhaseVector::new(-(j[0][0] * fr + j[1][0] * fi) / frob, -(j[0][1] * fr + j[1][1] * fi) / frob))
    }
}

/// Newton iteration on a compiled chord function.
///
/// Convergence is `|χ| ≤ tol · min(1, Σ|terms|)`. The relative form stops a
/// single decaying Gaussian from passing as a zero through underflow.
pub fn newton_refine_with(f: &ChordFunction, seed: PhaseVector, tol: f64, max_iter: usize) -> Result<RefinedSpot> {
    seed.checked("seed")?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let converged = |x: PhaseVector, v: Complex64| {
        let scale = f.term_scale(x);
        scale > 0.0 && v.norm() <= tol * scale.min(1.0)
    };
    let mut x = seed;
    let (mut v, mut g) = f.eval_with_gradient(x);
    for it in 0..=max_iter {
        if converged(x, v) {
            return Ok(RefinedSpot { xi: x, residual: v.norm(), iterations: it, seed, lattice_index: None });
        }
        if it == max_iter {
            break;
        }
        let step = newton_step(jacobian(g), v)?;
        let mut lambda = 1.0;
        let mut trial = x + step;
        let mut tv = f.eval(trial);
        while tv.norm() > v.norm() && lambda > 1.0 / 1024.0 {
            lambda *= 0.5;
            trial = x + step.scale(lambda);
            tv = f.eval(trial);
        }
        if !trial.is_finite() {
            break;
        }
        x = trial;
        (v, g) = f.eval_with_gradient(x);
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: v.norm() })
}

/// Newton refinement of a zero of the state's chord function from `seed`.
pub fn newton_refine(state: &Superposition, seed: PhaseVector, tol: f64, max_iter: usize) -> Result<RefinedSpot> {
    newton_refine_with(&ChordFunction::new(state)?, seed, tol, max_iter)
}

/// Axis-aligned search region of the chord plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRect {
    pub p: (f64, f64),
    pub q: (f64, f64),
}

impl SearchRect {
    /// `|ξ_p|, |ξ_q| ≤ half`.
    pub fn centered(half: f64) -> Self {
        Self { p: (-half, half), q: (-half, half) }
    }

    pub fn contains(&self, x: PhaseVector) -> bool {
        x.p >= self.p.0 && x.p <= self.p.1 && x.q >= self.q.0 && x.q <= self.q.1
    }
}

/// Options for [`find_spots_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotSearch {
    pub rect: SearchRect,
    pub grid_step: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Grid minima of `|χ|²` above this value are not refined.
    pub seed_threshold: f64,
}

impl SpotSearch {
    pub fn new(rect: SearchRect, grid_step: f64) -> Self {
        Self { rect, grid_step, tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER, seed_threshold: DEFAULT_SEED_THRESHOLD }
    }
}

/// Scans `|χ|²`, refines each sufficiently deep local minimum and returns
/// the distinct zeros found inside the rectangle, sorted by `(p, q)`.
pub fn find_spots_generic(state: &Superposition, rect: SearchRect, grid_step: f64, tol: f64) -> Result<Vec<RefinedSpot>> {
    find_spots_with(state, &SpotSearch { tol, ..SpotSearch::new(rect, grid_step) })
}

pub fn find_spots_with(state: &Superposition, opts: &SpotSearch) -> Result<Vec<RefinedSpot>> {
    let f = ChordFunction::new(state)?;
    let r = opts.rect;
    if !(opts.grid_step > 0.0) || !(r.p.0 < r.p.1 && r.q.0 < r.q.1) {
        return Err(Error::InvalidInput("search needs a positive step and a non-empty rectangle".into()));
    }
    let rows = ((r.p.1 - r.p.0) / opts.grid_step).round() as usize + 1;
    let cols = ((r.q.1 - r.q.0) / opts.grid_step).round() as usize + 1;
    let dp = (r.p.1 - r.p.0) / (rows - 1).max(1) as f64;
    let dq = (r.q.1 - r.q.0) / (cols - 1).max(1) as f64;
    let pt = |i: usize, j: usize| PhaseVector::new(r.p.0 + i as f64 * dp, r.q.0 + j as f64 * dq);
    let vals: Vec<f64> = (0..rows)
        .into_par_iter()
        .flat_map_iter(|i| {
            let f = &f;
            (0..cols).map(move |j| f.eval(pt(i, j)).norm_sqr())
        })
        .collect();
    let at = |i: usize, j: usize| vals[i * cols + j];

    let mut seeds = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let v = at(i, j);
            if v >= opts.seed_threshold {
                continue;
            }
            let mut is_min = true;
            'nb: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || ni < 0 || nj < 0 || ni >= rows as i64 || nj >= cols as i64 {
                        continue;
                    }
                    let nv = at(ni as usize, nj as usize);
                    // strict against earlier neighbors so plateaus yield one seed
                    if nv < v || (nv == v && (di, dj) < (0, 0)) {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                seeds.push(pt(i, j));
            }
        }
    }

    let refined: Vec<RefinedSpot> = seeds
        .par_iter()
        .filter_map(|&s| newton_refine_with(&f, s, opts.tol, opts.max_iter).ok())
        .filter(|s| r.contains(s.xi))
        .collect();

    let radius = 0.5 * opts.grid_step;
    let mut out: Vec<RefinedSpot> = Vec::new();
    for s in refined {
        if let Some(prev) = out.iter_mut().find(|o| (o.xi - s.xi).norm() < radius) {
            if s.residual < prev.residual {
                *prev = s;
            }
        } else {
            out.push(s);
        }
    }
    out.sort_by(|a, b| a.xi.p.total_cmp(&b.xi.p).then(a.xi.q.total_cmp(&b.xi.q)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_gaussian_never_converges() {
        let s = Superposition::uniform(0.1, &[PhaseVector::new(0.3, 0.2)]).unwrap();
        let r = newton_refine(&s, PhaseVector::new(0.1, 0.1), DEFAULT_TOL, DEFAULT_MAX_ITER);
        assert!(matches!(r, Err(Error::NoConvergence { .. })), "{r:?}");
        let found = find_spots_generic(&s, SearchRect::centered(0.5), 0.02, DEFAULT_TOL).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let s = Superposition::uniform(
            0.075,
            &[PhaseVector::ZERO, PhaseVector::new(1.5, -0.1), PhaseVector::new(0.2, 1.5)],
        )
        .unwrap();
        let f = ChordFunction::new(&s).unwrap();
        let x = PhaseVector::new(0.04, -0.07);
        let (_, g) = f.eval_with_gradient(x);
        let h = 1e-6;
        let fd_p = (f.eval(x + PhaseVector::new(h, 0.0)) - f.eval(x - PhaseVector::new(h, 0.0))) / (2.0 * h);
        let fd_q = (f.eval(x + PhaseVector::new(0.0, h)) - f.eval(x - PhaseVector::new(0.0, h))) / (2.0 * h);
        assert!((g[0] - fd_p).norm() <= 1e-5 * g[0].norm());
        assert!((g[1] - fd_q).norm() <= 1e-5 * g[1].norm());
    }

    #[test]
    fn rank_one_step_lands_on_the_line() {
        // F = (ξ_p − 1, 0): Jacobian [[1, 0], [0, 0]]
        let st = newton_step([[1.0, 0.0], [0.0, 0.0]], Complex64::new(-1.0, 0.0)).unwrap();
        assert_eq!(st, PhaseVector::new(1.0, 0.0));
        assert!(newton_step([[0.0; 2]; 2], Complex64::new(1.0, 0.0)).is_err());
    }
}
