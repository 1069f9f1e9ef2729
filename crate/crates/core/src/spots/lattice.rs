//! Oblique sublattices of blind spots for three-term superpositions and
//! the inverse problem of recovering the centers from two indexed spots.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{triangle_close, Branch, DiffractionModel, TriangleAngles};
use crate::error::{Error, Result};
use crate::phase::{skew, PhaseVector};

/// Inclusive box of lattice indices `(k1, k2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRange {
    pub k1: (i64, i64),
    pub k2: (i64, i64),
}

impl IndexRange {
    /// `[−r, r]²`.
    pub fn square(r: i64) -> Self {
        Self { k1: (-r, r), k2: (-r, r) }
    }

    fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (self.k1.0..=self.k1.1).flat_map(move |a| (self.k2.0..=self.k2.1).map(move |b| (a, b)))
    }
}

/// One predicted zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeNode {
    pub xi: PhaseVector,
    pub k1: i64,
    pub k2: i64,
    pub sublattice: Branch,
}

/// Both sublattices of predicted zeros for a three-term model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlindSpotLattice {
    /// Translations produced by `k1 += 1` and `k2 += 1`.
    pub basis: [PhaseVector; 2],
    /// The `k = (0, 0)` node of sublattice A, then of sublattice B.
    pub offsets: [PhaseVector; 2],
    pub angles: [TriangleAngles; 2],
    pub index_range: IndexRange,
    /// Sorted by sublattice, then `k1`, then `k2`.
    pub nodes: Vec<LatticeNode>,
}

impl BlindSpotLattice {
    /// The `count` nodes closest to the origin (ties broken by canonical order).
    pub fn nearest(&self, count: usize) -> Vec<LatticeNode> {
        let mut v = self.nodes.clone();
        v.sort_by(|a, b| a.xi.norm().total_cmp(&b.xi.norm()));
        v.truncate(count);
        v
    }

    /// The hexagon of zeros surrounding the origin: three nodes from each sublattice.
    pub fn first_shell(&self) -> Vec<LatticeNode> {
        let mut out = Vec::with_capacity(6);
        for branch in [Branch::Plus, Branch::Minus] {
            let mut v: Vec<LatticeNode> = self.nodes.iter().copied().filter(|n| n.sublattice == branch).collect();
            v.sort_by(|a, b| a.xi.norm().total_cmp(&b.xi.norm()));
            out.extend(v.into_iter().take(3));
        }
        out
    }

    /// Smallest distance between two distinct nodes.
    pub fn nearest_neighbor_spacing(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.nodes.iter().enumerate() {
            for b in &self.nodes[i + 1..] {
                best = best.min((a.xi - b.xi).norm());
            }
        }
        best
    }
}

/// Solves `[[a, b], [c, d]] x = r`, with `det` supplied by the caller.
fn cramer(a: f64, b: f64, c: f64, d: f64, r: (f64, f64)) -> PhaseVector {
    let det = a * d - b * c;
    PhaseVector::new((r.0 * d - b * r.1) / det, (a * r.1 - c * r.0) / det)
}

/// Nodes `ξ` with `η_n∧ξ / ħ = θ_n + 2π k_n` for `n = 1, 2` and every `(k1, k2)` in range.
pub fn sublattice_nodes(
    angles: &TriangleAngles,
    eta1: PhaseVector,
    eta2: PhaseVector,
    hbar: f64,
    range: IndexRange,
) -> Result<Vec<(PhaseVector, i64, i64)>> {
    eta1.checked("eta1")?;
    eta2.checked("eta2")?;
    let det = skew(eta1, eta2);
    if det.abs() < 1e-12 * eta1.norm() * eta2.norm() || det == 0.0 {
        return Err(Error::DegenerateGeometry);
    }
    // η∧ξ = −η_q ξ_p + η_p ξ_q
    Ok(range
        .iter()
        .map(|(k1, k2)| {
            let r = (
                hbar * (angles.theta1 + 2.0 * PI * k1 as f64),
                hbar * (angles.theta2 + 2.0 * PI * k2 as f64),
            );
            (cramer(-eta1.q, eta1.p, -eta2.q, eta2.p, r), k1, k2)
        })
        .collect())
}

/// Both sublattices of a three-term model, merged and sorted canonically.
pub fn hexagonal_lattice(model: &DiffractionModel, range: IndexRange) -> Result<BlindSpotLattice> {
    if model.len() != 3 {
        return Err(Error::WrongArity(model.len()));
    }
    let w = model.weights();
    let (plus, minus) = triangle_close(w[0], w[1], w[2])?;
    let (e1, e2) = (model.centers()[1], model.centers()[2]);
    let h = model.hbar();
    let mut nodes = Vec::new();
    for angles in [&plus, &minus] {
        for (xi, k1, k2) in sublattice_nodes(angles, e1, e2, h, range)? {
            nodes.push(LatticeNode { xi, k1, k2, sublattice: angles.branch });
        }
    }
    nodes.sort_by_key(|n| (n.sublattice, n.k1, n.k2));
    let zero = TriangleAngles { theta1: 0.0, theta2: 0.0, branch: Branch::Plus };
    let cell = IndexRange { k1: (0, 1), k2: (0, 0) };
    let b1 = sublattice_nodes(&zero, e1, e2, h, cell)?[1].0;
    let cell = IndexRange { k1: (0, 0), k2: (0, 1) };
    let b2 = sublattice_nodes(&zero, e1, e2, h, cell)?[1].0;
    let origin = IndexRange { k1: (0, 0), k2: (0, 0) };
    let offsets = [
        sublattice_nodes(&plus, e1, e2, h, origin)?[0].0,
        sublattice_nodes(&minus, e1, e2, h, origin)?[0].0,
    ];
    Ok(BlindSpotLattice { basis: [b1, b2], offsets, angles: [plus, minus], index_range: range, nodes })
}

/// Recovers `η1, η2` (relative to the first center) from two indexed zeros
/// of the same closure branch.
pub fn recover_centers(
    angles: &TriangleAngles,
    spot_a: (PhaseVector, i64, i64),
    spot_b: (PhaseVector, i64, i64),
    hbar: f64,
) -> Result<(PhaseVector, PhaseVector)> {
    let (xa, xb) = (spot_a.0.checked("spot")?, spot_b.0.checked("spot")?);
    let det = skew(xa, xb);
    if det.abs() < 1e-12 * xa.norm() * xb.norm() || det == 0.0 {
        return Err(Error::DegenerateSpots);
    }
    // η∧ξ = ξ_q η_p − ξ_p η_q
    let solve = |theta: f64, ka: i64, kb: i64| {
        let r = (hbar * (theta + 2.0 * PI * ka as f64), hbar * (theta + 2.0 * PI * kb as f64));
        cramer(xa.q, -xa.p, xb.q, -xb.p, r)
    };
    Ok((solve(angles.theta1, spot_a.1, spot_b.1), solve(angles.theta2, spot_a.2, spot_b.2)))
}
