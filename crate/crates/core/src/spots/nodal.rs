//! Zero contours of `Re χ` or `Im χ` by marching squares.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::grid::{FieldGrid, FieldKind};
use crate::error::{Error, Result};
use crate::phase::PhaseVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodalPart {
    Real,
    Imaginary,
}

/// Polylines along which the selected part of `χ` vanishes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalLineSet {
    pub part: NodalPart,
    pub polylines: Vec<Vec<PhaseVector>>,
}

impl NodalLineSet {
    /// Distance from `x` to the nearest polyline segment.
    pub fn distance_to(&self, x: PhaseVector) -> f64 {
        let mut best = f64::INFINITY;
        for line in &self.polylines {
            if line.len() == 1 {
                best = best.min((line[0] - x).norm());
            }
            for w in line.windows(2) {
                best = best.min(segment_distance(w[0], w[1], x));
            }
        }
        best
    }

    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(Vec::len).sum()
    }
}

fn segment_distance(a: PhaseVector, b: PhaseVector, x: PhaseVector) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    let t = if len2 == 0.0 { 0.0 } else { ((x - a).dot(&d) / len2).clamp(0.0, 1.0) };
    (a + d.scale(t) - x).norm()
}

/// Cell edges: horizontal `(i, j)` joins samples `(i, j)` and `(i, j+1)`,
/// vertical `(i, j)` joins `(i, j)` and `(i+1, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

/// Traces the zero set of `Re χ` or `Im χ` on a chord grid.
///
/// Crossings are placed by linear interpolation along cell edges and joined
/// into polylines through shared edges. Saddle cells are split using the
/// average of their four corners.
pub fn trace_nodal_lines(grid: &FieldGrid, part: NodalPart) -> Result<NodalLineSet> {
    if grid.kind != FieldKind::Chord {
        return Err(Error::InvalidInput(format!("nodal lines need a chord grid, got {:?}", grid.kind)));
    }
    let w = grid.window;
    let val = |i: usize, j: usize| {
        let z = grid.at(i, j);
        match part {
            NodalPart::Real => z.re,
            NodalPart::Imaginary => z.im,
        }
    };
    let pos = |i: usize, j: usize| val(i, j) > 0.0;
    let crossing = |e: Edge| -> PhaseVector {
        let ((i0, j0), (i1, j1)) = match e {
            Edge::H(i, j) => ((i, j), (i, j + 1)),
            Edge::V(i, j) => ((i, j), (i + 1, j)),
        };
        let (v0, v1) = (val(i0, j0), val(i1, j1));
        let t = if v0 == v1 { 0.5 } else { v0 / (v0 - v1) };
        let (a, b) = (w.point(i0, j0), w.point(i1, j1));
        a + (b - a).scale(t)
    };

    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for i in 0..w.rows - 1 {
        for j in 0..w.cols - 1 {
            // corners counter-clockwise: (i,j), (i,j+1), (i+1,j+1), (i+1,j)
            let s = [pos(i, j), pos(i, j + 1), pos(i + 1, j + 1), pos(i + 1, j)];
            let edges = [Edge::H(i, j), Edge::V(i, j + 1), Edge::H(i + 1, j), Edge::V(i, j)];
            let cut: Vec<usize> = (0..4).filter(|&k| s[k] != s[(k + 1) % 4]).collect();
            match cut.len() {
                2 => segments.push((edges[cut[0]], edges[cut[1]])),
                4 => {
                    let centre = 0.25 * (val(i, j) + val(i, j + 1) + val(i + 1, j + 1) + val(i + 1, j));
                    // corner 0 joins the centre when they share a sign
                    if (centre > 0.0) == s[0] {
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }

    let mut by_edge: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        by_edge.entry(*a).or_default().push(k);
        by_edge.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let mut chain = vec![a, b];
        // extend forward from b, then backward from a
        for forward in [true, false] {
            loop {
                let tip = if forward { *chain.last().unwrap() } else { chain[0] };
                let next = by_edge[&tip].iter().copied().find(|&k| !used[k]);
                let Some(k) = next else { break };
                used[k] = true;
                let (x, y) = segments[k];
                let other = if x == tip { y } else { x };
                if forward {
                    chain.push(other);
                } else {
                    chain.insert(0, other);
                }
            }
        }
        polylines.push(chain.into_iter().map(crossing).collect());
    }
    Ok(NodalLineSet { part, polylines })
}
