//! Line scans of the decohering correlation, lifting of blind spots and the
//! positivity time of the Wigner function.

use serde::{Deserialize, Serialize};

use super::analytic::{CorrelationField, EvolvedWigner};
use super::{decoherence_matrix, LindbladModel, DEFAULT_PANELS};
use crate::error::{Error, Result};
use crate::grid::GridWindow;
use crate::phase::{skew, PhaseVector};
use crate::spots::{hexagonal_lattice, newton_refine, DiffractionModel, IndexRange};
use crate::state::Superposition;

/// Straight line `point + s · direction` with unit `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: PhaseVector,
    pub direction: PhaseVector,
}

impl Line {
    /// Normalizes `direction`; fails for a zero or non-finite direction.
    pub fn new(point: PhaseVector, direction: PhaseVector) -> Result<Self> {
        point.checked("line point")?;
        let n = direction.checked("line direction")?.norm();
        if n == 0.0 {
            return Err(Error::InvalidInput("line direction is zero".into()));
        }
        Ok(Self { point, direction: direction.scale(1.0 / n) })
    }

    /// The line through the origin and `x`.
    pub fn through_origin(x: PhaseVector) -> Result<Self> {
        Self::new(PhaseVector::ZERO, x)
    }

    pub fn at(&self, s: f64) -> PhaseVector {
        self.point + self.direction.scale(s)
    }

    /// Arc-length coordinate of the orthogonal projection of `x`.
    pub fn project(&self, x: PhaseVector) -> f64 {
        (x - self.point).dot(&self.direction)
    }

    pub fn distance(&self, x: PhaseVector) -> f64 {
        skew(self.direction, x - self.point).abs()
    }
}

/// Correlation samples `C(ξ(s), t)` along a line for several times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineScanSeries {
    pub line: Line,
    pub samples: Vec<f64>,
    pub times: Vec<f64>,
    /// `values[k][i]` is `C(line.at(samples[i]), times[k])`.
    pub values: Vec<Vec<f64>>,
}

/// A state, a model and a sampled segment of a line, able to produce the
/// correlation profile at any time.
#[derive(Debug, Clone)]
pub struct LineScan {
    state: Superposition,
    model: LindbladModel,
    line: Line,
    samples: Vec<f64>,
}

impl LineScan {
    pub fn new(state: &Superposition, model: &LindbladModel, line: Line, s_range: (f64, f64), n_samples: usize) -> Result<Self> {
        if n_samples < 3 || !(s_range.0 < s_range.1) || !s_range.0.is_finite() || !s_range.1.is_finite() {
            return Err(Error::InvalidInput("line scan needs at least 3 samples over a non-empty range".into()));
        }
        let ds = (s_range.1 - s_range.0) / (n_samples - 1) as f64;
        let samples = (0..n_samples).map(|i| s_range.0 + i as f64 * ds).collect();
        Ok(Self { state: state.clone(), model: model.clone(), line, samples })
    }

    pub fn line(&self) -> Line {
        self.line
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn field(&self, t: f64) -> Result<CorrelationField> {
        CorrelationField::new(&self.state, &self.model, t)
    }

    pub fn profile(&self, t: f64) -> Result<Vec<f64>> {
        let f = self.field(t)?;
        Ok(self.samples.iter().map(|&s| f.eval(self.line.at(s))).collect())
    }

    pub fn series(&self, times: &[f64]) -> Result<LineScanSeries> {
        use rayon::prelude::*;
        let values = times.par_iter().map(|&t| self.profile(t)).collect::<Result<Vec<_>>>()?;
        Ok(LineScanSeries { line: self.line, samples: self.samples.clone(), times: times.to_vec(), values })
    }
}

/// Samples the evolved correlation along `line` at each time.
pub fn scan_line(
    state: &Superposition,
    model: &LindbladModel,
    line: Line,
    s_range: (f64, f64),
    n_samples: usize,
    times: &[f64],
) -> Result<LineScanSeries> {
    if let Some(&t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::NegativeTime(t));
    }
    LineScan::new(state, model, line, s_range, n_samples)?.series(times)
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_9;
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - R * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + R * (b - a);
            fd = f(d);
        }
    }
    let s = 0.5 * (a + b);
    (s, f(s))
}

/// Parameters of the lifting criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftingCriterion {
    /// Threshold on `Δ / envelope`.
    pub epsilon: f64,
    /// Relative precision of the bisection in `t`.
    pub time_rel_tol: f64,
}

impl Default for LiftingCriterion {
    fn default() -> Self {
        Self { epsilon: 1e-3, time_rel_tol: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftingResult {
    pub tau_l: f64,
    pub spot: PhaseVector,
    /// `(t, Δ(t))` at the sampled times.
    pub delta_series: Vec<(f64, f64)>,
    /// `(t, Δ(t) / envelope)` at the sampled times.
    pub contrast_series: Vec<(f64, f64)>,
    pub criterion: LiftingCriterion,
}

/// Depth of the dip of the correlation profile near a spot.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dip {
    delta: f64,
    envelope: f64,
}

impl Dip {
    fn contrast(&self) -> f64 {
        if self.envelope > 0.0 {
            self.delta / self.envelope
        } else {
            0.0
        }
    }
}

/// Tracks one dip of a [`LineScan`] through time.
struct DipTracker<'a> {
    scan: &'a LineScan,
    s0: f64,
    /// Positions of the maxima flanking the dip at `t = 0`.
    bracket: (f64, f64),
}

impl<'a> DipTracker<'a> {
    fn new(scan: &'a LineScan, spot: PhaseVector) -> Result<Self> {
        let s0 = scan.line.project(spot);
        let mut tr = Self { scan, s0, bracket: (f64::NEG_INFINITY, f64::INFINITY) };
        let ds = scan.samples[1] - scan.samples[0];
        let (smin, lo, hi) = tr.locate(0.0)?.ok_or(Error::NoMinimum)?;
        if (smin - s0).abs() > 2.0 * ds {
            return Err(Error::NoMinimum);
        }
        tr.bracket = (lo, hi);
        Ok(tr)
    }

    /// Position of the tracked minimum and of its flanking maxima.
    fn locate(&self, t: f64) -> Result<Option<(f64, f64, f64)>> {
        Ok(self.measure_full(t)?.map(|(s, _, lo, hi, _)| (s, lo, hi)))
    }

    fn measure(&self, t: f64) -> Result<Dip> {
        Ok(match self.measure_full(t)? {
            Some((_, d, _, _, env)) => Dip { delta: d, envelope: env },
            None => {
                let f = self.scan.field(t)?;
                Dip { delta: 0.0, envelope: f.eval(self.scan.line.at(self.s0)) }
            }
        })
    }

    /// `(s_min, Δ, s_left_max, s_right_max, envelope)`, or `None` once the dip has gone.
    fn measure_full(&self, t: f64) -> Result<Option<(f64, f64, f64, f64, f64)>> {
        let f = self.scan.field(t)?;
        let line = self.scan.line;
        let s = &self.scan.samples;
        let v: Vec<f64> = s.iter().map(|&x| f.eval(line.at(x))).collect();
        let n = v.len();
        let c = |x: f64| f.eval(line.at(x));
        let is_min = |i: usize| v[i] <= v[i - 1] && v[i] <= v[i + 1] && (v[i] < v[i - 1] || v[i] < v[i + 1]);
        let is_max = |i: usize| v[i] >= v[i - 1] && v[i] >= v[i + 1] && (v[i] > v[i - 1] || v[i] > v[i + 1]);
        let Some(imin) = (1..n - 1)
            .filter(|&i| is_min(i) && s[i] > self.bracket.0 && s[i] < self.bracket.1)
            .min_by(|&a, &b| (s[a] - self.s0).abs().total_cmp(&(s[b] - self.s0).abs()))
        else {
            return Ok(None);
        };
        let (smin, cmin) = golden_min(c, s[imin - 1], s[imin + 1]);
        let refine_max = |i: usize| -> (f64, f64) {
            if i == 0 || i == n - 1 {
                return (s[i], v[i]);
            }
            let (x, y) = golden_min(|x| -c(x), s[i - 1], s[i + 1]);
            (x, -y)
        };
        let left = (1..imin).rev().find(|&i| is_max(i)).unwrap_or(0);
        let right = (imin + 1..n - 1).find(|&i| is_max(i)).unwrap_or(n - 1);
        let (sl, cl) = refine_max(left);
        let (sr, cr) = refine_max(right);
        let env = cl + (cr - cl) * (smin - sl) / (sr - sl);
        Ok(Some((smin, (env - cmin).max(0.0), sl, sr, env)))
    }
}

/// Lifting time of the blind spot `spot` on the scan line.
///
/// At every time the local minimum of the profile nearest the spot is
/// compared with the straight line joining its two flanking maxima; `Δ` is
/// the gap. `τ_l` is the earliest time at which `Δ / envelope` drops below
/// `epsilon`, bisected between the first sampled time that satisfies this
/// and the one before it.
pub fn lifting_time(scan: &LineScan, times: &[f64], spot: PhaseVector, criterion: LiftingCriterion) -> Result<LiftingResult> {
    if times.is_empty() {
        return Err(Error::InvalidInput("no times to scan".into()));
    }
    if let Some(&t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::NegativeTime(t));
    }
    let tracker = DipTracker::new(scan, spot)?;
    use rayon::prelude::*;
    let dips = times.par_iter().map(|&t| tracker.measure(t)).collect::<Result<Vec<_>>>()?;
    let delta_series: Vec<(f64, f64)> = times.iter().zip(&dips).map(|(&t, d)| (t, d.delta)).collect();
    let contrast_series: Vec<(f64, f64)> = times.iter().zip(&dips).map(|(&t, d)| (t, d.contrast())).collect();
    let eps = criterion.epsilon;
    let Some(k) = dips.iter().position(|d| d.contrast() < eps) else {
        return Err(Error::NeverLifted(dips.last().map(Dip::contrast).unwrap_or(f64::NAN)));
    };
    let tau_l = if k == 0 {
        times[0]
    } else {
        let (mut lo, mut hi) = (times[k - 1], times[k]);
        while hi - lo > criterion.time_rel_tol * hi {
            let mid = 0.5 * (lo + hi);
            if tracker.measure(mid)?.contrast() < eps {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let spot = scan.line.at(tracker.s0);
    Ok(LiftingResult { tau_l, spot, delta_series, contrast_series, criterion })
}

/// What the positivity tolerance is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceScale {
    /// `W(x) ≥ −tol · Σ|terms(x)|` at every point: negativity must be
    /// resolvable above the rounding floor of the value at that point.
    Local,
    /// `min W ≥ −tol · max W` over all points.
    Peak,
}

/// Options for [`positivity_time`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityOptions {
    pub t_max: f64,
    pub tol: f64,
    pub scale: ToleranceScale,
    /// Relative precision of the bisection in `t`.
    pub time_rel_tol: f64,
    /// Evaluation grid; when absent, boxes around every center and every
    /// pair midpoint are sampled at an eighth of the finest fringe period.
    pub window: Option<GridWindow>,
}

impl Default for PositivityOptions {
    fn default() -> Self {
        Self { t_max: 10.0, tol: 1e-6, scale: ToleranceScale::Local, time_rel_tol: 1e-3, window: None }
    }
}

fn evaluation_points(state: &Superposition, model: &LindbladModel, t: f64, opts: &PositivityOptions) -> Result<Vec<PhaseVector>> {
    if let Some(w) = opts.window {
        w.validate()?;
        return Ok((0..w.rows).flat_map(|i| (0..w.cols).map(move |j| w.point(i, j))).collect());
    }
    let h = state.hbar();
    let centers = state.centers();
    let max_sep = centers
        .iter()
        .flat_map(|a| centers.iter().map(move |b| (*a - *b).norm()))
        .fold(0.0_f64, f64::max);
    let period = if max_sep > 0.0 { 2.0 * std::f64::consts::PI * h / max_sep } else { h.sqrt() };
    let step = (period / 8.0).min(h.sqrt() / 8.0);
    let m = decoherence_matrix(model, t, DEFAULT_PANELS)?.m;
    let lam = 0.5 * (m.trace() + ((m.0[0][0] - m.0[1][1]).powi(2) + 4.0 * m.0[0][1] * m.0[1][0]).max(0.0).sqrt());
    let width = (h / 2.0 + 2.0 * h * lam).sqrt();
    let half = 5.0 * width;
    let n = (2.0 * half / step).ceil() as usize + 1;
    let mut pts = Vec::new();
    for (i, a) in centers.iter().enumerate() {
        for b in &centers[i..] {
            let mid = (*a + *b).scale(0.5);
            for r in 0..n {
                for c in 0..n {
                    let d = PhaseVector::new(-half + r as f64 * step, -half + c as f64 * step);
                    pts.push(mid + d);
                }
            }
        }
    }
    Ok(pts)
}

/// Most negative value of `W_t` relative to the scale selected in `opts`
/// (`min W / max W`, or `min W(x) / Σ|terms(x)|`).
pub fn wigner_negativity(state: &Superposition, model: &LindbladModel, t: f64, opts: &PositivityOptions) -> Result<f64> {
    use rayon::prelude::*;
    let w = EvolvedWigner::new(state, model, t)?;
    let pts = evaluation_points(state, model, t, opts)?;
    match opts.scale {
        ToleranceScale::Peak => {
            let (lo, hi) = pts
                .par_iter()
                .map(|&x| {
                    let v = w.eval(x);
                    (v, v)
                })
                .reduce(|| (f64::INFINITY, f64::NEG_INFINITY), |a, b| (a.0.min(b.0), a.1.max(b.1)));
            Ok(lo / hi)
        }
        ToleranceScale::Local => Ok(pts
            .par_iter()
            .map(|&x| {
                let (v, s) = w.eval_with_scale(x);
                if s > 0.0 {
                    v / s
                } else {
                    0.0
                }
            })
            .reduce(|| f64::INFINITY, f64::min)),
    }
}

/// Earliest time at which the Wigner function is nonnegative within tolerance.
pub fn positivity_time(state: &Superposition, model: &LindbladModel, opts: &PositivityOptions) -> Result<f64> {
    if !(opts.t_max.is_finite() && opts.t_max >= 0.0) {
        return Err(Error::NegativeTime(opts.t_max));
    }
    let ok = |t: f64| -> Result<bool> { Ok(wigner_negativity(state, model, t, opts)? >= -opts.tol) };
    if ok(0.0)? {
        return Ok(0.0);
    }
    let r = wigner_negativity(state, model, opts.t_max, opts)?;
    if r < -opts.tol {
        return Err(Error::NeverPositive(r));
    }
    let (mut lo, mut hi) = (0.0, opts.t_max);
    while hi - lo > opts.time_rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Time scales of a decohering triplet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftingReport {
    pub tau_l: f64,
    pub t_p: f64,
    /// `τ_l · A / (ħ t_p)`.
    pub ratio: f64,
    /// Area of the triangle of centers.
    pub area: f64,
    pub spot: PhaseVector,
    pub lifting: LiftingResult,
}

/// The blind spot closest to the origin among lattice nodes lying within a
/// quarter lattice spacing of `line`, refined by Newton iteration.
pub fn first_spot_on_line(state: &Superposition, line: &Line) -> Result<PhaseVector> {
    let model = DiffractionModel::from_superposition(state)?;
    let lat = hexagonal_lattice(&model, IndexRange::square(3))?;
    let spacing = lat.nearest_neighbor_spacing();
    let node = lat
        .nodes
        .iter()
        .filter(|n| line.distance(n.xi) < 0.25 * spacing)
        .min_by(|a, b| a.xi.norm().total_cmp(&b.xi.norm()))
        .ok_or(Error::NoMinimum)?;
    Ok(newton_refine(state, node.xi, 1e-12, 50)?.xi)
}

/// Lifting time, positivity time and their scaled ratio for a triplet.
///
/// The spot is [`first_spot_on_line`]; the scan covers three times its
/// distance on both sides. The time grid is found by doubling from `1e-3`
/// until the dip has lifted, then sampled at `n_times` points.
pub fn lifting_ratio(
    state: &Superposition,
    model: &LindbladModel,
    line: Line,
    criterion: LiftingCriterion,
    positivity: &PositivityOptions,
) -> Result<LiftingReport> {
    if state.len() != 3 {
        return Err(Error::WrongArity(state.len()));
    }
    let c = state.centers();
    let area = 0.5 * skew(c[1] - c[0], c[2] - c[0]).abs();
    if area == 0.0 {
        return Err(Error::DegenerateGeometry);
    }
    let spot = first_spot_on_line(state, &line)?;
    let s0 = line.project(spot);
    let half = 3.0 * s0.abs().max(1e-3);
    let scan = LineScan::new(state, model, line, (-half, half), 1201)?;
    let tracker = DipTracker::new(&scan, spot)?;
    let mut t_hi = 1e-3;
    while tracker.measure(t_hi)?.contrast() >= criterion.epsilon {
        t_hi *= 2.0;
        if t_hi > 1e4 {
            return Err(Error::NeverLifted(tracker.measure(t_hi)?.contrast()));
        }
    }
    let n_times = 20;
    let times: Vec<f64> = (0..=n_times).map(|k| t_hi * k as f64 / n_times as f64).collect();
    let lifting = lifting_time(&scan, &times, spot, criterion)?;
    let t_p = positivity_time(state, model, positivity)?;
    let ratio = lifting.tau_l * area / (state.hbar() * t_p);
    Ok(LiftingReport { tau_l: lifting.tau_l, t_p, ratio, area, spot: lifting.spot, lifting })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, y) = golden_min(|x| (x - 0.3).powi(2) + 2.0, -1.0, 1.0);
        assert!((x - 0.3).abs() < 1e-7 && (y - 2.0).abs() < 1e-13);
    }

    #[test]
    fn line_geometry() {
        let l = Line::new(PhaseVector::new(1.0, 0.0), PhaseVector::new(0.0, 2.0)).unwrap();
        assert_eq!(l.at(0.5), PhaseVector::new(1.0, 0.5));
        assert_eq!(l.project(PhaseVector::new(3.0, 0.7)), 0.7);
        assert_eq!(l.distance(PhaseVector::new(3.0, 0.7)), 2.0);
        assert!(Line::new(PhaseVector::ZERO, PhaseVector::ZERO).is_err());
    }

    #[test]
    fn coherent_state_is_positive_at_once() {
        let s = Superposition::uniform(0.1, &[PhaseVector::new(0.3, 0.2)]).unwrap();
        let m = LindbladModel::position_momentum(1.0);
        assert_eq!(positivity_time(&s, &m, &PositivityOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn cat_becomes_positive_later() {
        let s = Superposition::uniform(0.1, &[PhaseVector::ZERO, PhaseVector::new(0.0, 2.0)]).unwrap();
        let m = LindbladModel::position_momentum(1.0);
        let tp = positivity_time(&s, &m, &PositivityOptions::default()).unwrap();
        assert!(tp > 0.0);
        let opts = PositivityOptions::default();
        assert!(wigner_negativity(&s, &m, 0.5 * tp, &opts).unwrap() < -opts.tol);
        assert!(wigner_negativity(&s, &m, 1.01 * tp, &opts).unwrap() >= -opts.tol);
    }
}
