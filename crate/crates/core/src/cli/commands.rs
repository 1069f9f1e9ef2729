//! The five subcommands. Each one reads a [`RunConfig`], does its work and
//! writes a CSV table (metadata lines first, then header and rows).

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use super::config::{missing, point, GridKind, RunConfig, SpotsSpec};
use super::csv::{num, pair, Table};
use crate::chord::{
    chord_quadrature, default_quadrature_halfwidth, default_quadrature_step, ChordFunction,
};
use crate::decoherence::{
    lifting_ratio, lifting_time, positivity_time, CorrelationField, EvolvedChord, EvolvedWigner, Line,
    LiftingCriterion, LineScan, PositivityOptions,
};
use crate::error::{Error, Result};
use crate::grid::{chord_intensity_grid, fourier_2d, wigner_grid, FieldGrid, FieldKind, GridWindow};
use crate::phase::{skew, PhaseVector};
use crate::spots::{
    find_spots_with, hexagonal_lattice, newton_refine_with, recover_centers, triangle_close, DiffractionModel,
    IndexRange, RefinedSpot, SearchRect, SpotSearch,
};
use crate::state::{translate_state, Superposition};

const CONVENTIONS: &str =
    "chord=int psi(q+xi_q/2) conj(psi(q-xi_q/2)) exp(-i xi_p q/hbar) dq; skew(a,b)=a_p*b_q-a_q*b_p; triangle_sides=|a_n|^2";

fn preamble(t: &mut Table, cfg: &RunConfig, command: &str) {
    t.meta("command", command).meta("hbar", num(cfg.hbar)).meta("conventions", CONVENTIONS);
}

fn window_meta(t: &mut Table, w: &GridWindow) {
    t.meta("window_p", pair([w.p.0, w.p.1]))
        .meta("window_q", pair([w.q.0, w.q.1]))
        .meta("shape", format!("{},{}", w.rows, w.cols));
}

fn model_if_evolving(cfg: &RunConfig, t: f64) -> Result<Option<crate::decoherence::LindbladModel>> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 && cfg.lindblad.is_none() {
        return Ok(None);
    }
    cfg.lindblad_model().map(Some)
}

/// Samples the configured field. Chord grids carry `re, im`; the others a
/// single `value` column. Rows follow the [`FieldGrid`] order.
pub fn cmd_grid(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let spec = cfg.grid.as_ref().ok_or_else(|| missing("grid"))?;
    let state = cfg.superposition()?;
    let window = spec.window.window()?;
    let kind = spec.kind.field_kind();
    let grid = match (spec.kind, model_if_evolving(cfg, spec.t)?) {
        (GridKind::Chord, None) => {
            let f = ChordFunction::new(&state)?;
            FieldGrid::sample(window, kind, |x| f.eval(x))?
        }
        (GridKind::Chord, Some(m)) => {
            let f = EvolvedChord::new(&state, &m, spec.t)?;
            FieldGrid::sample(window, kind, |x| f.eval(x))?
        }
        (GridKind::Wigner, None) => wigner_grid(&state, window)?,
        (GridKind::Wigner, Some(m)) => {
            let w = EvolvedWigner::new(&state, &m, spec.t)?;
            FieldGrid::sample(window, kind, |x| Complex64::new(w.eval(x), 0.0))?
        }
        (GridKind::Corr, None) => {
            let f = ChordFunction::new(&state)?;
            FieldGrid::sample(window, kind, |x| Complex64::new(f.eval(x).norm_sqr(), 0.0))?
        }
        (GridKind::Corr, Some(m)) => {
            let c = CorrelationField::new(&state, &m, spec.t)?;
            FieldGrid::sample(window, kind, |x| Complex64::new(c.eval(x), 0.0))?
        }
    };
    let mut t = Table::default();
    preamble(&mut t, cfg, "grid");
    t.meta("kind", format!("{:?}", spec.kind).to_lowercase()).meta("t", num(spec.t));
    window_meta(&mut t, &window);
    if spec.kind == GridKind::Chord {
        t.header(&["xi_p", "xi_q", "re", "im"]);
    } else {
        t.header(&["xi_p", "xi_q", "value"]);
    }
    for i in 0..window.rows {
        for j in 0..window.cols {
            let x = window.point(i, j);
            let v = grid.at(i, j);
            if spec.kind == GridKind::Chord {
                t.row(&[num(x.p), num(x.q), num(v.re), num(v.im)]);
            } else {
                t.row(&[num(x.p), num(x.q), num(v.re)]);
            }
        }
    }
    t.write_to(out)
}

fn spot_row(t: &mut Table, s: &RefinedSpot) {
    let (k1, k2, label) = match s.lattice_index {
        Some((a, b, br)) => (a.to_string(), b.to_string(), br.label().to_string()),
        None => (String::new(), String::new(), String::new()),
    };
    t.row(&[
        num(s.xi.p),
        num(s.xi.q),
        num(s.residual),
        s.iterations.to_string(),
        num(s.seed.p),
        num(s.seed.q),
        k1,
        k2,
        label,
    ]);
}

fn grid_search(state: &Superposition, spec: &SpotsSpec) -> Result<Vec<RefinedSpot>> {
    let h = state.hbar().sqrt();
    let rect = SearchRect {
        p: spec.p.map_or((-3.0 * h, 3.0 * h), |r| (r[0], r[1])),
        q: spec.q.map_or((-3.0 * h, 3.0 * h), |r| (r[0], r[1])),
    };
    let step = spec.grid_step.unwrap_or(h / 40.0);
    find_spots_with(
        state,
        &SpotSearch { rect, grid_step: step, tol: spec.tol, max_iter: spec.max_iter, seed_threshold: spec.seed_threshold },
    )
}

/// Blind spots of the configured state.
///
/// Three-term states are handled through the lattice: every node in
/// `[−k_range, k_range]²` is refined by Newton iteration and reported with
/// its index and sublattice. Other states use the grid scan. When the
/// weights admit no closure, the table is empty apart from a note.
pub fn cmd_spots(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let spec = cfg.spots.clone().unwrap_or_default();
    let state = cfg.superposition()?;
    let model = DiffractionModel::from_superposition(&state)?;
    let w = model.weights();
    let mut t = Table::default();
    preamble(&mut t, cfg, "spots");
    t.meta("terms", state.len()).meta("weights", w.iter().map(|&v| num(v)).collect::<Vec<_>>().join(","));
    let mut spots = Vec::new();
    match state.len() {
        1 => t.note("a single Gaussian has no zeros"),
        2 if (w[0] - w[1]).abs() > 1e-12 => t.note("no closure: unequal weights cannot cancel"),
        3 => match hexagonal_lattice(&model, IndexRange::square(spec.k_range)) {
            Ok(lat) => {
                for (n, name) in [(0, "basis_1"), (1, "basis_2")] {
                    t.meta(name, pair(lat.basis[n].to_array()));
                }
                t.meta("offset_A", pair(lat.offsets[0].to_array()))
                    .meta("offset_B", pair(lat.offsets[1].to_array()))
                    .meta("theta_A", pair([lat.angles[0].theta1, lat.angles[0].theta2]))
                    .meta("theta_B", pair([lat.angles[1].theta1, lat.angles[1].theta2]))
                    .meta("k_range", spec.k_range);
                let f = ChordFunction::new(&state)?;
                let mut failed = 0;
                for node in &lat.nodes {
                    match newton_refine_with(&f, node.xi, spec.tol, spec.max_iter) {
                        Ok(mut s) => {
                            s.lattice_index = Some((node.k1, node.k2, node.sublattice));
                            spots.push(s);
                        }
                        Err(Error::NoConvergence { .. } | Error::SingularJacobian(..)) => failed += 1,
                        Err(e) => return Err(e),
                    }
                }
                if failed > 0 {
                    t.note(&format!("{failed} lattice nodes did not converge"));
                }
                &mut t
            }
            Err(Error::NoClosure(..)) => {
                t.note("no closure: weights violate the triangle inequality");
                spots = grid_search(&state, &spec)?;
                &mut t
            }
            Err(e) => return Err(e),
        },
        _ => {
            spots = grid_search(&state, &spec)?;
            &mut t
        }
    };
    t.header(&["xi_p", "xi_q", "residual", "iterations", "seed_p", "seed_q", "k1", "k2", "sublattice"]);
    for s in &spots {
        spot_row(&mut t, s);
    }
    t.write_to(out)
}

/// Line scans of the evolved correlation at each configured time, preceded
/// by the lifting time, positivity time and their scaled ratio.
pub fn cmd_decohere(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let spec = cfg.decohere.as_ref().ok_or_else(|| missing("decohere"))?;
    let state = cfg.superposition()?;
    let model = cfg.lindblad_model()?;
    if let Some(&bad) = spec.times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::NegativeTime(bad));
    }
    let line = Line::new(point(spec.line.point), point(spec.line.direction))?;
    let scan = LineScan::new(&state, &model, line, (spec.s_range[0], spec.s_range[1]), spec.samples)?;
    let series = scan.series(&spec.times)?;

    let mut t = Table::default();
    preamble(&mut t, cfg, "decohere");
    t.meta("line_point", pair(line.point.to_array()))
        .meta("line_direction", pair(line.direction.to_array()))
        .meta("s_range", pair(spec.s_range))
        .meta("samples", spec.samples);
    if spec.summary {
        let criterion = LiftingCriterion { epsilon: spec.epsilon, ..LiftingCriterion::default() };
        let pos = spec.positivity.clone().unwrap_or_else(|| serde_json::from_str("{}").expect("defaults"));
        let opts = PositivityOptions { t_max: pos.t_max, tol: pos.tol, scale: pos.scale, ..PositivityOptions::default() };
        let c = state.centers();
        let area = if c.len() == 3 { 0.5 * skew(c[1] - c[0], c[2] - c[0]).abs() } else { f64::NAN };
        let (tau_l, t_p, spot) = match spec.spot {
            None if state.len() == 3 => {
                let r = lifting_ratio(&state, &model, line, criterion, &opts)?;
                (r.tau_l, r.t_p, r.spot)
            }
            None => {
                return Err(Error::InvalidInput("decohere summary needs `spot` unless the state has three terms".into()))
            }
            Some(s) => {
                let spot = point(s);
                let lifted = lifting_time(&scan, &spec.times, spot, criterion)?;
                (lifted.tau_l, positivity_time(&state, &model, &opts)?, lifted.spot)
            }
        };
        let ratio = tau_l * area / (state.hbar() * t_p);
        t.meta("epsilon", num(spec.epsilon))
            .meta("positivity_tol", num(opts.tol))
            .meta("positivity_scale", format!("{:?}", opts.scale).to_lowercase())
            .meta("summary_columns", "tau_l,t_p,ratio,area,spot_p,spot_q")
            .meta("summary", [num(tau_l), num(t_p), num(ratio), num(area), num(spot.p), num(spot.q)].join(","));
    }
    t.header(&["t", "s", "xi_p", "xi_q", "value"]);
    for (k, &time) in series.times.iter().enumerate() {
        for (i, &s) in series.samples.iter().enumerate() {
            let x = line.at(s);
            t.row(&[num(time), num(s), num(x.p), num(x.q), num(series.values[k][i])]);
        }
    }
    t.write_to(out)
}

/// Centers relative to the first one, recovered from two indexed spots.
pub fn cmd_invert(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let spec = cfg.invert.as_ref().ok_or_else(|| missing("invert"))?;
    let w = match spec.weights {
        Some(w) => w,
        None => {
            let state = cfg.superposition()?;
            if state.len() != 3 {
                return Err(Error::WrongArity(state.len()));
            }
            let a: Vec<f64> = state.terms().iter().map(|t| t.amplitude.norm_sqr()).collect();
            [a[0], a[1], a[2]]
        }
    };
    if !(cfg.hbar.is_finite() && cfg.hbar > 0.0) {
        return Err(Error::InvalidInput(format!("hbar = {} must be positive", cfg.hbar)));
    }
    let (plus, minus) = triangle_close(w[0], w[1], w[2])?;
    let angles = if spec.branch == plus.branch { plus } else { minus };
    let [a, b] = &spec.spots;
    let (e1, e2) = recover_centers(&angles, (point(a.xi), a.k1, a.k2), (point(b.xi), b.k1, b.k2), cfg.hbar)?;
    let mut t = Table::default();
    preamble(&mut t, cfg, "invert");
    t.meta("branch", angles.branch.label()).meta("theta", pair([angles.theta1, angles.theta2]));
    t.note("centers are relative to the first one");
    t.header(&["n", "eta_p", "eta_q"]);
    for (n, e) in [PhaseVector::ZERO, e1, e2].iter().enumerate() {
        t.row(&[n.to_string(), num(e.p), num(e.q)]);
    }
    t.write_to(out)
}

/// Results of [`cmd_check`]: `(name, value, tolerance, passed)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub results: Vec<(String, f64, f64, bool)>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.3)
    }

    fn record(&mut self, name: &str, value: f64, tol: f64) {
        self.results.push((name.to_string(), value, tol, value <= tol));
    }
}

/// Deterministic low-discrepancy points in the window (R2 sequence).
fn check_points(w: &GridWindow, n: usize) -> Vec<PhaseVector> {
    const G: f64 = 1.324_717_957_244_746;
    let (a1, a2) = (1.0 / G, 1.0 / (G * G));
    (1..=n)
        .map(|k| {
            let (u, v) = ((0.5 + a1 * k as f64).fract(), (0.5 + a2 * k as f64).fract());
            PhaseVector::new(w.p.0 + u * (w.p.1 - w.p.0), w.q.0 + v * (w.q.1 - w.q.0))
        })
        .collect()
}

/// A window covering every Wigner component and cross term with margin,
/// fine enough to resolve the fastest interference fringes.
fn wigner_window(state: &Superposition) -> Result<GridWindow> {
    let h = state.hbar();
    let mut spread: f64 = 0.0;
    let mut narrow = f64::INFINITY;
    for term in state.terms() {
        let f = term.state.frame.matrix();
        let c = f * f.transpose();
        let tr = c.trace();
        let disc = (0.25 * tr * tr - c.det()).max(0.0).sqrt();
        spread = spread.max(0.5 * tr + disc);
        narrow = narrow.min(0.5 * tr - disc);
    }
    let centers = state.centers();
    let max_sep = centers.iter().flat_map(|a| centers.iter().map(move |b| (*a - *b).norm())).fold(0.0_f64, f64::max);
    let mut step = (h * narrow).sqrt() / 6.0;
    if max_sep > 0.0 {
        step = step.min(2.0 * PI * h / max_sep / 8.0);
    }
    let margin = 9.0 * (h * spread).sqrt();
    let (mut lo, mut hi) = (centers[0], centers[0]);
    for c in &centers {
        lo = PhaseVector::new(lo.p.min(c.p), lo.q.min(c.q));
        hi = PhaseVector::new(hi.p.max(c.p), hi.q.max(c.q));
    }
    let n = |a: f64, b: f64| ((b - a + 2.0 * margin) / step).ceil() as usize + 1;
    GridWindow::new((lo.p - margin, hi.p + margin), (lo.q - margin, hi.q + margin), n(lo.p, hi.p), n(lo.q, hi.q))
}

/// Runs the invariant suite and writes one line per invariant.
///
/// A numerical failure (for instance a chord window too small for the
/// Fourier check) is returned as an error; a violated invariant is
/// reported in the table and in [`CheckOutcome::passed`].
pub fn cmd_check(cfg: &RunConfig, out: &mut dyn Write) -> Result<CheckOutcome> {
    let spec = cfg.check.as_ref().ok_or_else(|| missing("check"))?;
    let state = cfg.superposition()?;
    let window = spec.window.window()?;
    let f = ChordFunction::new(&state)?;
    let pts = check_points(&window, spec.points);
    let mut o = CheckOutcome { results: Vec::new() };

    let origin = f.eval(PhaseVector::ZERO);
    o.record("normalization |chi(0)-1|", (origin - 1.0).norm(), 1e-9);
    o.record("im_chi_at_origin", origin.im.abs(), 1e-12);
    let herm = pts.iter().map(|&x| (f.eval(-x) - f.eval(x).conj()).norm()).fold(0.0, f64::max);
    o.record("hermiticity |chi(-xi)-conj chi(xi)|", herm, 1e-12);

    let (step, half) = (default_quadrature_step(&state), default_quadrature_halfwidth(&state));
    let mut oracle: f64 = 0.0;
    for &x in &pts {
        oracle = oracle.max((chord_quadrature(&state, x, step, half)? - f.eval(x)).norm());
    }
    o.record("quadrature_oracle |exact-quadrature|", oracle, 1e-8);

    let mut overlap: f64 = 0.0;
    for &x in &pts {
        let shifted = translate_state(&state, x);
        overlap = overlap.max((state.inner_product(&shifted)?.norm() - f.eval(x).norm()).abs());
    }
    o.record("translation_overlap ||<psi|T psi>|-|chi||", overlap, 1e-10);

    let intensity = chord_intensity_grid(&state, window)?;
    let ft = fourier_2d(&intensity, state.hbar())?;
    let peak = intensity.peak();
    let dev = intensity.values.iter().zip(&ft.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / peak;
    o.record("fourier_self_reciprocity max|C-FT{C}|/max C", dev, 1e-6);

    let wg = wigner_grid(&state, wigner_window(&state)?)?;
    let norm = wg.integral().re;
    o.record("wigner_normalization |int W - 1|", (norm - 1.0).abs(), 1e-6);
    debug_assert_eq!(wg.kind, FieldKind::Wigner);

    if state.len() == 3 {
        let m = DiffractionModel::from_superposition(&state)?;
        let w = m.weights();
        match triangle_close(w[0], w[1], w[2]) {
            Ok((plus, minus)) => {
                let r = plus.closure_residual([w[0], w[1], w[2]]).max(minus.closure_residual([w[0], w[1], w[2]]));
                o.record("triangle_closure residual", r, 1e-12);
            }
            Err(Error::NoClosure(..)) => {}
            Err(e) => return Err(e),
        }
    }

    let mut t = Table::default();
    preamble(&mut t, cfg, "check");
    window_meta(&mut t, &window);
    t.meta("points", spec.points);
    t.header(&["invariant", "value", "tolerance", "status"]);
    for (name, v, tol, ok) in &o.results {
        t.row(&[name.clone(), num(*v), num(*tol), if *ok { "PASS".into() } else { "FAIL".into() }]);
    }
    t.write_to(out)?;
    Ok(o)
}
