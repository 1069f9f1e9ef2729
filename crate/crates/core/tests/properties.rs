//! Property tests of the invariants of chord functions, blind spots and
//! their decoherence, on randomly generated states.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use blindspot::chord::{chord_quadrature, default_quadrature_halfwidth, default_quadrature_step, ChordFunction};
use blindspot::decoherence::{CorrelationField, EvolvedChord, LindbladModel};
use blindspot::grid::{wigner_grid, GridWindow};
use blindspot::spots::{
    find_spots_generic, hexagonal_lattice, newton_refine, small_chord, triangle_close, DiffractionModel, IndexRange,
    SearchRect,
};
use blindspot::{
    apply_symplectic, chord_exact, normalize, shift_origin, skew, translate_state, wigner_exact, GaussianState, PhaseVector, Superposition, SymplecticMatrix,
    Term,
};

fn v(p: f64, q: f64) -> PhaseVector {
    PhaseVector::new(p, q)
}

fn point(r: f64) -> impl Strategy<Value = PhaseVector> {
    (-r..r, -r..r).prop_map(|(p, q)| v(p, q))
}

fn frame() -> impl Strategy<Value = SymplecticMatrix> {
    (0.0..PI, 0.6..1.6f64).prop_map(|(a, s)| SymplecticMatrix::rotation(a).compose(&SymplecticMatrix::squeeze(s).unwrap()))
}

fn amplitude() -> impl Strategy<Value = Complex64> {
    (0.2..1.0f64, 0.0..2.0 * PI).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

/// Normalized 1–4-term states; squeezed frames when `squeezed`.
fn state(squeezed: bool) -> impl Strategy<Value = Superposition> {
    let term = (amplitude(), point(2.0), frame()).prop_map(move |(a, c, f)| Term {
        amplitude: a,
        state: GaussianState::squeezed(c, if squeezed { f } else { SymplecticMatrix::IDENTITY }),
    });
    (0.05..0.5f64, prop::collection::vec(term, 1..=4))
        .prop_map(|(h, terms)| normalize(&Superposition::new(h, terms).unwrap()).unwrap())
}

/// Triplets with all pairwise distances at least `sep · √ħ`, first center at the origin.
fn separated_triplet(sep: f64) -> impl Strategy<Value = Superposition> {
    (0.05..0.2f64, 0.0..2.0 * PI, 0.8..2.2f64, 1.0..1.6f64, 0.0..2.0 * PI, 0.0..2.0 * PI).prop_filter_map(
        "separation",
        move |(h, a, spread, r2, ph1, ph2)| {
            let d = sep * h.sqrt();
            let e1 = v(d * a.cos(), d * a.sin());
            let b = a + spread;
            let e2 = v(r2 * d * b.cos(), r2 * d * b.sin());
            if (e1 - e2).norm() < d {
                return None;
            }
            let terms = [
                (Complex64::new(1.0, 0.0), PhaseVector::ZERO),
                (Complex64::from_polar(1.0, ph1), e1),
                (Complex64::from_polar(1.0, ph2), e2),
            ];
            normalize(&Superposition::coherent(h, &terms).ok()?).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hermiticity(s in state(true), xi in point(3.0)) {
        let f = ChordFunction::new(&s).unwrap();
        prop_assert!((f.eval(-xi) - f.eval(xi).conj()).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parity_split_and_origin(s in state(true), xi in point(2.0)) {
        let f = ChordFunction::new(&s).unwrap();
        let (a, b) = (f.eval(xi), f.eval(-xi));
        prop_assert!((a.re - b.re).abs() < 1e-12);
        prop_assert!((a.im + b.im).abs() < 1e-12);
        let c0 = f.eval(PhaseVector::ZERO);
        prop_assert!(c0.im.abs() < 1e-15);
        prop_assert!((c0.re - 1.0).abs() < 1e-12);
        prop_assert!(a.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn closed_form_matches_quadrature(s in state(false), xi in point(2.1)) {
        prop_assume!(xi.norm() <= 3.0);
        let q = chord_quadrature(&s, xi, default_quadrature_step(&s), default_quadrature_halfwidth(&s)).unwrap();
        prop_assert!((chord_exact(&s, xi).unwrap() - q).norm() < 1e-8);
    }

    #[test]
    fn translation_overlap_is_the_chord_modulus(s in state(true), xi in point(1.0)) {
        let shifted = translate_state(&s, xi);
        let overlap = s.inner_product(&shifted).unwrap().norm();
        prop_assert!((overlap - chord_exact(&s, xi).unwrap().norm()).abs() < 1e-10);
    }

    #[test]
    fn origin_shift_keeps_the_chord_modulus(s in state(true), eta in point(2.0), xi in point(1.5)) {
        let shifted = shift_origin(&s, eta);
        let (a, b) = (chord_exact(&s, xi).unwrap(), chord_exact(&shifted, xi).unwrap());
        prop_assert!((a.norm() - b.norm()).abs() < 1e-12);
        // the remaining change is the plane-wave factor exp(−i η∧ξ/ħ)
        let expected = a * Complex64::from_polar(1.0, -skew(eta, xi) / s.hbar());
        prop_assert!((b - expected).norm() < 1e-11);
    }

    #[test]
    fn symplectic_maps_transport_the_chord(s in state(true), m in frame(), xi in point(1.5)) {
        let moved = apply_symplectic(&s, &m);
        prop_assert!((moved.norm_sqr() - 1.0).abs() < 1e-10);
        let a = chord_exact(&moved, m.apply(xi)).unwrap();
        prop_assert!((a - chord_exact(&s, xi).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn triangle_closure_contract(w in (1e-3..1.0f64, 1e-3..1.0f64, 1e-3..1.0f64)) {
        let (w0, w1, w2) = w;
        let max = w0.max(w1).max(w2);
        match triangle_close(w0, w1, w2) {
            Ok((p, m)) => {
                prop_assert!(max <= w0 + w1 + w2 - max);
                prop_assert!(p.closure_residual([w0, w1, w2]) < 1e-12);
                prop_assert!(m.closure_residual([w0, w1, w2]) < 1e-12);
                prop_assert!(p.theta1 > PI && p.theta1 < 2.0 * PI);
            }
            Err(_) => prop_assert!(max > w0 + w1 + w2 - max),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Away from the outer Gaussians the chord function is the point-scatterer
    /// phasor sum times the diagonal Gaussian.
    #[test]
    fn diffraction_fidelity(s in separated_triplet(11.0), u in point(1.0)) {
        let h = s.hbar();
        let xi = u.scale(3.0 * h.sqrt() / 2f64.sqrt());
        prop_assume!(xi.norm() <= 3.0 * h.sqrt());
        let model = DiffractionModel::from_superposition(&s).unwrap();
        let approx = small_chord(&model, xi) * (-xi.norm_sqr() / (4.0 * h)).exp();
        prop_assert!((chord_exact(&s, xi).unwrap() - approx).norm() <= 1e-6);
    }

    #[test]
    fn lattice_nodes_seed_converging_newton(s in separated_triplet(10.0)) {
        let lattice = hexagonal_lattice(&DiffractionModel::from_superposition(&s).unwrap(), IndexRange::square(1)).unwrap();
        let f = ChordFunction::new(&s).unwrap();
        for node in &lattice.nodes {
            let r = blindspot::spots::newton_refine_with(&f, node.xi, 1e-12, 50).unwrap();
            prop_assert!(f.eval(r.xi).norm() < 1e-12);
        }
    }

    /// Relative phases of the amplitudes barely move the zeros.
    #[test]
    fn phase_independence(s in separated_triplet(10.0), ph in (0.0..2.0 * PI, 0.0..2.0 * PI)) {
        let h = s.hbar();
        let rephased: Vec<Term> = s
            .terms()
            .iter()
            .zip([0.0, ph.0, ph.1])
            .map(|(t, a)| Term { amplitude: t.amplitude * Complex64::from_polar(1.0, a), ..*t })
            .collect();
        let r = Superposition::new(h, rephased).unwrap();
        let lattice = hexagonal_lattice(&DiffractionModel::from_superposition(&s).unwrap(), IndexRange::square(1)).unwrap();
        for node in lattice.first_shell() {
            let a = newton_refine(&s, node.xi, 1e-12, 50).unwrap().xi;
            let b = newton_refine(&r, node.xi, 1e-12, 50).unwrap().xi;
            prop_assert!((a - b).norm() < 1e-3 * h.sqrt());
        }
    }

    /// Translating the triplet by three nodes of one sublattice gives a
    /// state nearly orthogonal to the original.
    #[test]
    fn sublattice_translates_are_quasi_orthogonal(s in separated_triplet(10.0)) {
        let lattice = hexagonal_lattice(&DiffractionModel::from_superposition(&s).unwrap(), IndexRange::square(2)).unwrap();
        let shell: Vec<_> = lattice.first_shell().into_iter().filter(|n| n.sublattice == lattice.angles[0].branch).collect();
        let mut terms = Vec::new();
        for node in &shell {
            terms.extend(translate_state(&s, node.xi).terms().iter().copied());
        }
        let phi = normalize(&Superposition::new(s.hbar(), terms).unwrap()).unwrap();
        prop_assert!(s.inner_product(&phi).unwrap().norm() < 1e-3);
    }

    #[test]
    fn unequal_cat_has_no_zeros(w0 in 0.52..0.95f64, h in 0.05..0.3f64, a in 0.0..PI) {
        let w1 = 1.0 - w0;
        let d = 12.0 * h.sqrt();
        let terms = [
            (Complex64::new(w0.sqrt(), 0.0), v(-0.5 * d * a.cos(), -0.5 * d * a.sin())),
            (Complex64::new(w1.sqrt(), 0.0), v(0.5 * d * a.cos(), 0.5 * d * a.sin())),
        ];
        let s = normalize(&Superposition::coherent(h, &terms).unwrap()).unwrap();
        let f = ChordFunction::new(&s).unwrap();
        // Disk where the diagonal Gaussian keeps |χ|² above half its peak.
        let r = 0.99 * (2.0 * h * 2f64.ln()).sqrt();
        let n = 121;
        let mut min = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                let xi = v(-r + 2.0 * r * i as f64 / (n - 1) as f64, -r + 2.0 * r * j as f64 / (n - 1) as f64);
                if xi.norm() <= r {
                    min = min.min(f.eval(xi).norm_sqr());
                }
            }
        }
        prop_assert!(min >= 0.5 * (w0 - w1).powi(2));
    }

    #[test]
    fn decoherence_preserves_trace_and_hermiticity(s in state(false), xi in point(1.5), t in 0.0..2.0f64) {
        let model = LindbladModel::position_momentum(1.0);
        let f = EvolvedChord::new(&s, &model, t).unwrap();
        prop_assert!((f.eval(PhaseVector::ZERO) - 1.0).norm() < 1e-12);
        prop_assert!((f.eval(-xi) - f.eval(xi).conj()).norm() < 1e-12);
    }

    #[test]
    fn purity_decays(s in state(false), t in 0.0..1.0f64, dt in 1e-3..0.5f64) {
        let model = LindbladModel::position_momentum(0.5);
        let a = CorrelationField::new(&s, &model, t).unwrap().purity();
        let b = CorrelationField::new(&s, &model, t + dt).unwrap().purity();
        prop_assert!(b <= a + 1e-12);
        prop_assert!((CorrelationField::new(&s, &model, 0.0).unwrap().purity() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn zeros_lift_at_every_positive_time() {
    let s = Superposition::uniform(0.075, &[v(0.0, 0.0), v(1.5, -0.1), v(0.2, 1.5)]).unwrap();
    let model = LindbladModel::position_momentum(1.0);
    let spots = find_spots_generic(&s, SearchRect::centered(0.3), 0.004, 1e-12).unwrap();
    assert!(spots.len() >= 6);
    for t in [1e-4, 1e-3, 1e-2, 0.1, 1.0] {
        let c = CorrelationField::new(&s, &model, t).unwrap();
        for sp in &spots {
            assert!(c.eval(sp.xi) > 0.0, "C({:?}, {t}) = {}", sp.xi, c.eval(sp.xi));
        }
    }
}

#[test]
fn spot_set_is_stable_under_grid_refinement() {
    let s = Superposition::uniform(0.1, &[v(0.0, 0.0), v(1.7, -0.4), v(0.3, 1.9), v(-1.2, 1.1)]).unwrap();
    let rect = SearchRect::centered(0.45);
    let coarse = find_spots_generic(&s, rect, 0.004, 1e-12).unwrap();
    let fine = find_spots_generic(&s, rect, 0.002, 1e-12).unwrap();
    assert!(coarse.len() >= 4, "{} spots", coarse.len());
    assert_eq!(coarse.len(), fine.len());
    for a in &coarse {
        assert!(fine.iter().any(|b| (a.xi - b.xi).norm() < 1e-8), "{:?} lost on the finer grid", a.xi);
    }
}

/// At exactly 10√ħ separation the first neglected outer Gaussian reaches
/// `|a_0 a_1| e^{−49/4} ≈ 1.6e-6` on the rim `|ξ| = 3√ħ`, so the 1e-6 bound
/// needs slightly more room; the property test above uses 11√ħ. Here the
/// deviation is pinned to that analytic term instead.
#[test]
fn diffraction_error_is_the_nearest_outer_gaussian() {
    let h: f64 = 0.1;
    let d = 10.0 * h.sqrt();
    let s = Superposition::uniform(h, &[v(0.0, 0.0), v(d, 0.0), v(0.5 * d, 0.9 * d)]).unwrap();
    let model = DiffractionModel::from_superposition(&s).unwrap();
    let xi = v(3.0 * h.sqrt(), 0.0);
    let approx = small_chord(&model, xi) * (-xi.norm_sqr() / (4.0 * h)).exp();
    let err = (chord_exact(&s, xi).unwrap() - approx).norm();
    let predicted = (-(d - xi.p).powi(2) / (4.0 * h)).exp() / 3.0;
    assert!((err / predicted - 1.0).abs() < 0.05, "err {err:e}, predicted {predicted:e}");
    assert!(err > 1e-6);
}

/// `2πħ ∫ W(x) W(x − ξ) dx = |χ(ξ)|²`, by grid quadrature of the exact Wigner function.
#[test]
fn wigner_autocorrelation_is_chord_intensity() {
    let s = Superposition::uniform(0.075, &[v(0.0, 0.0), v(1.5, -0.1), v(0.2, 1.5)]).unwrap();
    let h = s.hbar();
    let window = GridWindow::new((-1.6, 3.1), (-1.7, 3.1), 471, 481).unwrap();
    let w = wigner_grid(&s, window).unwrap();
    let cell = window.dp() * window.dq();
    let chords = [
        v(0.0, 0.0),
        v(0.05, 0.02),
        v(-0.1, 0.07),
        v(0.2, -0.15),
        v(1.5, -0.1),
        v(0.2, 1.5),
        v(1.3, -1.6),
        v(-0.3, 0.25),
        v(0.75, 0.7),
        v(0.12, 0.1),
    ];
    for xi in chords {
        let mut acc = 0.0;
        for i in 0..window.rows {
            for j in 0..window.cols {
                let x = window.point(i, j);
                acc += w.at(i, j).re * wigner_exact(&s, x - xi).unwrap();
            }
        }
        let lhs = 2.0 * PI * h * acc * cell;
        let rhs = chord_exact(&s, xi).unwrap().norm_sqr();
        assert!((lhs - rhs).abs() < 1e-5, "xi = {xi:?}: {lhs} vs {rhs}");
    }
}

#[test]
fn wigner_integrates_to_one() {
    let s = Superposition::uniform(0.075, &[v(0.0, 0.0), v(1.5, -0.1), v(0.2, 1.5)]).unwrap();
    let w = wigner_grid(&s, GridWindow::new((-1.6, 3.1), (-1.7, 3.1), 236, 241).unwrap()).unwrap();
    assert!((w.integral().re - 1.0).abs() < 1e-6);
}
