//! Sampled phase-space fields and the discrete symplectic Fourier transform.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chord::{chord_mixture, ChordFunction, WignerFunction};
use crate::error::{Error, Result};
use crate::phase::PhaseVector;
use crate::state::{MixedEnsemble, Superposition};

/// Boundary/peak ratio above which a window is considered truncating.
pub const ADEQUACY_RATIO: f64 = 1e-12;

/// Rectangular sampling window with inclusive endpoints.
///
/// Row `i` runs over `p` ascending, column `j` over `q` ascending.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridWindow {
    pub p: (f64, f64),
    pub q: (f64, f64),
    pub rows: usize,
    pub cols: usize,
}

impl GridWindow {
    pub fn new(p: (f64, f64), q: (f64, f64), rows: usize, cols: usize) -> Result<Self> {
        let w = Self { p, q, rows, cols };
        w.validate()?;
        Ok(w)
    }

    /// Square window `[−half, half]²` with `n × n` samples.
    pub fn symmetric(half: f64, n: usize) -> Result<Self> {
        Self::new((-half, half), (-half, half), n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows < 2 || self.cols < 2 {
            return Err(Error::InvalidInput(format!("grid shape {}x{} is below 2x2", self.rows, self.cols)));
        }
        let ok = [self.p.0, self.p.1, self.q.0, self.q.1].iter().all(|v| v.is_finite());
        if !ok || self.p.0 >= self.p.1 || self.q.0 >= self.q.1 {
            return Err(Error::InvalidInput("window ranges must be finite and increasing".into()));
        }
        Ok(())
    }

    pub fn dp(&self) -> f64 {
        (self.p.1 - self.p.0) / (self.rows - 1) as f64
    }

    pub fn dq(&self) -> f64 {
        (self.q.1 - self.q.0) / (self.cols - 1) as f64
    }

    pub fn p_at(&self, i: usize) -> f64 {
        self.p.0 + i as f64 * self.dp()
    }

    pub fn q_at(&self, j: usize) -> f64 {
        self.q.0 + j as f64 * self.dq()
    }

    pub fn point(&self, i: usize, j: usize) -> PhaseVector {
        PhaseVector::new(self.p_at(i), self.q_at(j))
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, x: PhaseVector) -> bool {
        x.p >= self.p.0 && x.p <= self.p.1 && x.q >= self.q.0 && x.q <= self.q.1
    }

    pub fn is_symmetric(&self) -> bool {
        let tol = 1e-12;
        (self.p.0 + self.p.1).abs() <= tol * self.p.1.abs().max(1.0)
            && (self.q.0 + self.q.1).abs() <= tol * self.q.1.abs().max(1.0)
    }
}

/// What a [`FieldGrid`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// Complex chord function `χ(ξ)`.
    Chord,
    /// Chord intensity `|χ(ξ)|²`.
    ChordIntensity,
    /// Wigner function `W(x)`.
    Wigner,
    /// Phase-space correlation `C(ξ)`.
    Correlation,
}

impl FieldKind {
    pub fn is_real(&self) -> bool {
        !matches!(self, FieldKind::Chord)
    }

    /// Kind produced by [`fourier_2d`] and the factor multiplying the raw transform.
    fn fourier_dual(&self, hbar: f64) -> (FieldKind, f64) {
        match self {
            FieldKind::Chord => (FieldKind::Wigner, 1.0 / (2.0 * PI * hbar)),
            FieldKind::Wigner => (FieldKind::Chord, 2.0 * PI * hbar),
            FieldKind::ChordIntensity => (FieldKind::Correlation, 1.0),
            FieldKind::Correlation => (FieldKind::ChordIntensity, 1.0),
        }
    }
}

/// Samples of a field over a [`GridWindow`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub window: GridWindow,
    pub kind: FieldKind,
    pub values: Vec<Complex64>,
}

impl FieldGrid {
    pub fn new(window: GridWindow, kind: FieldKind, values: Vec<Complex64>) -> Result<Self> {
        window.validate()?;
        if values.len() != window.len() {
            return Err(Error::InvalidInput(format!("{} values for a {} grid", values.len(), window.len())));
        }
        Ok(Self { window, kind, values })
    }

    /// Evaluates `f` at every sample; rows are filled in parallel.
    pub fn sample<F>(window: GridWindow, kind: FieldKind, f: F) -> Result<Self>
    where
        F: Fn(PhaseVector) -> Complex64 + Sync,
    {
        window.validate()?;
        let values: Vec<Complex64> = (0..window.rows)
            .into_par_iter()
            .flat_map_iter(|i| {
                let f = &f;
                (0..window.cols).map(move |j| f(window.point(i, j)))
            })
            .collect();
        Ok(Self { window, kind, values })
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.window.cols + j]
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, v| a.max(v.norm()))
    }

    /// Largest boundary modulus relative to the peak modulus.
    pub fn boundary_ratio(&self) -> f64 {
        let (r, c) = (self.window.rows, self.window.cols);
        let mut m = 0.0_f64;
        for j in 0..c {
            m = m.max(self.at(0, j).norm()).max(self.at(r - 1, j).norm());
        }
        for i in 0..r {
            m = m.max(self.at(i, 0).norm()).max(self.at(i, c - 1).norm());
        }
        let peak = self.peak();
        if peak == 0.0 {
            0.0
        } else {
            m / peak
        }
    }

    /// Fails with `WindowTooSmall` when the field is cut off at the boundary.
    pub fn check_adequate(&self) -> Result<()> {
        let r = self.boundary_ratio();
        if r < ADEQUACY_RATIO {
            Ok(())
        } else {
            Err(Error::WindowTooSmall(r))
        }
    }

    /// Largest imaginary part relative to the largest modulus.
    pub fn imaginary_ratio(&self) -> f64 {
        let peak = self.peak();
        let im = self.values.iter().fold(0.0_f64, |a, v| a.max(v.im.abs()));
        if peak == 0.0 {
            0.0
        } else {
            im / peak
        }
    }

    /// Riemann sum `Σ f · dp · dq`.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * (self.window.dp() * self.window.dq())
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, kind: FieldKind, f: F) -> FieldGrid {
        FieldGrid { window: self.window, kind, values: self.values.iter().map(|&v| f(v)).collect() }
    }
}

fn check_transformable(grid: &FieldGrid) -> Result<()> {
    if !grid.window.is_symmetric() {
        return Err(Error::NonSymmetricWindow);
    }
    grid.check_adequate()
}

/// Discrete symplectic Fourier transform
///
/// ```text
/// F(ζ) = (2πħ)⁻¹ Σ_η exp(i η∧ζ / ħ) f(η) dp dq
/// ```
///
/// evaluated on the input's own sample points. The kernel factorizes as
/// `exp(i η_p ζ_q/ħ) · exp(−i η_q ζ_p/ħ)`, so the sum is two passes of
/// dense matrix products. A chord grid maps to a Wigner grid (extra factor
/// `1/2πħ`) and back; a chord-intensity grid maps to a correlation grid.
pub fn fourier_2d(grid: &FieldGrid, hbar: f64) -> Result<FieldGrid> {
    check_transformable(grid)?;
    let w = grid.window;
    let (rows, cols) = (w.rows, w.cols);
    let (kind, factor) = grid.kind.fourier_dual(hbar);
    let scale = factor * w.dp() * w.dq() / (2.0 * PI * hbar);

    // pass 1: g[a][i] = Σ_j exp(−i η_q[j] ζ_p[a] / ħ) f[i][j], with ζ_p over rows
    let g: Vec<Vec<Complex64>> = (0..rows)
        .into_par_iter()
        .map(|a| {
            let zp = w.p_at(a);
            let kern: Vec<Complex64> = (0..cols).map(|j| Complex64::from_polar(1.0, -w.q_at(j) * zp / hbar)).collect();
            (0..rows)
                .map(|i| {
                    let row = &grid.values[i * cols..(i + 1) * cols];
                    row.iter().zip(&kern).map(|(f, k)| f * k).sum()
                })
                .collect()
        })
        .collect();
    // pass 2: F[a][b] = Σ_i exp(i η_p[i] ζ_q[b] / ħ) g[a][i]
    let kern2: Vec<Vec<Complex64>> = (0..cols)
        .map(|b| {
            let zq = w.q_at(b);
            (0..rows).map(|i| Complex64::from_polar(1.0, w.p_at(i) * zq / hbar)).collect()
        })
        .collect();
    let values: Vec<Complex64> = (0..rows)
        .into_par_iter()
        .flat_map_iter(|a| {
            let ga = &g[a];
            let kern2 = &kern2;
            (0..cols).map(move |b| ga.iter().zip(&kern2[b]).map(|(x, k)| x * k).sum::<Complex64>() * scale)
        })
        .collect();
    let out = FieldGrid { window: w, kind, values };
    Ok(out)
}

/// The same transform evaluated at arbitrary output points.
pub fn fourier_2d_at(grid: &FieldGrid, hbar: f64, points: &[PhaseVector]) -> Result<Vec<Complex64>> {
    check_transformable(grid)?;
    let w = grid.window;
    let (kind_factor, cols) = (grid.kind.fourier_dual(hbar).1, w.cols);
    let scale = kind_factor * w.dp() * w.dq() / (2.0 * PI * hbar);
    Ok(points
        .par_iter()
        .map(|z| {
            let kq: Vec<Complex64> = (0..cols).map(|j| Complex64::from_polar(1.0, -w.q_at(j) * z.p / hbar)).collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..w.rows {
                let row = &grid.values[i * cols..(i + 1) * cols];
                let inner: Complex64 = row.iter().zip(&kq).map(|(f, k)| f * k).sum();
                acc += inner * Complex64::from_polar(1.0, w.p_at(i) * z.q / hbar);
            }
            acc * scale
        })
        .collect())
}

/// Chord function of a normalized state sampled on `window`.
pub fn chord_grid(state: &Superposition, window: GridWindow) -> Result<FieldGrid> {
    let f = ChordFunction::new(state)?;
    FieldGrid::sample(window, FieldKind::Chord, |x| f.eval(x))
}

/// `|χ|²` of a normalized state sampled on `window`.
pub fn chord_intensity_grid(state: &Superposition, window: GridWindow) -> Result<FieldGrid> {
    let f = ChordFunction::new(state)?;
    FieldGrid::sample(window, FieldKind::ChordIntensity, |x| Complex64::new(f.eval(x).norm_sqr(), 0.0))
}

/// Exact Wigner function sampled on `window`.
pub fn wigner_grid(state: &Superposition, window: GridWindow) -> Result<FieldGrid> {
    let w = WignerFunction::new(state)?;
    let g = FieldGrid::sample(window, FieldKind::Wigner, |x| w.eval_complex(x))?;
    let tol = 1e-9 / (PI * state.hbar());
    if let Some(v) = g.values.iter().find(|v| v.im.abs() > tol) {
        return Err(Error::ImaginaryResidue(v.im));
    }
    Ok(g.map(FieldKind::Wigner, |v| Complex64::new(v.re, 0.0)))
}

/// Correlation of a pure state via the Fourier route, `C = FT{|χ|²}`.
pub fn correlation_fourier(state: &Superposition, window: GridWindow) -> Result<FieldGrid> {
    let intensity = chord_intensity_grid(state, window)?;
    fourier_2d(&intensity, state.hbar())
}

/// `|χ_mix|²` of a mixture sampled on `window`.
pub fn mixture_intensity_grid(ens: &MixedEnsemble, window: GridWindow) -> Result<FieldGrid> {
    FieldGrid::sample(window, FieldKind::ChordIntensity, |x| Complex64::new(chord_mixture(ens, x).norm_sqr(), 0.0))
}

/// Correlation of a mixture, `C = FT{|χ_mix|²}`, on the window's own points.
pub fn correlation_mixture(ens: &MixedEnsemble, window: GridWindow) -> Result<FieldGrid> {
    let intensity = mixture_intensity_grid(ens, window)?;
    let c = fourier_2d(&intensity, ens.hbar())?;
    if c.imaginary_ratio() > 1e-9 {
        return Err(Error::ImaginaryResidue(c.imaginary_ratio()));
    }
    Ok(c)
}

/// Mixture correlation at arbitrary chords, integrating over `window`.
pub fn correlation_mixture_at(ens: &MixedEnsemble, window: GridWindow, points: &[PhaseVector]) -> Result<Vec<f64>> {
    let intensity = mixture_intensity_grid(ens, window)?;
    Ok(fourier_2d_at(&intensity, ens.hbar(), points)?.into_iter().map(|z| z.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_is_self_reciprocal() {
        let hbar: f64 = 0.1;
        let half = 8.0 * hbar.sqrt();
        let window = GridWindow::symmetric(half, 121).unwrap();
        let g = FieldGrid::sample(window, FieldKind::ChordIntensity, |x| {
            Complex64::new((-x.norm_sqr() / (2.0 * hbar)).exp(), 0.0)
        })
        .unwrap();
        let f = fourier_2d(&g, hbar).unwrap();
        assert_eq!(f.kind, FieldKind::Correlation);
        // (2πħ)⁻¹ ∫ exp(iη∧ζ/ħ − η²/2ħ) dη = exp(−ζ²/2ħ)
        for (a, b) in f.values.iter().zip(&g.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn arbitrary_points_agree_with_grid_output() {
        let hbar = 0.2;
        let window = GridWindow::new((-4.5, 4.5), (-3.5, 3.5), 61, 71).unwrap();
        let g = FieldGrid::sample(window, FieldKind::ChordIntensity, |x| {
            Complex64::new((-(x.p - 0.3).powi(2) / 0.4 - (x.q + 0.2).powi(2) / 0.3).exp(), 0.0)
        })
        .unwrap();
        let f = fourier_2d(&g, hbar).unwrap();
        let pts = [window.point(3, 40), window.point(30, 35), window.point(59, 2)];
        let direct = fourier_2d_at(&g, hbar, &pts).unwrap();
        for (k, (i, j)) in [(3, 40), (30, 35), (59, 2)].into_iter().enumerate() {
            assert!((direct[k] - f.at(i, j)).norm() < 1e-12);
        }
    }

    #[test]
    fn asymmetric_and_truncating_windows_are_refused() {
        let w = GridWindow::new((-1.0, 2.0), (-1.0, 1.0), 11, 11).unwrap();
        let g = FieldGrid::sample(w, FieldKind::ChordIntensity, |_| Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(fourier_2d(&g, 0.1), Err(Error::NonSymmetricWindow));
        let w = GridWindow::symmetric(0.3, 11).unwrap();
        let g = FieldGrid::sample(w, FieldKind::ChordIntensity, |x| Complex64::new((-x.norm_sqr()).exp(), 0.0)).unwrap();
        assert!(matches!(fourier_2d(&g, 0.1), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn shape_validation() {
        assert!(GridWindow::new((-1.0, 1.0), (-1.0, 1.0), 1, 5).is_err());
        assert!(GridWindow::new((1.0, -1.0), (-1.0, 1.0), 3, 5).is_err());
        let w = GridWindow::symmetric(1.0, 3).unwrap();
        assert!(FieldGrid::new(w, FieldKind::Chord, vec![Complex64::new(0.0, 0.0); 8]).is_err());
    }
}
