//! Exponentials of complex quadratic forms and their Gaussian integrals.
//!
//! Every pairwise term handled by this crate (chord, Wigner, decohered
//! correlation) is `exp(zᵀQz + b·z + c)` for complex symmetric `Q`.
//! Integrating out a variable keeps that shape, so closed forms are built by
//! writing the integrand in all variables and eliminating the integrated ones.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::{Mat2, PhaseVector};

pub(crate) type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// `exp(zᵀQz + b·z + c)` in `dim` variables.
#[derive(Debug, Clone)]
pub(crate) struct GaussForm {
    dim: usize,
    q: Vec<C64>,
    b: Vec<C64>,
    c: C64,
}

impl GaussForm {
    pub fn zero(dim: usize) -> Self {
        Self { dim, q: vec![C64::new(0.0, 0.0); dim * dim], b: vec![C64::new(0.0, 0.0); dim], c: C64::new(0.0, 0.0) }
    }

    /// Adds `coef · (l·z + l0)²`.
    pub fn add_square(&mut self, coef: C64, l: &[f64], l0: f64) {
        for i in 0..self.dim {
            for j in 0..self.dim {
                self.q[i * self.dim + j] += coef * l[i] * l[j];
            }
            self.b[i] += coef * 2.0 * l[i] * l0;
        }
        self.c += coef * l0 * l0;
    }

    /// Adds `coef · (l·z + l0)`.
    pub fn add_linear(&mut self, coef: C64, l: &[f64], l0: f64) {
        for i in 0..self.dim {
            self.b[i] += coef * l[i];
        }
        self.c += coef * l0;
    }

    /// Adds `coef · z_i z_j` (symmetrized).
    pub fn add_bilinear(&mut self, i: usize, j: usize, coef: C64) {
        if i == j {
            self.q[i * self.dim + i] += coef;
        } else {
            self.q[i * self.dim + j] += coef * 0.5;
            self.q[j * self.dim + i] += coef * 0.5;
        }
    }

    pub fn add_constant(&mut self, c: C64) {
        self.c += c;
    }

    /// Exponent of a wavefunction `ψ(z)` (or its conjugate) evaluated at
    /// `z = l·vars + l0`, added to this form.
    pub fn add_wavefunction(&mut self, wf: &WaveParams, l: &[f64], l0: f64, conjugate: bool) {
        let (a, phase) = if conjugate { (wf.a.conj(), -I) } else { (wf.a, I) };
        self.add_square(-a / (2.0 * wf.hbar), l, l0 - wf.center.q);
        self.add_linear(phase * wf.center.p / wf.hbar, l, l0 - 0.5 * wf.center.q);
        self.c += wf.log_norm;
    }

    /// Integrates the first variable over the real line.
    pub fn integrate_first(&self) -> Result<GaussForm> {
        let n = self.dim;
        let a = self.q[0];
        if !(a.re < 0.0) {
            return Err(Error::InvalidInput(format!("non-decaying Gaussian integrand (coefficient {a})")));
        }
        let m = n - 1;
        let mut out = GaussForm::zero(m);
        let b0 = self.b[0];
        for j in 0..m {
            let q0j = self.q[j + 1];
            for k in 0..m {
                let q0k = self.q[k + 1];
                out.q[j * m + k] = self.q[(j + 1) * n + (k + 1)] - q0j * q0k / a;
            }
            out.b[j] = self.b[j + 1] - b0 * q0j / a;
        }
        out.c = self.c - b0 * b0 / (4.0 * a) + 0.5 * (C64::new(std::f64::consts::PI, 0.0) / (-a)).ln();
        Ok(out)
    }

    pub fn into_gauss2(self) -> Gauss2 {
        assert_eq!(self.dim, 2, "form has {} variables", self.dim);
        Gauss2 { q: [[self.q[0], self.q[1]], [self.q[2], self.q[3]]], b: [self.b[0], self.b[1]], c: self.c }
    }

    /// Value of the full integral when no variables remain.
    pub fn into_scalar(self) -> C64 {
        assert_eq!(self.dim, 0);
        self.c.exp()
    }

    /// Embeds a two-variable form into variables `(i, j)` of a larger form.
    pub fn embed(g: &Gauss2, dim: usize, i: usize, j: usize) -> GaussForm {
        let mut f = GaussForm::zero(dim);
        let idx = [i, j];
        for (r, &ri) in idx.iter().enumerate() {
            for (s, &sj) in idx.iter().enumerate() {
                f.q[ri * dim + sj] += g.q[r][s];
            }
            f.b[ri] += g.b[r];
        }
        f.c = g.c;
        f
    }
}

/// Parameters of a Gaussian wavefunction
/// `ψ(q) = N exp[−A(q−η_q)²/2ħ + iη_p(q−η_q/2)/ħ]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WaveParams {
    pub a: C64,
    pub center: PhaseVector,
    pub hbar: f64,
    pub log_norm: f64,
}

impl WaveParams {
    pub fn new(a: C64, center: PhaseVector, hbar: f64) -> Self {
        let log_norm = 0.25 * (a.re / (std::f64::consts::PI * hbar)).ln();
        Self { a, center, hbar, log_norm }
    }

    /// Direct pointwise evaluation, independent of the form machinery.
    pub fn eval(&self, q: f64) -> C64 {
        let d = q - self.center.q;
        let expo = -self.a * d * d / (2.0 * self.hbar) + I * self.center.p * (q - 0.5 * self.center.q) / self.hbar;
        (expo + self.log_norm).exp()
    }
}

/// Two-variable form, the workhorse for evaluating fields on the phase plane.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Gauss2 {
    pub q: [[C64; 2]; 2],
    pub b: [C64; 2],
    pub c: C64,
}

impl Gauss2 {
    #[inline]
    pub fn exponent(&self, x: PhaseVector) -> C64 {
        let q = &self.q;
        q[0][0] * x.p * x.p + (q[0][1] + q[1][0]) * x.p * x.q + q[1][1] * x.q * x.q + self.b[0] * x.p + self.b[1] * x.q + self.c
    }

    #[inline]
    pub fn value(&self, x: PhaseVector) -> C64 {
        self.exponent(x).exp()
    }

    /// Gradient of the exponent.
    #[inline]
    pub fn exponent_gradient(&self, x: PhaseVector) -> [C64; 2] {
        let q = &self.q;
        [
            2.0 * q[0][0] * x.p + (q[0][1] + q[1][0]) * x.q + self.b[0],
            (q[0][1] + q[1][0]) * x.p + 2.0 * q[1][1] * x.q + self.b[1],
        ]
    }

    pub fn conj(&self) -> Gauss2 {
        let q = &self.q;
        Gauss2 {
            q: [[q[0][0].conj(), q[0][1].conj()], [q[1][0].conj(), q[1][1].conj()]],
            b: [self.b[0].conj(), self.b[1].conj()],
            c: self.c.conj(),
        }
    }

    /// The form of `x ↦ E(R x)`.
    pub fn compose_linear(&self, r: &Mat2) -> Gauss2 {
        let m = &r.0;
        let mut q = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, row) in q.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                for k in 0..2 {
                    for l in 0..2 {
                        *v += m[k][i] * self.q[k][l] * m[l][j];
                    }
                }
            }
        }
        let b = [
            m[0][0] * self.b[0] + m[1][0] * self.b[1],
            m[0][1] * self.b[0] + m[1][1] * self.b[1],
        ];
        Gauss2 { q, b, c: self.c }
    }

    /// Adds the real quadratic form `−xᵀ M x · s`.
    pub fn sub_real_quadratic(&self, m: &Mat2, s: f64) -> Gauss2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.q[i][j] -= m.0[i][j] * s;
            }
        }
        out
    }

    pub fn add(&self, o: &Gauss2) -> Gauss2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.q[i][j] += o.q[i][j];
            }
            out.b[i] += o.b[i];
        }
        out.c += o.c;
        out
    }
}

/// Neumaier-compensated complex accumulator; additions happen in call order.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

impl CompensatedSum {
    #[inline]
    fn step(acc: &mut (f64, f64), x: f64) {
        let t = acc.0 + x;
        if acc.0.abs() >= x.abs() {
            acc.1 += (acc.0 - t) + x;
        } else {
            acc.1 += (x - t) + acc.0;
        }
        acc.0 = t;
    }

    #[inline]
    pub fn add(&mut self, z: C64) {
        Self::step(&mut self.re, z.re);
        Self::step(&mut self.im, z.im);
    }

    pub fn total(&self) -> C64 {
        C64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_gaussian_integral() {
        // ∫ exp(−(1+2i) y² + (0.3 − 0.4i) y + 0.1) dy
        let mut f = GaussForm::zero(1);
        f.add_bilinear(0, 0, C64::new(-1.0, -2.0));
        f.add_linear(C64::new(0.3, -0.4), &[1.0], 0.0);
        f.add_constant(C64::new(0.1, 0.0));
        let v = f.integrate_first().unwrap().into_scalar();
        // brute force
        let h = 1e-3;
        let mut acc = C64::new(0.0, 0.0);
        for k in -10000..=10000 {
            let y = k as f64 * h;
            acc += (C64::new(-1.0, -2.0) * y * y + C64::new(0.3, -0.4) * y + 0.1).exp() * h;
        }
        assert!((v - acc).norm() < 1e-12, "{v} vs {acc}");
    }

    #[test]
    fn eliminating_a_variable_matches_quadrature() {
        // exp(−y² + i y x − x²/3 + 0.2 x) integrated over y, compared at x = 0.7
        let mut f = GaussForm::zero(2);
        f.add_bilinear(0, 0, C64::new(-1.0, 0.0));
        f.add_bilinear(0, 1, C64::new(0.0, 1.0));
        f.add_bilinear(1, 1, C64::new(-1.0 / 3.0, 0.0));
        f.add_linear(C64::new(0.2, 0.0), &[0.0, 1.0], 0.0);
        let g = f.integrate_first().unwrap();
        assert_eq!(g.dim, 1);
        let x = 0.7;
        let val = (g.q[0] * x * x + g.b[0] * x + g.c).exp();
        let dy = 1e-3;
        let mut acc = C64::new(0.0, 0.0);
        for k in -12000..=12000 {
            let y = k as f64 * dy;
            acc += (C64::new(-y * y - x * x / 3.0 + 0.2 * x, y * x)).exp() * dy;
        }
        assert!((val - acc).norm() < 1e-12);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut s = CompensatedSum::default();
        for z in [1e16, 1.0, -1e16, 1.0] {
            s.add(C64::new(z, -z));
        }
        assert_eq!(s.total(), C64::new(2.0, -2.0));
    }
}
