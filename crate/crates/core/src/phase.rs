//! Phase-space points, chords and 2x2 linear maps.
//!
//! Coordinates are ordered `x = (p, q)` throughout the crate. The skew
//! product `a ∧ b = a_p b_q − a_q b_p` defined here is the only one used.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `(p, q)` of the phase plane. Chords and centers share this type.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseVector {
    pub p: f64,
    pub q: f64,
}

impl PhaseVector {
    pub const ZERO: PhaseVector = PhaseVector { p: 0.0, q: 0.0 };

    pub const fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.q.is_finite()
    }

    /// Returns `self` or an `InvalidInput` error naming `what`.
    pub fn checked(self, what: &str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::InvalidInput(format!("{what} has non-finite components")))
        }
    }

    pub fn dot(&self, other: &PhaseVector) -> f64 {
        self.p * other.p + self.q * other.q
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.p.hypot(self.q)
    }

    pub fn scale(&self, s: f64) -> PhaseVector {
        PhaseVector::new(self.p * s, self.q * s)
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.p, self.q]
    }
}

impl From<[f64; 2]> for PhaseVector {
    fn from(v: [f64; 2]) -> Self {
        PhaseVector::new(v[0], v[1])
    }
}

impl Add for PhaseVector {
    type Output = PhaseVector;
    fn add(self, o: PhaseVector) -> PhaseVector {
        PhaseVector::new(self.p + o.p, self.q + o.q)
    }
}

impl Sub for PhaseVector {
    type Output = PhaseVector;
    fn sub(self, o: PhaseVector) -> PhaseVector {
        PhaseVector::new(self.p - o.p, self.q - o.q)
    }
}

impl Neg for PhaseVector {
    type Output = PhaseVector;
    fn neg(self) -> PhaseVector {
        PhaseVector::new(-self.p, -self.q)
    }
}

/// Skew (symplectic) product `a ∧ b = a_p b_q − a_q b_p`.
#[inline]
pub fn skew(a: PhaseVector, b: PhaseVector) -> f64 {
    a.p * b.q - a.q * b.p
}

/// Real 2x2 matrix acting on `(p, q)` column vectors, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);
    /// The symplectic unit `[[0, −1], [1, 0]]`.
    pub const J: Mat2 = Mat2([[0.0, -1.0], [1.0, 0.0]]);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Mat2::new(a, 0.0, 0.0, d)
    }

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let m = &self.0;
        Some(Mat2::new(m[1][1] / d, -m[0][1] / d, -m[1][0] / d, m[0][0] / d))
    }

    pub fn apply(&self, v: PhaseVector) -> PhaseVector {
        let m = &self.0;
        PhaseVector::new(m[0][0] * v.p + m[0][1] * v.q, m[1][0] * v.p + m[1][1] * v.q)
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    /// Outer product `u vᵀ`.
    pub fn outer(u: PhaseVector, v: PhaseVector) -> Mat2 {
        Mat2::new(u.p * v.p, u.p * v.q, u.q * v.p, u.q * v.q)
    }

    /// Quadratic form `vᵀ M v`.
    pub fn quad(&self, v: PhaseVector) -> f64 {
        v.dot(&self.apply(v))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |a, &x| a.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.0[0][1] - self.0[1][0]).abs() <= tol
    }

    /// Matrix exponential in closed form.
    ///
    /// The traceless part `K` satisfies `K² = −det(K)·I`, so the exponential
    /// is `cos`/`cosh`/linear according to the sign of `det K`.
    pub fn exp(&self) -> Mat2 {
        let tau = 0.5 * self.trace();
        let k = *self - Mat2::IDENTITY.scale(tau);
        let delta = k.det();
        let (c, s) = if delta.abs() < 1e-8 {
            // series in delta: cos(w) and sin(w)/w with w^2 = delta
            (
                1.0 - delta / 2.0 + delta * delta / 24.0,
                1.0 - delta / 6.0 + delta * delta / 120.0,
            )
        } else if delta > 0.0 {
            let w = delta.sqrt();
            (w.cos(), w.sin() / w)
        } else {
            let w = (-delta).sqrt();
            (w.cosh(), w.sinh() / w)
        };
        (Mat2::IDENTITY.scale(c) + k.scale(s)).scale(tau.exp())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// A linear canonical transformation of the plane (`det = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymplecticMatrix(Mat2);

impl SymplecticMatrix {
    pub const IDENTITY: SymplecticMatrix = SymplecticMatrix(Mat2::IDENTITY);

    /// Tolerance on `|det − 1|` accepted at construction.
    pub const DET_TOL: f64 = 1e-9;

    pub fn new(m: Mat2) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let d = m.det();
        if (d - 1.0).abs() > Self::DET_TOL {
            return Err(Error::NotSymplectic(d));
        }
        Ok(SymplecticMatrix(m))
    }

    pub fn rotation(angle: f64) -> Self {
        SymplecticMatrix(Mat2::rotation(angle))
    }

    /// `diag(s, 1/s)`: stretches `p` by `s` and compresses `q`.
    pub fn squeeze(s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidInput(format!("squeeze factor {s} must be positive")));
        }
        Ok(SymplecticMatrix(Mat2::diag(s, 1.0 / s)))
    }

    pub fn matrix(&self) -> Mat2 {
        self.0
    }

    pub fn apply(&self, v: PhaseVector) -> PhaseVector {
        self.0.apply(v)
    }

    pub fn compose(&self, inner: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix(self.0 * inner.0)
    }

    pub fn inverse(&self) -> SymplecticMatrix {
        let m = &self.0 .0;
        SymplecticMatrix(Mat2::new(m[1][1], -m[0][1], -m[1][0], m[0][0]))
    }

    pub fn is_identity(&self) -> bool {
        self.0 == Mat2::IDENTITY
    }
}

impl Default for SymplecticMatrix {
    fn default() -> Self {
        Self::IDENTITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skew_examples() {
        assert_eq!(skew(PhaseVector::new(1.0, 0.0), PhaseVector::new(0.0, 1.0)), 1.0);
        let a = PhaseVector::new(3.0, 7.0);
        assert_eq!(skew(a, a), 0.0);
        let v = skew(PhaseVector::new(0.0, 5.0), PhaseVector::new(-0.0314159, 0.0314159));
        assert!((v - 0.1570795).abs() < 1e-12);
    }

    #[test]
    fn skew_is_invariant_under_symplectic_maps() {
        let s = Mat2::new(2.0, 0.3, 1.0, 0.65);
        let (a, b) = (PhaseVector::new(0.3, -1.2), PhaseVector::new(2.0, 0.5));
        assert!((skew(s.apply(a), s.apply(b)) - s.det() * skew(a, b)).abs() < 1e-12);
    }

    #[test]
    fn exp_of_rotation_generator() {
        for &t in &[0.0, 1e-5, 0.3, 2.0, 7.5] {
            let r = Mat2::J.scale(t).exp();
            let expect = Mat2::rotation(t);
            assert!((r - expect).max_abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn exp_hyperbolic_and_parabolic() {
        let t = 0.7;
        let r = Mat2::diag(t, -t).exp();
        assert!((r - Mat2::diag(t.exp(), (-t).exp())).max_abs() < 1e-12);
        let n = Mat2::new(0.0, t, 0.0, 0.0).exp();
        assert!((n - Mat2::new(1.0, t, 0.0, 1.0)).max_abs() < 1e-15);
        // nonzero trace
        let m = Mat2::new(0.5, 0.2, -0.1, 0.1);
        let e = m.exp();
        let mut series = Mat2::IDENTITY;
        let mut term = Mat2::IDENTITY;
        for k in 1..40 {
            term = (term * m).scale(1.0 / k as f64);
            series = series + term;
        }
        assert!((e - series).max_abs() < 1e-13);
    }

    #[test]
    fn symplectic_rejects_bad_determinant() {
        assert!(matches!(
            SymplecticMatrix::new(Mat2::diag(2.0, 2.0)),
            Err(Error::NotSymplectic(_))
        ));
        let s = SymplecticMatrix::new(Mat2::new(2.0, 1.0, 1.0, 1.0)).unwrap();
        let id = s.compose(&s.inverse());
        assert!((id.matrix() - Mat2::IDENTITY).max_abs() < 1e-15);
    }
}
