use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("state norm {0:e} is numerically zero")]
    ZeroNorm(f64),
    #[error("state is not normalized: chord(0) = {0}")]
    NotNormalized(f64),
    #[error("quadrature step {step} undersamples the phase oscillation (limit {limit})")]
    BadQuadrature { step: f64, limit: f64 },
    #[error("assembled Wigner value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
    #[error("window too small: boundary/peak ratio {0:e} exceeds 1e-12")]
    WindowTooSmall(f64),
    #[error("window is not symmetric about the origin")]
    NonSymmetricWindow,
    #[error("matrix is not symplectic: det = {0}")]
    NotSymplectic(f64),
    #[error("weights ({0}, {1}, {2}) violate the triangle inequality: no closure")]
    NoClosure(f64, f64, f64),
    #[error("degenerate geometry: the two centers are collinear with the origin")]
    DegenerateGeometry,
    #[error("expected a triplet (3 terms), got {0}")]
    WrongArity(usize),
    #[error("Newton iteration did not converge after {iterations} steps (|chi| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("Jacobian vanishes at ({0}, {1})")]
    SingularJacobian(f64, f64),
    #[error("measurement chords are parallel")]
    DegenerateSpots,
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("dissipative couplings (alpha = {0}) are not supported")]
    DissipativeUnsupported(f64),
    #[error("minimum never lifted: relative contrast {0:e} at the last time")]
    NeverLifted(f64),
    #[error("no local minimum of the correlation near the requested spot")]
    NoMinimum,
    #[error("Wigner function still negative at t_max (min/max = {0:e})")]
    NeverPositive(f64),
}

impl Error {
    /// True for errors caused by malformed input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::NotSymplectic(_)
                | Error::WrongArity(_)
                | Error::NegativeTime(_)
                | Error::NonSymmetricWindow
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
