//! Chord functions, Wigner functions and translation blind spots of
//! superpositions of Gaussian states, with Markovian decoherence.
//!
//! Phase-space points are `(p, q)` pairs ([`PhaseVector`]). A pure state is a
//! [`Superposition`] of coherent or squeezed Gaussians; its chord function
//! `χ(ξ) = ⟨Ψ|T_{−ξ}|Ψ⟩` has zeros, the blind spots, where the translated
//! state is orthogonal to the original. The [`spots`] module locates them,
//! [`decoherence`] follows how they fill in under a Lindblad evolution, and
//! [`cli`] wraps everything behind a JSON-configured command line.

pub mod chord;
pub mod cli;
pub mod decoherence;
pub mod error;
mod gauss;
pub mod grid;
pub mod phase;
pub mod spots;
pub mod state;

pub use chord::{chord_exact, chord_mixture, correlation_pure, wigner_exact, ChordFunction, WignerFunction};
pub use error::{Error, Result};
pub use grid::{fourier_2d, fourier_2d_at, FieldGrid, FieldKind, GridWindow};
pub use phase::{skew, Mat2, PhaseVector, SymplecticMatrix};
pub use state::{
    apply_symplectic, normalize, shift_origin, translate_state, GaussianState, MixedEnsemble, Superposition, Term,
};
