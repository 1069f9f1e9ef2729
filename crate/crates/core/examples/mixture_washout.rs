//! A classical mixture of the same Gaussians has no blind spots.

use blindspot::grid::correlation_mixture_at;
use blindspot::spots::{hexagonal_lattice, newton_refine, DiffractionModel, IndexRange};
use blindspot::{correlation_pure, GridWindow, MixedEnsemble, PhaseVector, Superposition};

fn main() -> blindspot::Result<()> {
    let hbar = 0.075;
    let centers = [PhaseVector::ZERO, PhaseVector::new(1.5, -0.1), PhaseVector::new(0.2, 1.5)];
    let pure = Superposition::uniform(hbar, &centers)?;
    let mixture = MixedEnsemble::from_superposition(&pure);

    let lattice = hexagonal_lattice(&DiffractionModel::from_superposition(&pure)?, IndexRange::square(1))?;
    let first = lattice.nearest(1)[0];
    let spot = newton_refine(&pure, first.xi, 1e-12, 50)?.xi;

    let window = GridWindow::symmetric(4.5, 181)?;
    let mixed = correlation_mixture_at(&mixture, window, &[PhaseVector::ZERO, spot])?;
    println!("first blind spot xi0 = ({:+.8}, {:+.8})", spot.p, spot.q);
    println!("pure state:  C(0) = {:.6}  C(xi0) = {:.3e}", correlation_pure(&pure, PhaseVector::ZERO)?, correlation_pure(&pure, spot)?);
    println!("mixture:     C(0) = {:.6}  C(xi0) = {:.6}", mixed[0], mixed[1]);
    Ok(())
}
