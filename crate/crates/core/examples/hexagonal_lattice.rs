//! Predicted blind-spot lattice of a three-term superposition.
//!
//! The small-chord phasor sum of three Gaussians closes into a triangle at
//! two mirror-image sets of phases; each set solves two linear phase
//! conditions and yields one oblique sublattice.

use blindspot::spots::{hexagonal_lattice, small_chord, DiffractionModel, IndexRange};
use blindspot::{chord_exact, PhaseVector, Superposition};

fn main() -> blindspot::Result<()> {
    let hbar = 0.075;
    let centers = [PhaseVector::ZERO, PhaseVector::new(-4.0, 0.3), PhaseVector::new(0.2, 3.0)];
    let state = Superposition::uniform(hbar, &centers)?;
    let model = DiffractionModel::from_superposition(&state)?;
    let lattice = hexagonal_lattice(&model, IndexRange::square(2))?;

    println!("basis vectors: {:?} {:?}", lattice.basis[0].to_array(), lattice.basis[1].to_array());
    for (name, a) in ["A", "B"].iter().zip(&lattice.angles) {
        println!("sublattice {name}: theta = ({:.6}, {:.6})", a.theta1, a.theta2);
    }
    println!("nearest-neighbour spacing = {:.6}", lattice.nearest_neighbor_spacing());

    println!("\nhexagon of zeros around the origin:");
    for n in lattice.first_shell() {
        println!(
            "  {} k=({:+},{:+}) xi = ({:+.6}, {:+.6})  |small chord| = {:.1e}  |chi| = {:.1e}",
            n.sublattice.label(),
            n.k1,
            n.k2,
            n.xi.p,
            n.xi.q,
            small_chord(&model, n.xi).norm(),
            chord_exact(&state, n.xi)?.norm()
        );
    }
    Ok(())
}
