//! Recovering the centers of a triplet from two measured, indexed blind spots.

use blindspot::spots::{hexagonal_lattice, newton_refine, recover_centers, DiffractionModel, IndexRange};
use blindspot::{PhaseVector, Superposition};

fn main() -> blindspot::Result<()> {
    let hbar = 0.075;
    let truth = [PhaseVector::ZERO, PhaseVector::new(0.0, 5.0), PhaseVector::new(5.0, 0.0)];
    let state = Superposition::uniform(hbar, &truth)?;
    let lattice = hexagonal_lattice(&DiffractionModel::from_superposition(&state)?, IndexRange::square(1))?;

    let a_nodes: Vec<_> = lattice.nodes.iter().filter(|n| n.sublattice == lattice.angles[0].branch).collect();
    let (a, b) = (a_nodes[4], a_nodes[5]);
    let (e1, e2) = recover_centers(&lattice.angles[0], (a.xi, a.k1, a.k2), (b.xi, b.k1, b.k2), hbar)?;
    println!("from predicted nodes: eta1 = {:?}, eta2 = {:?}", e1.to_array(), e2.to_array());

    // Measured zeros carry the small deviation of the exact chord function.
    let (ma, mb) = (newton_refine(&state, a.xi, 1e-12, 50)?.xi, newton_refine(&state, b.xi, 1e-12, 50)?.xi);
    let (f1, f2) = recover_centers(&lattice.angles[0], (ma, a.k1, a.k2), (mb, b.k1, b.k2), hbar)?;
    println!("from refined zeros:   eta1 = {:?}, eta2 = {:?}", f1.to_array(), f2.to_array());
    Ok(())
}
