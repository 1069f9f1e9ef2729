//! Exact blind spots by Newton refinement, compared with lattice predictions.

use blindspot::spots::{find_spots_generic, hexagonal_lattice, DiffractionModel, IndexRange, SearchRect};
use blindspot::{PhaseVector, Superposition};

fn main() -> blindspot::Result<()> {
    let hbar = 0.075;
    let centers = [PhaseVector::ZERO, PhaseVector::new(1.5, -0.1), PhaseVector::new(0.2, 1.5)];
    let state = Superposition::uniform(hbar, &centers)?;
    let lattice = hexagonal_lattice(&DiffractionModel::from_superposition(&state)?, IndexRange::square(3))?;

    let rect = SearchRect::centered(0.6);
    let spots = find_spots_generic(&state, rect, 0.004, 1e-12)?;
    println!("{} zeros of chi in |xi_p|, |xi_q| <= 0.6", spots.len());
    for s in &spots {
        let nearest = lattice
            .nodes
            .iter()
            .min_by(|a, b| (a.xi - s.xi).norm().total_cmp(&(b.xi - s.xi).norm()))
            .expect("non-empty lattice");
        println!(
            "  xi = ({:+.8}, {:+.8})  |chi| = {:.1e}  iterations = {:2}  nearest node {} ({:+},{:+}) at distance {:.2e}",
            s.xi.p,
            s.xi.q,
            s.residual,
            s.iterations,
            nearest.sublattice.label(),
            nearest.k1,
            nearest.k2,
            (nearest.xi - s.xi).norm()
        );
    }
    Ok(())
}
