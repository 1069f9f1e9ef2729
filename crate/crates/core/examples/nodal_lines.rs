//! Nodal lines of Re chi and Im chi; blind spots sit where they cross.

use blindspot::grid::chord_grid;
use blindspot::spots::{find_spots_generic, trace_nodal_lines, NodalPart, SearchRect};
use blindspot::{GridWindow, PhaseVector, Superposition};

fn main() -> blindspot::Result<()> {
    let hbar = 0.075;
    let centers = [PhaseVector::ZERO, PhaseVector::new(1.5, -0.1), PhaseVector::new(0.2, 1.5)];
    let state = Superposition::uniform(hbar, &centers)?;
    let grid = chord_grid(&state, GridWindow::symmetric(0.4, 201)?)?;

    let re = trace_nodal_lines(&grid, NodalPart::Real)?;
    let im = trace_nodal_lines(&grid, NodalPart::Imaginary)?;
    println!("Re chi = 0: {} polylines, {} vertices", re.polylines.len(), re.vertex_count());
    println!("Im chi = 0: {} polylines, {} vertices", im.polylines.len(), im.vertex_count());

    for s in find_spots_generic(&state, SearchRect::centered(0.38), 0.004, 1e-12)? {
        println!(
            "spot ({:+.5}, {:+.5}): distance to Re line {:.1e}, to Im line {:.1e}",
            s.xi.p,
            s.xi.q,
            re.distance_to(s.xi),
            im.distance_to(s.xi)
        );
    }
    Ok(())
}
