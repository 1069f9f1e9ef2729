//! Lifting of a blind spot under decoherence, and the positivity time of
//! the Wigner function, for triplets of growing area.
//!
//! Run with `cargo run --release --example decoherence_lifting`.

use blindspot::decoherence::{lifting_ratio, LindbladModel, Line, LiftingCriterion, PositivityOptions};
use blindspot::{PhaseVector, Superposition};

fn main() -> blindspot::Result<()> {
    let hbar = 0.075;
    let model = LindbladModel::position_momentum(1.0);
    // The line xi_p = -xi_q / 2 through the origin.
    let line = Line::through_origin(PhaseVector::new(-1.0, 2.0))?;

    println!("   d      area      tau_l        t_p     tau_l*A/(hbar*t_p)");
    for d in [3.0, 5.0, 8.0] {
        let centers = [PhaseVector::ZERO, PhaseVector::new(0.0, d), PhaseVector::new(d, 0.0)];
        let state = Superposition::uniform(hbar, &centers)?;
        let r = lifting_ratio(&state, &model, line, LiftingCriterion::default(), &PositivityOptions::default())?;
        println!("{d:4.1} {:9.2} {:10.6} {:10.6} {:12.4}", r.area, r.tau_l, r.t_p, r.ratio);
        if d == 5.0 {
            println!("      spot ({:+.6}, {:+.6}); contrast over time:", r.spot.p, r.spot.q);
            for (t, c) in r.lifting.contrast_series.iter().step_by(4) {
                println!("        t = {t:.5}  contrast = {c:.3e}");
            }
        }
    }
    Ok(())
}
