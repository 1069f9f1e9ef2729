//! Chord and Wigner functions of a cat state, and their Fourier duality.
//!
//! Run with `cargo run --release --example chord_and_wigner`.

use blindspot::grid::{chord_grid, wigner_grid};
use blindspot::{chord_exact, fourier_2d, wigner_exact, GridWindow, PhaseVector, Superposition};

fn main() -> blindspot::Result<()> {
    let hbar = 0.1;
    let cat = Superposition::uniform(hbar, &[PhaseVector::new(0.0, -1.0), PhaseVector::new(0.0, 1.0)])?;

    println!("chord function along xi_p (Re oscillates, Im vanishes for this balanced cat):");
    for k in 0..=6 {
        let xi = PhaseVector::new(0.05 * k as f64, 0.0);
        let c = chord_exact(&cat, xi)?;
        println!("  xi_p = {:5.2}  Re = {:+.6}  Im = {:+.2e}", xi.p, c.re, c.im);
    }
    println!("side peaks at xi = ±(0, 2): |chi| = {:.6}", chord_exact(&cat, PhaseVector::new(0.0, 2.0))?.norm());

    println!("\nWigner function across the interference fringes at q = 0:");
    for k in 0..=4 {
        let x = PhaseVector::new(0.05 * k as f64, 0.0);
        println!("  p = {:5.2}  W = {:+.6}", x.p, wigner_exact(&cat, x)?);
    }

    let w = wigner_grid(&cat, GridWindow::new((-1.6, 1.6), (-2.8, 2.8), 161, 281)?)?;
    println!("\n∫W on a grid = {:.12}", w.integral().re);

    // The chord function sampled on a symmetric window transforms into the
    // Wigner function. The window must hold the side peaks at ±(0, 2).
    let window = GridWindow::new((-3.6, 3.6), (-5.6, 5.6), 145, 225)?;
    let chi = chord_grid(&cat, window)?;
    let from_chord = fourier_2d(&chi, hbar)?;
    let worst = (0..window.rows)
        .flat_map(|i| (0..window.cols).map(move |j| (i, j)))
        .map(|(i, j)| (from_chord.at(i, j).re - wigner_exact(&cat, window.point(i, j)).unwrap()).abs())
        .fold(0.0, f64::max);
    println!("max |FT{{chi}} - W| over the grid = {worst:.3e}");
    Ok(())
}
