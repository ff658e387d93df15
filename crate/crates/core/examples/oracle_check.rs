//! Pseudospectral `P B(u)` against the direct triadic sum.

use aniso_ns::spectral::random::random_solenoidal;
use aniso_ns::spectral::{nonlinear_term, nonlinear_term_oracle, TorusGrid};

fn main() -> aniso_ns::Result<()> {
    let grid = TorusGrid::square(8)?;
    let mut worst = 0.0f64;
    for seed in 0..50 {
        let u = random_solenoidal(grid, seed, 1.0);
        let slow = nonlinear_term_oracle(&u)?;
        let rel = nonlinear_term(&u).max_abs_diff(&slow) / slow.max_abs();
        worst = worst.max(rel);
    }
    println!("50 fields on {grid}: max relative deviation {worst:.3e}");
    Ok(())
}
