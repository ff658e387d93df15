//! The torus form of the `L²(L^∞)` embedding on random fields, and how far the
//! whole-line constant (no mean term) is from holding.

use aniso_ns::norms::check_anisotropic_embedding;
use aniso_ns::spectral::random::random_band_limited;
use aniso_ns::spectral::TorusGrid;

fn main() -> aniso_ns::Result<()> {
    let grid = TorusGrid::square(32)?;
    let (mut worst, mut whole, mut bad) = (0.0f64, 0.0f64, 0);
    for seed in 0..300u64 {
        let kmax = 1 + (seed % 10) as i64;
        let u = random_band_limited(grid, seed, kmax, 0.5, 1.0);
        let a = check_anisotropic_embedding(&u)?;
        bad += usize::from(!a.satisfied());
        worst = worst.max(a.horizontal.ratio()).max(a.vertical.ratio());
        whole = whole.max(a.whole_space_ratio[0]).max(a.whole_space_ratio[1]);
    }
    println!("violations {bad}, worst ratio {worst:.4}, worst whole-line ratio {whole:.4}");
    Ok(())
}
