//! Writes a field in the binary snapshot format and reads it back. The stored
//! grid samples come back bit for bit; the Fourier coefficients to rounding.

use aniso_ns::io::snapshot::{read_physical, read_snapshot, write_snapshot};
use aniso_ns::spectral::random::random_solenoidal;
use aniso_ns::spectral::{inverse_transform, TorusGrid};

fn main() -> aniso_ns::Result<()> {
    let grid = TorusGrid::new(16, 8)?;
    let u = random_solenoidal(grid, 42, 1.0);
    let path = std::env::temp_dir().join("ans2d_example.ans2");
    write_snapshot(&u, 0.25, &path)?;

    let (phys, _) = read_physical(&path)?;
    let samples = inverse_transform(&u)?;
    let bitwise = (0..2).all(|j| phys.component(j).iter().zip(samples.component(j)).all(|(a, b)| a.to_bits() == b.to_bits()));
    let (back, t) = read_snapshot(&path)?;
    println!(
        "{} bytes, t = {t}, samples bitwise equal: {bitwise}, coefficient deviation {:.1e}",
        std::fs::metadata(&path)?.len(),
        back.max_abs_diff(&u)
    );
    std::fs::remove_file(&path)?;
    Ok(())
}
