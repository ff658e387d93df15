//! Two nearby deterministic solutions and the Gronwall bound on their distance.

use aniso_ns::det::{uniqueness_experiment, DetConfig};
use aniso_ns::spectral::random::random_band_limited;
use aniso_ns::spectral::TorusGrid;

fn main() -> aniso_ns::Result<()> {
    let grid = TorusGrid::square(32)?;
    let u0 = random_band_limited(grid, 5, 4, 1.0, 2.0);
    let mut v0 = u0.clone();
    v0.add_scaled(1.0, &random_band_limited(grid, 6, 4, 1.0, 1e-6));
    let cfg = DetConfig { dt: 1e-3, t_end: 1.0, ..DetConfig::default() };
    let rep = uniqueness_experiment(&u0, &v0, &cfg, 0.05)?;
    for i in (0..rep.t.len()).step_by(200) {
        println!("t = {:.2}  |w|^2 = {:.4e}  bound = {:.4e}", rep.t[i], rep.w_sq[i], rep.w_sq[0] * rep.exponent[i].exp());
    }
    println!("C0 = {:.4e}, worst ratio {:.4}, holds {}", rep.c0, rep.worst_ratio, rep.holds);
    let same = uniqueness_experiment(&u0, &u0, &cfg, 0.05)?;
    println!("identical data stays identical: {}", same.identical);
    Ok(())
}
