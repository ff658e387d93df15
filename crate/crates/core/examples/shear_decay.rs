//! The shear `(0, sin x₁)` is an exact solution: the nonlinearity vanishes and
//! the horizontal viscosity damps it as `e^{-t}`.

use aniso_ns::det::{run_det, DetConfig};
use aniso_ns::spectral::{PhysicalField, SpectralField, TorusGrid};
use num_complex::Complex64;

fn main() -> aniso_ns::Result<()> {
    let grid = TorusGrid::square(32)?;
    let mut u0 = SpectralField::zeros(grid);
    u0.set_real_mode(1, 0, [Complex64::new(0.0, 0.0), Complex64::new(0.0, -0.5)]);

    let cfg = DetConfig { dt: 1e-3, t_end: 1.0, ..DetConfig::default() };
    let traj = run_det(&u0, &cfg)?;

    let exact = PhysicalField::from_fn(grid, |x1, _| [0.0, (-1.0f64).exp() * x1.sin()]);
    let exact = aniso_ns::spectral::forward_transform(&exact);
    let err = (traj.final_state() - &exact).norm();
    println!("t = {:.3}  |u - exact| = {err:.3e}", traj.final_time());
    for (t, e) in traj.diagnostics.t.iter().zip(&traj.diagnostics.l2_sq).step_by(250) {
        println!("  t = {t:.2}  |u|^2 = {e:.6}  e^(-2t)|u0|^2 = {:.6}", (-2.0 * t).exp() * traj.diagnostics.l2_sq[0]);
    }
    Ok(())
}
