//! Linear modes under additive noise: a damped Ornstein-Uhlenbeck mode and an
//! undamped Brownian one.

use aniso_ns::sde::{brownian_mode_growth, ou_mode_validation, SdeConfig};

fn main() -> aniso_ns::Result<()> {
    let cfg = SdeConfig { dt: 1e-3, t_end: 2.0, drop_nonlinearity: true, ..SdeConfig::default() };
    let paths = 2000;
    let ou = ou_mode_validation(&cfg, 1.0, (1, 0), 1.0, paths)?;
    println!(
        "mode (1,0): E a^2 = {:.4} +- {:.4}, law {:.4}, discrete law {:.4}, z = {:.2}",
        ou.estimate, ou.std_error, ou.expected, ou.discrete_expected, ou.z_score()
    );
    let bm = brownian_mode_growth(&cfg, 1.0, (0, 1), 0.0, paths)?;
    println!("mode (0,1): Var a = {:.4} +- {:.4}, s^2 t = {:.4}", bm.estimate, bm.std_error, bm.expected);
    Ok(())
}
