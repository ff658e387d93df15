//! Noise constants, admissibility gates and the sampled growth/Lipschitz audit.

use aniso_ns::noise::{condition_c_bounds, condition_c_empirical_check, condition_c_gate, Channel, NoiseModel, Nonlinearity};
use aniso_ns::spectral::TorusGrid;

fn main() -> aniso_ns::Result<()> {
    let grid = TorusGrid::square(16)?;
    for scale in [0.5, 1.0, 2.0] {
        let model = NoiseModel::new(
            vec![
                Channel { c: "0.1; 0.05 cos 1 0".parse()?, b: "0.2; 0.1 sin 0 1".parse()? },
                Channel { c: "0.05 sin 1 1".parse()?, b: "0.1 cos 1 2".parse()? },
            ],
            Nonlinearity::Tanh { amplitude: 0.5 },
        )?
        .scale_transport(scale);
        let k = condition_c_bounds(&model);
        let gate = condition_c_gate(&k);
        let audit = condition_c_empirical_check(&model, grid, 100, 1)?;
        println!(
            "transport x{scale}: K2 = {:.4} K2~ = {:.4} L2 = {:.4}  existence {} uniqueness {}  sampled worst ratio {:.3} ({} violations)",
            k.k2, k.k2_tilde, k.l2, gate.existence, gate.uniqueness, audit.worst_ratio(), audit.violations
        );
    }
    Ok(())
}
