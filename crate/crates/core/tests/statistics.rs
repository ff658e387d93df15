//! Monte Carlo error behaves as `1/√M`.

use aniso_ns::ensemble::{path_moments, EnsembleConfig};
use aniso_ns::ensemble::mean_and_se;
use aniso_ns::noise::NoiseModel;
use aniso_ns::sde::SdeConfig;
use aniso_ns::spectral::random::random_band_limited;
use aniso_ns::spectral::TorusGrid;

#[test]
fn standard_error_scales_with_inverse_root_paths() {
    let grid = TorusGrid::square(8).unwrap();
    let model = NoiseModel::additive(&[(1, 0, 0.3), (0, 1, 0.3)]).unwrap();
    let u0 = random_band_limited(grid, 1, 2, 1.0, 1.0);
    let sde = SdeConfig { dt: 1e-2, t_end: 0.5, galerkin_n: 8, snapshot_every: 0, ..SdeConfig::default() };
    let all = path_moments(&u0, &model, &EnsembleConfig::new(3200, 77, sde)).unwrap();
    let x: Vec<f64> = all.iter().map(|p| p.sup_l2_sq).collect();
    let mut prev: Option<f64> = None;
    for m in [200, 800, 3200] {
        let (_, se) = mean_and_se(&x[..m]);
        if let Some(p) = prev {
            let r = se / p;
            // quartering the sample halves the error; the sample SE itself fluctuates
            assert!((0.4..0.62).contains(&r), "M = {m}: SE ratio {r}");
        }
        prev = Some(se);
    }
}

#[test]
fn prefix_of_an_ensemble_is_the_smaller_ensemble() {
    let grid = TorusGrid::square(8).unwrap();
    let model = NoiseModel::additive(&[(1, 1, 0.2)]).unwrap();
    let u0 = random_band_limited(grid, 2, 2, 1.0, 1.0);
    let sde = SdeConfig { dt: 1e-2, t_end: 0.2, galerkin_n: 8, snapshot_every: 0, ..SdeConfig::default() };
    let big = path_moments(&u0, &model, &EnsembleConfig::new(40, 5, sde)).unwrap();
    let small = path_moments(&u0, &model, &EnsembleConfig::new(10, 5, sde)).unwrap();
    assert_eq!(&big[..10], &small[..]);
}
