//! Structural invariants over randomly drawn inputs.

use aniso_ns::io::snapshot::{decode, encode};
use aniso_ns::io::{parse_config, Config};
use aniso_ns::noise::{CoefficientField, NoiseModel};
use aniso_ns::norms::DerivativeNorms;
use aniso_ns::rng::WienerStream;
use aniso_ns::sde::{SdeConfig, SdeSolver};
use aniso_ns::spectral::random::random_band_limited;
use aniso_ns::spectral::{dealias, inverse_transform, leray_project, nonlinear_term, GalerkinSpace, SpectralField, TorusGrid};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = SpectralField> {
    (prop::sample::select(vec![8usize, 12, 16]), any::<u64>(), 1i64..6, 0.0f64..3.0, 0.1f64..10.0)
        .prop_map(|(n, seed, kmax, decay, norm)| random_band_limited(TorusGrid::square(n).unwrap(), seed, kmax, decay, norm))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leray_is_an_idempotent_contraction(u in field(), seed in any::<u64>()) {
        // a non-solenoidal perturbation
        let g = u.grid();
        let mut v = u.clone();
        let w = random_band_limited(g, seed, 3, 0.0, 1.0);
        let mut grad = SpectralField::zeros(g);
        for (idx, k1, k2) in g.modes() {
            let s = w.component(0)[idx];
            grad.component_mut(0)[idx] = s * k1 as f64;
            grad.component_mut(1)[idx] = s * k2 as f64;
        }
        v.add_scaled(1.0, &grad);
        let p = leray_project(&v);
        prop_assert!(p.is_solenoidal(1e-13));
        prop_assert!(leray_project(&p).max_abs_diff(&p) <= 1e-15 * p.max_abs().max(1.0));
        prop_assert!(p.norm() <= v.norm() * (1.0 + 1e-14));
    }

    #[test]
    fn nonlinearity_conserves_energy_and_symmetry(u in field()) {
        let b = nonlinear_term(&u);
        let scale = u.norm().powi(2) * DerivativeNorms::of(&u).h10_sq().sqrt();
        prop_assert!(leray_project(&b).inner(&u).abs() <= 1e-12 * scale.max(1e-300));
        prop_assert!(b.hermitian_defect().0 <= 1e-12 * b.max_abs().max(1e-300));
        prop_assert!(dealias(&b).max_abs_diff(&b) == 0.0);
    }

    #[test]
    fn galerkin_projection_is_orthogonal(u in field(), level in 1usize..20) {
        let space = GalerkinSpace::new(u.grid(), level).unwrap();
        let p = space.project(&u);
        prop_assert!(space.project(&p).max_abs_diff(&p) <= 1e-15 * u.max_abs());
        prop_assert!(((&u - &p).inner(&p)).abs() <= 1e-12 * u.norm_sq());
        prop_assert!(p.norm() <= u.norm() * (1.0 + 1e-14));
        prop_assert!(space.residual_outside(&p) <= 1e-14 * u.norm().max(1e-300));
    }

    #[test]
    fn galerkin_step_stays_in_the_space(u in field(), seed in any::<u64>(), level in 2usize..16) {
        let g = u.grid();
        let model = NoiseModel::additive(&[(1, 0, 0.3), (0, 1, 0.2)]).unwrap();
        let cfg = SdeConfig { dt: 1e-2, t_end: 0.05, galerkin_n: level, seed, snapshot_every: 0, ..SdeConfig::default() };
        let solver = SdeSolver::new(g, &model, cfg).unwrap();
        let tr = solver.run(&u.scaled(0.1), 0).unwrap();
        prop_assert!(solver.space().residual_outside(tr.final_state()) <= 1e-13 * tr.final_state().norm().max(1e-300));
        prop_assert!(tr.final_state().is_solenoidal(1e-12));
    }

    #[test]
    fn wiener_replay_is_order_independent(seed in any::<u64>(), path in any::<u64>(), steps in prop::collection::vec(0u64..500, 1..20)) {
        let mut a = WienerStream::new(seed, path, 3);
        let firsts: Vec<f64> = steps.iter().map(|&s| a.standard_normal(1, s)).collect();
        for (&s, x) in steps.iter().zip(&firsts) {
            let mut fresh = WienerStream::new(seed, path, 3);
            prop_assert_eq!(fresh.standard_normal(1, s).to_bits(), x.to_bits());
        }
    }

    #[test]
    fn snapshot_bytes_round_trip(u in field(), t in -1e6f64..1e6) {
        let f = inverse_transform(&u).unwrap();
        let (back, t2) = decode(&encode(&f, t)).unwrap();
        prop_assert_eq!(t2.to_bits(), t.to_bits());
        for j in 0..2 {
            prop_assert!(f.component(j).iter().zip(back.component(j)).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }

    #[test]
    fn coefficient_recipes_round_trip(c0 in -1.0f64..1.0, terms in prop::collection::vec((-3i64..4, -3i64..4, -1.0f64..1.0, -1.0f64..1.0), 0..4)) {
        let mut c = CoefficientField::constant(c0);
        for (k1, k2, a, b) in terms {
            if (k1, k2) != (0, 0) {
                c = c.plus(k1, k2, a, b);
            }
        }
        let back: CoefficientField = c.to_string().parse().unwrap();
        prop_assert!((back.sup_bound() - c.sup_bound()).abs() <= 1e-12 * (1.0 + c.sup_bound()));
        let g = TorusGrid::square(8).unwrap();
        let (x, y) = (back.sample(g), c.sample(g));
        prop_assert!(x.iter().zip(&y).all(|(p, q)| (p - q).abs() <= 1e-12));
    }

    #[test]
    fn config_echo_is_a_fixed_point(dt in 1e-5f64..1e-1, t_end in 0.0f64..10.0, seed in any::<u64>(), eps in 0.0f64..1.0, m1 in prop::option::of(0.2f64..1.0)) {
        let mut c = Config { dt, t_end, run_seed: seed, eps_v: eps, noise_m1: m1, ..Config::default() };
        c.ensemble_levels = vec![4, 8];
        let back = parse_config(&c.echo()).unwrap();
        prop_assert_eq!(back, c);
    }
}
