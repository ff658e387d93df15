//! Monte Carlo estimates of the moment bounds over independent paths.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::{condition_c_bounds, condition_c_gate, GateVerdict, NoiseModel};
use crate::sde::{weighted_h01_series, SdeConfig, SdeSolver, SdeTrajectory};
use crate::spectral::SpectralField;

/// Runs `f(0..paths)` in parallel and returns the results in index order.
///
/// The first failing index (not the first to fail in wall-clock time) is
/// reported, wrapped with its index.
pub fn map_paths<T, F>(paths: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let out: Vec<Result<T>> = (0..paths).into_par_iter().map(&f).collect();
    out.into_iter()
        .enumerate()
        .map(|(index, r)| r.map_err(|e| Error::Trajectory { index, source: Box::new(e) }))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnsembleConfig {
    pub paths: usize,
    /// Path `i` draws from the stream keyed `(base_seed, i)`.
    pub base_seed: u64,
    pub sde: SdeConfig,
    /// Run even when the existence gate fails.
    pub force: bool,
}

impl EnsembleConfig {
    pub fn new(paths: usize, base_seed: u64, sde: SdeConfig) -> Self {
        Self { paths, base_seed, sde, force: false }
    }
}

/// Per-path quantities whose means estimate the moment bounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PathMoments {
    pub sup_l2_sq: f64,
    /// `∫ ‖∂₁u‖²`.
    pub int_h10: f64,
    pub sup_l2_4: f64,
    pub sup_weighted_h01: f64,
    pub int_weighted_h11: f64,
}

impl PathMoments {
    pub fn of(tr: &SdeTrajectory) -> Self {
        let d = &tr.diagnostics;
        let sup = d.base.l2_sq.iter().copied().fold(0.0, f64::max);
        let w = weighted_h01_series(d);
        Self {
            sup_l2_sq: sup,
            int_h10: d.base.int_d1_sq.last().copied().unwrap_or(0.0),
            sup_l2_4: sup * sup,
            sup_weighted_h01: w.sup(),
            int_weighted_h11: w.int_weighted_h11.last().copied().unwrap_or(0.0),
        }
    }

    fn fields(&self) -> [f64; 5] {
        [self.sup_l2_sq, self.int_h10, self.sup_l2_4, self.sup_weighted_h01, self.int_weighted_h11]
    }
}

/// Ensemble means with standard errors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentEstimates {
    pub level: usize,
    pub paths: usize,
    /// `‖P_n u₀‖²`.
    pub u0_l2_sq: f64,
    pub est_sup_l2_sq: f64,
    pub se_sup_l2_sq: f64,
    pub est_int_h10: f64,
    pub se_int_h10: f64,
    pub est_sup_l2_4: f64,
    pub se_sup_l2_4: f64,
    pub est_weighted_h01: f64,
    pub se_weighted_h01: f64,
    pub est_int_weighted_h11: f64,
    pub se_int_weighted_h11: f64,
    pub gate: GateVerdict,
}

impl MomentEstimates {
    /// `Ĉ_T = (E sup‖u‖² + E∫‖∂₁u‖²) / (1 + ‖u₀‖²)`.
    pub fn c_hat(&self) -> f64 {
        (self.est_sup_l2_sq + self.est_int_h10) / (1.0 + self.u0_l2_sq)
    }

    pub const CSV_HEADER: &'static str = "level,paths,u0_l2_sq,est_sup_l2_sq,se_sup_l2_sq,est_int_h10,se_int_h10,est_sup_l2_4,se_sup_l2_4,est_weighted_h01,se_weighted_h01,est_int_weighted_h11,se_int_weighted_h11,c_hat,existence_gate,uniqueness_gate";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{},{}",
            self.level,
            self.paths,
            self.u0_l2_sq,
            self.est_sup_l2_sq,
            self.se_sup_l2_sq,
            self.est_int_h10,
            self.se_int_h10,
            self.est_sup_l2_4,
            self.se_sup_l2_4,
            self.est_weighted_h01,
            self.se_weighted_h01,
            self.est_int_weighted_h11,
            self.se_int_weighted_h11,
            self.c_hat(),
            self.gate.existence,
            self.gate.uniqueness
        )
    }
}

/// Mean and standard error, summed in index order.
pub fn mean_and_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mut s = 0.0;
    for v in x {
        s += v;
    }
    let m = s / n;
    if x.len() < 2 {
        return (m, 0.0);
    }
    let mut q = 0.0;
    for v in x {
        q += (v - m) * (v - m);
    }
    (m, (q / (n - 1.0) / n).sqrt())
}

/// Per-path moments, in path order.
pub fn path_moments(u0: &SpectralField, model: &NoiseModel, cfg: &EnsembleConfig) -> Result<Vec<PathMoments>> {
    if cfg.paths == 0 {
        return Err(Error::InvalidArgument("ensemble needs at least one path".into()));
    }
    let gate = condition_c_gate(&condition_c_bounds(model));
    if !gate.existence && !cfg.force {
        let k = condition_c_bounds(model);
        return Err(Error::Gate(format!(
            "existence gate fails (K2 = {:.6}, K2~ = {:.6}); pass --force to run anyway",
            k.k2, k.k2_tilde
        )));
    }
    let sde = SdeConfig { seed: cfg.base_seed, snapshot_every: 0, ..cfg.sde };
    let solver = SdeSolver::new(u0.grid(), model, sde)?;
    map_paths(cfg.paths, |i| Ok(PathMoments::of(&solver.run(u0, i as u64)?)))
}

/// `paths` independent trajectories reduced to means and standard errors.
pub fn run_ensemble(u0: &SpectralField, model: &NoiseModel, cfg: &EnsembleConfig) -> Result<MomentEstimates> {
    let rows = path_moments(u0, model, cfg)?;
    let sde = SdeConfig { seed: cfg.base_seed, ..cfg.sde };
    let u0p = SdeSolver::new(u0.grid(), model, sde)?.initial(u0)?;
    let col = |j: usize| mean_and_se(&rows.iter().map(|r| r.fields()[j]).collect::<Vec<_>>());
    let (a, sa) = col(0);
    let (b, sb) = col(1);
    let (c, sc) = col(2);
    let (d, sd) = col(3);
    let (e, se) = col(4);
    Ok(MomentEstimates {
        level: cfg.sde.galerkin_n,
        paths: cfg.paths,
        u0_l2_sq: u0p.norm_sq(),
        est_sup_l2_sq: a,
        se_sup_l2_sq: sa,
        est_int_h10: b,
        se_int_h10: sb,
        est_sup_l2_4: c,
        se_sup_l2_4: sc,
        est_weighted_h01: d,
        se_weighted_h01: sd,
        est_int_weighted_h11: e,
        se_int_weighted_h11: se,
        gate: condition_c_gate(&condition_c_bounds(model)),
    })
}

/// Implied constants across Galerkin levels.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentBoundReport {
    pub levels: Vec<usize>,
    pub c_hat: Vec<f64>,
    /// `max Ĉ_T / min Ĉ_T`.
    pub spread: f64,
    pub uniform: bool,
}

/// Uniform iff the implied constants stay within a factor 2 of each other.
pub fn moment_bound_report(estimates: &[MomentEstimates]) -> MomentBoundReport {
    let c_hat: Vec<f64> = estimates.iter().map(MomentEstimates::c_hat).collect();
    let max = c_hat.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = c_hat.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if min > 0.0 { max / min } else { f64::INFINITY };
    MomentBoundReport {
        levels: estimates.iter().map(|e| e.level).collect(),
        c_hat,
        spread,
        uniform: spread <= 2.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::det::solver::{run_det, DetConfig, Integrator};
    use crate::noise::{Channel, CoefficientField, Nonlinearity};
    use crate::spectral::random::random_band_limited;
    use crate::spectral::{GalerkinSpace, TorusGrid};

    #[test]
    fn zero_noise_ensemble_is_deterministic() {
        let g = TorusGrid::square(16).unwrap();
        let u0 = random_band_limited(g, 2, 3, 1.0, 2.0);
        let sde = SdeConfig { t_end: 0.1, galerkin_n: GalerkinSpace::available(g), ..Default::default() };
        let est = run_ensemble(&u0, &NoiseModel::zero(), &EnsembleConfig::new(3, 1, sde)).unwrap();
        assert_eq!(est.se_sup_l2_sq, 0.0);
        assert_eq!(est.se_int_h10, 0.0);
        let det = run_det(&u0, &DetConfig { t_end: 0.1, integrator: Integrator::IfEuler, ..Default::default() }).unwrap();
        let d = &det.diagnostics;
        assert!((est.est_sup_l2_sq - d.l2_sq[0]).abs() <= 1e-12 * d.l2_sq[0]);
        assert!((est.est_int_h10 - d.int_d1_sq.last().unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn same_seed_same_estimates() {
        let g = TorusGrid::square(8).unwrap();
        let u0 = random_band_limited(g, 2, 2, 1.0, 1.0);
        let m = NoiseModel::additive(&[(1, 0, 0.5), (1, 1, 0.5)]).unwrap();
        let sde = SdeConfig { t_end: 0.05, galerkin_n: 10, ..Default::default() };
        let a = run_ensemble(&u0, &m, &EnsembleConfig::new(20, 7, sde)).unwrap();
        let b = run_ensemble(&u0, &m, &EnsembleConfig::new(20, 7, sde)).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        let c = run_ensemble(&u0, &m, &EnsembleConfig::new(20, 8, sde)).unwrap();
        assert_ne!(a.est_sup_l2_sq, c.est_sup_l2_sq);
        assert!(a.est_sup_l2_4 >= a.est_sup_l2_sq * a.est_sup_l2_sq);
    }

    #[test]
    fn inadmissible_model_is_flagged() {
        let g = TorusGrid::square(16).unwrap();
        let u0 = random_band_limited(g, 2, 3, 1.0, 1.0);
        let m = NoiseModel::new(vec![Channel { c: CoefficientField::constant((0.5f64 / 1.1).sqrt()), b: CoefficientField::zero() }], Nonlinearity::Tanh { amplitude: 0.0 })
            .unwrap();
        assert!((condition_c_bounds(&m).k2 - 0.5).abs() < 1e-12);
        let cfg = EnsembleConfig::new(2, 0, SdeConfig { t_end: 0.01, galerkin_n: 10, ..Default::default() });
        assert!(matches!(run_ensemble(&u0, &m, &cfg), Err(Error::Gate(_))));
        assert!(run_ensemble(&u0, &m, &EnsembleConfig { force: true, ..cfg }).is_ok());
    }

    #[test]
    fn failures_carry_the_path_index() {
        let r: Result<Vec<usize>> = map_paths(6, |i| if i >= 3 { Err(Error::InvalidArgument("x".into())) } else { Ok(i) });
        match r {
            Err(Error::Trajectory { index, .. }) => assert_eq!(index, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spread_verdict() {
        let mk = |level, sup| MomentEstimates {
            level,
            paths: 1,
            u0_l2_sq: 1.0,
            est_sup_l2_sq: sup,
            se_sup_l2_sq: 0.0,
            est_int_h10: 0.0,
            se_int_h10: 0.0,
            est_sup_l2_4: 0.0,
            se_sup_l2_4: 0.0,
            est_weighted_h01: 0.0,
            se_weighted_h01: 0.0,
            est_int_weighted_h11: 0.0,
            se_int_weighted_h11: 0.0,
            gate: condition_c_gate(&Default::default()),
        };
        let r = moment_bound_report(&[mk(8, 1.0), mk(16, 1.5), mk(32, 1.9)]);
        assert!(r.uniform);
        assert!((r.spread - 1.9).abs() < 1e-15);
        assert!(!moment_bound_report(&[mk(8, 1.0), mk(16, 2.5)]).uniform);
    }
}
