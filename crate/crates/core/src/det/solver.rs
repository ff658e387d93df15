use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::DerivativeNorms;
use crate::spectral::field::MEASURE;
use crate::spectral::fft::inverse_unchecked;
use crate::spectral::nonlinear::advect_with;
use crate::spectral::ops::{dealias_in_place, leray_project_in_place};
use crate::spectral::{SpectralField, TorusGrid};

/// Time integrator for the nonlinear part; the linear part is always exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrator {
    IfEuler,
    IfRk2,
    IfRk4,
}

impl Integrator {
    pub fn name(&self) -> &'static str {
        match self {
            Self::IfEuler => "if-euler",
            Self::IfRk2 => "if-rk2",
            Self::IfRk4 => "if-rk4",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "if-euler" => Some(Self::IfEuler),
            "if-rk2" => Some(Self::IfRk2),
            "if-rk4" => Some(Self::IfRk4),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetConfig {
    pub dt: f64,
    pub t_end: f64,
    /// `ε` in the vertical viscosity `ε² ∂₂²`.
    pub eps_v: f64,
    pub integrator: Integrator,
    pub dealias: bool,
    /// Store a state every this many steps (the final state is always kept).
    pub snapshot_every: usize,
}

impl Default for DetConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            eps_v: 0.0,
            integrator: Integrator::IfRk2,
            dealias: true,
            snapshot_every: 100,
        }
    }
}

impl DetConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("det dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(Error::Config(format!("t_end {} shorter than dt {}", self.t_end, self.dt)));
        }
        if !(self.eps_v >= 0.0) {
            return Err(Error::Config(format!("eps_v must be nonnegative, got {}", self.eps_v)));
        }
        if self.snapshot_every == 0 {
            return Err(Error::Config("snapshot_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of fixed steps covering `[0, t_end]`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize
    }
}

/// `0.5 · min spacing / max|u|`, the advective step limit at `u`.
pub fn suggested_dt(u: &SpectralField) -> f64 {
    let (h1, h2) = u.grid().spacing();
    let umax = inverse_unchecked(u)
        .magnitude()
        .into_iter()
        .fold(0.0, f64::max);
    if umax == 0.0 {
        f64::INFINITY
    } else {
        0.5 * h1.min(h2) / umax
    }
}

/// Linear symbol `-k₁² - ε²k₂²` per storage index.
pub fn linear_symbol(grid: TorusGrid, eps_v: f64) -> Vec<f64> {
    grid.modes()
        .map(|(_, k1, k2)| -((k1 * k1) as f64) - eps_v * eps_v * (k2 * k2) as f64)
        .collect()
}

/// Cached integrating factors for one configuration.
#[derive(Clone, Debug)]
pub struct DetStepper {
    grid: TorusGrid,
    cfg: DetConfig,
    e_full: Vec<f64>,
    e_half: Vec<f64>,
}

impl DetStepper {
    pub fn new(grid: TorusGrid, cfg: DetConfig) -> Result<Self> {
        cfg.validate()?;
        let l = linear_symbol(grid, cfg.eps_v);
        Ok(Self {
            grid,
            cfg,
            e_full: l.iter().map(|x| (x * cfg.dt).exp()).collect(),
            e_half: l.iter().map(|x| (x * cfg.dt * 0.5).exp()).collect(),
        })
    }

    pub fn config(&self) -> &DetConfig {
        &self.cfg
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// `-P B(u)`.
    pub fn drift(&self, u: &SpectralField) -> SpectralField {
        let mut b = advect_with(u, u, self.cfg.dealias);
        leray_project_in_place(&mut b);
        b.scale(-1.0);
        b.clear_mean();
        b
    }

    fn apply(&self, factor: &[f64], u: &SpectralField) -> SpectralField {
        let mut out = u.clone();
        out.apply_multiplier(factor);
        out
    }

    /// One step from `u`, given `n_u = drift(u)`.
    pub fn step(&self, u: &SpectralField, n_u: &SpectralField) -> SpectralField {
        let dt = self.cfg.dt;
        match self.cfg.integrator {
            Integrator::IfEuler => {
                let mut out = u.clone();
                out.add_scaled(dt, n_u);
                out.apply_multiplier(&self.e_full);
                out
            }
            Integrator::IfRk2 => {
                let mut star = u.clone();
                star.add_scaled(dt, n_u);
                star.apply_multiplier(&self.e_full);
                let n_star = self.drift(&star);
                let mut out = self.apply(&self.e_full, u);
                let ea = self.apply(&self.e_full, n_u);
                out.add_scaled(0.5 * dt, &ea);
                out.add_scaled(0.5 * dt, &n_star);
                out
            }
            Integrator::IfRk4 => {
                let eu = self.apply(&self.e_half, u);
                let ea = self.apply(&self.e_half, n_u);
                let mut u2 = eu.clone();
                u2.add_scaled(0.5 * dt, &ea);
                let b = self.drift(&u2);
                let mut u3 = eu.clone();
                u3.add_scaled(0.5 * dt, &b);
                let c = self.drift(&u3);
                let mut u4 = self.apply(&self.e_half, &eu);
                let ec = self.apply(&self.e_half, &c);
                u4.add_scaled(dt, &ec);
                let d = self.drift(&u4);
                // E u + dt/6 (E a + 2 E_half (b + c) + d)
                let mut bc = b;
                bc.add_scaled(1.0, &c);
                bc.apply_multiplier(&self.e_half);
                let mut acc = self.apply(&self.e_full, n_u);
                acc.add_scaled(2.0, &bc);
                acc.add_scaled(1.0, &d);
                let mut out = self.apply(&self.e_full, u);
                out.add_scaled(dt / 6.0, &acc);
                out
            }
        }
    }
}

/// Single step with a fresh stepper.
pub fn step_det(u: &SpectralField, cfg: &DetConfig) -> Result<SpectralField> {
    let s = DetStepper::new(u.grid(), *cfg)?;
    let n_u = s.drift(u);
    let out = s.step(u, &n_u);
    if !out.is_finite() {
        return Err(Error::BlowUp { time: cfg.dt, step: 1, last_finite_time: 0.0 });
    }
    Ok(out)
}

/// Gaussian low-pass `e^{-ε²|k|²}` applied to every mode.
pub fn mollify(u0: &SpectralField, eps: f64) -> Result<SpectralField> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("mollifier width must be positive, got {eps}")));
    }
    let factor: Vec<f64> = u0
        .grid()
        .modes()
        .map(|(_, k1, k2)| (-eps * eps * (k1 * k1 + k2 * k2) as f64).exp())
        .collect();
    let mut out = u0.clone();
    out.apply_multiplier(&factor);
    Ok(out)
}

/// Per-step diagnostics, one entry per recorded time.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DiagnosticsSeries {
    pub eps_v: f64,
    pub t: Vec<f64>,
    pub l2_sq: Vec<f64>,
    pub d1_sq: Vec<f64>,
    pub d2_sq: Vec<f64>,
    pub d1d2_sq: Vec<f64>,
    /// `‖∂₂²u‖²`, needed only for `ε > 0` budgets.
    pub d2d2_sq: Vec<f64>,
    pub int_d1_sq: Vec<f64>,
    pub int_d2_sq: Vec<f64>,
    pub int_d1d2_sq: Vec<f64>,
    /// `(∂₂ B(u), ∂₂u)`.
    pub cross: Vec<f64>,
    /// `(P B(u), u)`.
    pub pbu: Vec<f64>,
    /// `|cross| / (‖∂₁∂₂u‖ ‖∂₁u‖ ‖∂₂u‖)`.
    pub c_emp: Vec<f64>,
}

fn trapezoid_push(series: &mut Vec<f64>, values: &[f64], dt: f64) {
    let n = values.len();
    let next = match series.last() {
        None => 0.0,
        Some(&prev) => prev + 0.5 * dt * (values[n - 2] + values[n - 1]),
    };
    series.push(next);
}

/// `|x| / denom`, or zero when the denominator is negligible.
pub(crate) fn safe_ratio(x: f64, denom: f64) -> f64 {
    if denom > 1e-300 && denom.is_finite() {
        x.abs() / denom
    } else {
        0.0
    }
}

impl DiagnosticsSeries {
    pub fn new(eps_v: f64) -> Self {
        Self { eps_v, ..Default::default() }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Records `u` at time `t`, with `n_u = -P B(u)` already available.
    pub fn record(&mut self, t: f64, u: &SpectralField, n_u: &SpectralField) {
        let d = DerivativeNorms::of(u);
        let grid = u.grid();
        let (mut cross, mut pbu, mut d22) = (0.0, 0.0, 0.0);
        for (idx, _, k2) in grid.modes() {
            let q2 = (k2 * k2) as f64;
            for j in 0..2 {
                let a = n_u.component(j)[idx];
                let b = u.component(j)[idx];
                let dot = a.re * b.re + a.im * b.im;
                pbu += dot;
                cross += q2 * dot;
                d22 += q2 * q2 * b.norm_sqr();
            }
        }
        // n_u carries the minus sign
        let cross = -MEASURE * cross;
        let pbu = -MEASURE * pbu;
        let dt = self.t.last().map(|&p| t - p).unwrap_or(0.0);
        self.t.push(t);
        self.l2_sq.push(d.l2_sq);
        self.d1_sq.push(d.d1_sq);
        self.d2_sq.push(d.d2_sq);
        self.d1d2_sq.push(d.d1d2_sq);
        self.d2d2_sq.push(MEASURE * d22);
        trapezoid_push(&mut self.int_d1_sq, &self.d1_sq, dt);
        trapezoid_push(&mut self.int_d2_sq, &self.d2_sq, dt);
        trapezoid_push(&mut self.int_d1d2_sq, &self.d1d2_sq, dt);
        self.cross.push(cross);
        self.pbu.push(pbu);
        self.c_emp
            .push(safe_ratio(cross, (d.d1d2_sq * d.d1_sq * d.d2_sq).sqrt()));
    }

    /// `‖u(t)‖² + 2∫‖∂₁u‖² + 2ε²∫‖∂₂u‖² - ‖u₀‖²`.
    pub fn energy_residual(&self) -> Vec<f64> {
        let e2 = self.eps_v * self.eps_v;
        let l0 = self.l2_sq.first().copied().unwrap_or(0.0);
        (0..self.len())
            .map(|i| self.l2_sq[i] + 2.0 * self.int_d1_sq[i] + 2.0 * e2 * self.int_d2_sq[i] - l0)
            .collect()
    }

    /// `sup c_emp² / 2`, the run-measured Gronwall constant.
    pub fn gronwall_constant(&self) -> f64 {
        self.c_emp.iter().fold(0.0, |m, c| m.max(c * c / 2.0))
    }

    /// `e^{-2C∫‖∂₁u‖²} ‖∂₂u(t)‖²` with the run-measured `C`.
    pub fn weighted_h01(&self) -> Vec<f64> {
        let c = self.gronwall_constant();
        (0..self.len())
            .map(|i| (-2.0 * c * self.int_d1_sq[i]).exp() * self.d2_sq[i])
            .collect()
    }

    pub const CSV_HEADER: &'static str =
        "t,l2_sq,d1_sq,d2_sq,d1d2_sq,int_d1_sq,int_d1d2_sq,energy_residual,c_emp,weighted_h01";

    /// Rows matching [`Self::CSV_HEADER`].
    pub fn csv_rows(&self) -> Vec<String> {
        let r = self.energy_residual();
        let w = self.weighted_h01();
        (0..self.len())
            .map(|i| {
                format!(
                    "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                    self.t[i],
                    self.l2_sq[i],
                    self.d1_sq[i],
                    self.d2_sq[i],
                    self.d1d2_sq[i],
                    self.int_d1_sq[i],
                    self.int_d1d2_sq[i],
                    r[i],
                    self.c_emp[i],
                    w[i]
                )
            })
            .collect()
    }
}

/// Stored states plus the full diagnostics series.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    pub diagnostics: DiagnosticsSeries,
    pub config: DetConfig,
}

impl Trajectory {
    pub fn final_state(&self) -> &SpectralField {
        self.states.last().expect("a trajectory stores its initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("a trajectory stores its initial time")
    }
}

pub(crate) fn check_initial(u0: &SpectralField) -> Result<()> {
    if !u0.is_finite() {
        return Err(Error::InvalidArgument("initial data is not finite".into()));
    }
    // transforms of grid samples leave a round-off mean behind
    let m = u0.mean();
    let tol = 1e-13 * u0.max_abs();
    if m[0].norm() > tol || m[1].norm() > tol {
        return Err(Error::InvalidArgument("initial data must have zero mean".into()));
    }
    if !u0.is_solenoidal(1e-11) {
        return Err(Error::InvalidArgument("initial data is not divergence free".into()));
    }
    Ok(())
}

/// Blow-up guard: non-finite state or `‖u‖ > 1e6 ‖u₀‖`.
pub(crate) fn blown_up(u: &SpectralField, norm0: f64) -> bool {
    !u.is_finite() || u.norm() > 1e6 * norm0
}

/// Integrates from `u0` over `[0, t_end]`.
pub fn run_det(u0: &SpectralField, cfg: &DetConfig) -> Result<Trajectory> {
    check_initial(u0)?;
    let stepper = DetStepper::new(u0.grid(), *cfg)?;
    let mut u = u0.clone();
    if cfg.dealias {
        dealias_in_place(&mut u);
    }
    let norm0 = u.norm();
    let mut n_u = stepper.drift(&u);
    let mut diag = DiagnosticsSeries::new(cfg.eps_v);
    diag.record(0.0, &u, &n_u);
    let mut times = vec![0.0];
    let mut states = vec![u.clone()];
    let nsteps = cfg.steps();
    for step in 1..=nsteps {
        let t = step as f64 * cfg.dt;
        let next = stepper.step(&u, &n_u);
        if blown_up(&next, norm0) {
            return Err(Error::BlowUp { time: t, step, last_finite_time: t - cfg.dt });
        }
        u = next;
        n_u = stepper.drift(&u);
        diag.record(t, &u, &n_u);
        if step % cfg.snapshot_every == 0 || step == nsteps {
            times.push(t);
            states.push(u.clone());
        }
    }
    Ok(Trajectory { times, states, diagnostics: diag, config: *cfg })
}

/// `‖u^ε - u^0‖_{L²([0,T]; L²)}` where `u^ε` starts from the mollified data and
/// carries the vertical viscosity `ε²∂₂²`.
pub fn eps_distance(u0: &SpectralField, cfg: &DetConfig, eps: f64) -> Result<f64> {
    check_initial(u0)?;
    let base = DetConfig { eps_v: 0.0, ..*cfg };
    let reg = DetConfig { eps_v: eps, ..*cfg };
    let s0 = DetStepper::new(u0.grid(), base)?;
    let se = DetStepper::new(u0.grid(), reg)?;
    let mut a = u0.clone();
    let mut b = mollify(u0, eps)?;
    let norm0 = a.norm();
    let mut prev = (&a - &b).norm_sq();
    let mut acc = 0.0;
    for step in 1..=cfg.steps() {
        let na = s0.drift(&a);
        let nb = se.drift(&b);
        a = s0.step(&a, &na);
        b = se.step(&b, &nb);
        if blown_up(&a, norm0) || blown_up(&b, norm0) {
            let t = step as f64 * cfg.dt;
            return Err(Error::BlowUp { time: t, step, last_finite_time: t - cfg.dt });
        }
        let cur = (&a - &b).norm_sq();
        acc += 0.5 * cfg.dt * (prev + cur);
        prev = cur;
    }
    Ok(acc.sqrt())
}

/// [`eps_distance`] for every width in `eps_list`.
pub fn eps_convergence(u0: &SpectralField, cfg: &DetConfig, eps_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    eps_list
        .iter()
        .map(|&e| eps_distance(u0, cfg, e).map(|d| (e, d)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random::random_band_limited;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    fn sin_x1(grid: TorusGrid) -> SpectralField {
        let mut u = SpectralField::zeros(grid);
        u.set_real_mode(1, 0, [ZERO, Complex64::new(0.0, -0.5)]);
        u
    }

    fn sin_x2(grid: TorusGrid) -> SpectralField {
        let mut u = SpectralField::zeros(grid);
        u.set_real_mode(0, 1, [Complex64::new(0.0, -0.5), ZERO]);
        u
    }

    #[test]
    fn one_step_of_shear_decay_is_exact() {
        let g = TorusGrid::square(16).unwrap();
        let u = sin_x1(g);
        for integrator in [Integrator::IfEuler, Integrator::IfRk2, Integrator::IfRk4] {
            let cfg = DetConfig { integrator, ..Default::default() };
            let v = step_det(&u, &cfg).unwrap();
            let amp = v.mode(1, 0)[1].im / -0.5;
            assert!((amp - (-1e-3f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn vertical_shear_is_steady_without_eps_and_decays_with_it() {
        let g = TorusGrid::square(16).unwrap();
        let u = sin_x2(g);
        let traj = run_det(&u, &DetConfig { t_end: 0.5, ..Default::default() }).unwrap();
        assert!(traj.final_state().max_abs_diff(&u) < 1e-15);

        let cfg = DetConfig { t_end: 0.5, eps_v: 0.5, ..Default::default() };
        let traj = run_det(&u, &cfg).unwrap();
        let amp = traj.final_state().mode(0, 1)[0].im / -0.5;
        assert!((amp - (-0.25f64 * traj.final_time()).exp()).abs() < 1e-12);
        let r = traj.diagnostics.energy_residual();
        assert!(r.last().unwrap().abs() < 1e-5);
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = TorusGrid::square(8).unwrap();
        let traj = run_det(&SpectralField::zeros(g), &DetConfig { t_end: 0.01, ..Default::default() }).unwrap();
        assert_eq!(traj.final_state().max_abs(), 0.0);
        assert!(traj.diagnostics.energy_residual().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn energy_is_nonincreasing_for_taylor_green() {
        let g = TorusGrid::square(16).unwrap();
        let a = 0.1;
        let mut u = SpectralField::zeros(g);
        // a (sin x1 cos x2, -cos x1 sin x2)
        let q = Complex64::new(0.0, -0.25 * a);
        u.set_real_mode(1, 1, [q, -q]);
        u.set_real_mode(1, -1, [q, q]);
        assert!(u.is_solenoidal(1e-15));
        let traj = run_det(&u, &DetConfig { t_end: 0.2, ..Default::default() }).unwrap();
        let e = &traj.diagnostics.l2_sq;
        assert!(e.windows(2).all(|w| w[1] <= w[0]));
        assert!((e[0] - 2.0 * PI * PI * a * a).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_initial_data() {
        let g = TorusGrid::square(8).unwrap();
        let mut u = SpectralField::zeros(g);
        u.set_real_mode(1, 0, [Complex64::new(1.0, 0.0), ZERO]);
        assert!(run_det(&u, &DetConfig::default()).is_err());
        assert!(DetConfig { dt: -1.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn mollifier_acts_as_multiplier() {
        let g = TorusGrid::square(16).unwrap();
        let u = random_band_limited(g, 4, 3, 0.0, 1.0);
        let m = mollify(&u, 0.1).unwrap();
        assert!(m.is_solenoidal(1e-14));
        let f = (-0.01f64 * 5.0).exp();
        assert!((m.mode(1, 2)[0] - u.mode(1, 2)[0] * f).norm() < 1e-15);
        let tiny = mollify(&u, 1e-8).unwrap();
        assert!(tiny.max_abs_diff(&u) < 1e-14);
    }
}
