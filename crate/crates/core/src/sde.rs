//! Euler–Maruyama on the Galerkin system with an exact integrating factor for
//! `∂₁²`, pathwise diagnostics, and the linear validation modes.

use serde::Serialize;

use crate::det::solver::{blown_up, linear_symbol, safe_ratio, DetConfig, DetStepper, DiagnosticsSeries, Integrator};
use crate::error::{Error, Result};
use crate::noise::{condition_c_bounds, NoiseModel, PreparedNoise};
use crate::norms::DerivativeNorms;
use crate::rng::WienerStream;
use crate::spectral::nonlinear::advect;
use crate::spectral::{basis_element, BasisMode, GalerkinSpace, Parity, SpectralField, TorusGrid};

/// Run parameters of one stochastic trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SdeConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Galerkin level: number of basis elements kept.
    pub galerkin_n: usize,
    pub seed: u64,
    /// Trajectory index within the seed; ensembles use one per path.
    pub path: u64,
    /// Drops `B(u)`: the linear validation mode.
    pub drop_nonlinearity: bool,
    /// `α̃` of the weight `h(t)`.
    pub alpha_tilde: f64,
    /// `α̂` of the uniqueness weight `q(t)`.
    pub alpha_hat: f64,
    /// Store every k-th state; `0` keeps only the initial and final states.
    pub snapshot_every: usize,
    /// Record `‖P_n σ(u)‖²_{HS}` at every step (always recorded for additive noise).
    pub record_hs: bool,
}

impl Default for SdeConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            galerkin_n: 32,
            seed: 0,
            path: 0,
            drop_nonlinearity: false,
            alpha_tilde: 0.5,
            alpha_hat: 0.5,
            snapshot_every: 100,
            record_hs: false,
        }
    }
}

impl SdeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("time.dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::Config(format!("time.t_end must be nonnegative, got {}", self.t_end)));
        }
        if self.galerkin_n == 0 {
            return Err(Error::Config("sde.galerkin_n must be at least 1".into()));
        }
        for (name, a) in [("sde.alpha_tilde", self.alpha_tilde), ("sde.alpha_hat", self.alpha_hat)] {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {a}")));
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

/// Pathwise series beyond the deterministic diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct StochasticDiagnostics {
    pub base: DiagnosticsSeries,
    /// Running `C(α̃) = sup c_emp² / (4α̃)`.
    pub c_alpha: Vec<f64>,
    /// `h(t) = 2C(α̃) ∫₀ᵗ ‖∂₁u‖²`.
    pub h: Vec<f64>,
    /// `e^{-h(t)} ‖u(t)‖²_{H^{0,1}}`.
    pub weighted_h01: Vec<f64>,
    /// `∫₀ᵗ e^{-h} ‖u‖²_{H^{1,1}}`.
    pub int_weighted_h11: Vec<f64>,
    /// `2(σΔW, u)` of the step ending at each time; zero at `t = 0`.
    pub noise_work: Vec<f64>,
    /// `‖P_n σ(u(t))‖²_{HS}`; empty unless recorded.
    pub hs_norm_sq: Vec<f64>,
    alpha_tilde: f64,
    h11_weighted: Vec<f64>,
}

impl StochasticDiagnostics {
    fn new(alpha_tilde: f64) -> Self {
        Self { alpha_tilde, ..Default::default() }
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    fn record(&mut self, t: f64, u: &SpectralField, n_u: &SpectralField, work: f64) {
        self.base.record(t, u, n_u);
        let i = self.base.len() - 1;
        let c = self.base.c_emp[i];
        let prev = self.c_alpha.last().copied().unwrap_or(0.0);
        let ca = prev.max(c * c / (4.0 * self.alpha_tilde));
        let h = 2.0 * ca * self.base.int_d1_sq[i];
        let d = DerivativeNorms::of(u);
        let w = (-h).exp();
        self.c_alpha.push(ca);
        self.h.push(h);
        self.weighted_h01.push(w * d.h01_sq());
        self.h11_weighted.push(w * d.h11_sq());
        let acc = match i {
            0 => 0.0,
            _ => {
                let dt = self.base.t[i] - self.base.t[i - 1];
                self.int_weighted_h11[i - 1] + 0.5 * dt * (self.h11_weighted[i] + self.h11_weighted[i - 1])
            }
        };
        self.int_weighted_h11.push(acc);
        self.noise_work.push(work);
    }

    /// `Σ 2(σΔW, u)` over the run.
    pub fn total_noise_work(&self) -> f64 {
        self.noise_work.iter().sum()
    }

    /// Left-point sum `Σ ‖P_n σ(u_k)‖²_{HS} Δt`, the expected quadratic variation.
    pub fn hs_integral(&self) -> f64 {
        let t = &self.base.t;
        (1..t.len()).map(|i| self.hs_norm_sq.get(i - 1).copied().unwrap_or(0.0) * (t[i] - t[i - 1])).sum()
    }

    pub const CSV_HEADER: &'static str =
        "t,l2_sq,d1_sq,d2_sq,d1d2_sq,int_d1_sq,int_d1d2_sq,energy_residual,c_emp,h_t,weighted_h01,int_weighted_h11,noise_work,hs_norm_sq";

    pub fn csv_rows(&self) -> Vec<String> {
        let b = &self.base;
        let r = b.energy_residual();
        (0..self.len())
            .map(|i| {
                format!(
                    "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                    b.t[i],
                    b.l2_sq[i],
                    b.d1_sq[i],
                    b.d2_sq[i],
                    b.d1d2_sq[i],
                    b.int_d1_sq[i],
                    b.int_d1d2_sq[i],
                    r[i],
                    b.c_emp[i],
                    self.h[i],
                    self.weighted_h01[i],
                    self.int_weighted_h11[i],
                    self.noise_work[i],
                    self.hs_norm_sq.get(i).copied().unwrap_or(f64::NAN)
                )
            })
            .collect()
    }
}

/// Weighted `H^{0,1}` functional with its running supremum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedSeries {
    pub t: Vec<f64>,
    pub weighted: Vec<f64>,
    pub running_sup: Vec<f64>,
    pub int_weighted_h11: Vec<f64>,
}

impl WeightedSeries {
    pub fn sup(&self) -> f64 {
        self.running_sup.last().copied().unwrap_or(0.0)
    }
}

pub fn weighted_h01_series(diag: &StochasticDiagnostics) -> WeightedSeries {
    let mut m = f64::NEG_INFINITY;
    let running_sup = diag
        .weighted_h01
        .iter()
        .map(|&w| {
            m = m.max(w);
            m
        })
        .collect();
    WeightedSeries {
        t: diag.base.t.clone(),
        weighted: diag.weighted_h01.clone(),
        running_sup,
        int_weighted_h11: diag.int_weighted_h11.clone(),
    }
}

/// States and diagnostics of one stochastic run.
#[derive(Clone, Debug)]
pub struct SdeTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    pub diagnostics: StochasticDiagnostics,
    pub config: SdeConfig,
}

impl SdeTrajectory {
    pub fn final_state(&self) -> &SpectralField {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

/// Model, grid and configuration prepared once for any number of paths.
#[derive(Clone, Debug)]
pub struct SdeSolver {
    cfg: SdeConfig,
    space: GalerkinSpace,
    noise: PreparedNoise,
    det: DetStepper,
    e_full: Vec<f64>,
    hs_columns: Option<f64>,
}

impl SdeSolver {
    pub fn new(grid: TorusGrid, model: &NoiseModel, cfg: SdeConfig) -> Result<Self> {
        cfg.validate()?;
        let space = GalerkinSpace::new(grid, cfg.galerkin_n)?;
        let noise = model.prepare(grid)?;
        let det_cfg = DetConfig { dt: cfg.dt, t_end: cfg.t_end, eps_v: 0.0, integrator: Integrator::IfEuler, dealias: true, snapshot_every: 1 };
        let det = DetStepper::new(grid, det_cfg)?;
        let e_full = linear_symbol(grid, 0.0).iter().map(|l| (l * cfg.dt).exp()).collect();
        let hs_columns = noise
            .cached_columns()
            .map(|cols| cols.iter().map(|c| space.project(c).norm_sq()).sum());
        Ok(Self { cfg, space, noise, det, e_full, hs_columns })
    }

    pub fn config(&self) -> &SdeConfig {
        &self.cfg
    }

    pub fn space(&self) -> &GalerkinSpace {
        &self.space
    }

    pub fn grid(&self) -> TorusGrid {
        self.space.grid()
    }

    pub fn n_modes(&self) -> usize {
        self.noise.n_modes()
    }

    /// `-P B(u)`, or zero in the linear mode.
    pub fn drift(&self, u: &SpectralField) -> SpectralField {
        if self.cfg.drop_nonlinearity {
            SpectralField::zeros(u.grid())
        } else {
            self.det.drift(u)
        }
    }

    /// `u⁺ = e^{∂₁²Δt} P_n(u + Δt·drift + σ(u)ΔW)`; also returns `2(σ(u)ΔW, u)`.
    pub fn step_with(&self, u: &SpectralField, n_u: &SpectralField, dw: &[f64]) -> (SpectralField, f64) {
        let mut v = u.clone();
        if !self.cfg.drop_nonlinearity {
            v.add_scaled(self.cfg.dt, n_u);
        }
        let s = self.noise.apply(u, dw);
        let work = 2.0 * s.inner(u);
        v.add_scaled(1.0, &s);
        self.space.project_in_place(&mut v);
        v.apply_multiplier(&self.e_full);
        (v, work)
    }

    fn hs(&self, u: &SpectralField) -> f64 {
        match self.hs_columns {
            Some(h) => h,
            None => self.noise.columns(u).iter().map(|c| self.space.project(c).norm_sq()).sum(),
        }
    }

    /// `P_n u0`, checked for finiteness.
    pub fn initial(&self, u0: &SpectralField) -> Result<SpectralField> {
        if u0.grid() != self.grid() {
            return Err(Error::GridMismatch { left: u0.grid().to_string(), right: self.grid().to_string() });
        }
        if !u0.is_finite() {
            return Err(Error::InvalidArgument("initial data is not finite".into()));
        }
        Ok(self.space.project(u0))
    }

    /// Integrates one path; the Wiener stream is keyed by `(seed, path)`.
    pub fn run(&self, u0: &SpectralField, path: u64) -> Result<SdeTrajectory> {
        let cfg = SdeConfig { path, ..self.cfg };
        let mut u = self.initial(u0)?;
        let mut stream = WienerStream::new(cfg.seed, path, self.n_modes());
        let mut dw = vec![0.0; self.n_modes()];
        let norm0 = u.norm().max(1.0);
        let record_hs = cfg.record_hs || self.hs_columns.is_some();
        let mut diag = StochasticDiagnostics::new(cfg.alpha_tilde);
        let mut n_u = self.drift(&u);
        diag.record(0.0, &u, &n_u, 0.0);
        if record_hs {
            diag.hs_norm_sq.push(self.hs(&u));
        }
        let mut times = vec![0.0];
        let mut states = vec![u.clone()];
        let nsteps = cfg.steps();
        for step in 1..=nsteps {
            let t = step as f64 * cfg.dt;
            stream.fill(step as u64 - 1, cfg.dt, &mut dw);
            let (next, work) = self.step_with(&u, &n_u, &dw);
            if blown_up(&next, norm0) {
                return Err(Error::BlowUp { time: t, step, last_finite_time: t - cfg.dt });
            }
            u = next;
            n_u = self.drift(&u);
            diag.record(t, &u, &n_u, work);
            if record_hs {
                diag.hs_norm_sq.push(self.hs(&u));
            }
            let keep = if cfg.snapshot_every == 0 { step == nsteps } else { step % cfg.snapshot_every == 0 || step == nsteps };
            if keep {
                times.push(t);
                states.push(u.clone());
            }
        }
        Ok(SdeTrajectory { times, states, diagnostics: diag, config: cfg })
    }
}

/// One step from `u` with the increments of `step` drawn from `stream`.
pub fn step_sde(u: &SpectralField, model: &NoiseModel, cfg: &SdeConfig, stream: &mut WienerStream, step: u64) -> Result<SpectralField> {
    let solver = SdeSolver::new(u.grid(), model, *cfg)?;
    if stream.modes() != solver.n_modes() {
        return Err(Error::InvalidArgument(format!("stream has {} modes, model has {}", stream.modes(), solver.n_modes())));
    }
    let mut dw = vec![0.0; solver.n_modes()];
    stream.fill(step, cfg.dt, &mut dw);
    let (next, _) = solver.step_with(u, &solver.drift(u), &dw);
    if !next.is_finite() {
        return Err(Error::BlowUp { time: (step + 1) as f64 * cfg.dt, step: step as usize + 1, last_finite_time: step as f64 * cfg.dt });
    }
    Ok(next)
}

/// Integrates `P_n u0` over `[0, t_end]` on the path `(cfg.seed, cfg.path)`.
pub fn run_sde(u0: &SpectralField, model: &NoiseModel, cfg: &SdeConfig) -> Result<SdeTrajectory> {
    SdeSolver::new(u0.grid(), model, *cfg)?.run(u0, cfg.path)
}

/// Gronwall audit of two solutions driven by the same Wiener path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathwiseReport {
    pub t: Vec<f64>,
    /// `‖w̃(t)‖²`, `w̃ = u - v`.
    pub w_sq: Vec<f64>,
    /// `|(w̃·∇u, w̃)| / (‖w̃‖^{3/2} ‖∂₁w̃‖^{1/2} (A + B))`.
    pub c_emp: Vec<f64>,
    /// `C(α̂) = ¾ sup c_emp^{4/3} (2α̂)^{-1/3}`.
    pub c_alpha_hat: f64,
    /// `q(t) = ∫ 2C(α̂) (‖∂₁u‖^{2/3} + ‖∂₂u‖^{2/3}) ‖∂₁∂₂u‖^{2/3}`.
    pub q: Vec<f64>,
    /// Gronwall exponent of the Lipschitz channel.
    pub g: Vec<f64>,
    /// `e^{-q(t)} ‖w̃(t)‖²`.
    pub weighted: Vec<f64>,
    pub beta_hat: f64,
    pub l1: f64,
    pub l2: f64,
    /// `max_t e^{-q}‖w̃‖² / (‖w̃₀‖² e^{G})`.
    pub worst_ratio: f64,
    pub tolerance: f64,
    pub holds: bool,
    /// Whether `u` and `v` agreed bitwise at every step.
    pub identical: bool,
}

/// `β̂` midway between its lower limit `4L₂/(2 - L₂ - 2α̂)` and 1.
pub fn beta_hat(l2: f64, alpha_hat: f64) -> Result<f64> {
    let room = 2.0 - l2 - 2.0 * alpha_hat;
    if !(room > 0.0) {
        return Err(Error::Gate(format!("L2 + 2 alpha_hat = {} leaves no dissipation", l2 + 2.0 * alpha_hat)));
    }
    let lo = 4.0 * l2 / room;
    if !(lo < 1.0) {
        return Err(Error::Gate(format!("no beta_hat < 1 satisfies L2 + 2 alpha_hat + 4 L2 / beta_hat < 2 (L2 = {l2}, alpha_hat = {alpha_hat})")));
    }
    Ok(0.5 * (lo + 1.0))
}

/// Evolves `u0` and `v0` against one replayed increment stream and checks
/// `e^{-q(t)} ‖w̃(t)‖² ≤ ‖w̃(0)‖² e^{G(t)} (1 + tol)`.
pub fn pathwise_uniqueness_experiment(
    u0: &SpectralField,
    v0: &SpectralField,
    model: &NoiseModel,
    cfg_u: &SdeConfig,
    cfg_v: &SdeConfig,
    tol: f64,
) -> Result<PathwiseReport> {
    if cfg_u != cfg_v {
        return Err(Error::InvalidArgument("both solutions must share seed, path and configuration".into()));
    }
    u0.check_grid(v0)?;
    let cfg = *cfg_u;
    let solver = SdeSolver::new(u0.grid(), model, cfg)?;
    let k = condition_c_bounds(model);
    let beta = beta_hat(k.l2, cfg.alpha_hat)?;
    let mut u = solver.initial(u0)?;
    let mut v = solver.initial(v0)?;
    let mut su = WienerStream::new(cfg.seed, cfg.path, solver.n_modes());
    let mut sv = WienerStream::new(cfg.seed, cfg.path, solver.n_modes());
    let mut du = vec![0.0; solver.n_modes()];
    let mut dv = vec![0.0; solver.n_modes()];
    let norm0 = u.norm().max(v.norm()).max(1.0);
    let nsteps = cfg.steps();
    let mut t = Vec::with_capacity(nsteps + 1);
    let mut w_sq = Vec::with_capacity(nsteps + 1);
    let mut c_emp = Vec::with_capacity(nsteps + 1);
    let mut rate = Vec::with_capacity(nsteps + 1);
    let mut identical = true;
    for step in 0..=nsteps {
        identical &= u.bitwise_eq(&v);
        let w = &u - &v;
        let dw = DerivativeNorms::of(&w);
        let d = DerivativeNorms::of(&u);
        let a = (d.d1_sq.sqrt() * d.d1d2_sq.sqrt()).sqrt();
        let b = (d.d2_sq.sqrt() * d.d1d2_sq.sqrt()).sqrt();
        let num = advect(&w, &u).inner(&w);
        let den = dw.l2_sq.powf(0.75) * dw.d1_sq.powf(0.25) * (a + b);
        t.push(step as f64 * cfg.dt);
        w_sq.push(dw.l2_sq);
        c_emp.push(safe_ratio(num, den));
        rate.push(a.powf(4.0 / 3.0) + b.powf(4.0 / 3.0));
        if step == nsteps {
            break;
        }
        su.fill(step as u64, cfg.dt, &mut du);
        sv.fill(step as u64, cfg.dt, &mut dv);
        let (nu, _) = solver.step_with(&u, &solver.drift(&u), &du);
        let (nv, _) = solver.step_with(&v, &solver.drift(&v), &dv);
        if blown_up(&nu, norm0) || blown_up(&nv, norm0) {
            let time = (step + 1) as f64 * cfg.dt;
            return Err(Error::BlowUp { time, step: step + 1, last_finite_time: time - cfg.dt });
        }
        u = nu;
        v = nv;
    }
    let sup_c = c_emp.iter().fold(0.0f64, |m, c| m.max(c.powf(4.0 / 3.0)));
    let c_alpha_hat = 0.75 * sup_c * (2.0 * cfg.alpha_hat).powf(-1.0 / 3.0);
    let mut q = vec![0.0];
    for i in 1..t.len() {
        let prev = q[i - 1];
        q.push(prev + 2.0 * c_alpha_hat * 0.5 * (t[i] - t[i - 1]) * (rate[i] + rate[i - 1]));
    }
    let g: Vec<f64> = t
        .iter()
        .map(|&s| (1.0 / (1.0 - beta)).ln() + (1.0 + 4.0 / beta) * k.l1 * s / (1.0 - beta))
        .collect();
    let weighted: Vec<f64> = w_sq.iter().zip(&q).map(|(w, q)| (-q).exp() * w).collect();
    let w0 = w_sq[0];
    let mut worst: f64 = 0.0;
    for i in 0..t.len() {
        let bound = w0 * g[i].exp();
        worst = worst.max(if bound > 0.0 {
            weighted[i] / bound
        } else if weighted[i] > 0.0 {
            f64::INFINITY
        } else {
            0.0
        });
    }
    Ok(PathwiseReport {
        t,
        w_sq,
        c_emp,
        c_alpha_hat,
        q,
        g,
        weighted,
        beta_hat: beta,
        l1: k.l1,
        l2: k.l2,
        worst_ratio: worst,
        tolerance: tol,
        holds: worst <= 1.0 + tol,
        identical,
    })
}

/// Ensemble statistics of one linear mode against its closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeReport {
    pub k: (i64, i64),
    pub amplitude: f64,
    pub t: f64,
    pub paths: usize,
    pub m0: f64,
    /// Continuous-time value of the tested moment.
    pub expected: f64,
    /// Exact value for the discrete scheme.
    pub discrete_expected: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub bias_allowance: f64,
    pub passed: bool,
}

impl ModeReport {
    /// Deviation in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.estimate - self.expected) / self.std_error
    }
}

fn mode_grid(k1: i64, k2: i64) -> Result<TorusGrid> {
    let need = |k: i64| (3 * k.unsigned_abs() as usize + 1).max(4).next_multiple_of(2);
    TorusGrid::new(need(k1), need(k2))
}

/// Final coefficients `(u(t), e_k^{cos})` over `paths` linear runs from `a0 e_k^{cos}`.
fn mode_samples(cfg: &SdeConfig, s: f64, k: (i64, i64), a0: f64, paths: usize) -> Result<Vec<f64>> {
    if !cfg.drop_nonlinearity {
        return Err(Error::InvalidArgument("mode validation needs drop_nonlinearity".into()));
    }
    if paths < 2 {
        return Err(Error::InvalidArgument("mode validation needs at least two paths".into()));
    }
    let grid = mode_grid(k.0, k.1)?;
    let e = basis_element(grid, BasisMode::new(k.0, k.1, Parity::Cos))?;
    let model = NoiseModel::ou(k.0, k.1, s)?;
    let cfg = SdeConfig { galerkin_n: GalerkinSpace::available(grid), snapshot_every: 0, ..*cfg };
    let solver = SdeSolver::new(grid, &model, cfg)?;
    let u0 = e.scaled(a0);
    crate::ensemble::map_paths(paths, |i| Ok(solver.run(&u0, i as u64)?.final_state().inner(&e)))
}

fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Second moment of a damped mode (`k₁ ≠ 0`) against the Ornstein–Uhlenbeck law
/// `e^{-2k₁²t} m₀ + s²/(2k₁²) (1 - e^{-2k₁²t})`.
pub fn ou_mode_validation(cfg: &SdeConfig, s: f64, k: (i64, i64), a0: f64, paths: usize) -> Result<ModeReport> {
    if k.0 == 0 {
        return Err(Error::InvalidMode { k1: k.0, k2: k.1, reason: "undamped mode: use brownian_mode_growth" });
    }
    let a = mode_samples(cfg, s, k, a0, paths)?;
    let sq: Vec<f64> = a.iter().map(|x| x * x).collect();
    let (est, se) = mean_se(&sq);
    let lam = (k.0 * k.0) as f64;
    let t = cfg.steps() as f64 * cfg.dt;
    let m0 = a0 * a0;
    let decay = (-2.0 * lam * t).exp();
    let expected = decay * m0 + s * s / (2.0 * lam) * (1.0 - decay);
    let r = (-2.0 * lam * cfg.dt).exp();
    let n = cfg.steps() as i32;
    let discrete = r.powi(n) * m0 + s * s * cfg.dt * r * (1.0 - r.powi(n)) / (1.0 - r);
    let allowance = s * s * cfg.dt;
    Ok(ModeReport {
        k,
        amplitude: s,
        t,
        paths,
        m0,
        expected,
        discrete_expected: discrete,
        estimate: est,
        std_error: se,
        bias_allowance: allowance,
        passed: (est - expected).abs() <= 5.0 * se + allowance,
    })
}

/// Variance of an undamped mode (`k₁ = 0`) against `s² t`.
pub fn brownian_mode_growth(cfg: &SdeConfig, s: f64, k: (i64, i64), a0: f64, paths: usize) -> Result<ModeReport> {
    if k.0 != 0 {
        return Err(Error::InvalidMode { k1: k.0, k2: k.1, reason: "damped mode: use ou_mode_validation" });
    }
    let a = mode_samples(cfg, s, k, a0, paths)?;
    let (mean, _) = mean_se(&a);
    let dev: Vec<f64> = a.iter().map(|x| (x - mean).powi(2)).collect();
    let (var, se) = mean_se(&dev);
    let t = cfg.steps() as f64 * cfg.dt;
    // unbiased variance
    let n = a.len() as f64;
    let var = var * n / (n - 1.0);
    Ok(ModeReport {
        k,
        amplitude: s,
        t,
        paths,
        m0: a0 * a0,
        expected: s * s * t,
        discrete_expected: s * s * t,
        estimate: var,
        std_error: se,
        bias_allowance: 0.0,
        passed: (var - s * s * t).abs() <= 5.0 * se,
    })
}

/// Energy balance of the Itô expansion over an ensemble:
/// `E[‖u(t)‖² - ‖u₀‖² + 2∫‖∂₁u‖² - Σ 2(σΔW, u)] = E ∫‖P_nσ‖²_{HS}`, and the
/// noise work itself has mean zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ItoAudit {
    pub paths: usize,
    pub balance_mean: f64,
    pub balance_se: f64,
    pub hs_integral_mean: f64,
    pub noise_work_mean: f64,
    pub noise_work_se: f64,
    /// Allowance for the `O(Δt)` bias of the discrete balance.
    pub bias_allowance: f64,
    pub passed: bool,
}

pub fn ito_audit(u0: &SpectralField, model: &NoiseModel, cfg: &SdeConfig, paths: usize) -> Result<ItoAudit> {
    if paths < 2 {
        return Err(Error::InvalidArgument("the audit needs at least two paths".into()));
    }
    let cfg = SdeConfig { record_hs: true, snapshot_every: 0, ..*cfg };
    let solver = SdeSolver::new(u0.grid(), model, cfg)?;
    let rows = crate::ensemble::map_paths(paths, |i| {
        let tr = solver.run(u0, i as u64)?;
        let d = &tr.diagnostics;
        let n = d.len() - 1;
        let work = d.total_noise_work();
        let balance = d.base.l2_sq[n] - d.base.l2_sq[0] + 2.0 * d.base.int_d1_sq[n] - work;
        Ok([balance, d.hs_integral(), work])
    })?;
    let col = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<_>>();
    let (bm, bse) = mean_se(&col(0));
    let (hm, _) = mean_se(&col(1));
    let (wm, wse) = mean_se(&col(2));
    // one-step defect of the integrating factor against the trapezoid: O(dt) relative
    let allowance = 2.0 * cfg.dt * (hm + u0.norm_sq()) * cfg.t_end.max(1.0);
    Ok(ItoAudit {
        paths,
        balance_mean: bm,
        balance_se: bse,
        hs_integral_mean: hm,
        noise_work_mean: wm,
        noise_work_se: wse,
        bias_allowance: allowance,
        passed: (bm - hm).abs() <= 5.0 * bse + allowance && wm.abs() <= 5.0 * wse,
    })
}
