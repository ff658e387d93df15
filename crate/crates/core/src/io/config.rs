//! Flat `section.key = value` run configuration.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::det::{DetConfig, Integrator};
use crate::error::{Error, Result};
use crate::noise::{condition_c_bounds, condition_c_gate, Channel, CoefficientField, NoiseModel, Nonlinearity, DEFAULT_ETA};
use crate::sde::SdeConfig;
use crate::spectral::random::random_band_limited;
use crate::spectral::{SpectralField, TorusGrid};

/// Initial data families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InitKind {
    /// Random smooth band-limited field with `‖u₀‖ = amplitude`.
    Random,
    /// `(0, amplitude · sin x₁)`.
    Shear,
    /// `amplitude · (sin x₁ cos x₂, -cos x₁ sin x₂)`.
    TaylorGreen,
    Zero,
}

impl InitKind {
    fn name(&self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::Shear => "shear",
            Self::TaylorGreen => "taylor-green",
            Self::Zero => "zero",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "random" => Self::Random,
            "shear" => Self::Shear,
            "taylor-green" => Self::TaylorGreen,
            "zero" => Self::Zero,
            _ => return None,
        })
    }
}

/// Every tunable of a run, with defaults.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub grid_n1: usize,
    pub grid_n2: usize,
    pub dt: f64,
    pub t_end: f64,
    pub integrator: Integrator,
    pub eps_v: f64,
    pub dealias: bool,
    pub snapshot_every: usize,
    pub init_kind: InitKind,
    pub init_amplitude: f64,
    pub init_seed: u64,
    pub init_kmax: i64,
    pub init_decay: f64,
    pub galerkin_n: usize,
    pub alpha_tilde: f64,
    pub alpha_hat: f64,
    pub drop_nonlinearity: bool,
    pub record_hs: bool,
    pub noise_c: Vec<CoefficientField>,
    pub noise_b: Vec<CoefficientField>,
    pub noise_g: Nonlinearity,
    pub noise_m1: Option<f64>,
    pub noise_m2: Option<f64>,
    pub noise_cg: Option<f64>,
    pub noise_eta: f64,
    pub ensemble_paths: usize,
    pub ensemble_levels: Vec<usize>,
    pub run_seed: u64,
    pub run_force: bool,
    pub verify_samples: usize,
    pub oracle_fields: usize,
    pub uniqueness_perturbation: f64,
    pub uniqueness_tolerance: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            grid_n1: 32,
            grid_n2: 32,
            dt: 1e-3,
            t_end: 0.5,
            integrator: Integrator::IfRk2,
            eps_v: 0.0,
            dealias: true,
            snapshot_every: 100,
            init_kind: InitKind::Random,
            init_amplitude: 1.0,
            init_seed: 1,
            init_kmax: 4,
            init_decay: 1.0,
            galerkin_n: 32,
            alpha_tilde: 0.5,
            alpha_hat: 0.5,
            drop_nonlinearity: false,
            record_hs: false,
            noise_c: vec![CoefficientField::constant(0.1), CoefficientField::zero()],
            noise_b: vec![CoefficientField::cos(0, 1, 0.05), CoefficientField::sin(1, 1, 0.05)],
            noise_g: Nonlinearity::Tanh { amplitude: 0.5 },
            noise_m1: None,
            noise_m2: None,
            noise_cg: None,
            noise_eta: DEFAULT_ETA,
            ensemble_paths: 50,
            ensemble_levels: vec![8, 16, 32],
            run_seed: 0,
            run_force: false,
            verify_samples: 200,
            oracle_fields: 50,
            uniqueness_perturbation: 1e-8,
            uniqueness_tolerance: 0.05,
        }
    }
}

fn err(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| err(key, format!("cannot parse '{v}'")))
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(err(key, format!("expected true or false, got '{v}'"))),
    }
}

fn auto(key: &str, v: &str) -> Result<Option<f64>> {
    if v == "auto" {
        Ok(None)
    } else {
        num(key, v).map(Some)
    }
}

fn recipes(key: &str, v: &str) -> Result<Vec<CoefficientField>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split('|').map(|r| r.parse().map_err(|e: Error| err(key, e))).collect()
}

fn show_recipes(list: &[CoefficientField]) -> String {
    list.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" | ")
}

fn show_auto(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_else(|| "auto".into())
}

impl Config {
    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "grid.n1" => self.grid_n1 = num(key, v)?,
            "grid.n2" => self.grid_n2 = num(key, v)?,
            "grid.n" => {
                self.grid_n1 = num(key, v)?;
                self.grid_n2 = self.grid_n1;
            }
            "time.dt" => self.dt = num(key, v)?,
            "time.t_end" => self.t_end = num(key, v)?,
            "det.integrator" => {
                self.integrator = Integrator::parse(v).ok_or_else(|| err(key, format!("unknown integrator '{v}'")))?
            }
            "det.eps_v" => self.eps_v = num(key, v)?,
            "det.dealias" => self.dealias = boolean(key, v)?,
            "det.snapshot_every" => self.snapshot_every = num(key, v)?,
            "init.kind" => self.init_kind = InitKind::parse(v).ok_or_else(|| err(key, format!("unknown kind '{v}'")))?,
            "init.amplitude" => self.init_amplitude = num(key, v)?,
            "init.seed" => self.init_seed = num(key, v)?,
            "init.kmax" => self.init_kmax = num(key, v)?,
            "init.decay" => self.init_decay = num(key, v)?,
            "sde.galerkin_n" => self.galerkin_n = num(key, v)?,
            "sde.alpha_tilde" => self.alpha_tilde = num(key, v)?,
            "sde.alpha_hat" => self.alpha_hat = num(key, v)?,
            "sde.drop_nonlinearity" => self.drop_nonlinearity = boolean(key, v)?,
            "sde.record_hs" => self.record_hs = boolean(key, v)?,
            "noise.c" => self.noise_c = recipes(key, v)?,
            "noise.b" => self.noise_b = recipes(key, v)?,
            "noise.g" => self.noise_g = v.parse().map_err(|e: Error| err(key, e))?,
            "noise.m1" => self.noise_m1 = auto(key, v)?,
            "noise.m2" => self.noise_m2 = auto(key, v)?,
            "noise.cg" => self.noise_cg = auto(key, v)?,
            "noise.eta" => self.noise_eta = num(key, v)?,
            "ensemble.paths" => self.ensemble_paths = num(key, v)?,
            "ensemble.levels" => {
                self.ensemble_levels = v.split(',').map(|x| num(key, x.trim())).collect::<Result<_>>()?
            }
            "run.seed" => self.run_seed = num(key, v)?,
            "run.force" => self.run_force = boolean(key, v)?,
            "verify.samples" => self.verify_samples = num(key, v)?,
            "oracle.fields" => self.oracle_fields = num(key, v)?,
            "uniqueness.perturbation" => self.uniqueness_perturbation = num(key, v)?,
            "uniqueness.tolerance" => self.uniqueness_tolerance = num(key, v)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let grid = self.grid().map_err(|e| err("grid.n1", e))?;
        let pos = |key: &str, x: f64| if x > 0.0 && x.is_finite() { Ok(()) } else { Err(err(key, format!("must be positive, got {x}"))) };
        let nonneg = |key: &str, x: f64| if x >= 0.0 && x.is_finite() { Ok(()) } else { Err(err(key, format!("must be nonnegative, got {x}"))) };
        pos("time.dt", self.dt)?;
        nonneg("time.t_end", self.t_end)?;
        nonneg("det.eps_v", self.eps_v)?;
        nonneg("init.amplitude", self.init_amplitude)?;
        nonneg("init.decay", self.init_decay)?;
        nonneg("uniqueness.perturbation", self.uniqueness_perturbation)?;
        nonneg("uniqueness.tolerance", self.uniqueness_tolerance)?;
        if self.snapshot_every == 0 {
            return Err(err("det.snapshot_every", "must be at least 1"));
        }
        if self.init_kmax < 1 {
            return Err(err("init.kmax", "must be at least 1"));
        }
        // levels above the grid's capacity are reported by the commands that use them
        for (key, n) in std::iter::once(("sde.galerkin_n", self.galerkin_n)).chain(self.ensemble_levels.iter().map(|&n| ("ensemble.levels", n))) {
            if n == 0 {
                return Err(err(key, "levels start at 1"));
            }
        }
        if self.ensemble_levels.is_empty() {
            return Err(err("ensemble.levels", "needs at least one level"));
        }
        if self.ensemble_paths == 0 {
            return Err(err("ensemble.paths", "must be at least 1"));
        }
        if self.verify_samples == 0 {
            return Err(err("verify.samples", "must be at least 1"));
        }
        if self.oracle_fields == 0 {
            return Err(err("oracle.fields", "must be at least 1"));
        }
        for (key, a) in [("sde.alpha_tilde", self.alpha_tilde), ("sde.alpha_hat", self.alpha_hat)] {
            if !(a > 0.0 && a < 1.0) {
                return Err(err(key, format!("must lie in (0, 1), got {a}")));
            }
        }
        self.noise_model()?.prepare(grid).map_err(|e| err("noise", e))?;
        Ok(())
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.grid_n1, self.grid_n2)
    }

    pub fn det_config(&self) -> DetConfig {
        DetConfig {
            dt: self.dt,
            t_end: self.t_end,
            eps_v: self.eps_v,
            integrator: self.integrator,
            dealias: self.dealias,
            snapshot_every: self.snapshot_every,
        }
    }

    pub fn sde_config(&self) -> SdeConfig {
        SdeConfig {
            dt: self.dt,
            t_end: self.t_end,
            galerkin_n: self.galerkin_n,
            seed: self.run_seed,
            path: 0,
            drop_nonlinearity: self.drop_nonlinearity,
            alpha_tilde: self.alpha_tilde,
            alpha_hat: self.alpha_hat,
            snapshot_every: self.snapshot_every,
            record_hs: self.record_hs,
        }
    }

    /// Channels pair `noise.c` and `noise.b` entries; the shorter list is padded with zeros.
    pub fn noise_model(&self) -> Result<NoiseModel> {
        let n = self.noise_c.len().max(self.noise_b.len());
        let channels = (0..n)
            .map(|i| Channel {
                c: self.noise_c.get(i).cloned().unwrap_or_default(),
                b: self.noise_b.get(i).cloned().unwrap_or_default(),
            })
            .collect();
        NoiseModel::new(channels, self.noise_g)
            .and_then(|m| m.with_declared(self.noise_m1, self.noise_m2, self.noise_cg))
            .and_then(|m| m.with_eta(self.noise_eta))
            .map_err(|e| err("noise", e))
    }

    /// Present when the noise constants fail the existence or uniqueness gate.
    pub fn gate_warning(&self) -> Option<String> {
        let m = self.noise_model().ok()?;
        let k = condition_c_bounds(&m);
        let v = condition_c_gate(&k);
        (!v.uniqueness).then(|| {
            format!(
                "noise gate: K2 = {:.6} ({}), K2~ = {:.6} ({}), L2 = {:.6} ({})",
                k.k2,
                if v.k2_ok { "ok" } else { "fails < 2/11" },
                k.k2_tilde,
                if v.k2_tilde_ok { "ok" } else { "fails < 2/5" },
                k.l2,
                if v.l2_ok { "ok" } else { "fails < 2/5" }
            )
        })
    }

    /// The configured initial field.
    pub fn initial_field(&self) -> Result<SpectralField> {
        let grid = self.grid()?;
        let a = self.init_amplitude;
        let mut u = SpectralField::zeros(grid);
        let z = Complex64::new(0.0, 0.0);
        match self.init_kind {
            InitKind::Random => u = random_band_limited(grid, self.init_seed, self.init_kmax, self.init_decay, a),
            // sin x = (e^{ix} - e^{-ix}) / 2i
            InitKind::Shear => u.set_real_mode(1, 0, [z, Complex64::new(0.0, -0.5 * a)]),
            InitKind::TaylorGreen => {
                // sin x₁ cos x₂ and -cos x₁ sin x₂ on the four modes (±1, ±1)
                u.set_real_mode(1, 1, [Complex64::new(0.0, -0.25 * a), Complex64::new(0.0, 0.25 * a)]);
                u.set_real_mode(1, -1, [Complex64::new(0.0, -0.25 * a), Complex64::new(0.0, -0.25 * a)]);
            }
            InitKind::Zero => {}
        }
        Ok(u)
    }

    /// Every key with its effective value; parsing the echo gives back `self`.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("grid.n1", self.grid_n1.to_string());
        line("grid.n2", self.grid_n2.to_string());
        line("time.dt", format!("{:?}", self.dt));
        line("time.t_end", format!("{:?}", self.t_end));
        line("det.integrator", self.integrator.name().into());
        line("det.eps_v", format!("{:?}", self.eps_v));
        line("det.dealias", self.dealias.to_string());
        line("det.snapshot_every", self.snapshot_every.to_string());
        line("init.kind", self.init_kind.name().into());
        line("init.amplitude", format!("{:?}", self.init_amplitude));
        line("init.seed", self.init_seed.to_string());
        line("init.kmax", self.init_kmax.to_string());
        line("init.decay", format!("{:?}", self.init_decay));
        line("sde.galerkin_n", self.galerkin_n.to_string());
        line("sde.alpha_tilde", format!("{:?}", self.alpha_tilde));
        line("sde.alpha_hat", format!("{:?}", self.alpha_hat));
        line("sde.drop_nonlinearity", self.drop_nonlinearity.to_string());
        line("sde.record_hs", self.record_hs.to_string());
        line("noise.c", show_recipes(&self.noise_c));
        line("noise.b", show_recipes(&self.noise_b));
        line("noise.g", self.noise_g.to_string());
        line("noise.m1", show_auto(self.noise_m1));
        line("noise.m2", show_auto(self.noise_m2));
        line("noise.cg", show_auto(self.noise_cg));
        line("noise.eta", format!("{:?}", self.noise_eta));
        line("ensemble.paths", self.ensemble_paths.to_string());
        line("ensemble.levels", self.ensemble_levels.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","));
        line("run.seed", self.run_seed.to_string());
        line("run.force", self.run_force.to_string());
        line("verify.samples", self.verify_samples.to_string());
        line("oracle.fields", self.oracle_fields.to_string());
        line("uniqueness.perturbation", format!("{:?}", self.uniqueness_perturbation));
        line("uniqueness.tolerance", format!("{:?}", self.uniqueness_tolerance));
        s
    }
}

/// Parses configuration text; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut cfg = Config::default();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected 'section.key = value'", no + 1)))?;
        cfg.set(key.trim(), value.trim())?;
    }
    cfg.validate()?;
    Ok(cfg)
}
