//! The multiplicative forcing `σ(u)y = Σ (c_k ∂₁u + b_k g(u)) y_k`, its
//! Hilbert–Schmidt norms and the growth/Lipschitz constants that gate the
//! stochastic runs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{isotropic_norm, DerivativeNorms, NormReport};
use crate::spectral::fft::{forward_pair, inverse_pair};
use crate::spectral::ops::{dealias_in_place, leray_project_in_place};
use crate::spectral::random::random_solenoidal;
use crate::spectral::{SpectralField, TorusGrid, BasisMode, Parity};

/// `‖(1, 1)‖_{L²(T²)}`: the `L²` size of a vector field bounded by 1 per component.
pub const KAPPA: f64 = 2.0 * PI * std::f64::consts::SQRT_2;

/// Default Peter–Paul split.
pub const DEFAULT_ETA: f64 = 0.1;

/// One term `a cos(k·x) + b sin(k·x)` of a coefficient recipe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourierTerm {
    pub k1: i64,
    pub k2: i64,
    pub cos: f64,
    pub sin: f64,
}

impl FourierTerm {
    fn amplitude(&self) -> f64 {
        self.cos.hypot(self.sin)
    }
}

/// A smooth scalar coefficient `c₀ + Σ (a cos(k·x) + b sin(k·x))`.
///
/// Recipes read `0.1; 0.05 cos 1 0; 0.02 sin 0 1`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CoefficientField {
    pub constant: f64,
    pub terms: Vec<FourierTerm>,
}

impl CoefficientField {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self { constant: c, terms: Vec::new() }
    }

    pub fn cos(k1: i64, k2: i64, a: f64) -> Self {
        Self::zero().plus(k1, k2, a, 0.0)
    }

    pub fn sin(k1: i64, k2: i64, b: f64) -> Self {
        Self::zero().plus(k1, k2, 0.0, b)
    }

    /// Adds `a cos(k·x) + b sin(k·x)`.
    pub fn plus(mut self, k1: i64, k2: i64, a: f64, b: f64) -> Self {
        if let Some(t) = self.terms.iter_mut().find(|t| t.k1 == k1 && t.k2 == k2) {
            t.cos += a;
            t.sin += b;
        } else {
            self.terms.push(FourierTerm { k1, k2, cos: a, sin: b });
        }
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            constant: s * self.constant,
            terms: self.terms.iter().map(|t| FourierTerm { cos: s * t.cos, sin: s * t.sin, ..*t }).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.terms.iter().all(|t| t.cos == 0.0 && t.sin == 0.0)
    }

    /// Whether the field is constant in space.
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| (t.k1 == 0 && t.k2 == 0) || (t.cos == 0.0 && t.sin == 0.0))
    }

    /// Upper bound for `sup|c|` by the absolute sum of amplitudes.
    pub fn sup_bound(&self) -> f64 {
        self.constant.abs() + self.terms.iter().map(FourierTerm::amplitude).sum::<f64>()
    }

    /// Upper bound for `sup|∂₁c|`.
    pub fn d1_sup_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.k1.abs() as f64 * t.amplitude()).sum()
    }

    /// Upper bound for `sup|∂₂c|`.
    pub fn d2_sup_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.k2.abs() as f64 * t.amplitude()).sum()
    }

    /// Largest `|k₁|` and `|k₂|` among the terms.
    pub fn max_wavenumbers(&self) -> (i64, i64) {
        self.terms
            .iter()
            .filter(|t| t.cos != 0.0 || t.sin != 0.0)
            .fold((0, 0), |(a, b), t| (a.max(t.k1.abs()), b.max(t.k2.abs())))
    }

    pub fn value(&self, x1: f64, x2: f64) -> f64 {
        let mut v = self.constant;
        for t in &self.terms {
            let ph = t.k1 as f64 * x1 + t.k2 as f64 * x2;
            v += t.cos * ph.cos() + t.sin * ph.sin();
        }
        v
    }

    /// Samples on the grid points, in storage order.
    pub fn sample(&self, grid: TorusGrid) -> Vec<f64> {
        let mut out = Vec::with_capacity(grid.len());
        for i1 in 0..grid.n1() {
            for i2 in 0..grid.n2() {
                let (x1, x2) = grid.point(i1, i2);
                out.push(self.value(x1, x2));
            }
        }
        out
    }
}

impl fmt::Display for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.constant)?;
        for t in &self.terms {
            if t.cos != 0.0 {
                write!(f, "; {:?} cos {} {}", t.cos, t.k1, t.k2)?;
            }
            if t.sin != 0.0 {
                write!(f, "; {:?} sin {} {}", t.sin, t.k1, t.k2)?;
            }
        }
        Ok(())
    }
}

impl FromStr for CoefficientField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |part: &str| Error::Config(format!("bad coefficient term '{part}' (want 'a', 'a cos k1 k2' or 'a sin k1 k2')"));
        let mut out = Self::zero();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let tok: Vec<&str> = part.split_whitespace().collect();
            match tok.as_slice() {
                [a] => out.constant += a.parse::<f64>().map_err(|_| bad(part))?,
                [a, kind, k1, k2] => {
                    let a: f64 = a.parse().map_err(|_| bad(part))?;
                    let k1: i64 = k1.parse().map_err(|_| bad(part))?;
                    let k2: i64 = k2.parse().map_err(|_| bad(part))?;
                    out = match *kind {
                        "cos" => out.plus(k1, k2, a, 0.0),
                        "sin" => out.plus(k1, k2, 0.0, a),
                        _ => return Err(bad(part)),
                    };
                }
                _ => return Err(bad(part)),
            }
        }
        if !out.constant.is_finite() || out.terms.iter().any(|t| !t.cos.is_finite() || !t.sin.is_finite()) {
            return Err(Error::Config(format!("non-finite coefficient in '{s}'")));
        }
        Ok(out)
    }
}

/// Pointwise map `g`, applied to each velocity component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Nonlinearity {
    /// `g(u) = v`, independent of `u`: additive noise.
    Constant { value: [f64; 2] },
    /// `g(u) = A sin(ω u)`.
    Sine { amplitude: f64, frequency: f64 },
    /// `g(u) = A tanh(u)`.
    Tanh { amplitude: f64 },
}

impl Nonlinearity {
    #[inline]
    pub fn eval(&self, component: usize, x: f64) -> f64 {
        match *self {
            Self::Constant { value } => value[component],
            Self::Sine { amplitude, frequency } => amplitude * (frequency * x).sin(),
            Self::Tanh { amplitude } => amplitude * x.tanh(),
        }
    }

    /// `C(g) ≥ sup|g|, sup|g'|`.
    pub fn c1_bound(&self) -> f64 {
        match *self {
            Self::Constant { value } => value[0].abs().max(value[1].abs()),
            Self::Sine { amplitude, frequency } => amplitude.abs() * frequency.abs().max(1.0),
            Self::Tanh { amplitude } => amplitude.abs(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant { .. })
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Constant { value } => write!(f, "constant {:?} {:?}", value[0], value[1]),
            Self::Sine { amplitude, frequency } => write!(f, "sine {amplitude:?} {frequency:?}"),
            Self::Tanh { amplitude } => write!(f, "tanh {amplitude:?}"),
        }
    }
}

impl FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad nonlinearity '{s}' (want 'constant a b', 'sine A w' or 'tanh A')"));
        let tok: Vec<&str> = s.split_whitespace().collect();
        let num = |t: &str| t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
        match tok.as_slice() {
            ["constant", a, b] => Ok(Self::Constant { value: [num(a)?, num(b)?] }),
            ["sine", a, w] => Ok(Self::Sine { amplitude: num(a)?, frequency: num(w)? }),
            ["tanh", a] => Ok(Self::Tanh { amplitude: num(a)? }),
            _ => Err(bad()),
        }
    }
}

/// One noise channel: transport coefficient `c_k` and reaction coefficient `b_k`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Channel {
    pub c: CoefficientField,
    pub b: CoefficientField,
}

/// Truncated noise `σ(u)y = Σ_{k ≤ n} (c_k ∂₁u + b_k g(u)) y_k`, projected to
/// divergence-free fields.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoiseModel {
    channels: Vec<Channel>,
    g: Nonlinearity,
    m1: f64,
    m2: f64,
    cg: f64,
    eta: f64,
}

/// Bounds computed from a model's recipes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RecipeBounds {
    /// `Σ (sup|c_k|)²`.
    pub m1: f64,
    /// `Σ (sup|∂₁c_k|)²`.
    pub m1_d1: f64,
    /// `Σ (sup|∂₂c_k|)²`.
    pub m1_d2: f64,
    /// `max(Σ (sup|b_k|)², Σ (sup|∂₂b_k|)²)`.
    pub m2: f64,
    /// `C(g)`.
    pub cg: f64,
}

impl NoiseModel {
    /// A model whose declared constants are the bounds computed from the recipes.
    pub fn new(channels: Vec<Channel>, g: Nonlinearity) -> Result<Self> {
        let mut m = Self { channels, g, m1: 0.0, m2: 0.0, cg: 0.0, eta: DEFAULT_ETA };
        let b = m.recipe_bounds();
        m.m1 = b.m1;
        m.m2 = b.m2;
        m.cg = b.cg;
        m.validate()?;
        Ok(m)
    }

    /// No noise at all.
    pub fn zero() -> Self {
        Self { channels: Vec::new(), g: Nonlinearity::Constant { value: [0.0, 0.0] }, m1: 0.0, m2: 0.0, cg: 0.0, eta: DEFAULT_ETA }
    }

    /// Additive noise `s e_k^{cos}` on the single basis element of mode `k`.
    pub fn ou(k1: i64, k2: i64, s: f64) -> Result<Self> {
        if k1 == 0 && k2 == 0 {
            return Err(Error::InvalidMode { k1, k2, reason: "the mean mode carries no basis element" });
        }
        let d = BasisMode::new(k1, k2, Parity::Cos).direction();
        let amp = s * crate::spectral::basis::BASIS_SCALE;
        Self::new(
            vec![Channel { c: CoefficientField::zero(), b: CoefficientField::cos(k1, k2, amp) }],
            Nonlinearity::Constant { value: d },
        )
    }

    /// Additive noise `s_j cos(k_j·x) g` on several modes, with the fixed
    /// direction `g = (0.6, 0.8)` projected onto each mode.
    pub fn additive(modes: &[(i64, i64, f64)]) -> Result<Self> {
        let channels = modes
            .iter()
            .map(|&(k1, k2, s)| Channel { c: CoefficientField::zero(), b: CoefficientField::cos(k1, k2, s) })
            .collect();
        Self::new(channels, Nonlinearity::Constant { value: [0.6, 0.8] })
    }

    /// Declares `M1`, `M2`, `C(g)`; each must dominate the recipe bound.
    pub fn with_declared(mut self, m1: Option<f64>, m2: Option<f64>, cg: Option<f64>) -> Result<Self> {
        if let Some(v) = m1 {
            self.m1 = v;
        }
        if let Some(v) = m2 {
            self.m2 = v;
        }
        if let Some(v) = cg {
            self.cg = v;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        self.eta = eta;
        self.validate()?;
        Ok(self)
    }

    /// Multiplies every transport coefficient by `s`; declared `M1` scales by `s²`.
    pub fn scale_transport(mut self, s: f64) -> Self {
        for ch in &mut self.channels {
            ch.c = ch.c.scaled(s);
        }
        self.m1 *= s * s;
        self
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn n_modes(&self) -> usize {
        self.channels.len()
    }

    pub fn g(&self) -> Nonlinearity {
        self.g
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    pub fn cg(&self) -> f64 {
        self.cg
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn is_zero(&self) -> bool {
        self.channels.iter().all(|c| c.c.is_zero() && c.b.is_zero())
    }

    pub fn has_transport(&self) -> bool {
        self.channels.iter().any(|c| !c.c.is_zero())
    }

    /// `σ` does not depend on `u`.
    pub fn is_additive(&self) -> bool {
        !self.has_transport() && (self.g.is_constant() || self.channels.iter().all(|c| c.b.is_zero()))
    }

    pub fn recipe_bounds(&self) -> RecipeBounds {
        let sq = |f: &dyn Fn(&Channel) -> f64| self.channels.iter().map(|c| f(c).powi(2)).sum::<f64>();
        RecipeBounds {
            m1: sq(&|c| c.c.sup_bound()),
            m1_d1: sq(&|c| c.c.d1_sup_bound()),
            m1_d2: sq(&|c| c.c.d2_sup_bound()),
            m2: sq(&|c| c.b.sup_bound()).max(sq(&|c| c.b.d2_sup_bound())),
            cg: self.g.c1_bound(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(Error::Config(format!("noise.eta must be positive, got {}", self.eta)));
        }
        let b = self.recipe_bounds();
        // relative slack for the sums of squares
        let fits = |declared: f64, bound: f64| declared.is_finite() && declared >= bound * (1.0 - 1e-12);
        if !fits(self.m1, b.m1) {
            return Err(Error::Config(format!("noise.m1 = {} is below Σ sup|c_k|² = {}", self.m1, b.m1)));
        }
        if !fits(self.m2, b.m2) {
            return Err(Error::Config(format!("noise.m2 = {} is below the b_k bound {}", self.m2, b.m2)));
        }
        if !fits(self.cg, b.cg) {
            return Err(Error::Config(format!("noise.cg = {} is below C(g) = {}", self.cg, b.cg)));
        }
        Ok(())
    }

    /// Samples the recipes on `grid` and checks that transport products are alias-free.
    pub fn prepare(&self, grid: TorusGrid) -> Result<PreparedNoise> {
        PreparedNoise::new(self.clone(), grid)
    }
}

/// A model bound to a grid, with the coefficient samples cached.
#[derive(Clone, Debug)]
pub struct PreparedNoise {
    model: NoiseModel,
    grid: TorusGrid,
    c_vals: Vec<Option<Vec<f64>>>,
    b_vals: Vec<Option<Vec<f64>>>,
    columns: Option<Vec<SpectralField>>,
}

impl PreparedNoise {
    fn new(model: NoiseModel, grid: TorusGrid) -> Result<Self> {
        let (n1, n2) = (grid.n1() as i64, grid.n2() as i64);
        for ch in model.channels.iter() {
            let (c1, c2) = ch.c.max_wavenumbers();
            if !ch.c.is_zero() && (c1 >= n1 - 2 * grid.band1() || c2 >= n2 - 2 * grid.band2()) {
                return Err(Error::Config(format!(
                    "transport coefficient with wavenumbers ({c1}, {c2}) aliases on a {n1}x{n2} grid"
                )));
            }
            let (b1, b2) = ch.b.max_wavenumbers();
            if 2 * b1 >= n1 || 2 * b2 >= n2 {
                return Err(Error::Config(format!("reaction coefficient with wavenumbers ({b1}, {b2}) is not resolved on a {n1}x{n2} grid")));
            }
        }
        let sample = |f: &CoefficientField| (!f.is_zero()).then(|| f.sample(grid));
        let c_vals = model.channels.iter().map(|c| sample(&c.c)).collect();
        let b_vals = model.channels.iter().map(|c| sample(&c.b)).collect();
        let mut p = Self { model, grid, c_vals, b_vals, columns: None };
        if p.model.is_additive() {
            let zero = SpectralField::zeros(grid);
            p.columns = Some(p.columns_uncached(&zero));
        }
        Ok(p)
    }

    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn n_modes(&self) -> usize {
        self.model.n_modes()
    }

    /// Physical `∂₁u` and `g(u)`, computed only when some channel needs them.
    fn pointwise(&self, u: &SpectralField) -> (Option<[Vec<f64>; 2]>, Option<[Vec<f64>; 2]>) {
        let grid = self.grid;
        let d1u = self.c_vals.iter().any(Option::is_some).then(|| {
            let mut d = u.clone();
            crate::spectral::ops::derivative_in_place(&mut d, crate::spectral::Axis::X1, 1);
            let (a, b) = inverse_pair(grid, d.component(0), d.component(1));
            [a, b]
        });
        let any_b = self.b_vals.iter().any(Option::is_some);
        let gu = any_b.then(|| {
            let g = self.model.g;
            if g.is_constant() {
                [vec![g.eval(0, 0.0); grid.len()], vec![g.eval(1, 0.0); grid.len()]]
            } else {
                let (a, b) = inverse_pair(grid, u.component(0), u.component(1));
                [a.into_iter().map(|x| g.eval(0, x)).collect(), b.into_iter().map(|x| g.eval(1, x)).collect()]
            }
        });
        (d1u, gu)
    }

    fn finish(&self, p1: &[f64], p2: &[f64]) -> SpectralField {
        let (h1, h2) = forward_pair(self.grid, p1, p2);
        let mut out = SpectralField::from_components(self.grid, h1, h2).expect("lengths match grid");
        dealias_in_place(&mut out);
        leray_project_in_place(&mut out);
        out
    }

    fn accumulate(
        &self,
        weights: &[f64],
        d1u: &Option<[Vec<f64>; 2]>,
        gu: &Option<[Vec<f64>; 2]>,
        p1: &mut [f64],
        p2: &mut [f64],
    ) {
        for (j, &y) in weights.iter().enumerate() {
            if y == 0.0 {
                continue;
            }
            if let (Some(c), Some(d)) = (&self.c_vals[j], d1u) {
                for i in 0..p1.len() {
                    p1[i] += y * c[i] * d[0][i];
                    p2[i] += y * c[i] * d[1][i];
                }
            }
            if let (Some(b), Some(g)) = (&self.b_vals[j], gu) {
                for i in 0..p1.len() {
                    p1[i] += y * b[i] * g[0][i];
                    p2[i] += y * b[i] * g[1][i];
                }
            }
        }
    }

    /// `σ(u)y`: the projected, dealiased `Σ (c_k ∂₁u + b_k g(u)) y_k`.
    pub fn apply(&self, u: &SpectralField, y: &[f64]) -> SpectralField {
        assert_eq!(y.len(), self.n_modes(), "increment length must equal the noise mode count");
        if let Some(cols) = &self.columns {
            let mut out = SpectralField::zeros(self.grid);
            for (c, &yj) in cols.iter().zip(y) {
                if yj != 0.0 {
                    out.add_scaled(yj, c);
                }
            }
            return out;
        }
        if y.iter().all(|&v| v == 0.0) {
            return SpectralField::zeros(self.grid);
        }
        let (d1u, gu) = self.pointwise(u);
        let n = self.grid.len();
        let (mut p1, mut p2) = (vec![0.0; n], vec![0.0; n]);
        self.accumulate(y, &d1u, &gu, &mut p1, &mut p2);
        self.finish(&p1, &p2)
    }

    fn columns_uncached(&self, u: &SpectralField) -> Vec<SpectralField> {
        let (d1u, gu) = self.pointwise(u);
        let n = self.grid.len();
        let mut e = vec![0.0; self.n_modes()];
        (0..self.n_modes())
            .map(|j| {
                e.iter_mut().for_each(|x| *x = 0.0);
                e[j] = 1.0;
                let (mut p1, mut p2) = (vec![0.0; n], vec![0.0; n]);
                self.accumulate(&e, &d1u, &gu, &mut p1, &mut p2);
                self.finish(&p1, &p2)
            })
            .collect()
    }

    /// `σ(u)ψ_k` for every channel.
    pub fn columns(&self, u: &SpectralField) -> Vec<SpectralField> {
        match &self.columns {
            Some(c) => c.clone(),
            None => self.columns_uncached(u),
        }
    }

    /// Borrowed columns of an additive model.
    pub fn cached_columns(&self) -> Option<&[SpectralField]> {
        self.columns.as_deref()
    }

    /// `‖σ(u)‖²_{L²(ℓ², H)} = Σ_k ‖σ(u)ψ_k‖²`.
    pub fn hs_norm_sq(&self, u: &SpectralField) -> f64 {
        self.columns(u).iter().map(SpectralField::norm_sq).sum()
    }
}

/// `σ(u)y` with a freshly prepared model.
pub fn apply_sigma(model: &NoiseModel, u: &SpectralField, y: &[f64]) -> Result<SpectralField> {
    if y.len() != model.n_modes() {
        return Err(Error::InvalidArgument(format!("increment has {} entries, model has {} modes", y.len(), model.n_modes())));
    }
    Ok(model.prepare(u.grid())?.apply(u, y))
}

/// Squared-form growth and Lipschitz constants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ConditionCConstants {
    pub k0_prime: f64,
    pub k1_prime: f64,
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub k0_tilde: f64,
    pub k1_tilde: f64,
    pub k2_tilde: f64,
    pub l1: f64,
    pub l2: f64,
    /// Split parameter used to derive the constants.
    pub eta: f64,
}

/// Existence and uniqueness gates; every comparison is strict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GateVerdict {
    pub k2_ok: bool,
    pub k2_tilde_ok: bool,
    pub l2_ok: bool,
    pub existence: bool,
    pub uniqueness: bool,
}

/// Converts the first-power norm bounds of the model into squared constants
/// with `(a + b)² ≤ (1+η)a² + (1+1/η)b²`.
pub fn condition_c_bounds(model: &NoiseModel) -> ConditionCConstants {
    let e = model.eta;
    let r = model.recipe_bounds();
    let (m1, m2, c) = (model.m1, model.m2, model.cg);
    let m2c2 = m2 * c * c;
    let kappa2 = KAPPA * KAPPA;
    let k1 = 2.0 * (1.0 + 1.0 / e) * m2c2;
    // ∂₂(c ∂₁u) = ∂₂c ∂₁u + c ∂₁∂₂u, split with the δ that balances the two weights
    let balanced = if r.m1_d2 > 0.0 && m1 > 0.0 {
        let delta = (r.m1_d2 + (r.m1_d2 * r.m1_d2 + 4.0 * m1 * r.m1_d2).sqrt()) / (2.0 * m1);
        ((1.0 + delta) * m1).max(m1 + (1.0 + 1.0 / delta) * r.m1_d2)
    } else {
        m1
    };
    ConditionCConstants {
        k0_prime: (1.0 + 1.0 / e) * m2c2 * kappa2,
        k1_prime: (1.0 + e) * (m1.sqrt() + r.m1_d1.sqrt() + (m2c2).sqrt()).powi(2),
        k0: k1 * kappa2,
        k1,
        k2: (1.0 + e) * m1,
        k0_tilde: 4.0 * (1.0 + 1.0 / e) * m2c2 * kappa2,
        k1_tilde: k1,
        k2_tilde: (1.0 + e) * (2.0 * m1).max(balanced),
        l1: (1.0 + 1.0 / e) * m2c2,
        l2: (1.0 + e) * m1,
        eta: e,
    }
}

/// `K₂ < 2/11`, `K̃₂ < 2/5` for existence; additionally `L₂ < 2/5` for uniqueness.
pub fn condition_c_gate(c: &ConditionCConstants) -> GateVerdict {
    let k2_ok = c.k2 < 2.0 / 11.0;
    let k2_tilde_ok = c.k2_tilde < 2.0 / 5.0;
    let l2_ok = c.l2 < 2.0 / 5.0;
    GateVerdict { k2_ok, k2_tilde_ok, l2_ok, existence: k2_ok && k2_tilde_ok, uniqueness: k2_ok && k2_tilde_ok && l2_ok }
}

/// Worst cases of the sampled growth and Lipschitz inequalities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionCAudit {
    pub constants: ConditionCConstants,
    pub samples: usize,
    /// `H^{-1}`, `H`, `H^{0,1}` growth and the Lipschitz bound, worst ratio each.
    pub reports: Vec<NormReport>,
    pub violations: usize,
}

impl ConditionCAudit {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn worst_ratio(&self) -> f64 {
        self.reports.iter().map(NormReport::ratio).fold(0.0, f64::max)
    }
}

// 0/0 at coincident pairs ranks below every real ratio
fn key(r: &NormReport) -> f64 {
    let q = r.ratio();
    if q.is_nan() {
        f64::NEG_INFINITY
    } else {
        q
    }
}

struct Worst {
    report: Option<NormReport>,
    violations: usize,
}

impl Worst {
    fn push(&mut self, r: NormReport) {
        if !r.satisfied {
            self.violations += 1;
        }
        let better = match &self.report {
            None => true,
            Some(w) => key(&r) > key(w) || (!r.satisfied && w.satisfied),
        };
        if better {
            self.report = Some(r);
        }
    }
}

/// Draws `u = 0` and `sample_count` random fields (and pairs), and checks the
/// three growth bounds and the Lipschitz bound with the analytic constants.
pub fn condition_c_empirical_check(model: &NoiseModel, grid: TorusGrid, sample_count: usize, seed: u64) -> Result<ConditionCAudit> {
    if sample_count == 0 {
        return Err(Error::InvalidArgument("sample_count must be at least 1".into()));
    }
    let k = condition_c_bounds(model);
    let prepared = model.prepare(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: Vec<Worst> = (0..4).map(|_| Worst { report: None, violations: 0 }).collect();
    let names = ["growth_h_minus1", "growth_h", "growth_h01", "lipschitz"];
    for i in 0..=sample_count {
        let u = if i == 0 {
            SpectralField::zeros(grid)
        } else {
            let norm = 10f64.powf(rng.random_range(-1.5..1.5));
            random_solenoidal(grid, rng.random(), norm)
        };
        let cols = prepared.columns(&u);
        let d = DerivativeNorms::of(&u);
        let tag = format!("sample {i}, |u| = {:.3e}", d.l2_sq.sqrt());
        let hm1: f64 = cols.iter().map(|c| isotropic_norm(c, -1.0).powi(2)).sum();
        let h: f64 = cols.iter().map(SpectralField::norm_sq).sum();
        let h01: f64 = cols.iter().map(|c| DerivativeNorms::of(c).h01_sq()).sum();
        let bounds = [
            k.k0_prime + k.k1_prime * d.l2_sq,
            k.k0 + k.k1 * d.l2_sq + k.k2 * d.d1_sq,
            k.k0_tilde + k.k1_tilde * d.h01_sq() + k.k2_tilde * (d.d1_sq + d.d1d2_sq),
        ];
        for (j, (lhs, rhs)) in [hm1, h, h01].into_iter().zip(bounds).enumerate() {
            worst[j].push(NormReport::new(names[j], lhs, rhs, 1.0, 1e-12 * rhs.max(1e-300)).with_witness(tag.clone()));
        }
        // the pair: coincident at the origin, otherwise a nearby or an independent field
        let v = if i == 0 {
            u.clone()
        } else if i % 2 == 0 {
            let mut v = u.clone();
            v.add_scaled(rng.random_range(0.01..0.5), &random_solenoidal(grid, rng.random(), u.norm()));
            v
        } else {
            random_solenoidal(grid, rng.random(), 10f64.powf(rng.random_range(-1.5..1.5)))
        };
        let cv = prepared.columns(&v);
        let lip: f64 = cols.iter().zip(&cv).map(|(a, b)| (a - b).norm_sq()).sum();
        let dw = DerivativeNorms::of(&(&u - &v));
        let rhs = k.l1 * dw.l2_sq + k.l2 * dw.d1_sq;
        worst[3].push(NormReport::new(names[3], lip, rhs, 1.0, 1e-12 * rhs).with_witness(tag));
    }
    let violations = worst.iter().map(|w| w.violations).sum();
    Ok(ConditionCAudit {
        constants: k,
        samples: sample_count,
        reports: worst.into_iter().map(|w| w.report.expect("at least one sample")).collect(),
        violations,
    })
}
