//! Anisotropic Sobolev norms, mixed Lebesgue norms and inequality audits.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::fft::inverse_unchecked;
use crate::spectral::field::{PhysicalField, SpectralField, MEASURE};
use crate::spectral::grid::TorusGrid;

/// `‖u‖_{H^{s,s'}}`, or the horizontally homogeneous `Ḣ^{s,s'}` norm with
/// weight `|k₁|^{2s}(1+k₂²)^{s'}`.
pub fn sobolev_norm(u: &SpectralField, s: f64, s_prime: f64, homogeneous: bool) -> f64 {
    let grid = u.grid();
    let mut acc = 0.0;
    for (idx, k1, k2) in grid.modes() {
        let k1 = k1 as f64;
        let k2 = k2 as f64;
        let w1 = if homogeneous {
            if k1 == 0.0 {
                if s > 0.0 {
                    0.0
                } else {
                    1.0
                }
            } else {
                k1.abs().powf(2.0 * s)
            }
        } else {
            (1.0 + k1 * k1).powf(s)
        };
        if w1 == 0.0 {
            continue;
        }
        let w = w1 * (1.0 + k2 * k2).powf(s_prime);
        acc += w * (u.component(0)[idx].norm_sqr() + u.component(1)[idx].norm_sqr());
    }
    (MEASURE * acc).sqrt()
}

/// Isotropic `‖u‖_{H^s}` with weight `(1+|k|²)^s`; negative `s` allowed.
pub fn isotropic_norm(u: &SpectralField, s: f64) -> f64 {
    let grid = u.grid();
    let mut acc = 0.0;
    for (idx, k1, k2) in grid.modes() {
        let kk = (k1 * k1 + k2 * k2) as f64;
        acc += (1.0 + kk).powf(s) * (u.component(0)[idx].norm_sqr() + u.component(1)[idx].norm_sqr());
    }
    (MEASURE * acc).sqrt()
}

/// `(u, v)_{H^{0,1}} = (u, v) + (∂₂u, ∂₂v)`.
pub fn h01_inner(u: &SpectralField, v: &SpectralField) -> Result<f64> {
    u.check_grid(v)?;
    let grid = u.grid();
    let mut acc = 0.0;
    for (idx, _, k2) in grid.modes() {
        let w = 1.0 + (k2 * k2) as f64;
        for j in 0..2 {
            let a = u.component(j)[idx];
            let b = v.component(j)[idx];
            acc += w * (a.re * b.re + a.im * b.im);
        }
    }
    Ok(MEASURE * acc)
}

/// Squared norms `‖u‖², ‖∂₁u‖², ‖∂₂u‖², ‖∂₁∂₂u‖²` in one sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct DerivativeNorms {
    pub l2_sq: f64,
    pub d1_sq: f64,
    pub d2_sq: f64,
    pub d1d2_sq: f64,
}

impl DerivativeNorms {
    pub fn of(u: &SpectralField) -> Self {
        let grid = u.grid();
        let (mut l2, mut d1, mut d2, mut d12) = (0.0, 0.0, 0.0, 0.0);
        for (idx, k1, k2) in grid.modes() {
            let a = u.component(0)[idx].norm_sqr() + u.component(1)[idx].norm_sqr();
            if a == 0.0 {
                continue;
            }
            let q1 = (k1 * k1) as f64;
            let q2 = (k2 * k2) as f64;
            l2 += a;
            d1 += q1 * a;
            d2 += q2 * a;
            d12 += q1 * q2 * a;
        }
        Self {
            l2_sq: MEASURE * l2,
            d1_sq: MEASURE * d1,
            d2_sq: MEASURE * d2,
            d1d2_sq: MEASURE * d12,
        }
    }

    /// `‖u‖²_{H^{0,1}}`.
    pub fn h01_sq(&self) -> f64 {
        self.l2_sq + self.d2_sq
    }

    /// `‖u‖²_{H^{1,0}}`.
    pub fn h10_sq(&self) -> f64 {
        self.l2_sq + self.d1_sq
    }

    /// `‖u‖²_{H^{1,1}}`.
    pub fn h11_sq(&self) -> f64 {
        self.l2_sq + self.d1_sq + self.d2_sq + self.d1d2_sq
    }
}

/// Which variable carries the outer integral of a mixed norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ordering {
    /// `L^p_h(L^q_v)`: inner integral in x₂, outer in x₁.
    HOuter,
    /// `L^p_v(L^q_h)`: inner integral in x₁, outer in x₂.
    VOuter,
}

fn lp_1d(values: impl Iterator<Item = f64>, p: f64, h: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, |m, v| m.max(v.abs()))
    } else {
        let s: f64 = values.map(|v| v.abs().powf(p)).sum();
        (s * h).powf(1.0 / p)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent {p} must lie in [1, ∞]")));
    }
    Ok(())
}

/// Iterated norm of scalar grid samples: outer exponent `p`, inner `q`.
pub fn mixed_norm_scalar(grid: TorusGrid, values: &[f64], p: f64, q: f64, ordering: Ordering) -> Result<f64> {
    check_exponent(p)?;
    check_exponent(q)?;
    if values.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "{} samples for grid {grid}",
            values.len()
        )));
    }
    let (n1, n2) = (grid.n1(), grid.n2());
    let (h1, h2) = grid.spacing();
    let inner: Vec<f64> = match ordering {
        Ordering::HOuter => (0..n1)
            .map(|i1| lp_1d((0..n2).map(|i2| values[i1 * n2 + i2]), q, h2))
            .collect(),
        Ordering::VOuter => (0..n2)
            .map(|i2| lp_1d((0..n1).map(|i1| values[i1 * n2 + i2]), q, h1))
            .collect(),
    };
    let h_outer = match ordering {
        Ordering::HOuter => h1,
        Ordering::VOuter => h2,
    };
    Ok(lp_1d(inner.into_iter(), p, h_outer))
}

/// Iterated norm of the pointwise Euclidean magnitude `|f(x)|`.
pub fn mixed_norm(f: &PhysicalField, p: f64, q: f64, ordering: Ordering) -> Result<f64> {
    mixed_norm_scalar(f.grid(), &f.magnitude(), p, q, ordering)
}

/// Outcome of one inequality audit `lhs <= constant * rhs + slack`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub satisfied: bool,
    pub witness: Option<String>,
    pub slack: f64,
}

impl NormReport {
    pub fn new(check: impl Into<String>, lhs: f64, rhs: f64, constant: f64, slack: f64) -> Self {
        let satisfied = lhs <= constant * rhs + slack;
        Self {
            check: check.into(),
            lhs,
            rhs,
            constant,
            satisfied,
            witness: None,
            slack,
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        if !self.satisfied {
            self.witness = Some(witness.into());
        }
        self
    }

    /// `lhs / (constant * rhs)`, the fraction of the bound in use.
    pub fn ratio(&self) -> f64 {
        self.lhs / (self.constant * self.rhs)
    }

    pub const CSV_HEADER: &'static str = "check,lhs,rhs,constant,pass";

    pub fn csv_row(&self) -> String {
        format!("{},{:?},{:?},{:?},{}", self.check, self.lhs, self.rhs, self.constant, self.satisfied)
    }
}

impl fmt::Display for NormReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: lhs={:.6e} rhs={:.6e} C={:.4} {}",
            self.check,
            self.lhs,
            self.rhs,
            self.constant,
            if self.satisfied { "ok" } else { "VIOLATED" }
        )?;
        if let Some(w) = &self.witness {
            write!(f, " [{w}]")?;
        }
        Ok(())
    }
}

/// Both orientations of the torus `L²(L^∞)` embedding, plus the empirical
/// ratio against the whole-line form `2‖f‖‖∂f‖` that omits the mean term.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingAudit {
    /// `‖f‖²_{L²_v(L^∞_h)} ≤ (1/2π)‖f‖² + 2‖f‖‖∂₁f‖`.
    pub horizontal: NormReport,
    /// `‖f‖²_{L²_h(L^∞_v)} ≤ (1/2π)‖f‖² + 2‖f‖‖∂₂f‖`.
    pub vertical: NormReport,
    pub whole_space_ratio: [f64; 2],
}

impl EmbeddingAudit {
    pub fn satisfied(&self) -> bool {
        self.horizontal.satisfied && self.vertical.satisfied
    }
}

/// Audits the sup-in-one-variable embedding for a non-zero field.
pub fn check_anisotropic_embedding(u: &SpectralField) -> Result<EmbeddingAudit> {
    let d = DerivativeNorms::of(u);
    if d.l2_sq == 0.0 {
        return Err(Error::InvalidArgument("embedding ratio undefined for the zero field".into()));
    }
    let f = inverse_unchecked(u);
    let grid = u.grid();
    let mag = f.magnitude();
    let l = d.l2_sq.sqrt();
    let mut reports = Vec::with_capacity(2);
    let mut whole = [0.0; 2];
    for (axis, ordering, dsq) in [(0, Ordering::VOuter, d.d1_sq), (1, Ordering::HOuter, d.d2_sq)] {
        let lhs = mixed_norm_scalar(grid, &mag, 2.0, f64::INFINITY, ordering)?.powi(2);
        let rhs = d.l2_sq / (2.0 * PI) + 2.0 * l * dsq.sqrt();
        let name = if axis == 0 { "embedding_l2v_linfh" } else { "embedding_l2h_linfv" };
        reports.push(NormReport::new(name, lhs, rhs, 1.0, 1e-12 * rhs).with_witness(format!("|u|={l:.6e}")));
        whole[axis] = lhs / (2.0 * l * dsq.sqrt());
    }
    let vertical = reports.pop().expect("two reports");
    let horizontal = reports.pop().expect("two reports");
    Ok(EmbeddingAudit { horizontal, vertical, whole_space_ratio: whole })
}

/// `‖f‖_{L^p_h(L^q_v)} ≤ ‖f‖_{L^q_v(L^p_h)}` for `q ≤ p`.
pub fn check_minkowski(f: &PhysicalField, p: f64, q: f64) -> Result<NormReport> {
    if q > p {
        return Err(Error::InvalidArgument(format!(
            "minkowski ordering needs q <= p, got p={p}, q={q}"
        )));
    }
    let lhs = mixed_norm(f, p, q, Ordering::HOuter)?;
    let rhs = mixed_norm(f, q, p, Ordering::VOuter)?;
    Ok(NormReport::new(format!("minkowski_p{p}_q{q}"), lhs, rhs, 1.0, 1e-12 * rhs))
}
