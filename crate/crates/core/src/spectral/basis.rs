//! Real divergence-free Fourier basis and the Galerkin projection onto its
//! leading elements.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{SpectralField, MEASURE};
use super::grid::TorusGrid;
use crate::error::{Error, Result};
use crate::norms::h01_inner;

/// Normalization `1/(√2 π)` giving unit `L²` norm.
pub const BASIS_SCALE: f64 = 1.0 / (std::f64::consts::SQRT_2 * PI);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Cos,
    Sin,
}

/// One real basis element: `(k^⊥/|k|) cos(k·x)` or `(k^⊥/|k|) sin(k·x)`, normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisMode {
    pub k1: i64,
    pub k2: i64,
    pub parity: Parity,
}

impl BasisMode {
    pub fn new(k1: i64, k2: i64, parity: Parity) -> Self {
        Self { k1, k2, parity }
    }

    /// Unit vector `k^⊥/|k|` with `k^⊥ = (-k₂, k₁)`.
    pub fn direction(&self) -> [f64; 2] {
        let r = ((self.k1 * self.k1 + self.k2 * self.k2) as f64).sqrt();
        [-(self.k2 as f64) / r, self.k1 as f64 / r]
    }

    pub fn wavenumber_sq(&self) -> i64 {
        self.k1 * self.k1 + self.k2 * self.k2
    }

    /// Coefficient of the element at `+k`; the one at `-k` is its conjugate.
    pub fn coefficient(&self) -> Complex64 {
        match self.parity {
            Parity::Cos => Complex64::new(0.5 * BASIS_SCALE, 0.0),
            Parity::Sin => Complex64::new(0.0, -0.5 * BASIS_SCALE),
        }
    }
}

/// Validates `k` for use as a basis wavevector on `grid`.
fn check_mode(grid: TorusGrid, k1: i64, k2: i64) -> Result<()> {
    if k1 == 0 && k2 == 0 {
        return Err(Error::InvalidMode { k1, k2, reason: "the mean mode carries no basis element" });
    }
    if !grid.represents(k1, k2) || 2 * k1.abs() == grid.n1() as i64 || 2 * k2.abs() == grid.n2() as i64 {
        return Err(Error::InvalidMode { k1, k2, reason: "not resolved by the grid" });
    }
    Ok(())
}

/// The normalized real basis field for `mode`.
pub fn basis_element(grid: TorusGrid, mode: BasisMode) -> Result<SpectralField> {
    check_mode(grid, mode.k1, mode.k2)?;
    let d = mode.direction();
    let c = mode.coefficient();
    let mut u = SpectralField::zeros(grid);
    u.set_real_mode(mode.k1, mode.k2, [c * d[0], c * d[1]]);
    Ok(u)
}

/// Every basis element whose wavevector lies in the two-thirds band, ordered
/// by `|k|²`, then `(k₁, k₂)`, cosine before sine.
///
/// Only half-plane representatives `k₁ > 0` or `k₁ = 0, k₂ > 0` appear, since
/// `k` and `-k` give the same real fields.
pub fn enumerate_basis(grid: TorusGrid) -> Vec<BasisMode> {
    let (b1, b2) = (grid.band1(), grid.band2());
    let mut ks = Vec::new();
    for k1 in 0..=b1 {
        for k2 in -b2..=b2 {
            if k1 > 0 || k2 > 0 {
                ks.push((k1, k2));
            }
        }
    }
    ks.sort_by_key(|&(k1, k2)| (k1 * k1 + k2 * k2, k1, k2));
    ks.into_iter()
        .flat_map(|(k1, k2)| [BasisMode::new(k1, k2, Parity::Cos), BasisMode::new(k1, k2, Parity::Sin)])
        .collect()
}

#[derive(Clone, Debug)]
struct Entry {
    mode: BasisMode,
    idx: usize,
    conj: usize,
    dir: [f64; 2],
}

/// The span `ℋ_n` of the first `n` basis elements on a grid.
#[derive(Clone, Debug)]
pub struct GalerkinSpace {
    grid: TorusGrid,
    entries: Vec<Entry>,
}

impl GalerkinSpace {
    pub fn new(grid: TorusGrid, level: usize) -> Result<Self> {
        let all = enumerate_basis(grid);
        if level > all.len() {
            return Err(Error::LevelTooLarge { level, available: all.len() });
        }
        let entries = all
            .into_iter()
            .take(level)
            .map(|mode| {
                let idx = grid.index_of(mode.k1, mode.k2);
                Entry { mode, idx, conj: grid.conjugate_index(idx), dir: mode.direction() }
            })
            .collect();
        Ok(Self { grid, entries })
    }

    /// The whole band: `P_n` is then the identity on dealiased solenoidal fields.
    pub fn full(grid: TorusGrid) -> Self {
        let n = Self::available(grid);
        Self::new(grid, n).expect("level within range")
    }

    pub fn available(grid: TorusGrid) -> usize {
        enumerate_basis(grid).len()
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn level(&self) -> usize {
        self.entries.len()
    }

    pub fn modes(&self) -> impl Iterator<Item = BasisMode> + '_ {
        self.entries.iter().map(|e| e.mode)
    }

    /// `(u, e_i)` for every element, via the mode coefficients.
    pub fn coefficients(&self, u: &SpectralField) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| {
                let a = u.component(0)[e.idx] * e.dir[0] + u.component(1)[e.idx] * e.dir[1];
                match e.mode.parity {
                    Parity::Cos => MEASURE * BASIS_SCALE * a.re,
                    Parity::Sin => -MEASURE * BASIS_SCALE * a.im,
                }
            })
            .collect()
    }

    /// `Σ a_i e_i`.
    pub fn synthesize(&self, coeffs: &[f64]) -> SpectralField {
        let mut out = SpectralField::zeros(self.grid);
        self.synthesize_into(coeffs, &mut out);
        out
    }

    fn synthesize_into(&self, coeffs: &[f64], out: &mut SpectralField) {
        let zero = Complex64::new(0.0, 0.0);
        let (o1, o2) = out.components_mut();
        o1.iter_mut().for_each(|x| *x = zero);
        o2.iter_mut().for_each(|x| *x = zero);
        for (e, &a) in self.entries.iter().zip(coeffs) {
            let c = e.mode.coefficient() * a;
            o1[e.idx] += c * e.dir[0];
            o2[e.idx] += c * e.dir[1];
            o1[e.conj] += c.conj() * e.dir[0];
            o2[e.conj] += c.conj() * e.dir[1];
        }
    }

    /// Orthogonal projection in `L²`.
    pub fn project(&self, u: &SpectralField) -> SpectralField {
        self.synthesize(&self.coefficients(u))
    }

    pub fn project_in_place(&self, u: &mut SpectralField) {
        let c = self.coefficients(u);
        self.synthesize_into(&c, u);
    }

    /// Orthogonal projection in `H^{0,1}`, computed from explicit basis fields
    /// and the `H^{0,1}` inner product.
    pub fn project_h01(&self, u: &SpectralField) -> SpectralField {
        let mut out = SpectralField::zeros(self.grid);
        for e in &self.entries {
            let b = basis_element(self.grid, e.mode).expect("enumerated modes are valid");
            let num = h01_inner(u, &b).expect("same grid");
            let den = h01_inner(&b, &b).expect("same grid");
            out.add_scaled(num / den, &b);
        }
        out
    }

    /// Largest coefficient of `u` outside the span.
    pub fn residual_outside(&self, u: &SpectralField) -> f64 {
        (u - &self.project(u)).max_abs()
    }
}
