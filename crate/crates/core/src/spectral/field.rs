use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// `(2π)²`, the measure of the torus. Parseval reads `‖u‖² = (2π)² Σ|û_k|²`.
pub const MEASURE: f64 = 4.0 * PI * PI;

/// Two-component velocity field stored as Fourier coefficients.
///
/// Coefficients are normalized so that `e^{ik·x}` has coefficient 1 at `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    comps: [Vec<Complex64>; 2],
}

/// Two-component field sampled on the collocation grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    grid: TorusGrid,
    comps: [Vec<f64>; 2],
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            comps: [vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]],
        }
    }

    pub fn from_components(grid: TorusGrid, c1: Vec<Complex64>, c2: Vec<Complex64>) -> Result<Self> {
        if c1.len() != grid.len() || c2.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "component lengths {} and {} do not match grid {grid}",
                c1.len(),
                c2.len()
            )));
        }
        Ok(Self { grid, comps: [c1, c2] })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn component(&self, j: usize) -> &[Complex64] {
        &self.comps[j]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.comps[j]
    }

    pub fn components_mut(&mut self) -> (&mut [Complex64], &mut [Complex64]) {
        let [a, b] = &mut self.comps;
        (a, b)
    }

    /// Coefficient pair at wavevector `k` (aliased onto the grid).
    pub fn mode(&self, k1: i64, k2: i64) -> [Complex64; 2] {
        let idx = self.grid.index_of(k1, k2);
        [self.comps[0][idx], self.comps[1][idx]]
    }

    pub fn set_mode(&mut self, k1: i64, k2: i64, value: [Complex64; 2]) {
        let idx = self.grid.index_of(k1, k2);
        self.comps[0][idx] = value[0];
        self.comps[1][idx] = value[1];
    }

    /// Sets `û_k = value` and `û_{-k} = conj(value)`.
    pub fn set_real_mode(&mut self, k1: i64, k2: i64, value: [Complex64; 2]) {
        self.set_mode(k1, k2, value);
        self.set_mode(-k1, -k2, [value[0].conj(), value[1].conj()]);
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                left: self.grid.to_string(),
                right: other.grid.to_string(),
            });
        }
        Ok(())
    }

    /// `self += a * other`.
    pub fn add_scaled(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.grid, other.grid);
        for j in 0..2 {
            for (x, y) in self.comps[j].iter_mut().zip(&other.comps[j]) {
                *x += y * a;
            }
        }
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.comps {
            c.iter_mut().for_each(|x| *x *= a);
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// Multiplies every mode by a real per-mode factor (shared by both components).
    pub fn apply_multiplier(&mut self, factor: &[f64]) {
        debug_assert_eq!(factor.len(), self.grid.len());
        for c in &mut self.comps {
            for (x, f) in c.iter_mut().zip(factor) {
                *x *= f;
            }
        }
    }

    /// `L²(𝕋²)` inner product `(u, v) = (2π)² Re Σ û_k · conj(v̂_k)`.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        let mut acc = 0.0;
        for j in 0..2 {
            for (a, b) in self.comps[j].iter().zip(&other.comps[j]) {
                acc += a.re * b.re + a.im * b.im;
            }
        }
        MEASURE * acc
    }

    /// `‖u‖²_{L²(𝕋²)}`.
    pub fn norm_sq(&self) -> f64 {
        let mut acc = 0.0;
        for c in &self.comps {
            acc += c.iter().map(|x| x.norm_sqr()).sum::<f64>();
        }
        MEASURE * acc
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Largest coefficient modulus over both components.
    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, x| m.max(x.norm()))
    }

    /// `max_k |k·û_k|`, the discrete divergence defect.
    pub fn max_divergence(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (idx, k1, k2) in self.grid.modes() {
            let d = self.comps[0][idx] * k1 as f64 + self.comps[1][idx] * k2 as f64;
            m = m.max(d.norm());
        }
        m
    }

    /// Whether `max_k |k·û_k| <= rel * max_k |û_k|`.
    pub fn is_solenoidal(&self, rel: f64) -> bool {
        self.max_divergence() <= rel * self.max_abs()
    }

    /// Largest `|û_k - conj(û_{-k})|` with the mode where it occurs.
    pub fn hermitian_defect(&self) -> (f64, i64, i64) {
        let mut worst = (0.0, 0, 0);
        for (idx, k1, k2) in self.grid.modes() {
            let c = self.grid.conjugate_index(idx);
            for comp in &self.comps {
                let d = (comp[idx] - comp[c].conj()).norm();
                if d > worst.0 {
                    worst = (d, k1, k2);
                }
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|x| x.re.is_finite() && x.im.is_finite()))
    }

    /// Mean mode `û_0`.
    pub fn mean(&self) -> [Complex64; 2] {
        [self.comps[0][0], self.comps[1][0]]
    }

    pub fn clear_mean(&mut self) {
        self.comps[0][0] = Complex64::new(0.0, 0.0);
        self.comps[1][0] = Complex64::new(0.0, 0.0);
    }

    /// Largest coefficient difference, for bitwise or tolerance comparisons.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        let mut m: f64 = 0.0;
        for j in 0..2 {
            for (a, b) in self.comps[j].iter().zip(&other.comps[j]) {
                m = m.max((a - b).norm());
            }
        }
        m
    }

    /// Exact equality of every coefficient bit pattern.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.grid == other.grid
            && self.comps.iter().zip(&other.comps).all(|(a, b)| {
                a.iter().zip(b).all(|(x, y)| {
                    x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()
                })
            })
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;

    fn add(self, rhs: Self) -> SpectralField {
        let mut out = self.clone();
        out.add_scaled(1.0, rhs);
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: Self) -> SpectralField {
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;

    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;

    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}

impl PhysicalField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            comps: [vec![0.0; grid.len()], vec![0.0; grid.len()]],
        }
    }

    pub fn from_components(grid: TorusGrid, c1: Vec<f64>, c2: Vec<f64>) -> Result<Self> {
        if c1.len() != grid.len() || c2.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "sample counts {} and {} do not match grid {grid}",
                c1.len(),
                c2.len()
            )));
        }
        Ok(Self { grid, comps: [c1, c2] })
    }

    /// Samples `f(x1, x2)` on the grid.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let mut out = Self::zeros(grid);
        for i1 in 0..grid.n1() {
            for i2 in 0..grid.n2() {
                let (x1, x2) = grid.point(i1, i2);
                let v = f(x1, x2);
                let idx = grid.index(i1, i2);
                out.comps[0][idx] = v[0];
                out.comps[1][idx] = v[1];
            }
        }
        out
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn component(&self, j: usize) -> &[f64] {
        &self.comps[j]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.comps[j]
    }

    pub fn into_components(self) -> (Vec<f64>, Vec<f64>) {
        let [a, b] = self.comps;
        (a, b)
    }

    pub fn sample(&self, i1: usize, i2: usize) -> [f64; 2] {
        let idx = self.grid.index(i1, i2);
        [self.comps[0][idx], self.comps[1][idx]]
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|x| x.is_finite()))
    }

    /// Grid quadrature of `∫|f|²` over the torus.
    pub fn quadrature_norm_sq(&self) -> f64 {
        let (h1, h2) = self.grid.spacing();
        let s: f64 = self.comps.iter().flat_map(|c| c.iter()).map(|x| x * x).sum();
        s * h1 * h2
    }

    /// Pointwise Euclidean magnitude `|f(x)|`.
    pub fn magnitude(&self) -> Vec<f64> {
        self.comps[0]
            .iter()
            .zip(&self.comps[1])
            .map(|(a, b)| a.hypot(*b))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_mode_sets_conjugate_partner() {
        let g = TorusGrid::square(8).unwrap();
        let mut u = SpectralField::zeros(g);
        u.set_real_mode(1, 2, [Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)]);
        assert_eq!(u.mode(-1, -2)[0], Complex64::new(1.0, -2.0));
        assert_eq!(u.hermitian_defect().0, 0.0);
    }

    #[test]
    fn divergence_of_gradient_mode() {
        let g = TorusGrid::square(8).unwrap();
        let mut u = SpectralField::zeros(g);
        u.set_real_mode(1, 0, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!(!u.is_solenoidal(1e-12));
        let mut v = SpectralField::zeros(g);
        v.set_real_mode(1, 0, [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(v.is_solenoidal(1e-12));
    }

    #[test]
    fn norm_uses_torus_measure() {
        // (sin x2, 0) has coefficients ∓i/2 at k = (0, ±1)
        let g = TorusGrid::square(8).unwrap();
        let mut u = SpectralField::zeros(g);
        u.set_real_mode(0, 1, [Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.0)]);
        assert!((u.norm_sq() - 2.0 * PI * PI).abs() < 1e-12);
    }
}
