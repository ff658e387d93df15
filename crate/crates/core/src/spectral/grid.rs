use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Collocation grid on the torus `[0, 2π)²`.
///
/// Storage of every field on the grid is row-major with the x₁ index slow and
/// the x₂ index fast. Spectral index `i` along an axis with `n` points carries
/// the wavenumber `i` for `i <= n/2` and `i - n` otherwise, so the
/// representable wavenumbers are `-n/2+1 ..= n/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusGrid {
    n1: usize,
    n2: usize,
}

impl TorusGrid {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 < 4 || n2 < 4 || n1 % 2 != 0 || n2 % 2 != 0 {
            return Err(Error::InvalidGrid { n1, n2 });
        }
        Ok(Self { n1, n2 })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Number of grid points (and of Fourier modes) per component.
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> (f64, f64) {
        (2.0 * PI / self.n1 as f64, 2.0 * PI / self.n2 as f64)
    }

    /// Physical coordinates of grid point `(i1, i2)`.
    pub fn point(&self, i1: usize, i2: usize) -> (f64, f64) {
        let (h1, h2) = self.spacing();
        (i1 as f64 * h1, i2 as f64 * h2)
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 * self.n2 + i2
    }

    #[inline]
    pub fn k1(&self, idx: usize) -> i64 {
        wavenumber(idx / self.n2, self.n1)
    }

    #[inline]
    pub fn k2(&self, idx: usize) -> i64 {
        wavenumber(idx % self.n2, self.n2)
    }

    #[inline]
    pub fn wavevector(&self, idx: usize) -> (i64, i64) {
        (self.k1(idx), self.k2(idx))
    }

    /// Wavenumbers used by odd-order derivatives: the Nyquist wavenumber has
    /// no conjugate partner on the grid, so it is mapped to zero.
    #[inline]
    pub fn derivative_wavevector(&self, idx: usize) -> (i64, i64) {
        let (k1, k2) = self.wavevector(idx);
        let d1 = if 2 * k1 == self.n1 as i64 { 0 } else { k1 };
        let d2 = if 2 * k2 == self.n2 as i64 { 0 } else { k2 };
        (d1, d2)
    }

    /// Storage index of the wavevector `(k1, k2)`, aliased onto the grid.
    pub fn index_of(&self, k1: i64, k2: i64) -> usize {
        let i1 = k1.rem_euclid(self.n1 as i64) as usize;
        let i2 = k2.rem_euclid(self.n2 as i64) as usize;
        self.index(i1, i2)
    }

    /// Whether `(k1, k2)` is one of the grid's wavevectors without aliasing.
    pub fn represents(&self, k1: i64, k2: i64) -> bool {
        let h1 = (self.n1 / 2) as i64;
        let h2 = (self.n2 / 2) as i64;
        k1 > -h1 && k1 <= h1 && k2 > -h2 && k2 <= h2
    }

    /// Storage index of `-k`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let i1 = idx / self.n2;
        let i2 = idx % self.n2;
        let j1 = (self.n1 - i1) % self.n1;
        let j2 = (self.n2 - i2) % self.n2;
        self.index(j1, j2)
    }

    /// Largest retained wavenumber magnitude along x₁ under the 2/3 rule.
    pub fn band1(&self) -> i64 {
        ((self.n1 - 1) / 3) as i64
    }

    /// Largest retained wavenumber magnitude along x₂ under the 2/3 rule.
    pub fn band2(&self) -> i64 {
        ((self.n2 - 1) / 3) as i64
    }

    /// Whether `(k1, k2)` survives the 2/3-rule truncation.
    #[inline]
    pub fn in_band(&self, k1: i64, k2: i64) -> bool {
        3 * k1.unsigned_abs() < self.n1 as u64 && 3 * k2.unsigned_abs() < self.n2 as u64
    }

    /// Iterator over `(storage index, k1, k2)` for every mode.
    pub fn modes(&self) -> impl Iterator<Item = (usize, i64, i64)> {
        let g = *self;
        (0..g.len()).map(move |idx| {
            let (k1, k2) = g.wavevector(idx);
            (idx, k1, k2)
        })
    }
}

impl fmt::Display for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n1, self.n2)
    }
}

#[inline]
fn wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small_grids() {
        assert!(TorusGrid::new(3, 8).is_err());
        assert!(TorusGrid::new(8, 7).is_err());
        assert!(TorusGrid::new(2, 2).is_err());
        assert!(TorusGrid::new(4, 6).is_ok());
    }

    #[test]
    fn wavenumbers_cover_the_stated_range() {
        let g = TorusGrid::new(8, 6).unwrap();
        let mut k1s: Vec<i64> = (0..8).map(|i| g.k1(g.index(i, 0))).collect();
        k1s.sort();
        assert_eq!(k1s, vec![-3, -2, -1, 0, 1, 2, 3, 4]);
        let mut k2s: Vec<i64> = (0..6).map(|i| g.k2(g.index(0, i))).collect();
        k2s.sort();
        assert_eq!(k2s, vec![-2, -1, 0, 1, 2, 3]);
    }

    #[test]
    fn conjugate_index_negates_wavevector() {
        let g = TorusGrid::new(8, 8).unwrap();
        for (idx, k1, k2) in g.modes() {
            let c = g.conjugate_index(idx);
            let (c1, c2) = g.wavevector(c);
            assert_eq!((c1 + k1).rem_euclid(8), 0);
            assert_eq!((c2 + k2).rem_euclid(8), 0);
            assert_eq!(g.index_of(k1, k2), idx);
        }
    }

    #[test]
    fn band_follows_two_thirds_rule() {
        let g = TorusGrid::new(8, 32).unwrap();
        assert_eq!(g.band1(), 2);
        assert_eq!(g.band2(), 10);
        assert!(g.in_band(2, -10));
        assert!(!g.in_band(3, 0));
        // multiples of three keep the quadratic products alias-free
        let g = TorusGrid::new(12, 6).unwrap();
        assert_eq!(g.band1(), 3);
        assert_eq!(g.band2(), 1);
    }
}
