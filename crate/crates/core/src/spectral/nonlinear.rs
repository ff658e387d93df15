use num_complex::Complex64;

use super::fft::{forward_pair, inverse_pair};
use super::field::SpectralField;
use super::ops::dealias_in_place;
use crate::error::{Error, Result};

/// Largest `n1 * n2` accepted by the direct-convolution oracle.
pub const ORACLE_LIMIT: usize = 1024;

fn gradient_components(b: &SpectralField, j: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let grid = b.grid();
    let c = b.component(j);
    let mut d1 = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut d2 = vec![Complex64::new(0.0, 0.0); grid.len()];
    for idx in 0..grid.len() {
        let (k1, k2) = grid.derivative_wavevector(idx);
        let v = c[idx];
        // i k v
        d1[idx] = Complex64::new(-v.im, v.re) * k1 as f64;
        d2[idx] = Complex64::new(-v.im, v.re) * k2 as f64;
    }
    (d1, d2)
}

/// Pseudospectral `(a·∇) b`, optionally truncated to the two-thirds band.
pub fn advect_with(a: &SpectralField, b: &SpectralField, dealias: bool) -> SpectralField {
    debug_assert_eq!(a.grid(), b.grid());
    let grid = a.grid();
    let (a1, a2) = inverse_pair(grid, a.component(0), a.component(1));
    let (g11, g12) = gradient_components(b, 0);
    let (d1b1, d2b1) = inverse_pair(grid, &g11, &g12);
    let (g21, g22) = gradient_components(b, 1);
    let (d1b2, d2b2) = inverse_pair(grid, &g21, &g22);
    let n = grid.len();
    let mut p1 = vec![0.0; n];
    let mut p2 = vec![0.0; n];
    for i in 0..n {
        p1[i] = a1[i] * d1b1[i] + a2[i] * d2b1[i];
        p2[i] = a1[i] * d1b2[i] + a2[i] * d2b2[i];
    }
    let (h1, h2) = forward_pair(grid, &p1, &p2);
    let mut out = SpectralField::from_components(grid, h1, h2).expect("lengths match grid");
    if dealias {
        dealias_in_place(&mut out);
    }
    out
}

/// Pseudospectral `(a·∇) b`, dealiased.
pub fn advect(a: &SpectralField, b: &SpectralField) -> SpectralField {
    advect_with(a, b, true)
}

/// `B(u) = u·∇u`, dealiased.
pub fn nonlinear_term(u: &SpectralField) -> SpectralField {
    advect_with(u, u, true)
}

/// Direct convolution `Σ_{p+q=k} (â(p)·i q) b̂(q)` over all grid modes, truncated to the band.
pub fn advect_oracle(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    let grid = a.grid();
    a.check_grid(b)?;
    if grid.len() > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge {
            n1: grid.n1(),
            n2: grid.n2(),
            limit: ORACLE_LIMIT,
        });
    }
    let mut out = SpectralField::zeros(grid);
    let (o1, o2) = out.components_mut();
    for p in 0..grid.len() {
        let (p1, p2) = grid.wavevector(p);
        let ap = [a.component(0)[p], a.component(1)[p]];
        if ap[0].norm() == 0.0 && ap[1].norm() == 0.0 {
            continue;
        }
        for q in 0..grid.len() {
            let (q1, q2) = grid.wavevector(q);
            let (k1, k2) = (p1 + q1, p2 + q2);
            if !grid.represents(k1, k2) || !grid.in_band(k1, k2) {
                continue;
            }
            let (dq1, dq2) = grid.derivative_wavevector(q);
            let s = ap[0] * dq1 as f64 + ap[1] * dq2 as f64;
            let s = Complex64::new(-s.im, s.re);
            let k = grid.index_of(k1, k2);
            o1[k] += s * b.component(0)[q];
            o2[k] += s * b.component(1)[q];
        }
    }
    Ok(out)
}

/// Direct-convolution `u·∇u` on small grids.
pub fn nonlinear_term_oracle(u: &SpectralField) -> Result<SpectralField> {
    advect_oracle(u, u)
}
