use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{PhysicalField, SpectralField};
use super::grid::TorusGrid;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative tolerance on `|û_k - conj(û_{-k})|` accepted by [`inverse_transform`].
pub const SYMMETRY_TOL: f64 = 1e-10;

struct Plans {
    fwd1: Arc<dyn Fft<f64>>,
    fwd2: Arc<dyn Fft<f64>>,
    inv1: Arc<dyn Fft<f64>>,
    inv2: Arc<dyn Fft<f64>>,
}

thread_local! {
    static PLANNER: RefCell<(FftPlanner<f64>, HashMap<TorusGrid, Arc<Plans>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plans(grid: TorusGrid) -> Arc<Plans> {
    PLANNER.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        cache
            .entry(grid)
            .or_insert_with(|| {
                Arc::new(Plans {
                    fwd1: planner.plan_fft_forward(grid.n1()),
                    fwd2: planner.plan_fft_forward(grid.n2()),
                    inv1: planner.plan_fft_inverse(grid.n1()),
                    inv2: planner.plan_fft_inverse(grid.n2()),
                })
            })
            .clone()
    })
}

/// In-place unnormalized 2-D transform of row-major data (x₁ slow).
fn fft2(grid: TorusGrid, data: &mut [Complex64], inverse: bool) {
    let p = plans(grid);
    let (n1, n2) = (grid.n1(), grid.n2());
    let (f1, f2) = if inverse { (&p.inv1, &p.inv2) } else { (&p.fwd1, &p.fwd2) };
    // rows: contiguous along x₂
    f2.process(data);
    // columns: gather along x₁
    let mut col = vec![ZERO; n1];
    for i2 in 0..n2 {
        for i1 in 0..n1 {
            col[i1] = data[i1 * n2 + i2];
        }
        f1.process(&mut col);
        for i1 in 0..n1 {
            data[i1 * n2 + i2] = col[i1];
        }
    }
}

/// Forward transform of two real scalar arrays at once.
///
/// Packs `z = a + i b`, transforms once, and splits with the conjugate
/// symmetry of real inputs.
pub fn forward_pair(grid: TorusGrid, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = grid.len();
    let mut z: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
    fft2(grid, &mut z, false);
    let scale = 1.0 / n as f64;
    let mut ha = vec![ZERO; n];
    let mut hb = vec![ZERO; n];
    for idx in 0..n {
        let zk = z[idx];
        let zc = z[grid.conjugate_index(idx)].conj();
        ha[idx] = (zk + zc) * (0.5 * scale);
        // (zk - zc) / (2i)
        let d = zk - zc;
        hb[idx] = Complex64::new(d.im, -d.re) * (0.5 * scale);
    }
    (ha, hb)
}

/// Inverse transform of two Hermitian coefficient arrays at once.
pub fn inverse_pair(grid: TorusGrid, ha: &[Complex64], hb: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let mut z: Vec<Complex64> = ha
        .iter()
        .zip(hb)
        .map(|(x, y)| x + Complex64::new(-y.im, y.re))
        .collect();
    fft2(grid, &mut z, true);
    (z.iter().map(|c| c.re).collect(), z.iter().map(|c| c.im).collect())
}

/// Forward transform of a single real scalar array.
pub fn forward_scalar(grid: TorusGrid, a: &[f64]) -> Vec<Complex64> {
    let n = grid.len();
    let mut z: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft2(grid, &mut z, false);
    let scale = 1.0 / n as f64;
    z.iter_mut().for_each(|c| *c *= scale);
    // enforce exact symmetry so that round-off cannot leak imaginary parts
    let mut out = vec![ZERO; n];
    for idx in 0..n {
        let c = grid.conjugate_index(idx);
        out[idx] = (z[idx] + z[c].conj()) * 0.5;
    }
    out
}

/// Inverse transform of a single Hermitian scalar array.
pub fn inverse_scalar(grid: TorusGrid, ha: &[Complex64]) -> Vec<f64> {
    let mut z = ha.to_vec();
    fft2(grid, &mut z, true);
    z.iter().map(|c| c.re).collect()
}

/// Physical samples to Fourier coefficients.
pub fn forward_transform(f: &PhysicalField) -> SpectralField {
    let grid = f.grid();
    let (a, b) = forward_pair(grid, f.component(0), f.component(1));
    SpectralField::from_components(grid, a, b).expect("lengths match grid")
}

/// Fourier coefficients to physical samples, rejecting non-Hermitian input.
pub fn inverse_transform(u: &SpectralField) -> Result<PhysicalField> {
    let (defect, k1, k2) = u.hermitian_defect();
    if defect > SYMMETRY_TOL * u.max_abs().max(1.0) {
        return Err(Error::SymmetryViolation { defect, k1, k2 });
    }
    Ok(inverse_unchecked(u))
}

/// Inverse transform without the symmetry audit, for hot loops whose inputs
/// are symmetric by construction.
pub fn inverse_unchecked(u: &SpectralField) -> PhysicalField {
    let grid = u.grid();
    let (a, b) = inverse_pair(grid, u.component(0), u.component(1));
    PhysicalField::from_components(grid, a, b).expect("lengths match grid")
}
