use num_complex::Complex64;

use super::field::SpectralField;

/// Spatial direction of a derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

/// Removes the gradient part mode by mode: `û - k (k·û)/|k|²`.
pub fn leray_project(u: &SpectralField) -> SpectralField {
    let mut out = u.clone();
    leray_project_in_place(&mut out);
    out
}

pub fn leray_project_in_place(u: &mut SpectralField) {
    let grid = u.grid();
    let (a, b) = u.components_mut();
    for idx in 1..grid.len() {
        let (k1, k2) = grid.wavevector(idx);
        let (k1, k2) = (k1 as f64, k2 as f64);
        let kk = k1 * k1 + k2 * k2;
        let d = (a[idx] * k1 + b[idx] * k2) / kk;
        a[idx] -= d * k1;
        b[idx] -= d * k2;
    }
}

/// `(i k_axis)^order` applied to every mode.
///
/// Odd orders send the Nyquist wavenumber to zero so the result stays the
/// transform of a real field.
pub fn derivative(u: &SpectralField, axis: Axis, order: u32) -> SpectralField {
    let mut out = u.clone();
    derivative_in_place(&mut out, axis, order);
    out
}

pub fn derivative_in_place(u: &mut SpectralField, axis: Axis, order: u32) {
    if order == 0 {
        return;
    }
    let grid = u.grid();
    let (a, b) = u.components_mut();
    for idx in 0..grid.len() {
        let k = if order % 2 == 1 {
            let (d1, d2) = grid.derivative_wavevector(idx);
            match axis {
                Axis::X1 => d1,
                Axis::X2 => d2,
            }
        } else {
            match axis {
                Axis::X1 => grid.k1(idx),
                Axis::X2 => grid.k2(idx),
            }
        };
        let m = ik_pow(k as f64, order);
        a[idx] *= m;
        b[idx] *= m;
    }
}

fn ik_pow(k: f64, order: u32) -> Complex64 {
    let mag = k.powi(order as i32);
    match order % 4 {
        0 => Complex64::new(mag, 0.0),
        1 => Complex64::new(0.0, mag),
        2 => Complex64::new(-mag, 0.0),
        _ => Complex64::new(0.0, -mag),
    }
}

/// Composite derivative, applied as one multiplier so the order of the
/// factors cannot change the result.
pub fn derivatives(u: &SpectralField, factors: &[(Axis, u32)]) -> SpectralField {
    let (mut o1, mut o2) = (0, 0);
    for &(axis, order) in factors {
        match axis {
            Axis::X1 => o1 += order,
            Axis::X2 => o2 += order,
        }
    }
    mixed_derivative(u, o1, o2)
}

/// Mixed derivative `∂₁^a ∂₂^b`.
pub fn mixed_derivative(u: &SpectralField, order1: u32, order2: u32) -> SpectralField {
    let grid = u.grid();
    let mut out = u.clone();
    let (a, b) = out.components_mut();
    for idx in 0..grid.len() {
        let (d1, d2) = grid.derivative_wavevector(idx);
        let (k1, k2) = grid.wavevector(idx);
        let k1 = if order1 % 2 == 1 { d1 } else { k1 };
        let k2 = if order2 % 2 == 1 { d2 } else { k2 };
        // integer product: exact, hence symmetric in the factors
        let mag = k1.pow(order1) * k2.pow(order2);
        let m = ik_pow(1.0, order1 + order2) * mag as f64;
        a[idx] *= m;
        b[idx] *= m;
    }
    out
}

/// Zeroes every mode outside the two-thirds band.
pub fn dealias(u: &SpectralField) -> SpectralField {
    let mut out = u.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(u: &mut SpectralField) {
    let grid = u.grid();
    let (a, b) = u.components_mut();
    for idx in 0..grid.len() {
        let (k1, k2) = grid.wavevector(idx);
        if !grid.in_band(k1, k2) {
            a[idx] = Complex64::new(0.0, 0.0);
            b[idx] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Whether every mode outside the band vanishes.
pub fn is_band_limited(u: &SpectralField) -> bool {
    let grid = u.grid();
    grid.modes().all(|(idx, k1, k2)| {
        grid.in_band(k1, k2) || (u.component(0)[idx].norm() == 0.0 && u.component(1)[idx].norm() == 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::fft::{forward_transform, inverse_transform};
    use crate::spectral::field::PhysicalField;
    use crate::spectral::grid::TorusGrid;

    const ZERO: Complex64 = Complex64::new(0.0, 0.0);
    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn projection_examples() {
        let g = TorusGrid::square(8).unwrap();
        let mut u = SpectralField::zeros(g);
        u.set_real_mode(1, 0, [ONE, ZERO]);
        assert_eq!(leray_project(&u).norm_sq(), 0.0);

        let mut u = SpectralField::zeros(g);
        u.set_real_mode(1, 1, [ONE, ZERO]);
        let p = leray_project(&u);
        assert!((p.mode(1, 1)[0] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((p.mode(1, 1)[1] - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        let pp = leray_project(&p);
        assert!(pp.max_abs_diff(&p) < 1e-15);
    }

    #[test]
    fn derivative_of_sine() {
        let g = TorusGrid::square(16).unwrap();
        let f = PhysicalField::from_fn(g, |x1, _| [0.0, x1.sin()]);
        let d = inverse_transform(&derivative(&forward_transform(&f), Axis::X1, 1)).unwrap();
        for i1 in 0..16 {
            let (x1, _) = g.point(i1, 0);
            assert!((d.sample(i1, 3)[1] - x1.cos()).abs() < 1e-14);
        }
        let dz = derivative(&forward_transform(&f), Axis::X2, 1);
        assert_eq!(dz.max_abs(), 0.0);
    }

    #[test]
    fn mixed_derivatives_commute_bitwise() {
        let g = TorusGrid::square(8).unwrap();
        let f = PhysicalField::from_fn(g, |x1, x2| [(x1 + 2.0 * x2).sin(), (x1 - x2).cos()]);
        let u = forward_transform(&f);
        let a = derivatives(&u, &[(Axis::X1, 1), (Axis::X2, 1)]);
        let b = derivatives(&u, &[(Axis::X2, 1), (Axis::X1, 1)]);
        assert!(a.bitwise_eq(&b));
        let c = derivative(&derivative(&u, Axis::X1, 1), Axis::X2, 1);
        assert!(a.max_abs_diff(&c) < 1e-14);
    }

    #[test]
    fn dealias_examples() {
        let g = TorusGrid::square(8).unwrap();
        let mut u = SpectralField::zeros(g);
        u.set_mode(4, 0, [ONE, ONE]);
        assert_eq!(dealias(&u).max_abs(), 0.0);

        let mut v = SpectralField::zeros(g);
        v.set_real_mode(2, -1, [ONE, Complex64::new(0.0, 1.0)]);
        assert!(dealias(&v).bitwise_eq(&v));
        assert!(dealias(&dealias(&u)).bitwise_eq(&dealias(&u)));
    }
}
