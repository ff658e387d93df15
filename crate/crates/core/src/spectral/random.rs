//! Reproducible random divergence-free test fields.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::field::SpectralField;
use super::grid::TorusGrid;

/// Random smooth solenoidal field over the whole two-thirds band, rescaled to
/// `‖u‖ = norm`.
pub fn random_solenoidal(grid: TorusGrid, seed: u64, norm: f64) -> SpectralField {
    random_band_limited(grid, seed, grid.band1().max(grid.band2()), 1.0, norm)
}

/// Random solenoidal field supported on `|k_i| <= kmax` (and the band), with
/// stream-function amplitudes `e^{-decay |k|²/8}/(1+|k|²)`.
///
/// `decay = 0` gives the algebraic spectrum only.
pub fn random_band_limited(grid: TorusGrid, seed: u64, kmax: i64, decay: f64, norm: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = SpectralField::zeros(grid);
    for (_, k1, k2) in grid.modes() {
        // one representative per conjugate pair
        if !(k1 > 0 || (k1 == 0 && k2 > 0)) {
            continue;
        }
        if k1.abs() > kmax || k2.abs() > kmax || !grid.in_band(k1, k2) {
            continue;
        }
        let kk = (k1 * k1 + k2 * k2) as f64;
        let amp = (-decay * kk / 8.0).exp() / (1.0 + kk);
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let psi = Complex64::new(re, im) * amp;
        // u = (-∂₂ψ, ∂₁ψ)
        let ik2 = Complex64::new(0.0, k2 as f64);
        let ik1 = Complex64::new(0.0, k1 as f64);
        u.set_real_mode(k1, k2, [-ik2 * psi, ik1 * psi]);
    }
    let n = u.norm();
    if n > 0.0 {
        u.scale(norm / n);
    }
    u
}
