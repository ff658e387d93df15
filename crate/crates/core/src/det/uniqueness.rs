use serde::Serialize;

use super::solver::{blown_up, check_initial, safe_ratio, DetConfig, DetStepper};
use crate::error::{Error, Result};
use crate::norms::DerivativeNorms;
use crate::spectral::nonlinear::advect;
use crate::spectral::SpectralField;

/// Gronwall audit for the difference of two deterministic solutions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub t: Vec<f64>,
    /// `‖w(t)‖²` with `w = u - v`.
    pub w_sq: Vec<f64>,
    /// `|(w·∇v, w)| / (‖w‖^{3/2} ‖∂₁w‖^{1/2} (A + B))`.
    pub c_emp: Vec<f64>,
    /// `C₀ = ¾ sup c_emp^{4/3}`.
    pub c0: f64,
    /// `E(t) = 2C₀ ∫ (‖∂₁v‖^{2/3} + ‖∂₂v‖^{2/3}) ‖∂₁∂₂v‖^{2/3}`.
    pub exponent: Vec<f64>,
    /// `max_t ‖w(t)‖² / (‖w₀‖² e^{E(t)})`.
    pub worst_ratio: f64,
    pub tolerance: f64,
    pub holds: bool,
    /// Whether `w` vanished bitwise at every step.
    pub identical: bool,
}

/// Evolves `u0` and `v0` side by side and checks `‖w(t)‖² ≤ ‖w₀‖² e^{E(t)} (1 + tol)`.
pub fn uniqueness_experiment(u0: &SpectralField, v0: &SpectralField, cfg: &DetConfig, tol: f64) -> Result<UniquenessReport> {
    u0.check_grid(v0)?;
    check_initial(u0)?;
    check_initial(v0)?;
    let stepper = DetStepper::new(u0.grid(), *cfg)?;
    let mut u = u0.clone();
    let mut v = v0.clone();
    let norm0 = u.norm().max(v.norm());
    let mut t = Vec::new();
    let mut w_sq = Vec::new();
    let mut c_emp = Vec::new();
    let mut rate = Vec::new();
    let mut identical = true;
    let nsteps = cfg.steps();
    for step in 0..=nsteps {
        let w = &u - &v;
        identical &= w.max_abs() == 0.0;
        let dw = DerivativeNorms::of(&w);
        let dv = DerivativeNorms::of(&v);
        let a = (dv.d1_sq.sqrt() * dv.d1d2_sq.sqrt()).sqrt();
        let b = (dv.d2_sq.sqrt() * dv.d1d2_sq.sqrt()).sqrt();
        let num = advect(&w, &v).inner(&w);
        let den = dw.l2_sq.powf(0.75) * dw.d1_sq.powf(0.25) * (a + b);
        t.push(step as f64 * cfg.dt);
        w_sq.push(dw.l2_sq);
        c_emp.push(safe_ratio(num, den));
        rate.push(a.powf(4.0 / 3.0) + b.powf(4.0 / 3.0));
        if step == nsteps {
            break;
        }
        let nu = stepper.drift(&u);
        let nv = stepper.drift(&v);
        u = stepper.step(&u, &nu);
        v = stepper.step(&v, &nv);
        if blown_up(&u, norm0) || blown_up(&v, norm0) {
            let time = (step + 1) as f64 * cfg.dt;
            return Err(Error::BlowUp { time, step: step + 1, last_finite_time: time - cfg.dt });
        }
    }
    let c0 = 0.75 * c_emp.iter().fold(0.0f64, |m, c| m.max(c.powf(4.0 / 3.0)));
    let mut exponent = vec![0.0];
    for i in 1..t.len() {
        let prev = exponent[i - 1];
        exponent.push(prev + 2.0 * c0 * 0.5 * (t[i] - t[i - 1]) * (rate[i] + rate[i - 1]));
    }
    let w0 = w_sq[0];
    let mut worst: f64 = 0.0;
    for i in 0..t.len() {
        let bound = w0 * exponent[i].exp();
        worst = worst.max(if bound > 0.0 {
            w_sq[i] / bound
        } else if w_sq[i] > 0.0 {
            f64::INFINITY
        } else {
            0.0
        });
    }
    Ok(UniquenessReport {
        t,
        w_sq,
        c_emp,
        c0,
        exponent,
        worst_ratio: worst,
        tolerance: tol,
        holds: worst <= 1.0 + tol,
        identical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random::random_band_limited;
    use crate::spectral::TorusGrid;

    #[test]
    fn identical_data_gives_identical_runs() {
        let g = TorusGrid::square(16).unwrap();
        let u = random_band_limited(g, 2, 3, 1.0, 3.0);
        let cfg = DetConfig { t_end: 0.05, ..Default::default() };
        let r = uniqueness_experiment(&u, &u, &cfg, 1e-3).unwrap();
        assert!(r.identical);
        assert!(r.holds);
    }

    #[test]
    fn zero_second_solution_reduces_to_energy_decay() {
        let g = TorusGrid::square(16).unwrap();
        let u = random_band_limited(g, 5, 3, 1.0, 3.0);
        let cfg = DetConfig { t_end: 0.05, ..Default::default() };
        let r = uniqueness_experiment(&u, &SpectralField::zeros(g), &cfg, 1e-3).unwrap();
        assert_eq!(r.c0, 0.0);
        assert!(r.holds);
        assert!(r.w_sq.windows(2).all(|w| w[1] <= w[0]));
    }
}
