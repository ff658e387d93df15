use serde::{Deserialize, Serialize};

use super::solver::Trajectory;
use crate::error::{Error, Result};
use crate::spectral::field::MEASURE;
use crate::spectral::nonlinear::advect_with;
use crate::spectral::{basis_element, BasisMode, SpectralField};

/// `R(t)` at every recorded time; identically zero for the exact flow.
pub fn energy_certificate(traj: &Trajectory) -> Vec<f64> {
    traj.diagnostics.energy_residual()
}

/// Outcome of the `H^{0,1}` Gronwall audit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct H01Certificate {
    /// Largest measured `c_emp`.
    pub c_emp_max: f64,
    /// `C = sup c_emp² / 2`.
    pub constant: f64,
    /// `e^{-2C∫‖∂₁u‖²} ‖∂₂u(t)‖²`.
    pub weighted: Vec<f64>,
    /// Largest single-step increase of the weighted quantity.
    pub max_increase: f64,
    pub tolerance: f64,
    pub monotone: bool,
    /// `‖∂₂u(t)‖² + ∫‖∂₁∂₂u‖²` against `‖∂₂u₀‖² e^{2C∫‖∂₁u‖²}`, worst ratio.
    pub bound_ratio: f64,
    pub bound_holds: bool,
    /// `∫₀ᵀ‖∂₁∂₂u‖²`.
    pub int_d1d2_sq: f64,
}

impl H01Certificate {
    pub fn passed(&self) -> bool {
        self.monotone && self.bound_holds && self.int_d1d2_sq.is_finite()
    }
}

/// Audits the Gronwall-weighted vertical derivative with slack `rel_tol · W(0)` per step.
pub fn h01_certificate(traj: &Trajectory, rel_tol: f64) -> H01Certificate {
    let d = &traj.diagnostics;
    let constant = d.gronwall_constant();
    let weighted = d.weighted_h01();
    let w0 = weighted.first().copied().unwrap_or(0.0);
    let tolerance = rel_tol * w0;
    let max_increase = weighted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let d20 = d.d2_sq.first().copied().unwrap_or(0.0);
    let mut bound_ratio: f64 = 0.0;
    for i in 0..d.len() {
        let lhs = d.d2_sq[i] + d.int_d1d2_sq[i];
        let rhs = d20 * (2.0 * constant * d.int_d1_sq[i]).exp();
        if rhs > 0.0 {
            bound_ratio = bound_ratio.max(lhs / rhs);
        } else if lhs > 0.0 {
            bound_ratio = f64::INFINITY;
        }
    }
    H01Certificate {
        c_emp_max: d.c_emp.iter().copied().fold(0.0, f64::max),
        constant,
        weighted,
        max_increase,
        tolerance,
        monotone: max_increase <= tolerance,
        bound_ratio,
        // quadrature slack of the same size as the monotonicity audit
        bound_holds: bound_ratio <= 1.0 + rel_tol,
        int_d1d2_sq: d.int_d1d2_sq.last().copied().unwrap_or(0.0),
    }
}

/// Smooth time factor `χ(t)` of a test function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TimeProfile {
    Constant,
    Cosine { omega: f64 },
    Exponential { rate: f64 },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Self::Constant => 1.0,
            Self::Cosine { omega } => (omega * t).cos(),
            Self::Exponential { rate } => (-rate * t).exp(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Self::Constant => 0.0,
            Self::Cosine { omega } => -omega * (omega * t).sin(),
            Self::Exponential { rate } => -rate * (-rate * t).exp(),
        }
    }
}

fn weighted_inner(u: &SpectralField, e: &SpectralField, weight: impl Fn(i64, i64) -> f64) -> f64 {
    let mut acc = 0.0;
    for (idx, k1, k2) in u.grid().modes() {
        let w = weight(k1, k2);
        if w == 0.0 {
            continue;
        }
        for j in 0..2 {
            let a = u.component(j)[idx];
            let b = e.component(j)[idx];
            acc += w * (a.re * b.re + a.im * b.im);
        }
    }
    MEASURE * acc
}

/// Discrete weak-form defect against `φ(t, x) = χ(t) e(x)` over the stored states:
///
/// `∫₀ᵀ {-(u, ∂ₜφ) + (∂₁u, ∂₁φ) + ε²(∂₂u, ∂₂φ) + (u·∇u, φ)} - (u₀, φ(0)) + (u(T), φ(T))`
pub fn weak_form_residual(traj: &Trajectory, mode: BasisMode, profile: TimeProfile) -> Result<f64> {
    if traj.states.is_empty() {
        return Err(Error::InvalidArgument("trajectory holds no states".into()));
    }
    let grid = traj.states[0].grid();
    let e = basis_element(grid, mode)?;
    let e2 = traj.config.eps_v * traj.config.eps_v;
    let integrand: Vec<f64> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, u)| {
            let b = advect_with(u, u, traj.config.dealias);
            let chi = profile.value(t);
            let mut v = -u.inner(&e) * profile.derivative(t);
            v += chi * weighted_inner(u, &e, |k1, _| (k1 * k1) as f64);
            if e2 > 0.0 {
                v += chi * e2 * weighted_inner(u, &e, |_, k2| (k2 * k2) as f64);
            }
            v + chi * b.inner(&e)
        })
        .collect();
    let mut acc = 0.0;
    for i in 1..integrand.len() {
        acc += 0.5 * (traj.times[i] - traj.times[i - 1]) * (integrand[i] + integrand[i - 1]);
    }
    let last = traj.states.len() - 1;
    let t_end = traj.times[last];
    Ok(acc - traj.states[0].inner(&e) * profile.value(0.0) + traj.states[last].inner(&e) * profile.value(t_end))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::det::solver::{run_det, DetConfig};
    use crate::spectral::{Parity, TorusGrid};
    use num_complex::Complex64;

    #[test]
    fn shear_certificates() {
        let g = TorusGrid::square(16).unwrap();
        let mut u = SpectralField::zeros(g);
        u.set_real_mode(0, 2, [Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.0)]);
        let traj = run_det(&u, &DetConfig { t_end: 0.1, ..Default::default() }).unwrap();
        let c = h01_certificate(&traj, 1e-6);
        assert_eq!(c.constant, 0.0);
        assert!(c.passed());
        assert!(c.weighted.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn weak_form_vanishes_for_zero_solution() {
        let g = TorusGrid::square(8).unwrap();
        let cfg = DetConfig { t_end: 0.01, snapshot_every: 1, ..Default::default() };
        let traj = run_det(&SpectralField::zeros(g), &cfg).unwrap();
        let r = weak_form_residual(&traj, BasisMode::new(1, 0, Parity::Sin), TimeProfile::Cosine { omega: 2.0 }).unwrap();
        assert_eq!(r, 0.0);
        assert!(weak_form_residual(&traj, BasisMode::new(0, 0, Parity::Sin), TimeProfile::Constant).is_err());
    }

    #[test]
    fn profiles_differentiate_consistently() {
        for p in [TimeProfile::Constant, TimeProfile::Cosine { omega: 3.0 }, TimeProfile::Exponential { rate: 0.7 }] {
            let h = 1e-6;
            let fd = (p.value(0.4 + h) - p.value(0.4 - h)) / (2.0 * h);
            assert!((fd - p.derivative(0.4)).abs() < 1e-8);
        }
    }
}
