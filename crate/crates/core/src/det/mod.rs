//! Deterministic integration, certificates and the uniqueness experiment.

pub mod certificates;
pub mod solver;
pub mod uniqueness;

pub use certificates::{energy_certificate, h01_certificate, weak_form_residual, H01Certificate, TimeProfile};
pub use solver::{
    eps_convergence, eps_distance, mollify, run_det, step_det, DetConfig, DetStepper, DiagnosticsSeries,
    Integrator, Trajectory,
};
pub use uniqueness::{uniqueness_experiment, UniquenessReport};
