//! Fourier representation of real vector fields on the 2π-periodic torus.

pub mod basis;
pub mod fft;
pub mod field;
pub mod grid;
pub mod nonlinear;
pub mod ops;
pub mod random;

pub use basis::{basis_element, enumerate_basis, BasisMode, GalerkinSpace, Parity};
pub use fft::{forward_transform, inverse_transform};
pub use field::{PhysicalField, SpectralField, MEASURE};
pub use grid::TorusGrid;
pub use nonlinear::{advect, nonlinear_term, nonlinear_term_oracle};
pub use ops::{dealias, derivative, leray_project, Axis};
