pub mod cli;
pub mod det;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod noise;
pub mod norms;
pub mod rng;
pub mod sde;
pub mod spectral;

pub use error::{Error, Result};
