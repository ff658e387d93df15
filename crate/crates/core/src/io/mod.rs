pub mod config;
pub mod csv;
pub mod manifest;
pub mod snapshot;

pub use config::{parse_config, Config, InitKind};
pub use manifest::RunManifest;
