//! Configuration files, checkpoints and result files.

pub mod checkpoint;
pub mod config;
pub mod csv;
pub mod vtk;

pub use checkpoint::Checkpoint;
pub use config::{RunConfig, ShapeInit};
