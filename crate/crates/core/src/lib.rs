//! Diffuse-interface minimization of the Frank–Oseen droplet energy.
//!
//! A liquid-crystal droplet is described by a director field `n`, a phase
//! field `phi` standing in for the droplet and an Ambrosio–Tortorelli field
//! `v` whose low valleys mark inner boundaries across which the director may
//! jump. The crate provides the pointwise energy densities, the assembled
//! diffuse energy with analytic gradients, an alternating projected-gradient
//! minimizer with a volume constraint, analytic reference oracles and the file
//! formats used by the `lcdo` binary.

pub mod diffuse;
pub mod energy;
mod error;
pub mod grid;
pub mod init;
pub mod io;
pub mod linalg;
pub mod optimizer;
pub mod oracles;
pub mod validate;

pub use error::{Error, Result};
