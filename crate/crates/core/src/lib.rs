//! Random-matrix ensembles, gap-probability generating functions, Fredholm
//! determinants and a registry of numerical checks relating them.

pub mod error;
pub mod special;
pub mod quadrature;
pub mod linalg;
pub mod rng;
pub mod ensembles;
pub mod pointops;
pub mod kernels;
pub mod gap;
pub mod scaling;
pub mod formfactor;
pub mod discrete;
pub mod identities;

pub use error::{Error, Result};
