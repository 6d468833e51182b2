//! Norms, reproducing kernels and point-evaluation bounds for Hardy and
//! Bergman spaces of Dirichlet series, with exact and Monte Carlo
//! verification tooling.

pub mod arith;
pub mod error;
pub mod eval;
pub mod json;
pub mod lab;
pub mod measure;
pub mod norms;
pub mod poly;
pub mod quad;
pub mod rng;
pub mod zeta;

pub use error::{Error, Result};
