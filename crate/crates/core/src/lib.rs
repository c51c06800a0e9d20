//! Binary substitution tilings of the line, their windows in internal space,
//! and the Hausdorff dimension of the window boundaries.

pub mod boundary;
pub mod config;
pub mod error;
pub mod geometry;
pub mod ifs;
pub mod nielsen;
pub mod pipeline;
pub mod quad;
pub mod spectral;
pub mod subst;

pub use error::{Error, ErrorClass, Result};
