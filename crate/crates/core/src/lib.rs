//! Numerical laboratory for the 2+1-dimensional equivariant Faddeev wave equation.

pub mod coefficients;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod hyperbolic;
pub mod radial_spectral;
pub mod report;

pub use error::{Error, Result};
pub use report::{ConvergenceReport, RatioReport};
