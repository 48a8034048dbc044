//! Plane-wave scattering of spin-1/2 particles off delta-function impurities.
//!
//! A fixed impurity acts as a spin filter on the transmitted wave, and a
//! Kondo impurity exchanges spin with the scattered particle. Both are used
//! here to concentrate or create entanglement by post-selection.

pub mod channels;
pub mod cli;
pub mod error;
pub mod hilbert;
pub mod protocols;
pub mod scattering;
pub mod tolerance;

pub use error::{Error, Result};
pub use hilbert::C64;
pub use tolerance::{Tolerances, TOL};
