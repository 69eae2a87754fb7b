//! Fourier analysis over local fields of prime characteristic on exact finite
//! models, and a checker for nonhomogeneous wavelet bi-frames on reducing
//! subspaces of Sobolev spaces.
//!
//! The numeric modules are generic over the real scalar type (see
//! [`scalar::Real`]); the aliases at the crate root fix it to `f64`.

pub mod analysis;
pub mod characterization;
pub mod eigen;
pub mod error;
pub mod frame;
pub mod finite_field;
pub mod local_field;
pub mod report;
pub mod scalar;
pub mod selftest;
pub mod sequence;
pub mod table;

pub use error::{Error, Result};
pub use finite_field::{FieldSpec, Scalar};
pub use local_field::{kappa, u_of_n, KNumber, Valuation};

/// Double-precision sampled function.
pub type SampledFunction64 = analysis::SampledFunction<f64>;

/// Double-precision generator set.
pub type GeneratorSet64 = frame::GeneratorSet<f64>;

/// Double-precision coefficient sequence.
pub type Sequence64 = sequence::Sequence<f64>;

/// Double-precision periodic function on the integers.
pub type PeriodicFunction64 = analysis::PeriodicFunction<f64>;
