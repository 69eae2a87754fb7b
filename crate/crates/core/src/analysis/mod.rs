//! Harmonic analysis on exact finite models of K: the character, the Fourier
//! transform between dual grids, lattice periodization, bracket products and
//! Sobolev norms.

mod function;
mod grid;
mod omega;
mod periodic;
mod transform;

pub use function::{point_mass, SampledFunction};
pub use grid::{chi, chi_n, Domain, Grid, MAX_CELLS};
pub use omega::OmegaSet;
pub use periodic::{bracket, periodize, PeriodicFunction};
pub use transform::{fourier, fourier_with, inv_fourier, inv_fourier_with, TransformMethod};

pub(crate) use grid::unit_root;
