//! Slow, independent reference implementations.
//!
//! Nothing here calls into [`crate::kernels`]: the brackets are written out
//! again from the vector form, the energy density is summed as a Boltzmann
//! series in modified Bessel functions, and the variance is a plain sum over
//! the momentum modes of a periodic box.

mod bessel;
mod bracket;
mod lattice;

pub use bessel::{bessel_k_scaled, epsilon_bessel_series, epsilon_massless};
pub use bracket::{bracket_from_invariants, bracket_transcription, energy_integrand, BracketInputs};
pub use lattice::{variance_lattice_sum, LatticeSpec, LatticeSum};
