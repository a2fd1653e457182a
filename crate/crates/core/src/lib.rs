//! Thermal energy density and energy-density fluctuations of a hot gas of
//! spin-½ particles, for four choices of the energy-momentum tensor
//! (canonical, Belinfante-Rosenfeld, de Groot-van Leeuwen-van Weert and
//! Hilgevoord-Wouthuysen).
//!
//! The subsystem is defined by a normalized Gaussian profile of radius `a`
//! centered at the origin. For each tensor the crate evaluates
//!
//! * the thermal mean `ε = ⟨:T⁰⁰_a:⟩`, which is the same for all four tensors,
//! * the variance `σ² = ⟨:T⁰⁰_a::T⁰⁰_a:⟩ − ⟨:T⁰⁰_a:⟩²`,
//! * the normalized standard deviation `σ_n = σ/ε`.
//!
//! Everything is in natural units (ħ = c = k_B = 1). The crate is `no_std`
//! and only needs `alloc`; IO, the command-line tool and parallel drivers
//! live in the `pgfluct` crate.

#![no_std]
// `num_traits::Float` supplies f64 math on toolchains whose `core` lacks the
// inherent methods; newer ones make the import redundant.
#![allow(unused_imports)]

extern crate alloc;

mod error;
pub mod fluctuation;
pub mod kernels;
pub mod oracle;
mod params;
pub mod quadrature;
pub mod thermal;

pub use error::Error;
pub use fluctuation::{sigma_normalized, FluctuationResult};
pub use kernels::{reduced_integrand, variance, VarianceKernel};
pub use params::{PseudoGauge, SystemParams, DEFAULT_DEGENERACY, SMALL_MASS_RATIO};
pub use quadrature::{AngularMode, Estimate, QuadratureConfig};
pub use thermal::{energy_density, fermi_dirac, fermi_dirac_complement, on_shell_energy};

pub type Result<T, E = Error> = core::result::Result<T, E>;
