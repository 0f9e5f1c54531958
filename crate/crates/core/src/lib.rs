//! Forward 3D quantum scattering with backscattering data.
//!
//! The crate discretizes the Lippmann–Schwinger equation on a ball, runs the
//! Born series through the `T` operator, extracts backscattering amplitudes,
//! checks the identities and estimates behind uniqueness from backscattering
//! data, and reconstructs potentials in the Born approximation.

pub mod amplitude;
pub mod cli;
pub mod config;
pub mod error;
pub mod geom;
pub mod harness;
pub mod inversion;
pub mod kernels;
pub mod potential;
pub mod prolate;
pub mod quadrature;
pub mod radon;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
pub use kernels::{ComplexWavenumber, EtaRule};
pub use potential::{sample_on_grid, Grid3, Potential, PotentialKind};
