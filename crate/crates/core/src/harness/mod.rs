//! Numerical checks of the identities and estimates behind uniqueness.

pub mod growth;
pub mod identities;
pub mod integrals;
pub mod nu;
pub mod ridge;
pub mod scaling;
pub mod transforms;

pub use growth::{decay_estimate_check, envelope_check, eta_law, find_eta, growth_trend, p_max};
pub use identities::{fourier_relation_check, free_term_check, amplitude_difference_residual, orthogonality_residual};
pub use integrals::{integral_values, j_integral, j_integrals};
pub use nu::{nu_evaluate, nu_sweep};
pub use scaling::{born_direct_sweep, t2_scaling};
pub use transforms::radon_identities;
