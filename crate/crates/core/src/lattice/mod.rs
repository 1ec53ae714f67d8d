//! Banded lattice operators: magnetic translations, Harper Hamiltonians,
//! Fourier and Cesaro analysis, derivations, traces, regularity norms and the
//! bulk evaluation map.

mod bulk;
mod derivation;
mod fourier;
mod norms;
mod operator;
mod trace;
mod translations;

#[cfg(test)]
pub(crate) mod testing;

pub use bulk::{evaluate_bulk, BulkPair};
pub use derivation::{derivation, hop_derivation};
pub use fourier::{cesaro_mean, fejer_weight, fourier_coefficients, partial_sum};
pub use norms::{decay_norm, lp_norm, regularity_norms, RegularityNorms};
pub use operator::{operator_norm, LatticeOperator};
pub use trace::{trace_per_unit_volume, BoxSequence, TraceEstimate};
pub use translations::{commutator_flux, harper_hamiltonian, magnetic_translation};
