//! Interface algebra of vertically invariant fields through the
//! Bloch-Floquet strip reduction.

mod duality;
mod family;
mod fiber;
mod scan;
mod spectrum;
mod switch;

pub use duality::{common_gaps, verify_duality, DualityConfig, DualityReport, Flux};
pub use family::{eta_pairing, u_delta, uniform_grid, winding_number, FiberFamily, Winding, INTEGRALITY_TOL};
pub use fiber::{bf_phase, fiber_from_phase, fiber_hamiltonian, BFPhase, FiberOperator};
pub use scan::{interface_scan, InterfaceScan};
pub use spectrum::{
    interface_spectrum, spectral_flow, Crossing, SpectralFlow, SpectrumRow, SpectrumTable, AMBIGUITY_TOL,
    DEFAULT_WEIGHT_THRESHOLD,
};
pub use switch::{Ramp, SwitchFunction};
