//! Rational noncommutative tori: Bloch families of the Harper operator,
//! Fermi projections, Chern numbers in momentum and real space, and the
//! Power-Rieffel projection.

mod bloch;
mod fhs;
mod power_rieffel;
mod xi;

pub use bloch::{fermi_projection, harper_bloch_family, harper_bloch_matrix, BlochFamily, FamilyKind, GAP_MARGIN};
pub use fhs::{berry_flux, chern_fhs};
pub use power_rieffel::{power_rieffel, CircleOperator, PowerRieffelRep, StructureResiduals};
pub use xi::{chern_realspace, xi_pairing, RealSpaceChern, XiEstimate, CONVERGENCE_TOL};
