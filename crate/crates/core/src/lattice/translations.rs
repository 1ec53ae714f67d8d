use crate::error::{Error, Result};
use crate::fields::VectorPotential;
use crate::geometry::LatticeDomain;
use crate::lattice::LatticeOperator;
use crate::C64;

fn check_potential(potential: &VectorPotential, domain: &LatticeDomain) -> Result<()> {
    if potential.window() != domain.window() {
        return Err(Error::Domain(format!(
            "potential window {:?} does not match the domain window {:?}",
            potential.window(),
            domain.window()
        )));
    }
    if potential.domain().boundary() != domain.boundary() {
        return Err(Error::Commensurability(format!(
            "potential built for {:?} cannot be used on {:?}",
            potential.domain().boundary(),
            domain.boundary()
        )));
    }
    Ok(())
}

/// Magnetic translation `(s_j psi)(n) = e^{iA(n, n - e_j)} psi(n - e_j)`.
pub fn magnetic_translation(potential: &VectorPotential, axis: usize, domain: LatticeDomain) -> Result<LatticeOperator> {
    check_potential(potential, &domain)?;
    let hop = match axis {
        1 => (1, 0),
        2 => (0, 1),
        _ => return Err(Error::InvalidArgument(format!("axis must be 1 or 2, got {axis}"))),
    };
    Ok(LatticeOperator::from_fn(domain, &[hop], |n, _| match potential.edge(n, axis) {
        Some(a) => C64::from_polar(1.0, a),
        None => C64::new(0.0, 0.0),
    }))
}

/// Group commutator `s1 s2 s1^* s2^*`, the flux operator `e^{iB}` on rows
/// away from the window boundary.
pub fn commutator_flux(s1: &LatticeOperator, s2: &LatticeOperator) -> LatticeOperator {
    let p = &(s1 * s2) * &(&s1.adjoint() * &s2.adjoint());
    p.pruned(0.0)
}

/// Harper Hamiltonian `s1 + s1^* + s2 + s2^*`.
pub fn harper_hamiltonian(potential: &VectorPotential, domain: LatticeDomain) -> Result<LatticeOperator> {
    let s1 = magnetic_translation(potential, 1, domain)?;
    let s2 = magnetic_translation(potential, 2, domain)?;
    let h = &(&s1 + &s1.adjoint()) + &(&s2 + &s2.adjoint());
    Ok(h.with_hermitian_hint(true))
}
