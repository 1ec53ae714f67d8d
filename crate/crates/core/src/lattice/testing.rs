//! Helpers shared by unit tests.

use rand::Rng;

use crate::geometry::LatticeDomain;
use crate::lattice::LatticeOperator;
use crate::C64;

/// Operator with every hop `|u|_inf <= radius` and coefficients uniform in
/// the unit square.
pub fn random_banded(rng: &mut impl Rng, domain: LatticeDomain, radius: i64) -> LatticeOperator {
    let hops: Vec<_> = (-radius..=radius).flat_map(|r| (-radius..=radius).map(move |s| (r, s))).collect();
    let vals: Vec<Vec<C64>> = hops
        .iter()
        .map(|_| (0..domain.len()).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
        .collect();
    let w = domain.window();
    LatticeOperator::from_fn(domain, &hops, |n, u| {
        let k = hops.iter().position(|&h| h == u).unwrap();
        vals[k][w.index(n).unwrap()]
    })
}
