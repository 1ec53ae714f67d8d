use std::collections::BTreeMap;

use crate::geometry::Site;
use crate::lattice::LatticeOperator;
use crate::C64;

/// The hopping map of `a`: coefficient sequences `c_{r,s}` indexed by hop.
///
/// These are the Fourier coefficients of `a` up to the gauge phases of the
/// monomials `s1^r s2^s`; rebuilding from them gives `a` back exactly.
pub fn fourier_coefficients(a: &LatticeOperator) -> BTreeMap<Site, Vec<C64>> {
    a.hops().clone()
}

/// Fejer weight `(1 - |r|/(N+1)) (1 - |s|/(N+1))`, zero outside `|r|, |s| <= N`.
pub fn fejer_weight(u: Site, n: usize) -> f64 {
    let n = n as i64;
    if u.0.abs() > n || u.1.abs() > n {
        return 0.0;
    }
    let d = (n + 1) as f64;
    (1.0 - u.0.abs() as f64 / d) * (1.0 - u.1.abs() as f64 / d)
}

/// Cesaro mean `sigma_N(a)`.
pub fn cesaro_mean(a: &LatticeOperator, n: usize) -> LatticeOperator {
    let w = a.map_hops(|u| {
        let f = fejer_weight(u, n);
        (f > 0.0).then_some(C64::new(f, 0.0))
    });
    w.with_hermitian_hint(a.is_hermitian_hint())
}

/// Partial Fourier sum `S_N(a)`: hops with `|r|, |s| <= N`.
pub fn partial_sum(a: &LatticeOperator, n: usize) -> LatticeOperator {
    let n = n as i64;
    let s = a.map_hops(|u| (u.0.abs() <= n && u.1.abs() <= n).then_some(C64::new(1.0, 0.0)));
    s.with_hermitian_hint(a.is_hermitian_hint())
}
