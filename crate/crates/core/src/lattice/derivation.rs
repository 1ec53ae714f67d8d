use crate::error::{Error, Result};
use crate::lattice::LatticeOperator;
use crate::C64;

fn axis_component(u: (i64, i64), axis: usize) -> i64 {
    if axis == 1 {
        u.0
    } else {
        u.1
    }
}

/// Spatial derivation as a hop multiplier: the hop `(r, s)` is multiplied by
/// `-ir` (axis 1) or `-is` (axis 2). Well defined on every domain.
pub fn hop_derivation(a: &LatticeOperator, axis: usize) -> Result<LatticeOperator> {
    if axis != 1 && axis != 2 {
        return Err(Error::InvalidArgument(format!("axis must be 1 or 2, got {axis}")));
    }
    let d = a.map_hops(|u| {
        let k = axis_component(u, axis);
        (k != 0).then_some(C64::new(0.0, -(k as f64)))
    });
    Ok(d)
}

/// Spatial derivation `i[a, n_j]` computed with the position operator.
///
/// Position operators do not exist on a torus, so torus domains are rejected;
/// use [`hop_derivation`] there.
pub fn derivation(a: &LatticeOperator, axis: usize) -> Result<LatticeOperator> {
    if a.domain().is_torus() {
        return Err(Error::Domain(
            "the commutator i[a, n_j] needs position operators, which a torus lacks; use hop_derivation".into(),
        ));
    }
    if axis != 1 && axis != 2 {
        return Err(Error::InvalidArgument(format!("axis must be 1 or 2, got {axis}")));
    }
    let x = LatticeOperator::diagonal(a.domain(), |n| C64::new(axis_component(n, axis) as f64, 0.0));
    let c = &(a * &x) - &(&x * a);
    Ok(c.scale(C64::new(0.0, 1.0)).pruned(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{LatticeDomain, Rect};
    use crate::lattice::testing::random_banded;
    use rand::{rngs::StdRng, SeedableRng};

    #[test]
    fn monomials_and_diagonals() {
        let d = LatticeDomain::square(3);
        let m = LatticeOperator::from_fn(d, &[(2, -1)], |n, _| C64::new(1.0, n.1 as f64));
        let d1 = hop_derivation(&m, 1).unwrap();
        let d2 = hop_derivation(&m, 2).unwrap();
        assert_eq!(d1.max_coefficient_diff(&m.scale(C64::new(0.0, -2.0))), 0.0);
        assert_eq!(d2.max_coefficient_diff(&m.scale(C64::new(0.0, 1.0))), 0.0);
        let g = LatticeOperator::diagonal(d, |n| C64::new(n.0 as f64, 0.0));
        assert!(hop_derivation(&g, 1).unwrap().hops().is_empty());
        assert!(derivation(&g, 2).unwrap().to_dense().iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn commutator_form_equals_hop_multiplier_on_open_windows() {
        let mut rng = StdRng::seed_from_u64(11);
        let a = random_banded(&mut rng, LatticeDomain::open(Rect::new(-2, -3, 6, 7)), 2);
        for axis in [1, 2] {
            let x = derivation(&a, axis).unwrap().to_dense();
            let y = hop_derivation(&a, axis).unwrap().to_dense();
            assert!((x - y).iter().all(|z| z.norm() < 1e-13));
        }
    }

    #[test]
    fn torus_rejects_commutator_form() {
        let d = LatticeDomain::magnetic_torus(Rect::new(0, 0, 3, 3), 1, 3).unwrap();
        let a = LatticeOperator::identity(d);
        assert!(matches!(derivation(&a, 1), Err(Error::Domain(_))));
        assert!(hop_derivation(&a, 1).is_ok());
        assert!(hop_derivation(&a, 0).is_err());
    }

    #[test]
    fn leibniz_rule() {
        let mut rng = StdRng::seed_from_u64(12);
        let d = LatticeDomain::square(4);
        let a = random_banded(&mut rng, d, 2);
        let b = random_banded(&mut rng, d, 2);
        for axis in [1, 2] {
            let lhs = hop_derivation(&(&a * &b), axis).unwrap().to_dense();
            let rhs = a.to_dense() * hop_derivation(&b, axis).unwrap().to_dense()
                + hop_derivation(&a, axis).unwrap().to_dense() * b.to_dense();
            assert!((lhs - rhs).iter().all(|z| z.norm() <= 1e-12));
        }
    }
}
