use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{LatticeDomain, Site};
use crate::lattice::LatticeOperator;
use crate::C64;

const STABILIZATION_TOL: f64 = 1e-9;

/// The pair of asymptotic constant-field operators `ev(a) = (a_-, a_+)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BulkPair {
    pub minus: LatticeOperator,
    pub plus: LatticeOperator,
}

/// Evaluation homomorphism on an open window.
///
/// For every hop and row the coefficients are required to be constant (up to
/// a relative 1e-9) over the outer quarter of columns on each side, excluding
/// a boundary layer of width `max(1, band radius)` where window truncation
/// acts. The stabilized values, extended to all columns, define the pair.
pub fn evaluate_bulk(a: &LatticeOperator) -> Result<BulkPair> {
    let domain = a.domain();
    if domain.is_torus() {
        return Err(Error::Domain("evaluate_bulk needs an open window".into()));
    }
    let w = domain.window();
    let quarter = (w.width / 4) as i64;
    let margin = a.band_radius().max(1);
    if quarter <= margin {
        return Err(Error::InvalidArgument(format!(
            "window width {} is too small to detect limits for band radius {}",
            w.width,
            a.band_radius()
        )));
    }
    let left: Vec<i64> = (w.x0 + margin..w.x0 + quarter).collect();
    let right: Vec<i64> = (w.x1() - quarter + 1..=w.x1() - margin).collect();

    let limit = |u: Site, c: &[C64], cols: &[i64], inner: i64, y: i64| -> Result<C64> {
        let reference = c[w.index_unchecked((inner, y))];
        let scale = reference.norm().max(1.0);
        for &x in cols {
            let n = (x, y);
            if domain.target(n, u).is_none() {
                continue;
            }
            let dev = (c[w.index_unchecked(n)] - reference).norm();
            if dev > STABILIZATION_TOL * scale {
                return Err(Error::NotStabilizing(format!(
                    "hop {u:?} at row {y}: coefficient varies by {dev:.3e} over the outer quarter"
                )));
            }
        }
        Ok(reference)
    };

    let mut minus = BTreeMap::new();
    let mut plus = BTreeMap::new();
    for (&u, c) in a.hops() {
        let mut cm = vec![C64::new(0.0, 0.0); w.len()];
        let mut cp = vec![C64::new(0.0, 0.0); w.len()];
        for y in w.y0..=w.y1() {
            let lm = limit(u, c, &left, *left.last().unwrap(), y)?;
            let lp = limit(u, c, &right, right[0], y)?;
            for x in w.x0..=w.x1() {
                let i = w.index_unchecked((x, y));
                cm[i] = lm;
                cp[i] = lp;
            }
        }
        minus.insert(u, cm);
        plus.insert(u, cp);
    }
    let build = |hops| -> Result<LatticeOperator> {
        Ok(LatticeOperator::from_hops(LatticeDomain::open(w), hops)?
            .with_hermitian_hint(a.is_hermitian_hint())
            .pruned(0.0))
    };
    Ok(BulkPair { minus: build(minus)?, plus: build(plus)? })
}
