use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{Rect, Site};
use crate::lattice::{hop_derivation, BoxSequence, LatticeOperator};
use crate::C64;

/// Value of the cocycle on the largest box with its convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct XiEstimate {
    pub value: C64,
    pub sequence: Vec<(Rect, C64)>,
}

/// Hop-indexed view of an operator for constant-time coefficient lookup.
struct HopTable<'a> {
    radius: i64,
    side: i64,
    slots: Vec<Option<&'a [C64]>>,
    hops: Vec<Site>,
}

impl<'a> HopTable<'a> {
    fn new(a: &'a LatticeOperator) -> Self {
        let radius = a.hops().keys().map(|u| u.0.abs().max(u.1.abs())).max().unwrap_or(0);
        let side = 2 * radius + 1;
        let mut slots = vec![None; (side * side) as usize];
        let mut hops = Vec::new();
        for (&u, c) in a.hops() {
            if c.iter().any(|x| x.norm() > 0.0) {
                slots[((u.0 + radius) * side + u.1 + radius) as usize] = Some(c.as_slice());
                hops.push(u);
            }
        }
        HopTable { radius, side, slots, hops }
    }

    #[inline]
    fn get(&self, u: Site) -> Option<&'a [C64]> {
        if u.0.abs() > self.radius || u.1.abs() > self.radius {
            return None;
        }
        self.slots[((u.0 + self.radius) * self.side + u.1 + self.radius) as usize]
    }
}

/// `(a b c)(n, n)` on an open window: sum over hop triples `u + v + w = 0`.
fn triple_diagonal(a: &HopTable, b: &HopTable, c: &HopTable, window: &Rect, n: Site) -> C64 {
    let i = window.index_unchecked(n);
    let mut acc = C64::new(0.0, 0.0);
    for &u in &a.hops {
        let m = (n.0 - u.0, n.1 - u.1);
        let Some(j) = window.index(m) else { continue };
        let x = a.get(u).unwrap()[i];
        if x == C64::new(0.0, 0.0) {
            continue;
        }
        for &v in &b.hops {
            let l = (m.0 - v.0, m.1 - v.1);
            let Some(k) = window.index(l) else { continue };
            if let Some(cw) = c.get((-u.0 - v.0, -u.1 - v.1)) {
                acc += x * b.get(v).unwrap()[j] * cw[k];
            }
        }
    }
    acc
}

/// `xi(a0, a1, a2) = 2*pi*i T(a0 (d1 a1 d2 a2 - d2 a1 d1 a2))` with the trace
/// per unit volume along `boxes`.
pub fn xi_pairing(a0: &LatticeOperator, a1: &LatticeOperator, a2: &LatticeOperator, boxes: &BoxSequence) -> Result<XiEstimate> {
    let domain = a0.domain();
    if domain.is_torus() {
        return Err(Error::Domain("xi_pairing evaluates on open windows".into()));
    }
    if a1.domain() != domain || a2.domain() != domain {
        return Err(Error::Domain("xi_pairing operands live on different domains".into()));
    }
    let w = domain.window();
    if let Some(b) = boxes.boxes().iter().find(|b| !w.contains_rect(b)) {
        return Err(Error::InvalidArgument(format!("box {b:?} exceeds the window {w:?}")));
    }
    let d1a1 = hop_derivation(a1, 1)?;
    let d2a2 = hop_derivation(a2, 2)?;
    let d2a1 = hop_derivation(a1, 2)?;
    let d1a2 = hop_derivation(a2, 1)?;
    let (t0, t11, t22, t21, t12) =
        (HopTable::new(a0), HopTable::new(&d1a1), HopTable::new(&d2a2), HopTable::new(&d2a1), HopTable::new(&d1a2));
    let largest = boxes.largest();
    let diag: Vec<C64> = largest
        .sites()
        .map(|n| triple_diagonal(&t0, &t11, &t22, &w, n) - triple_diagonal(&t0, &t21, &t12, &w, n))
        .collect();
    let factor = C64::new(0.0, TAU);
    let sequence: Vec<(Rect, C64)> = boxes
        .boxes()
        .iter()
        .map(|b| {
            let s: C64 = b.sites().map(|n| diag[largest.index_unchecked(n)]).sum();
            (*b, factor * s / b.len() as f64)
        })
        .collect();
    Ok(XiEstimate { value: sequence.last().expect("non-empty").1, sequence })
}

/// Residual from the nearest integer beyond which a pairing is reported as
/// not converged.
pub const CONVERGENCE_TOL: f64 = 0.1;

/// Real-space Chern number `xi(P, P, P)` of a projection.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSpaceChern {
    pub chern: i64,
    pub raw: C64,
    pub residual: f64,
    pub converged: bool,
    /// Largest entry of `P^2 - P` on the rows of the largest box.
    pub projection_residual: f64,
    pub sequence: Vec<(Rect, C64)>,
}

/// `xi(P, P, P)` rounded to the nearest integer. `P` must be a projection on
/// the rows of the trace boxes (`|P^2 - P| <= 1e-8` entrywise).
pub fn chern_realspace(p: &LatticeOperator, boxes: &BoxSequence) -> Result<RealSpaceChern> {
    let largest = boxes.largest();
    let p2 = p.mul_rows(p, &largest);
    let mut projection_residual: f64 = 0.0;
    for (&u, c) in p2.hops() {
        for n in largest.sites() {
            let i = p.window().index_unchecked(n);
            let d = c[i] - p.coefficient(u, n);
            projection_residual = projection_residual.max(d.norm());
        }
    }
    for (&u, c) in p.hops() {
        if !p2.hops().contains_key(&u) {
            for n in largest.sites() {
                projection_residual = projection_residual.max(c[p.window().index_unchecked(n)].norm());
            }
        }
    }
    if projection_residual > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "operator is not a projection on the trace boxes (|P^2 - P| = {projection_residual:.3e})"
        )));
    }
    let xi = xi_pairing(p, p, p, boxes)?;
    let chern = xi.value.re.round() as i64;
    let residual = (xi.value - C64::new(chern as f64, 0.0)).norm();
    Ok(RealSpaceChern {
        chern,
        raw: xi.value,
        residual,
        converged: residual <= CONVERGENCE_TOL,
        projection_residual,
        sequence: xi.sequence,
    })
}
