use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{LatticeDomain, Rect, Site};
use crate::C64;

/// A finite-band operator on a lattice domain stored as its hopping map.
///
/// The coefficient sequence `c_u` of the hop `u = (r, s)` gives the matrix
/// elements `<n|a|n - u> = c_u(n)`. On open windows coefficients whose target
/// `n - u` leaves the window are kept at zero, so the stored map is exactly
/// the compression of the operator to the window. On a torus targets wrap and
/// several hops may alias the same matrix element.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeOperator {
    domain: LatticeDomain,
    hops: BTreeMap<Site, Vec<C64>>,
    hermitian: bool,
}

impl LatticeOperator {
    pub fn zero(domain: LatticeDomain) -> Self {
        LatticeOperator { domain, hops: BTreeMap::new(), hermitian: true }
    }

    pub fn identity(domain: LatticeDomain) -> Self {
        Self::diagonal(domain, |_| C64::new(1.0, 0.0)).with_hermitian_hint(true)
    }

    /// Multiplication by the function `g`.
    pub fn diagonal(domain: LatticeDomain, g: impl Fn(Site) -> C64) -> Self {
        Self::from_fn(domain, &[(0, 0)], |n, _| g(n))
    }

    /// Operator with coefficients `c_u(n) = f(n, u)` for the listed hops.
    pub fn from_fn(domain: LatticeDomain, hops: &[Site], f: impl Fn(Site, Site) -> C64) -> Self {
        let w = domain.window();
        let map = hops.iter().map(|&u| (u, w.sites().map(|n| f(n, u)).collect())).collect();
        Self::from_hops_unchecked(domain, map)
    }

    /// Operator from explicit coefficient sequences (one value per window site,
    /// in the window's row-major order).
    pub fn from_hops(domain: LatticeDomain, hops: BTreeMap<Site, Vec<C64>>) -> Result<Self> {
        let len = domain.len();
        if let Some((u, c)) = hops.iter().find(|(_, c)| c.len() != len) {
            return Err(Error::InvalidArgument(format!(
                "hop {u:?} has {} coefficients for a domain of {len} sites",
                c.len()
            )));
        }
        Ok(Self::from_hops_unchecked(domain, hops))
    }

    fn from_hops_unchecked(domain: LatticeDomain, mut hops: BTreeMap<Site, Vec<C64>>) -> Self {
        if !domain.is_torus() {
            let w = domain.window();
            for (&u, c) in hops.iter_mut() {
                for (i, x) in c.iter_mut().enumerate() {
                    if domain.target(w.site(i), u).is_none() {
                        *x = C64::new(0.0, 0.0);
                    }
                }
            }
        }
        LatticeOperator { domain, hops, hermitian: false }
    }

    /// Declare (or clear) the self-adjointness hint.
    pub fn with_hermitian_hint(mut self, hermitian: bool) -> Self {
        self.hermitian = hermitian;
        self
    }

    pub fn is_hermitian_hint(&self) -> bool {
        self.hermitian
    }

    pub fn domain(&self) -> LatticeDomain {
        self.domain
    }

    pub fn window(&self) -> Rect {
        self.domain.window()
    }

    pub fn hops(&self) -> &BTreeMap<Site, Vec<C64>> {
        &self.hops
    }

    /// `c_u(n)`, zero for absent hops or sites outside the window.
    pub fn coefficient(&self, u: Site, n: Site) -> C64 {
        match (self.hops.get(&u), self.window().index(n)) {
            (Some(c), Some(i)) => c[i],
            _ => C64::new(0.0, 0.0),
        }
    }

    /// Largest `|u|_inf` over stored hops with a nonzero coefficient.
    pub fn band_radius(&self) -> i64 {
        self.hops
            .iter()
            .filter(|(_, c)| c.iter().any(|x| x.norm() > 0.0))
            .map(|(u, _)| u.0.abs().max(u.1.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Matrix element `<n|a|m>`, summing aliased hops on a torus.
    pub fn matrix_element(&self, n: Site, m: Site) -> C64 {
        let Some(i) = self.window().index(n) else {
            return C64::new(0.0, 0.0);
        };
        self.hops
            .iter()
            .filter(|(&u, _)| self.domain.target(n, u) == Some(m))
            .map(|(_, c)| c[i])
            .sum()
    }

    /// Diagonal matrix element `<n|a|n>`.
    pub fn diagonal_entry(&self, n: Site) -> C64 {
        self.matrix_element(n, n)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let w = self.window();
        let mut m = DMatrix::zeros(w.len(), w.len());
        for (&u, c) in &self.hops {
            for (i, n) in w.sites().enumerate() {
                if let Some(t) = self.domain.target(n, u) {
                    m[(i, w.index_unchecked(t))] += c[i];
                }
            }
        }
        m
    }

    /// `(a psi)(n) = sum_u c_u(n) psi(n - u)`.
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let w = self.window();
        let mut out = vec![C64::new(0.0, 0.0); w.len()];
        for (&u, c) in &self.hops {
            for (i, n) in w.sites().enumerate() {
                if c[i] != C64::new(0.0, 0.0) {
                    if let Some(t) = self.domain.target(n, u) {
                        out[i] += c[i] * psi[w.index_unchecked(t)];
                    }
                }
            }
        }
        out
    }

    /// Hilbert-space adjoint: `c*_{-u}(n) = conj(c_u(n + u))`.
    pub fn adjoint(&self) -> Self {
        let w = self.window();
        let hops = self
            .hops
            .iter()
            .map(|(&u, c)| {
                let v = (-u.0, -u.1);
                let coeffs = w
                    .sites()
                    .map(|n| match self.domain.target(n, v) {
                        Some(t) => c[w.index_unchecked(t)].conj(),
                        None => C64::new(0.0, 0.0),
                    })
                    .collect();
                (v, coeffs)
            })
            .collect();
        LatticeOperator { domain: self.domain, hops, hermitian: self.hermitian }
    }

    /// Product with coefficients computed only for rows `n` in `rows`; all
    /// other rows of the result are zero.
    pub fn mul_rows(&self, other: &LatticeOperator, rows: &Rect) -> Self {
        assert_eq!(self.domain, other.domain, "operators live on different domains");
        let w = self.window();
        let rows = w.intersect(rows);
        let row_idx: Vec<(usize, Site)> = rows.sites().map(|n| (w.index_unchecked(n), n)).collect();
        let mut hops: BTreeMap<Site, Vec<C64>> = BTreeMap::new();
        for (&u, a) in &self.hops {
            for (&v, b) in &other.hops {
                let key = (u.0 + v.0, u.1 + v.1);
                let out = hops.entry(key).or_insert_with(|| vec![C64::new(0.0, 0.0); w.len()]);
                for &(i, n) in &row_idx {
                    let x = a[i];
                    if x == C64::new(0.0, 0.0) {
                        continue;
                    }
                    if let Some(t) = self.domain.target(n, u) {
                        out[i] += x * b[w.index_unchecked(t)];
                    }
                }
            }
        }
        Self::from_hops_unchecked(self.domain, hops)
    }

    /// Multiply every coefficient by a scalar.
    pub fn scale(&self, z: C64) -> Self {
        let hops = self.hops.iter().map(|(&u, c)| (u, c.iter().map(|x| x * z).collect())).collect();
        LatticeOperator { domain: self.domain, hops, hermitian: self.hermitian && z.im == 0.0 }
    }

    /// Multiply each hop's coefficients by `f(u)`.
    pub fn map_hops(&self, f: impl Fn(Site) -> Option<C64>) -> Self {
        let hops = self
            .hops
            .iter()
            .filter_map(|(&u, c)| f(u).map(|z| (u, c.iter().map(|x| x * z).collect())))
            .collect();
        LatticeOperator { domain: self.domain, hops, hermitian: false }
    }

    /// Drop hops whose coefficients are all at most `tol` in modulus.
    pub fn pruned(&self, tol: f64) -> Self {
        let hops = self
            .hops
            .iter()
            .filter(|(_, c)| c.iter().any(|x| x.norm() > tol))
            .map(|(&u, c)| (u, c.clone()))
            .collect();
        LatticeOperator { domain: self.domain, hops, hermitian: self.hermitian }
    }

    /// Largest coefficient difference over the union of hop keys.
    pub fn max_coefficient_diff(&self, other: &LatticeOperator) -> f64 {
        let zero = C64::new(0.0, 0.0);
        let keys: std::collections::BTreeSet<Site> = self.hops.keys().chain(other.hops.keys()).copied().collect();
        let len = self.domain.len();
        keys.iter()
            .map(|u| {
                (0..len)
                    .map(|i| {
                        let a = self.hops.get(u).map_or(zero, |c| c[i]);
                        let b = other.hops.get(u).map_or(zero, |c| c[i]);
                        (a - b).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `max |a - a^*|` over dense entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let m = self.to_dense();
        (&m - m.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    fn combine(&self, other: &LatticeOperator, sign: f64) -> Self {
        assert_eq!(self.domain, other.domain, "operators live on different domains");
        let mut hops = self.hops.clone();
        for (&u, c) in &other.hops {
            let entry = hops.entry(u).or_insert_with(|| vec![C64::new(0.0, 0.0); c.len()]);
            for (x, y) in entry.iter_mut().zip(c) {
                *x += y * sign;
            }
        }
        LatticeOperator { domain: self.domain, hops, hermitian: self.hermitian && other.hermitian }
    }
}

/// Largest singular value of a dense matrix.
pub fn operator_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

impl Add for &LatticeOperator {
    type Output = LatticeOperator;
    fn add(self, rhs: &LatticeOperator) -> LatticeOperator {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &LatticeOperator {
    type Output = LatticeOperator;
    fn sub(self, rhs: &LatticeOperator) -> LatticeOperator {
        self.combine(rhs, -1.0)
    }
}

impl Neg for &LatticeOperator {
    type Output = LatticeOperator;
    fn neg(self) -> LatticeOperator {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &LatticeOperator {
    type Output = LatticeOperator;
    /// `(ab)_{u+v}(n) = a_u(n) b_v(n - u)`.
    fn mul(self, rhs: &LatticeOperator) -> LatticeOperator {
        self.mul_rows(rhs, &self.window())
    }
}

impl Mul<&LatticeOperator> for C64 {
    type Output = LatticeOperator;
    fn mul(self, rhs: &LatticeOperator) -> LatticeOperator {
        rhs.scale(self)
    }
}
