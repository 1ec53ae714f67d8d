use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{gcd, LatticeDomain};
use crate::lattice::LatticeOperator;
use crate::linalg::eigh;
use crate::C64;

/// Minimal distance between the chemical potential and the spectrum.
pub const GAP_MARGIN: f64 = 1e-8;

/// What the matrices of a [`BlochFamily`] represent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Hamiltonian,
    Projection,
}

/// A q x q matrix per momentum of an `N1 x N2` grid over the magnetic
/// Brillouin zone, for the constant flux `2*pi*p/q` in the Landau gauge.
///
/// The supercell is `q` sites tall in the second direction; the momenta are
/// `k1 = 2*pi*i1/N1` and `K2 = 2*pi*i2/N2` with `K2` conjugate to the supercell
/// index. Matrices are stored with `i2` running fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochFamily {
    p: i64,
    q: i64,
    grid: (usize, usize),
    kind: FamilyKind,
    matrices: Vec<DMatrix<C64>>,
}

/// Bloch matrix of the Harper operator at momenta `(k1, K2)`:
/// diagonal `2cos(k1 - j b)`, unit couplings between neighbouring rows of the
/// supercell and the phases `e^{-iK2}`, `e^{iK2}` across the cell boundary.
pub fn harper_bloch_matrix(p: i64, q: i64, k1: f64, k2: f64) -> DMatrix<C64> {
    let qn = q as usize;
    let b = TAU * p as f64 / q as f64;
    let mut h = DMatrix::zeros(qn, qn);
    for j in 0..qn {
        h[(j, j)] += C64::new(2.0 * (k1 - j as f64 * b).cos(), 0.0);
        if j + 1 < qn {
            h[(j + 1, j)] += C64::new(1.0, 0.0);
            h[(j, j + 1)] += C64::new(1.0, 0.0);
        }
    }
    h[(0, qn - 1)] += C64::from_polar(1.0, -k2);
    h[(qn - 1, 0)] += C64::from_polar(1.0, k2);
    h
}

fn check_flux(p: i64, q: i64) -> Result<()> {
    if q < 1 {
        return Err(Error::InvalidArgument(format!("flux denominator q = {q} must be positive")));
    }
    if gcd(p, q) != 1 {
        return Err(Error::InvalidArgument(format!("p = {p} and q = {q} are not coprime")));
    }
    Ok(())
}

/// The Harper Hamiltonian family at flux `2*pi*p/q` on an `N1 x N2` grid.
pub fn harper_bloch_family(p: i64, q: i64, grid: (usize, usize)) -> Result<BlochFamily> {
    check_flux(p, q)?;
    if grid.0 < 3 || grid.1 < 3 {
        return Err(Error::InvalidArgument(format!("Brillouin-zone grid {grid:?} must be at least 3x3")));
    }
    let mut matrices = Vec::with_capacity(grid.0 * grid.1);
    for i1 in 0..grid.0 {
        for i2 in 0..grid.1 {
            let (k1, k2) = momentum(grid, i1, i2);
            matrices.push(harper_bloch_matrix(p, q, k1, k2));
        }
    }
    Ok(BlochFamily { p, q, grid, kind: FamilyKind::Hamiltonian, matrices })
}

fn momentum(grid: (usize, usize), i1: usize, i2: usize) -> (f64, f64) {
    (TAU * i1 as f64 / grid.0 as f64, TAU * i2 as f64 / grid.1 as f64)
}

impl BlochFamily {
    /// Family built from explicit matrices, `i2` running fastest.
    pub fn from_matrices(p: i64, q: i64, grid: (usize, usize), kind: FamilyKind, matrices: Vec<DMatrix<C64>>) -> Result<Self> {
        check_flux(p, q)?;
        let qn = q as usize;
        if matrices.len() != grid.0 * grid.1 || matrices.iter().any(|m| m.nrows() != qn || m.ncols() != qn) {
            return Err(Error::InvalidArgument(format!(
                "expected {} matrices of size {qn}x{qn}",
                grid.0 * grid.1
            )));
        }
        Ok(BlochFamily { p, q, grid, kind, matrices })
    }

    pub fn flux(&self) -> (i64, i64) {
        (self.p, self.q)
    }

    pub fn grid(&self) -> (usize, usize) {
        self.grid
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn matrices(&self) -> &[DMatrix<C64>] {
        &self.matrices
    }

    pub fn matrix(&self, i1: usize, i2: usize) -> &DMatrix<C64> {
        &self.matrices[(i1 % self.grid.0) * self.grid.1 + (i2 % self.grid.1)]
    }

    pub fn momentum(&self, i1: usize, i2: usize) -> (f64, f64) {
        momentum(self.grid, i1, i2)
    }

    /// Largest `|M - M^*|` entry over the grid.
    pub fn hermiticity_residual(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| (m - m.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// Largest `|P^2 - P|` entry over the grid.
    pub fn idempotency_residual(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| (m * m - m).iter().map(|x| x.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// Eigenvalues at every momentum, ascending.
    pub fn eigenvalues(&self) -> Vec<Vec<f64>> {
        self.matrices.par_iter().map(|m| eigh(m).0).collect()
    }

    /// `(min, max)` of each band over the grid.
    pub fn band_ranges(&self) -> Vec<(f64, f64)> {
        let ev = self.eigenvalues();
        (0..self.q as usize)
            .map(|j| {
                ev.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e[j]), hi.max(e[j])))
            })
            .collect()
    }

    /// Open intervals between consecutive non-overlapping bands.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        let bands = self.band_ranges();
        let mut gaps = Vec::new();
        let mut top = f64::NEG_INFINITY;
        for (j, &(lo, hi)) in bands.iter().enumerate() {
            if j > 0 && lo > top + 2.0 * GAP_MARGIN {
                gaps.push((top, lo));
            }
            top = top.max(hi);
        }
        gaps
    }

    /// Lattice operator on an open window whose kernel is synthesized from the
    /// family by a discrete inverse Bloch transform, truncated to hops with
    /// `|u|_inf <= radius`.
    ///
    /// The site `(n1, q l + j)` corresponds to row `j` of cell `l`, so the kernel
    /// depends on `n - m` and on `n2 mod q` only.
    pub fn realize(&self, domain: LatticeDomain, radius: i64) -> Result<LatticeOperator> {
        if domain.is_torus() {
            return Err(Error::Domain("Bloch synthesis targets open windows".into()));
        }
        let q = self.q;
        let (n1, n2) = self.grid;
        let vol = (n1 * n2) as f64;
        // The cell offset l_n - l_m for the kernel entry (j_n, j_m) at vertical
        // hop s is (s + j_m - j_n) / q.
        let mut kernels: BTreeMap<((i64, i64), i64), C64> = BTreeMap::new();
        for r in -radius..=radius {
            for s in -radius..=radius {
                for jn in 0..q {
                    let jm = (jn - s).rem_euclid(q);
                    let dl = (s + jm - jn) / q;
                    let mut acc = C64::new(0.0, 0.0);
                    for i1 in 0..n1 {
                        for i2 in 0..n2 {
                            let (k1, k2) = momentum(self.grid, i1, i2);
                            let ph = C64::from_polar(1.0, k1 * r as f64 + k2 * dl as f64);
                            acc += ph * self.matrix(i1, i2)[(jn as usize, jm as usize)];
                        }
                    }
                    kernels.insert(((r, s), jn), acc / vol);
                }
            }
        }
        let hops: Vec<(i64, i64)> = (-radius..=radius).flat_map(|r| (-radius..=radius).map(move |s| (r, s))).collect();
        let op = LatticeOperator::from_fn(domain, &hops, |n, u| kernels[&(u, n.1.rem_euclid(q))]);
        Ok(op.with_hermitian_hint(true))
    }
}

/// Spectral projection onto eigenvalues below `mu` at every momentum.
pub fn fermi_projection(family: &BlochFamily, mu: f64) -> Result<BlochFamily> {
    if family.kind != FamilyKind::Hamiltonian {
        return Err(Error::InvalidArgument("fermi_projection needs a Hamiltonian family".into()));
    }
    let parts: Vec<(usize, f64, DMatrix<C64>)> = family
        .matrices
        .par_iter()
        .map(|m| {
            let (vals, vecs) = eigh(m);
            let rank = vals.iter().filter(|&&l| l < mu).count();
            let margin = vals.iter().map(|l| (l - mu).abs()).fold(f64::INFINITY, f64::min);
            let v = vecs.columns(0, rank);
            (rank, margin, &v * v.adjoint())
        })
        .collect();
    let margin = parts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    if margin <= GAP_MARGIN {
        return Err(Error::NotABulkGap(format!(
            "mu = {mu} is within {margin:.3e} of the spectrum of the flux {}/{} family",
            family.p, family.q
        )));
    }
    let rank = parts[0].0;
    if parts.iter().any(|p| p.0 != rank) {
        return Err(Error::NotABulkGap(format!(
            "mu = {mu} lies inside a band of the flux {}/{} family (rank varies over the grid)",
            family.p, family.q
        )));
    }
    Ok(BlochFamily {
        p: family.p,
        q: family.q,
        grid: family.grid,
        kind: FamilyKind::Projection,
        matrices: parts.into_iter().map(|p| p.2).collect(),
    })
}
