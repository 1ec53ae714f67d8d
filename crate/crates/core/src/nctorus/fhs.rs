use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::eigh;
use crate::nctorus::{BlochFamily, FamilyKind};
use crate::C64;

/// Orthonormal frame of the range of a projection.
fn frame(p: &DMatrix<C64>) -> DMatrix<C64> {
    let (vals, vecs) = eigh(p);
    let cols: Vec<_> = vals
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0.5)
        .map(|(i, _)| vecs.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(p.nrows(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

fn link(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let d = (a.adjoint() * b).determinant();
    let n = d.norm();
    if n > 0.0 {
        d / n
    } else {
        d
    }
}

/// Total Berry flux of a projection family divided by `2*pi`, from the
/// lattice field strength of Fukui, Hatsugai and Suzuki.
///
/// Plaquettes are traversed as `U2(k) U1(k + e2) conj(U2(k + e1)) conj(U1(k))`,
/// which matches the orientation of the cocycle `xi_b` with `nabla_j = i[., n_j]`.
pub fn berry_flux(projections: &BlochFamily) -> Result<f64> {
    if projections.kind() != FamilyKind::Projection {
        return Err(Error::InvalidArgument("chern_fhs needs a projection family".into()));
    }
    let (n1, n2) = projections.grid();
    let frames: Vec<DMatrix<C64>> = projections.matrices().par_iter().map(frame).collect();
    let rank = frames[0].ncols();
    if let Some(f) = frames.iter().find(|f| f.ncols() != rank) {
        return Err(Error::RankJump(format!("projection rank changes from {rank} to {} over the grid", f.ncols())));
    }
    if rank == 0 {
        return Ok(0.0);
    }
    let at = |i1: usize, i2: usize| &frames[(i1 % n1) * n2 + (i2 % n2)];
    let flux: Vec<f64> = (0..n1 * n2)
        .into_par_iter()
        .map(|idx| {
            let (i1, i2) = (idx / n2, idx % n2);
            let u1 = link(at(i1, i2), at(i1 + 1, i2));
            let u2 = link(at(i1, i2), at(i1, i2 + 1));
            let u1_up = link(at(i1, i2 + 1), at(i1 + 1, i2 + 1));
            let u2_right = link(at(i1 + 1, i2), at(i1 + 1, i2 + 1));
            (u2 * u1_up * u2_right.conj() * u1.conj()).arg()
        })
        .collect();
    Ok(flux.iter().sum::<f64>() / TAU)
}

/// Chern number of a gapped projection family.
pub fn chern_fhs(projections: &BlochFamily) -> Result<i64> {
    Ok(berry_flux(projections)?.round() as i64)
}
