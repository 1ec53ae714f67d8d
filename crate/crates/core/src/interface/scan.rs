use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::MagneticField;
use crate::interface::family::{divided_difference, switch_phase, uniform_grid, Winding};
use crate::interface::fiber::{bf_phase, fiber_from_phase};
use crate::interface::spectrum::{interface_weight, SpectrumTable};
use crate::interface::switch::SwitchFunction;
use crate::linalg::eigh_real;
use crate::C64;

/// Windings of `exp(i 2 pi g(h(k)))` for several switches and filters together
/// with the strip spectrum, from one diagonalization per k.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceScan {
    pub spectrum: SpectrumTable,
    /// Indexed `[switch][filter]`.
    pub windings: Vec<Vec<Winding>>,
}

/// `tr(chi u^* du)` at one k, without forming `u`.
///
/// With `h = V diag(l) V^T`, `X = V^T h' V`, `C = V^T chi V` and divided
/// differences `L`, the trace is `sum_{n,m} C_mn conj(phi_n) L_nm X_nm`.
/// `L_nm` vanishes unless `n` or `m` is in the active set `S`, and
/// `phi_n = 1` off `S`, so only the columns of `S` are needed.
fn density(l: &[f64], v: &nalgebra::DMatrix<f64>, dh: &[f64], g: &SwitchFunction, filters: &[usize], half_width: usize) -> Vec<C64> {
    let n = l.len();
    let active: Vec<usize> = (0..n).filter(|&i| g.is_active(l[i])).collect();
    let mut out = vec![C64::new(0.0, 0.0); filters.len()];
    if active.is_empty() {
        return out;
    }
    let ph: Vec<(C64, C64)> = l.iter().map(|&e| switch_phase(g, e)).collect();
    let mut in_s = vec![false; n];
    for &s in &active {
        in_s[s] = true;
    }
    let mut w = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut c = vec![0.0; n];
    for &s in &active {
        for i in 0..n {
            w[i] = dh[i] * v[(i, s)];
        }
        for (m, xm) in x.iter_mut().enumerate() {
            *xm = v.column(m).iter().zip(&w).map(|(a, b)| a * b).sum();
        }
        let lsm: Vec<C64> = (0..n).map(|m| divided_difference(l[s], l[m], ph[s], ph[m])).collect();
        for (fi, &wf) in filters.iter().enumerate() {
            let lo = half_width - wf;
            let hi = half_width + wf;
            for (m, cm) in c.iter_mut().enumerate() {
                *cm = (lo..=hi).map(|i| v[(i, m)] * v[(i, s)]).sum();
            }
            let mut own = C64::new(0.0, 0.0);
            let mut rest = C64::new(0.0, 0.0);
            for m in 0..n {
                let t = lsm[m] * (c[m] * x[m]);
                own += t;
                if !in_s[m] {
                    rest += t;
                }
            }
            out[fi] += ph[s].0.conj() * own + rest;
        }
    }
    out
}

pub fn interface_scan(
    field: &MagneticField,
    half_width: usize,
    k_points: usize,
    switches: &[SwitchFunction],
    filters: &[usize],
) -> Result<InterfaceScan> {
    if k_points < 3 {
        return Err(Error::InvalidArgument(format!("k grid needs at least 3 points, got {k_points}")));
    }
    if let Some(&f) = filters.iter().find(|&&f| f == 0 || f > half_width) {
        return Err(Error::InvalidArgument(format!("filter half-width must lie in 1..={half_width}, got {f}")));
    }
    let phase = bf_phase(field, half_width)?;
    let ks = uniform_grid(k_points);
    let samples: Vec<(Vec<f64>, Vec<f64>, Vec<Vec<C64>>)> = ks
        .par_iter()
        .map(|&k| {
            let fiber = fiber_from_phase(&phase, k);
            let (l, v) = eigh_real(&fiber.matrix);
            let weights = (0..l.len()).map(|j| interface_weight(&v, j, half_width)).collect();
            let dens = switches.iter().map(|g| density(&l, &v, &fiber.derivative, g, filters, half_width)).collect();
            (l, weights, dens)
        })
        .collect();
    let mut sums = vec![vec![C64::new(0.0, 0.0); filters.len()]; switches.len()];
    for (_, _, d) in &samples {
        for (acc, row) in sums.iter_mut().zip(d) {
            for (a, x) in acc.iter_mut().zip(row) {
                *a += x;
            }
        }
    }
    let scale = C64::new(0.0, -1.0 / k_points as f64);
    let windings = sums.iter().map(|row| row.iter().map(|&s| Winding::from_pairing(scale * s)).collect()).collect();
    let (energies, weights) = samples.into_iter().map(|(l, w, _)| (l, w)).unzip();
    Ok(InterfaceScan { spectrum: SpectrumTable::new(ks, energies, weights)?, windings })
}
