use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::MagneticField;
use crate::interface::family::uniform_grid;
use crate::interface::fiber::{bf_phase, fiber_from_phase};
use crate::linalg::eigh_real;

/// Separation below which two high-weight levels make a crossing ambiguous.
pub const AMBIGUITY_TOL: f64 = 1e-8;

pub const DEFAULT_WEIGHT_THRESHOLD: f64 = 0.5;

/// One row of a spectrum table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumRow {
    pub k: f64,
    pub index: usize,
    pub energy: f64,
    pub interface_weight: f64,
}

/// Strip spectrum over a k grid; levels ascending at every k.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTable {
    ks: Vec<f64>,
    energies: Vec<Vec<f64>>,
    weights: Vec<Vec<f64>>,
}

impl SpectrumTable {
    pub fn new(ks: Vec<f64>, energies: Vec<Vec<f64>>, weights: Vec<Vec<f64>>) -> Result<Self> {
        let levels = energies.first().map_or(0, Vec::len);
        if ks.is_empty()
            || energies.len() != ks.len()
            || weights.len() != ks.len()
            || energies.iter().chain(&weights).any(|r| r.len() != levels)
        {
            return Err(Error::InvalidArgument("spectrum table rows are ragged".into()));
        }
        if energies.iter().any(|r| r.windows(2).any(|w| w[0] > w[1])) {
            return Err(Error::InvalidArgument("energies must be ascending at every k".into()));
        }
        Ok(SpectrumTable { ks, energies, weights })
    }

    /// Rebuilds a table from rows grouped by k in index order.
    pub fn from_rows(rows: &[SpectrumRow]) -> Result<Self> {
        let mut ks = Vec::new();
        let mut energies: Vec<Vec<f64>> = Vec::new();
        let mut weights: Vec<Vec<f64>> = Vec::new();
        for r in rows {
            if r.index == 0 {
                ks.push(r.k);
                energies.push(Vec::new());
                weights.push(Vec::new());
            }
            match (energies.last_mut(), weights.last_mut()) {
                (Some(e), Some(w)) if e.len() == r.index && ks.last() == Some(&r.k) => {
                    e.push(r.energy);
                    w.push(r.interface_weight);
                }
                _ => return Err(Error::InvalidArgument(format!("unexpected row {r:?}"))),
            }
        }
        Self::new(ks, energies, weights)
    }

    pub fn ks(&self) -> &[f64] {
        &self.ks
    }

    pub fn levels(&self) -> usize {
        self.energies[0].len()
    }

    pub fn energies(&self) -> &[Vec<f64>] {
        &self.energies
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn rows(&self) -> impl Iterator<Item = SpectrumRow> + '_ {
        self.ks.iter().enumerate().flat_map(move |(j, &k)| {
            (0..self.levels()).map(move |i| SpectrumRow {
                k,
                index: i,
                energy: self.energies[j][i],
                interface_weight: self.weights[j][i],
            })
        })
    }
}

/// `sum_{|m| <= M/2} |psi(m)|^2` for column `j` of `v`.
pub(crate) fn interface_weight(v: &nalgebra::DMatrix<f64>, j: usize, half_width: usize) -> f64 {
    let c = half_width as i64;
    let r = c / 2;
    ((c - r) as usize..=(c + r) as usize).map(|i| v[(i, j)] * v[(i, j)]).sum()
}

pub fn interface_spectrum(field: &MagneticField, k_grid: usize, half_width: usize) -> Result<SpectrumTable> {
    if k_grid < 3 {
        return Err(Error::InvalidArgument(format!("k grid needs at least 3 points, got {k_grid}")));
    }
    let phase = bf_phase(field, half_width)?;
    let ks = uniform_grid(k_grid);
    let (energies, weights): (Vec<_>, Vec<_>) = ks
        .par_iter()
        .map(|&k| {
            let (l, v) = eigh_real(&fiber_from_phase(&phase, k).matrix);
            let w = (0..l.len()).map(|j| interface_weight(&v, j, half_width)).collect();
            (l, w)
        })
        .unzip();
    SpectrumTable::new(ks, energies, weights)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Crossing {
    /// The crossing lies between `k[k_index]` and the next grid point (cyclically).
    pub k_index: usize,
    pub level: usize,
    /// `+1` for increasing energy, `-1` for decreasing.
    pub direction: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFlow {
    pub value: i64,
    pub ambiguous: bool,
    pub crossings: Vec<Crossing>,
}

/// Signed count of interface-weighted level crossings of `mu` over the
/// periodic k grid; a level counts when the mean weight at the two ends of
/// the step reaches `threshold`.
pub fn spectral_flow(table: &SpectrumTable, mu: f64, threshold: f64) -> Result<SpectralFlow> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!("weight threshold must lie in (0, 1), got {threshold}")));
    }
    let n = table.ks.len();
    let levels = table.levels();
    let mut crossings = Vec::new();
    let mut ambiguous = false;
    for j in 0..n {
        let next = (j + 1) % n;
        let (e0, e1) = (&table.energies[j], &table.energies[next]);
        let (w0, w1) = (&table.weights[j], &table.weights[next]);
        for l in 0..levels {
            let direction = if e0[l] < mu && e1[l] >= mu {
                1
            } else if e0[l] >= mu && e1[l] < mu {
                -1
            } else {
                continue;
            };
            if 0.5 * (w0[l] + w1[l]) < threshold {
                continue;
            }
            crossings.push(Crossing { k_index: j, level: l, direction });
            for (e, w) in [(e0, w0), (e1, w1)] {
                for m in [l.wrapping_sub(1), l + 1] {
                    if m < levels && w[m] >= threshold && (e[m] - e[l]).abs() < AMBIGUITY_TOL {
                        ambiguous = true;
                    }
                }
            }
        }
    }
    Ok(SpectralFlow { value: crossings.iter().map(|c| c.direction).sum(), ambiguous, crossings })
}
