use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fields::MagneticField;
use crate::C64;

/// Bloch-Floquet phase `f` on `[-M, M]` with `f(0) = 0` and
/// `f(m) - f(m - 1) = B(m, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BFPhase {
    half_width: usize,
    values: Vec<f64>,
}

impl BFPhase {
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// `f(m)` for `|m| <= M`.
    pub fn at(&self, m: i64) -> f64 {
        self.values[(m + self.half_width as i64) as usize]
    }

    /// Values `f(-M), ..., f(M)`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn bf_phase(field: &MagneticField, half_width: usize) -> Result<BFPhase> {
    if !field.is_vertically_invariant() {
        return Err(Error::InvalidField(format!(
            "the Bloch-Floquet reduction needs a vertically invariant field, got {:?}",
            field.kind()
        )));
    }
    let mw = half_width as i64;
    let mut values = vec![0.0; 2 * half_width + 1];
    for m in 1..=mw {
        values[(m + mw) as usize] = values[(m - 1 + mw) as usize] + field.at((m, 0));
    }
    for m in (-mw + 1..=0).rev() {
        values[(m - 1 + mw) as usize] = values[(m + mw) as usize] - field.at((m, 0));
    }
    Ok(BFPhase { half_width, values })
}

/// Harper fiber `h(k)` on the strip `[-M, M]` with open ends and its exact
/// `k`-derivative, which is diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberOperator {
    pub k: f64,
    pub half_width: usize,
    /// Real symmetric matrix, rows indexed by `m + M`.
    pub matrix: DMatrix<f64>,
    /// Diagonal of `dh/dk`.
    pub derivative: Vec<f64>,
}

impl FiberOperator {
    pub fn dim(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn to_complex(&self) -> DMatrix<C64> {
        self.matrix.map(|x| C64::new(x, 0.0))
    }
}

/// Fiber from a precomputed phase: off-diagonals 1, diagonal `2cos(k - f(m))`.
pub fn fiber_from_phase(phase: &BFPhase, k: f64) -> FiberOperator {
    let n = 2 * phase.half_width + 1;
    let mut h = DMatrix::zeros(n, n);
    let mut derivative = vec![0.0; n];
    for (i, &f) in phase.values.iter().enumerate() {
        h[(i, i)] = 2.0 * (k - f).cos();
        derivative[i] = -2.0 * (k - f).sin();
        if i + 1 < n {
            h[(i, i + 1)] = 1.0;
            h[(i + 1, i)] = 1.0;
        }
    }
    FiberOperator { k, half_width: phase.half_width, matrix: h, derivative }
}

pub fn fiber_hamiltonian(field: &MagneticField, k: f64, half_width: usize) -> Result<FiberOperator> {
    Ok(fiber_from_phase(&bf_phase(field, half_width)?, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigh_real;
    use crate::nctorus::harper_bloch_matrix;
    use crate::linalg::eigh;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn phases() {
        let b = 0.7;
        let c = bf_phase(&MagneticField::constant(b).unwrap(), 5).unwrap();
        for m in -5..=5 {
            assert!((c.at(m) - m as f64 * b).abs() < 1e-14);
        }
        let z = bf_phase(&MagneticField::constant(0.0).unwrap(), 3).unwrap();
        assert!(z.values().iter().all(|&x| x == 0.0));
        let (bm, b0, bp) = (0.3, 1.1, 2.0);
        let iw = bf_phase(&MagneticField::iwatsuka(bm, b0, bp).unwrap(), 6).unwrap();
        for m in -6..=6i64 {
            let want = if m >= 0 { m as f64 * bp } else { (m + 1) as f64 * bm - b0 };
            assert!((iw.at(m) - want).abs() < 1e-13);
        }
        assert_eq!(iw.at(0), 0.0);
        assert!(bf_phase(&MagneticField::localized([(0, 0)], 1.0).unwrap(), 3).is_err());
    }

    #[test]
    fn fiber_structure() {
        let f = MagneticField::iwatsuka(0.0, PI / 3.0, 2.0 * PI / 3.0).unwrap();
        let phase = bf_phase(&f, 8).unwrap();
        let h = fiber_hamiltonian(&f, 0.9, 8).unwrap();
        for m in -8..=8i64 {
            let i = (m + 8) as usize;
            assert!((h.matrix[(i, i)] - 2.0 * (0.9 - phase.at(m)).cos()).abs() < 1e-15);
        }
        assert_eq!(h.matrix, h.matrix.transpose());
        let h2 = fiber_hamiltonian(&f, 0.9 + TAU, 8).unwrap();
        assert!((&h.matrix - &h2.matrix).iter().all(|x| x.abs() < 1e-13));
        // Derivative against a central difference.
        let e = 1e-6;
        let hp = fiber_hamiltonian(&f, 0.9 + e, 8).unwrap();
        let hm = fiber_hamiltonian(&f, 0.9 - e, 8).unwrap();
        for i in 0..17 {
            let fd = (hp.matrix[(i, i)] - hm.matrix[(i, i)]) / (2.0 * e);
            assert!((fd - h.derivative[i]).abs() < 1e-8);
        }
    }

    /// Bulk-like strip states at constant flux lie inside the Bloch bands at
    /// the same momentum; in K2 the band edges sit at K2 = 0 and K2 = pi.
    #[test]
    fn fiber_matches_bloch_bands() {
        for (p, q) in [(1i64, 3i64), (2, 5)] {
            let b = TAU * p as f64 / q as f64;
            let m = 10 * q as usize;
            let field = MagneticField::constant(b).unwrap();
            for k in [0.0, 0.4, 1.3, 2.9] {
                let h = fiber_hamiltonian(&field, k, m).unwrap();
                let (vals, vecs) = eigh_real(&h.matrix);
                let e0 = eigh(&harper_bloch_matrix(p, q, k, 0.0)).0;
                let e1 = eigh(&harper_bloch_matrix(p, q, k, PI)).0;
                let bands: Vec<(f64, f64)> = e0.iter().zip(&e1).map(|(a, c)| (a.min(*c), a.max(*c))).collect();
                for (j, &l) in vals.iter().enumerate() {
                    let central: f64 = (0..h.dim())
                        .filter(|&i| (i as i64 - m as i64).abs() <= m as i64 / 2)
                        .map(|i| vecs[(i, j)].powi(2))
                        .sum();
                    if central >= 0.5 {
                        let dist = bands.iter().map(|&(lo, hi)| if l < lo { lo - l } else if l > hi { l - hi } else { 0.0 }).fold(f64::INFINITY, f64::min);
                        assert!(dist <= 1e-8, "flux {p}/{q}, k {k}: level {l} is {dist} from the bands");
                    }
                }
            }
        }
    }
}
