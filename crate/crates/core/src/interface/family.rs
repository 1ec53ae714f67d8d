use std::f64::consts::TAU;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::interface::fiber::FiberOperator;
use crate::interface::switch::SwitchFunction;
use crate::linalg::eigh_real;
use crate::C64;

/// Below this eigenvalue separation divided differences fall back to the
/// mean of the derivatives.
pub(crate) const DEGENERACY_TOL: f64 = 1e-9;

/// Tolerance on `|W - round(W)|` above which a winding is flagged.
pub const INTEGRALITY_TOL: f64 = 0.1;

const UNITARITY_TOL: f64 = 1e-8;

/// Operator family over a uniform closed grid `k_j = k_0 + 2 pi j / N` on the
/// strip `[-M, M]`, optionally carrying the exact `k`-derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberFamily {
    half_width: usize,
    ks: Vec<f64>,
    values: Vec<DMatrix<C64>>,
    derivatives: Option<Vec<DMatrix<C64>>>,
}

fn check_grid(ks: &[f64]) -> Result<()> {
    if ks.len() < 3 {
        return Err(Error::InvalidArgument(format!("k grid needs at least 3 points, got {}", ks.len())));
    }
    let step = TAU / ks.len() as f64;
    for (j, &k) in ks.iter().enumerate() {
        if (k - ks[0] - step * j as f64).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "k grid is not uniform and closed: k[{j}] = {k}, expected {}",
                ks[0] + step * j as f64
            )));
        }
    }
    Ok(())
}

/// `k_j = 2 pi j / N`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

impl FiberFamily {
    pub fn new(
        half_width: usize,
        ks: Vec<f64>,
        values: Vec<DMatrix<C64>>,
        derivatives: Option<Vec<DMatrix<C64>>>,
    ) -> Result<Self> {
        check_grid(&ks)?;
        let n = 2 * half_width + 1;
        let shapes_ok = |v: &[DMatrix<C64>]| v.len() == ks.len() && v.iter().all(|m| m.shape() == (n, n));
        if !shapes_ok(&values) || !derivatives.as_deref().map_or(true, shapes_ok) {
            return Err(Error::InvalidArgument(format!(
                "family needs {} matrices of size {n}x{n}",
                ks.len()
            )));
        }
        Ok(FiberFamily { half_width, ks, values, derivatives })
    }

    pub fn constant(half_width: usize, k_points: usize, value: DMatrix<C64>) -> Result<Self> {
        let zero = DMatrix::zeros(value.nrows(), value.ncols());
        Self::new(half_width, uniform_grid(k_points), vec![value; k_points], Some(vec![zero; k_points]))
    }

    pub fn identity(half_width: usize, k_points: usize) -> Result<Self> {
        let n = 2 * half_width + 1;
        Self::constant(half_width, k_points, DMatrix::identity(n, n))
    }

    /// `1 + pi_0 (e^{sign i k} - 1)` with `pi_0` the projection onto `m = 0`.
    fn generator(half_width: usize, k_points: usize, sign: f64) -> Result<Self> {
        let n = 2 * half_width + 1;
        let ks = uniform_grid(k_points);
        let c = half_width;
        let mut values = Vec::with_capacity(k_points);
        let mut derivatives = Vec::with_capacity(k_points);
        for &k in &ks {
            let mut u = DMatrix::identity(n, n);
            u[(c, c)] = C64::from_polar(1.0, sign * k);
            let mut du = DMatrix::zeros(n, n);
            du[(c, c)] = C64::new(0.0, sign) * C64::from_polar(1.0, sign * k);
            values.push(u);
            derivatives.push(du);
        }
        Self::new(half_width, ks, values, Some(derivatives))
    }

    /// The interface generator `w_I`.
    pub fn interface_generator(half_width: usize, k_points: usize) -> Result<Self> {
        Self::generator(half_width, k_points, 1.0)
    }

    /// `w_I^*`.
    pub fn conjugate_generator(half_width: usize, k_points: usize) -> Result<Self> {
        Self::generator(half_width, k_points, -1.0)
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn ks(&self) -> &[f64] {
        &self.ks
    }

    pub fn values(&self) -> &[DMatrix<C64>] {
        &self.values
    }

    pub fn derivatives(&self) -> Option<&[DMatrix<C64>]> {
        self.derivatives.as_deref()
    }

    /// The same samples without derivatives, so pairings use finite differences.
    pub fn without_derivatives(&self) -> Self {
        FiberFamily { derivatives: None, ..self.clone() }
    }

    pub fn adjoint(&self) -> Self {
        FiberFamily {
            half_width: self.half_width,
            ks: self.ks.clone(),
            values: self.values.iter().map(|m| m.adjoint()).collect(),
            derivatives: self.derivatives.as_ref().map(|d| d.iter().map(|m| m.adjoint()).collect()),
        }
    }

    /// `max_k ||u^* u - 1||` in the max-entry norm.
    pub fn unitarity_residual(&self) -> f64 {
        self.values
            .iter()
            .map(|u| {
                let e = u.adjoint() * u - DMatrix::<C64>::identity(u.nrows(), u.ncols());
                e.iter().map(|x| x.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `max_k` operator norm of `u(k) - 1` restricted to the rows `m` with
    /// `keep(|m|)`.
    pub fn row_deviation(&self, keep: impl Fn(usize) -> bool) -> f64 {
        let n = 2 * self.half_width + 1;
        let rows: Vec<usize> = (0..n).filter(|&i| keep((i as i64 - self.half_width as i64).unsigned_abs() as usize)).collect();
        self.values
            .iter()
            .map(|u| {
                let mut d = DMatrix::<C64>::zeros(rows.len(), n);
                for (r, &i) in rows.iter().enumerate() {
                    for j in 0..n {
                        d[(r, j)] = u[(i, j)] - if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                    }
                }
                crate::lattice::operator_norm(&d)
            })
            .fold(0.0, f64::max)
    }

    /// `d b/dk` at grid point `j`: exact when available, else a periodic
    /// central difference.
    fn derivative_at(&self, j: usize) -> DMatrix<C64> {
        match &self.derivatives {
            Some(d) => d[j].clone(),
            None => {
                let n = self.ks.len();
                let dk = TAU / n as f64;
                (&self.values[(j + 1) % n] - &self.values[(j + n - 1) % n]) / C64::new(2.0 * dk, 0.0)
            }
        }
    }
}

/// Filtered trace `tr(chi a)` with `chi` the indicator of `|m| <= W_f`.
fn filtered_trace(a: &DMatrix<C64>, half_width: usize, filter: usize) -> C64 {
    let lo = half_width.saturating_sub(filter);
    let hi = (half_width + filter).min(a.nrows() - 1);
    (lo..=hi).map(|i| a[(i, i)]).sum()
}

fn check_filter(half_width: usize, filter: usize) -> Result<()> {
    if filter == 0 || filter > half_width {
        return Err(Error::InvalidArgument(format!("filter half-width must lie in 1..={half_width}, got {filter}")));
    }
    Ok(())
}

/// Interface cocycle `eta(b0, b1) = -(i / 2 pi) sum_j dk tr(chi b0(k_j) d b1(k_j))`.
pub fn eta_pairing(b0: &FiberFamily, b1: &FiberFamily, filter: usize) -> Result<C64> {
    if b0.half_width != b1.half_width || b0.ks.len() != b1.ks.len() || (b0.ks[0] - b1.ks[0]).abs() > 1e-12 {
        return Err(Error::InvalidArgument("eta pairing needs families on the same strip and k grid".into()));
    }
    check_filter(b0.half_width, filter)?;
    let n = b0.ks.len();
    let sum: C64 = (0..n)
        .map(|j| filtered_trace(&(&b0.values[j] * b1.derivative_at(j)), b0.half_width, filter))
        .sum();
    Ok(C64::new(0.0, -1.0) * sum / n as f64)
}

/// Winding number of a unitary family with its integer rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Winding {
    pub raw: f64,
    /// Imaginary part of the pairing, zero up to quadrature error.
    pub imag: f64,
    pub integer: i64,
    /// `|raw - integer|`.
    pub residual: f64,
    /// `residual <= INTEGRALITY_TOL`.
    pub converged: bool,
}

impl Winding {
    pub(crate) fn from_pairing(value: C64) -> Self {
        let integer = value.re.round() as i64;
        let residual = (value.re - integer as f64).abs();
        Winding { raw: value.re, imag: value.im, integer, residual, converged: residual <= INTEGRALITY_TOL }
    }
}

/// `W(u) = eta(u^*, u)`, normalized so that `w_I` has winding `+1`.
pub fn winding_number(u: &FiberFamily, filter: usize) -> Result<Winding> {
    let res = u.unitarity_residual();
    if res > UNITARITY_TOL {
        return Err(Error::InvalidArgument(format!("family is not unitary: ||u*u - 1|| = {res:e}")));
    }
    Ok(Winding::from_pairing(eta_pairing(&u.adjoint(), u, filter)?))
}

/// Per-eigenvalue data of `e^{i 2 pi g}`: phase and its energy derivative.
pub(crate) fn switch_phase(g: &SwitchFunction, e: f64) -> (C64, C64) {
    if !g.is_active(e) {
        return (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    }
    let phi = C64::from_polar(1.0, TAU * g.value(e));
    (phi, C64::new(0.0, TAU * g.derivative(e)) * phi)
}

/// Divided difference `(phi_a - phi_b) / (l_a - l_b)`.
pub(crate) fn divided_difference(la: f64, lb: f64, a: (C64, C64), b: (C64, C64)) -> C64 {
    if (la - lb).abs() < DEGENERACY_TOL {
        (a.1 + b.1) * 0.5
    } else {
        (a.0 - b.0) / (la - lb)
    }
}

/// Gap unitary `u(k) = exp(i 2 pi g(h(k)))` with its exact derivative
/// `V (L o V^T h' V) V^T`, `L` the divided differences of the phase.
pub fn u_delta(fibers: &[FiberOperator], g: &SwitchFunction) -> Result<FiberFamily> {
    let first = fibers.first().ok_or_else(|| Error::InvalidArgument("no fibers".into()))?;
    let half_width = first.half_width;
    if fibers.iter().any(|f| f.half_width != half_width) {
        return Err(Error::InvalidArgument("fibers must share the strip half-width".into()));
    }
    let ks: Vec<f64> = fibers.iter().map(|f| f.k).collect();
    check_grid(&ks)?;
    let (values, derivatives): (Vec<_>, Vec<_>) = fibers
        .iter()
        .map(|f| {
            let (l, v) = eigh_real(&f.matrix);
            let v = v.map(|x| C64::new(x, 0.0));
            let ph: Vec<(C64, C64)> = l.iter().map(|&e| switch_phase(g, e)).collect();
            let u = &v * DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(l.len(), ph.iter().map(|p| p.0))) * v.transpose();
            let dh = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(l.len(), f.derivative.iter().map(|&x| C64::new(x, 0.0))));
            let mut x = v.transpose() * dh * &v;
            for a in 0..l.len() {
                for b in 0..l.len() {
                    x[(a, b)] *= divided_difference(l[a], l[b], ph[a], ph[b]);
                }
            }
            (u, &v * x * v.transpose())
        })
        .unzip();
    FiberFamily::new(half_width, ks, values, Some(derivatives))
}
