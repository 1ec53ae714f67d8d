use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::nctorus::xi::CONVERGENCE_TOL;
use crate::C64;

/// Element `sum_r D_r T^r` of the rotation algebra realized on a `K`-point
/// circle grid, where `(T phi)(x) = phi(x + theta)` shifts by `J = theta K`
/// grid steps and `D_r` are multiplication operators.
///
/// Products use `D_r T^r D_s T^s = D_r D_s(. + r theta) T^{r+s}`, which is exact
/// on the grid because the shift maps grid points to grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleOperator {
    k: usize,
    shift: usize,
    coeffs: BTreeMap<i64, Vec<C64>>,
}

impl CircleOperator {
    pub fn new(k: usize, shift: usize, coeffs: BTreeMap<i64, Vec<C64>>) -> Result<Self> {
        if k == 0 || coeffs.values().any(|c| c.len() != k) {
            return Err(Error::InvalidArgument(format!("circle coefficients must have {k} entries")));
        }
        Ok(CircleOperator { k, shift: shift % k, coeffs })
    }

    pub fn coefficients(&self) -> &BTreeMap<i64, Vec<C64>> {
        &self.coeffs
    }

    fn index(&self, j: usize, r: i64) -> usize {
        (j as i64 + r * self.shift as i64).rem_euclid(self.k as i64) as usize
    }

    pub fn mul(&self, other: &CircleOperator) -> CircleOperator {
        let mut out: BTreeMap<i64, Vec<C64>> = BTreeMap::new();
        for (&r, a) in &self.coeffs {
            for (&s, b) in &other.coeffs {
                let c = out.entry(r + s).or_insert_with(|| vec![C64::new(0.0, 0.0); self.k]);
                for j in 0..self.k {
                    c[j] += a[j] * b[self.index(j, r)];
                }
            }
        }
        CircleOperator { k: self.k, shift: self.shift, coeffs: out }
    }

    /// `(D T^r)^* = conj(D)(. - r theta) T^{-r}`.
    pub fn adjoint(&self) -> CircleOperator {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&r, a)| (-r, (0..self.k).map(|j| a[self.index(j, -r)].conj()).collect()))
            .collect();
        CircleOperator { k: self.k, shift: self.shift, coeffs }
    }

    pub fn sub(&self, other: &CircleOperator) -> CircleOperator {
        let mut coeffs = self.coeffs.clone();
        for (&r, b) in &other.coeffs {
            let c = coeffs.entry(r).or_insert_with(|| vec![C64::new(0.0, 0.0); self.k]);
            for (x, y) in c.iter_mut().zip(b) {
                *x -= y;
            }
        }
        CircleOperator { k: self.k, shift: self.shift, coeffs }
    }

    /// `nabla_1`: multiplies `T^r` by `-ir`.
    pub fn nabla1(&self) -> CircleOperator {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&r, a)| (r, a.iter().map(|x| x * C64::new(0.0, -(r as f64))).collect()))
            .collect();
        CircleOperator { k: self.k, shift: self.shift, coeffs }
    }

    /// Trace `tau(sum_r D_r T^r) = integral of D_0`, as a grid average.
    pub fn trace(&self) -> C64 {
        self.coeffs.get(&0).map_or(C64::new(0.0, 0.0), |c| c.iter().sum::<C64>() / self.k as f64)
    }

    /// `sum_r max |D_r|`, an upper bound for the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.coeffs.values().map(|c| c.iter().map(|x| x.norm()).fold(0.0, f64::max)).sum()
    }
}

/// Residuals of the defining relations of the Power-Rieffel projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureResiduals {
    /// `sum_r max |(p^2 - p)_r|`.
    pub projection: f64,
    /// `sum_r max |(p^* - p)_r|`.
    pub self_adjoint: f64,
    /// `max |d1(x + theta) d1(x)|`.
    pub shifted_product: f64,
    /// `max |d1(x) (d0(x) + d0(x + theta)) - d1(x)|`.
    pub partition: f64,
    /// `max |d0^2 + d1^2 + d1(x - theta)^2 - d0|`.
    pub diagonal: f64,
    /// `max |d1^2 - L (d0 - d0^2)|` with `L` the indicator of `supp d1`.
    pub support_identity: f64,
}

/// The Power-Rieffel projection `p = T^* d1 + d0 + d1 T` on a circle grid,
/// with its trace and Chern pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerRieffelRep {
    pub theta: f64,
    pub delta: f64,
    pub k: usize,
    /// Grid points `x_j = (j + 1/2) / K`.
    pub grid: Vec<f64>,
    pub d0: Vec<f64>,
    pub d1: Vec<f64>,
    pub projection: CircleOperator,
    pub residuals: StructureResiduals,
    pub trace: f64,
    /// `xi(p, p, p)` before rounding.
    pub chern_raw: C64,
    pub chern: i64,
    pub chern_residual: f64,
    pub chern_converged: bool,
}

/// Best rational approximation with denominator at most `max_den` that
/// reproduces `x` to 1e-12, by continued fractions.
fn rational(x: f64, max_den: i64) -> Option<(i64, i64)> {
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        let (h2, k2) = (a as i64 * h1 + h0, a as i64 * k1 + k0);
        if k2 > max_den {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= 1e-12 {
            return Some((h1, k1));
        }
        let frac = y - a;
        if frac.abs() < 1e-15 {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}

fn lcm(a: i64, b: i64) -> i64 {
    a / crate::geometry::gcd(a, b) * b
}

fn grid_integer(x: f64, k: usize) -> Option<usize> {
    let v = x * k as f64;
    let r = v.round();
    ((v - r).abs() <= 1e-9 * k as f64).then_some(r as usize)
}

/// Build the Power-Rieffel projection for `0 < delta < theta`,
/// `theta + delta < 1`, on a `K`-point circle grid with `theta K` and
/// `delta K` integers.
pub fn power_rieffel(theta: f64, delta: f64, k: usize) -> Result<PowerRieffelRep> {
    if !(delta > 0.0 && delta < theta && theta + delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < delta < theta and theta + delta < 1, got theta = {theta}, delta = {delta}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("circle grid size K must be positive".into()));
    }
    let (shift, _width) = match (grid_integer(theta, k), grid_integer(delta, k)) {
        (Some(j), Some(d)) => (j, d),
        _ => {
            let hint = match (rational(theta, 1_000_000), rational(delta, 1_000_000)) {
                (Some((_, a)), Some((_, b))) => {
                    let base = lcm(a, b);
                    let kk = base * ((k as i64 + base - 1) / base).max(1);
                    format!("; try K = {kk} (a multiple of {base})")
                }
                _ => "; theta and delta must be rational for a commensurate grid".to_string(),
            };
            return Err(Error::Commensurability(format!(
                "theta * K = {} and delta * K = {} must be integers for K = {k}{hint}",
                theta * k as f64,
                delta * k as f64
            )));
        }
    };
    let grid: Vec<f64> = (0..k).map(|j| (j as f64 + 0.5) / k as f64).collect();
    let f = |x: f64| {
        if x <= delta {
            x / delta
        } else if x < theta {
            1.0
        } else if x <= theta + delta {
            1.0 + (theta - x) / delta
        } else {
            0.0
        }
    };
    let df = |x: f64| {
        if x < delta {
            1.0 / delta
        } else if x < theta {
            0.0
        } else if x < theta + delta {
            -1.0 / delta
        } else {
            0.0
        }
    };
    let g = |x: f64| if x <= delta { (f(x) * (1.0 - f(x))).max(0.0).sqrt() } else { 0.0 };
    // g' = (1 - 2f) f' / (2g), finite at the midpoints of the grid.
    let dg = |x: f64| if x < delta { (1.0 - 2.0 * f(x)) * df(x) / (2.0 * g(x)) } else { 0.0 };

    let d0: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let d1: Vec<f64> = grid.iter().map(|&x| g(x)).collect();
    let minus_theta = |x: f64| (x - theta).rem_euclid(1.0);
    let plus_theta = |x: f64| (x + theta).rem_euclid(1.0);
    let cplx = |v: Vec<f64>| v.into_iter().map(|x| C64::new(x, 0.0)).collect::<Vec<_>>();

    let mut pc = BTreeMap::new();
    pc.insert(-1, cplx(grid.iter().map(|&x| g(minus_theta(x))).collect()));
    pc.insert(0, cplx(d0.clone()));
    pc.insert(1, cplx(d1.clone()));
    let p = CircleOperator::new(k, shift, pc)?;
    // nabla_2 = -(1/2pi) d/dx on the coefficient functions.
    let c = -1.0 / TAU;
    let mut gc = BTreeMap::new();
    gc.insert(-1, cplx(grid.iter().map(|&x| c * dg(minus_theta(x))).collect()));
    gc.insert(0, cplx(grid.iter().map(|&x| c * df(x)).collect()));
    gc.insert(1, cplx(grid.iter().map(|&x| c * dg(x)).collect()));
    let grad2 = CircleOperator::new(k, shift, gc)?;
    let grad1 = p.nabla1();

    let residuals = StructureResiduals {
        projection: p.mul(&p).sub(&p).norm_bound(),
        self_adjoint: p.adjoint().sub(&p).norm_bound(),
        shifted_product: grid.iter().map(|&x| (g(plus_theta(x)) * g(x)).abs()).fold(0.0, f64::max),
        partition: grid
            .iter()
            .map(|&x| (g(x) * (f(x) + f(plus_theta(x))) - g(x)).abs())
            .fold(0.0, f64::max),
        diagonal: grid
            .iter()
            .map(|&x| (f(x).powi(2) + g(x).powi(2) + g(minus_theta(x)).powi(2) - f(x)).abs())
            .fold(0.0, f64::max),
        support_identity: grid
            .iter()
            .map(|&x| {
                let l = if g(x) > 0.0 { 1.0 } else { 0.0 };
                (g(x).powi(2) - l * (f(x) - f(x).powi(2))).abs()
            })
            .fold(0.0, f64::max),
    };
    let curvature = grad1.mul(&grad2).sub(&grad2.mul(&grad1));
    let chern_raw = C64::new(0.0, TAU) * p.mul(&curvature).trace();
    let chern = chern_raw.re.round() as i64;
    let chern_residual = (chern_raw - C64::new(chern as f64, 0.0)).norm();
    Ok(PowerRieffelRep {
        theta,
        delta,
        k,
        grid,
        trace: p.trace().re,
        d0,
        d1,
        projection: p,
        residuals,
        chern_raw,
        chern,
        chern_residual,
        chern_converged: chern_residual <= CONVERGENCE_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_projection() {
        let rep = power_rieffel(1.0 / 3.0, 0.2, 15).unwrap();
        assert!(rep.residuals.projection <= 1e-10, "{:?}", rep.residuals);
        assert!(rep.residuals.self_adjoint <= 1e-12);
        assert!(rep.residuals.support_identity <= 1e-12);
        assert!((rep.trace - 1.0 / 3.0).abs() <= 1e-6);
    }

    #[test]
    fn structure_relations_and_pairings() {
        let rep = power_rieffel(1.0 / 3.0, 0.2, 600).unwrap();
        let r = rep.residuals;
        for x in [r.projection, r.shifted_product, r.partition, r.diagonal] {
            assert!(x <= 1e-10);
        }
        assert!((rep.trace - 1.0 / 3.0).abs() <= 1e-6);
        assert_eq!(rep.chern, 1);
        assert!(rep.chern_residual <= 0.05, "{:?}", rep.chern_raw);
    }

    #[test]
    fn f_is_one_between_delta_and_theta() {
        let rep = power_rieffel(1.0 / 3.0, 0.2, 15).unwrap();
        for (x, f) in rep.grid.iter().zip(&rep.d0) {
            if *x > 0.2 && *x < 1.0 / 3.0 {
                assert_eq!(*f, 1.0);
            }
        }
    }

    #[test]
    fn trace_converges_for_large_grids() {
        for k in [120, 240, 600] {
            let rep = power_rieffel(0.4, 0.25, k).unwrap();
            assert!((rep.trace - 0.4).abs() <= 1e-6);
        }
    }

    #[test]
    fn commensurability_errors_suggest_a_grid() {
        let e = power_rieffel(1.0 / 3.0, 0.2, 16).unwrap_err();
        match e {
            Error::Commensurability(msg) => assert!(msg.contains("K = 30"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(power_rieffel(0.3, 0.3, 10), Err(Error::InvalidArgument(_))));
        assert!(matches!(power_rieffel(0.8, 0.3, 10), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn circle_algebra_products() {
        let k = 6;
        let mut a = BTreeMap::new();
        a.insert(1, (0..k).map(|j| C64::new(j as f64, 1.0)).collect::<Vec<_>>());
        let a = CircleOperator::new(k, 2, a).unwrap();
        // (D T)(D T)^* = D D^* at the same point.
        let aa = a.mul(&a.adjoint());
        assert_eq!(aa.coefficients().keys().copied().collect::<Vec<_>>(), vec![0]);
        for (j, x) in aa.coefficients()[&0].iter().enumerate() {
            assert!((x - C64::new((j * j) as f64 + 1.0, 0.0)).norm() < 1e-12);
        }
        assert!(CircleOperator::new(k, 2, BTreeMap::from([(0, vec![C64::new(1.0, 0.0); 3])])).is_err());
    }
}
