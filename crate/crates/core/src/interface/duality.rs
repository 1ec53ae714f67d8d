use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::fields::MagneticField;
use crate::geometry::gcd;
use crate::interface::scan::interface_scan;
use crate::interface::spectrum::{spectral_flow, DEFAULT_WEIGHT_THRESHOLD};
use crate::interface::switch::{Ramp, SwitchFunction};
use crate::linalg::eigh;
use crate::nctorus::{chern_fhs, fermi_projection, harper_bloch_family, harper_bloch_matrix, GAP_MARGIN};

/// Rational flux `2 pi p / q` per plaquette, stored in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Flux {
    p: i64,
    q: i64,
}

impl Flux {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("flux denominator must be nonzero".into()));
        }
        let g = gcd(p, q).max(1) * q.signum();
        Ok(Flux { p: p / g, q: q / g })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// `2 pi p / q`.
    pub fn value(&self) -> f64 {
        TAU * self.p as f64 / self.q as f64
    }

    fn same_phase(&self, other: &Flux) -> bool {
        self.q == other.q && (self.p - other.p).rem_euclid(self.q) == 0
    }
}

/// Band ranges over the Brillouin-zone grid, widened by the exact band edges.
///
/// The Harper characteristic polynomial depends on the momenta only through
/// `cos(q k1) + cos(K2)`, so every band edge is attained at
/// `(k1, K2) in {0, pi/q} x {0, pi}`.
fn band_ranges(flux: Flux, grid: (usize, usize)) -> Result<Vec<(f64, f64)>> {
    let mut bands = harper_bloch_family(flux.p, flux.q, grid)?.band_ranges();
    for k1 in [0.0, PI / flux.q as f64] {
        for k2 in [0.0, PI] {
            for (b, e) in bands.iter_mut().zip(eigh(&harper_bloch_matrix(flux.p, flux.q, k1, k2)).0) {
                *b = (b.0.min(e), b.1.max(e));
            }
        }
    }
    Ok(bands)
}

/// Bounded open intervals free of the spectrum of every listed flux.
pub fn common_gaps(fluxes: &[Flux], grid: (usize, usize)) -> Result<Vec<(f64, f64)>> {
    let mut bands = Vec::new();
    for &f in fluxes {
        bands.extend(band_ranges(f, grid)?);
    }
    bands.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gaps = Vec::new();
    let mut top = f64::NEG_INFINITY;
    for (j, &(lo, hi)) in bands.iter().enumerate() {
        if j > 0 && lo > top + 2.0 * GAP_MARGIN {
            gaps.push((top, lo));
        }
        top = top.max(hi);
    }
    Ok(gaps)
}

/// Widest gap; widths equal up to rounding go to the lowest gap, since
/// spectra symmetric under `E -> -E` tie exactly in exact arithmetic.
fn widest_gap(gaps: &[(f64, f64)]) -> Option<(f64, f64)> {
    let widest = gaps.iter().map(|g| g.1 - g.0).fold(f64::NEG_INFINITY, f64::max);
    gaps.iter().copied().find(|g| g.1 - g.0 >= widest - 1e-9)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityConfig {
    pub b_minus: Flux,
    pub b_zero: f64,
    pub b_plus: Flux,
    /// Switch window; the middle half of the widest common gap when absent.
    pub delta: Option<(f64, f64)>,
    /// Chemical potential; the midpoint of `delta` when absent.
    pub mu: Option<f64>,
    pub half_width: usize,
    pub k_points: usize,
    /// Filter half-width; `half_width / 2` when absent.
    pub filter: Option<usize>,
    pub ramp: Ramp,
    pub bz_grid: (usize, usize),
    pub weight_threshold: f64,
    /// Run even when `e^{i b_-} = e^{i b_+}`.
    pub force: bool,
}

impl DualityConfig {
    pub fn new(b_minus: Flux, b_zero: f64, b_plus: Flux) -> Self {
        DualityConfig {
            b_minus,
            b_zero,
            b_plus,
            delta: None,
            mu: None,
            half_width: 60,
            k_points: 401,
            filter: None,
            ramp: Ramp::Cosine,
            bz_grid: (60, 60),
            weight_threshold: DEFAULT_WEIGHT_THRESHOLD,
            force: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    pub b_minus: Flux,
    pub b_zero: f64,
    pub b_plus: Flux,
    pub delta: (f64, f64),
    pub delta_automatic: bool,
    /// The common gap containing `delta`.
    pub common_gap: (f64, f64),
    pub mu: f64,
    pub half_width: usize,
    pub k_points: usize,
    pub filter: usize,
    pub ramp: Ramp,
    pub bz_grid: (usize, usize),
    pub weight_threshold: f64,
    pub n_minus: i64,
    pub n_plus: i64,
    pub winding_raw: f64,
    pub winding_imag: f64,
    pub winding: i64,
    /// `|winding_raw - winding|`.
    pub winding_residual: f64,
    pub converged: bool,
    pub spectral_flow: i64,
    pub spectral_flow_ambiguous: bool,
    /// In units of `e^2 / h`.
    pub conductance: f64,
    /// `|winding_raw - (N_+ - N_-)|`.
    pub duality_residual: f64,
    /// `winding = N_+ - N_- = spectral_flow`.
    pub duality_holds: bool,
    /// `winding = N_- - N_+ = spectral_flow`.
    pub reversed_duality_holds: bool,
}

pub fn verify_duality(config: &DualityConfig) -> Result<DualityReport> {
    let (bm, bp) = (config.b_minus, config.b_plus);
    if bm.same_phase(&bp) && !config.force {
        return Err(Error::InvalidArgument(format!(
            "b_- = 2pi*{}/{} and b_+ = 2pi*{}/{} define no interface (set force to run anyway)",
            bm.p, bm.q, bp.p, bp.q
        )));
    }
    if !config.b_zero.is_finite() {
        return Err(Error::InvalidArgument("b_zero must be finite".into()));
    }
    if !(config.weight_threshold > 0.0 && config.weight_threshold < 1.0) {
        return Err(Error::InvalidArgument(format!("weight threshold must lie in (0, 1), got {}", config.weight_threshold)));
    }
    let gaps = common_gaps(&[bm, bp], config.bz_grid)?;
    let (delta, common_gap) = match config.delta {
        Some((lo, hi)) => {
            if !(lo < hi) {
                return Err(Error::InvalidArgument(format!("delta needs min < max, got [{lo}, {hi}]")));
            }
            let gap = gaps.iter().find(|g| g.0 + GAP_MARGIN < lo && hi < g.1 - GAP_MARGIN).ok_or_else(|| {
                Error::NotABulkGap(format!("delta [{lo}, {hi}] is not inside a common gap; common gaps are {gaps:?}"))
            })?;
            ((lo, hi), *gap)
        }
        None => {
            let gap = widest_gap(&gaps).ok_or_else(|| Error::NotABulkGap("the two bulk spectra have no common gap".into()))?;
            let w = gap.1 - gap.0;
            ((gap.0 + w / 4.0, gap.1 - w / 4.0), gap)
        }
    };
    let mu = config.mu.unwrap_or(0.5 * (delta.0 + delta.1));
    if !(mu > delta.0 && mu < delta.1) {
        return Err(Error::InvalidArgument(format!("mu = {mu} must lie inside delta {delta:?}")));
    }
    let filter = config.filter.unwrap_or(config.half_width / 2);
    let chern = |f: Flux| -> Result<i64> {
        let family = harper_bloch_family(f.p, f.q, config.bz_grid)?;
        chern_fhs(&fermi_projection(&family, mu)?)
    };
    let (n_minus, n_plus) = (chern(bm)?, chern(bp)?);

    let field = MagneticField::iwatsuka(bm.value(), config.b_zero, bp.value())?;
    let g = SwitchFunction::new(delta.0, delta.1, config.ramp)?;
    let scan = interface_scan(&field, config.half_width, config.k_points, &[g], &[filter])?;
    let w = scan.windings[0][0];
    let sf = spectral_flow(&scan.spectrum, mu, config.weight_threshold)?;
    let agrees = |target: i64| w.converged && w.integer == target && sf.value == target && !sf.ambiguous;
    Ok(DualityReport {
        b_minus: bm,
        b_zero: config.b_zero,
        b_plus: bp,
        delta,
        delta_automatic: config.delta.is_none(),
        common_gap,
        mu,
        half_width: config.half_width,
        k_points: config.k_points,
        filter,
        ramp: config.ramp,
        bz_grid: config.bz_grid,
        weight_threshold: config.weight_threshold,
        n_minus,
        n_plus,
        winding_raw: w.raw,
        winding_imag: w.imag,
        winding: w.integer,
        winding_residual: w.residual,
        converged: w.converged,
        spectral_flow: sf.value,
        spectral_flow_ambiguous: sf.ambiguous,
        conductance: w.integer as f64,
        duality_residual: (w.raw - (n_plus - n_minus) as f64).abs(),
        duality_holds: agrees(n_plus - n_minus),
        reversed_duality_holds: agrees(n_minus - n_plus),
    })
}
