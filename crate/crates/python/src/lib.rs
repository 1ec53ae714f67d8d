//! Python bindings: fields, Harper bands and Chern numbers, the Power-Rieffel
//! projection, interface spectra, windings and the bulk-interface duality.

use maglat_core::fields::{build_potential, classify_asymptotics, Gauge, InterfaceOrder, MagneticField};
use maglat_core::interface::{self as iface, Flux, Ramp, SwitchFunction};
use maglat_core::lattice::{harper_hamiltonian, regularity_norms as core_norms};
use maglat_core::nctorus::{berry_flux, fermi_projection, harper_bloch_family};
use maglat_core::{Error, LatticeDomain};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(maglat, NumericalError, PyRuntimeError, "A closed gap, rank jump or unconverged pairing.");

fn py_err(e: Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn ramp(name: &str) -> PyResult<Ramp> {
    match name {
        "cosine" => Ok(Ramp::Cosine),
        "quintic" => Ok(Ramp::Quintic),
        other => Err(PyValueError::new_err(format!("ramp must be \"cosine\" or \"quintic\", got {other:?}"))),
    }
}

fn gauge(name: &str) -> PyResult<Gauge> {
    match name {
        "landau" => Ok(Gauge::Landau),
        "symmetric" => Ok(Gauge::Symmetric),
        "half_line" => Ok(Gauge::HalfLine),
        other => Err(PyValueError::new_err(format!("gauge must be landau, symmetric or half_line, got {other:?}"))),
    }
}

fn flux((p, q): (i64, i64)) -> PyResult<Flux> {
    Flux::new(p, q).map_err(py_err)
}

#[pyclass(name = "MagneticField", module = "maglat", frozen)]
struct PyField(MagneticField);

#[pymethods]
impl PyField {
    #[staticmethod]
    fn constant(b: f64) -> PyResult<Self> {
        MagneticField::constant(b).map(PyField).map_err(py_err)
    }

    /// Strip field `b_minus` for `n2 < 0`, `b_zero` on `n2 = 0`, `b_plus` above.
    #[staticmethod]
    #[pyo3(signature = (b_minus, b_plus, b_zero=None))]
    fn iwatsuka(b_minus: f64, b_plus: f64, b_zero: Option<f64>) -> PyResult<Self> {
        MagneticField::iwatsuka(b_minus, b_zero.unwrap_or(b_minus), b_plus).map(PyField).map_err(py_err)
    }

    #[staticmethod]
    fn localized(sites: Vec<(i64, i64)>, b: f64) -> PyResult<Self> {
        MagneticField::localized(sites, b).map(PyField).map_err(py_err)
    }

    /// Flux through the plaquette at `(n1, n2)`.
    fn at(&self, n1: i64, n2: i64) -> f64 {
        self.0.at((n1, n2))
    }

    fn is_vertically_invariant(&self) -> bool {
        self.0.is_vertically_invariant()
    }

    /// `(interfaces, bulk_strengths, boundary_points)`; a uniform field has 0 interfaces.
    fn classify(&self) -> PyResult<(usize, Vec<f64>, usize)> {
        let s = classify_asymptotics(&self.0).map_err(py_err)?;
        let order = match s.order {
            InterfaceOrder::Uniform => 0,
            InterfaceOrder::Order(n) => n,
        };
        Ok((order, s.bulk_strengths, s.boundary_point_count))
    }

    fn __repr__(&self) -> String {
        format!("MagneticField({:?})", self.0.kind())
    }
}

/// Band ranges of the Harper operator at flux `2 pi p / q`.
#[pyfunction]
#[pyo3(signature = (p, q, grid=(60, 60)))]
fn harper_bands(py: Python<'_>, p: i64, q: i64, grid: (usize, usize)) -> PyResult<Vec<(f64, f64)>> {
    py.detach(|| harper_bloch_family(p, q, grid).map(|f| f.band_ranges())).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (p, q, grid=(60, 60)))]
fn harper_gaps(py: Python<'_>, p: i64, q: i64, grid: (usize, usize)) -> PyResult<Vec<(f64, f64)>> {
    py.detach(|| harper_bloch_family(p, q, grid).map(|f| f.gaps())).map_err(py_err)
}

/// `(chern, berry_flux)` of the Fermi projection below `mu`.
#[pyfunction]
#[pyo3(signature = (p, q, mu, grid=(60, 60)))]
fn chern_number(py: Python<'_>, p: i64, q: i64, mu: f64, grid: (usize, usize)) -> PyResult<(i64, f64)> {
    py.detach(|| {
        let flux = berry_flux(&fermi_projection(&harper_bloch_family(p, q, grid)?, mu)?)?;
        Ok((flux.round() as i64, flux))
    })
    .map_err(py_err)
}

#[pyclass(name = "PowerRieffel", module = "maglat", frozen, get_all)]
struct PyPowerRieffel {
    theta: f64,
    delta: f64,
    k: usize,
    grid: Vec<f64>,
    d0: Vec<f64>,
    d1: Vec<f64>,
    trace: f64,
    chern: i64,
    chern_raw: (f64, f64),
    chern_residual: f64,
    converged: bool,
    /// Structure identities of the projection, each zero in exact arithmetic.
    residuals: Vec<(String, f64)>,
}

#[pyfunction]
#[pyo3(signature = (theta, delta, k=600))]
fn power_rieffel(py: Python<'_>, theta: f64, delta: f64, k: usize) -> PyResult<PyPowerRieffel> {
    let r = py.detach(|| maglat_core::nctorus::power_rieffel(theta, delta, k)).map_err(py_err)?;
    let s = &r.residuals;
    let residuals = [
        ("projection", s.projection),
        ("self_adjoint", s.self_adjoint),
        ("shifted_product", s.shifted_product),
        ("partition", s.partition),
        ("diagonal", s.diagonal),
        ("support_identity", s.support_identity),
    ]
    .into_iter()
    .map(|(n, v)| (n.to_string(), v))
    .collect();
    Ok(PyPowerRieffel {
        theta: r.theta,
        delta: r.delta,
        k: r.k,
        trace: r.trace,
        chern: r.chern,
        chern_raw: (r.chern_raw.re, r.chern_raw.im),
        chern_residual: r.chern_residual,
        converged: r.chern_converged,
        residuals,
        grid: r.grid,
        d0: r.d0,
        d1: r.d1,
    })
}

#[pyclass(name = "SpectrumTable", module = "maglat", frozen)]
struct PySpectrum(iface::SpectrumTable);

#[pymethods]
impl PySpectrum {
    #[getter]
    fn ks(&self) -> Vec<f64> {
        self.0.ks().to_vec()
    }

    /// Energies indexed `[k][level]`, ascending in the level.
    #[getter]
    fn energies(&self) -> Vec<Vec<f64>> {
        self.0.energies().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<Vec<f64>> {
        self.0.weights().to_vec()
    }

    /// `(flow, ambiguous)` of the interface-localized levels through `mu`.
    #[pyo3(signature = (mu, threshold=iface::DEFAULT_WEIGHT_THRESHOLD))]
    fn spectral_flow(&self, mu: f64, threshold: f64) -> PyResult<(i64, bool)> {
        let sf = iface::spectral_flow(&self.0, mu, threshold).map_err(py_err)?;
        Ok((sf.value, sf.ambiguous))
    }

    fn __len__(&self) -> usize {
        self.0.ks().len()
    }
}

#[pyfunction]
#[pyo3(signature = (field, k_points=401, half_width=60))]
fn interface_spectrum(py: Python<'_>, field: &PyField, k_points: usize, half_width: usize) -> PyResult<PySpectrum> {
    let f = field.0.clone();
    py.detach(|| iface::interface_spectrum(&f, k_points, half_width)).map(PySpectrum).map_err(py_err)
}

#[pyclass(name = "Winding", module = "maglat", frozen, get_all)]
struct PyWinding {
    raw: f64,
    imag: f64,
    integer: i64,
    residual: f64,
    converged: bool,
}

/// Winding of the interface unitary for the switch window `delta`.
#[pyfunction]
#[pyo3(signature = (field, delta, half_width=60, k_points=401, filter=None, ramp="cosine"))]
fn winding_number(
    py: Python<'_>,
    field: &PyField,
    delta: (f64, f64),
    half_width: usize,
    k_points: usize,
    filter: Option<usize>,
    ramp: &str,
) -> PyResult<PyWinding> {
    let g = SwitchFunction::new(delta.0, delta.1, self::ramp(ramp)?).map_err(py_err)?;
    let f = field.0.clone();
    let filter = filter.unwrap_or(half_width / 2);
    let scan = py.detach(|| iface::interface_scan(&f, half_width, k_points, &[g], &[filter])).map_err(py_err)?;
    let w = scan.windings[0][0];
    Ok(PyWinding { raw: w.raw, imag: w.imag, integer: w.integer, residual: w.residual, converged: w.converged })
}

/// Energy intervals free of spectrum for every flux `(p, q)`.
#[pyfunction]
#[pyo3(signature = (fluxes, grid=(60, 60)))]
fn common_gaps(py: Python<'_>, fluxes: Vec<(i64, i64)>, grid: (usize, usize)) -> PyResult<Vec<(f64, f64)>> {
    let fluxes = fluxes.into_iter().map(flux).collect::<PyResult<Vec<_>>>()?;
    py.detach(|| iface::common_gaps(&fluxes, grid)).map_err(py_err)
}

#[pyclass(name = "DualityReport", module = "maglat", frozen, get_all)]
struct PyDuality {
    delta: (f64, f64),
    delta_automatic: bool,
    common_gap: (f64, f64),
    mu: f64,
    n_minus: i64,
    n_plus: i64,
    winding_raw: f64,
    winding_imag: f64,
    winding: i64,
    winding_residual: f64,
    converged: bool,
    spectral_flow: i64,
    spectral_flow_ambiguous: bool,
    conductance: f64,
    duality_residual: f64,
    duality_holds: bool,
    reversed_duality_holds: bool,
}

/// Compares the interface winding with the bulk Chern numbers on both sides
/// of the strip; fluxes are `(p, q)` for `2 pi p / q`.
#[pyfunction]
#[pyo3(signature = (
    b_minus, b_plus, b_zero=None, delta=None, mu=None, half_width=60, k_points=401, filter=None,
    ramp="cosine", bz_grid=(60, 60), weight_threshold=iface::DEFAULT_WEIGHT_THRESHOLD, force=false
))]
#[allow(clippy::too_many_arguments)]
fn verify_duality(
    py: Python<'_>,
    b_minus: (i64, i64),
    b_plus: (i64, i64),
    b_zero: Option<f64>,
    delta: Option<(f64, f64)>,
    mu: Option<f64>,
    half_width: usize,
    k_points: usize,
    filter: Option<usize>,
    ramp: &str,
    bz_grid: (usize, usize),
    weight_threshold: f64,
    force: bool,
) -> PyResult<PyDuality> {
    let (bm, bp) = (flux(b_minus)?, flux(b_plus)?);
    let mut c = iface::DualityConfig::new(bm, b_zero.unwrap_or(bm.value()), bp);
    c.delta = delta;
    c.mu = mu;
    c.half_width = half_width;
    c.k_points = k_points;
    c.filter = filter;
    c.ramp = self::ramp(ramp)?;
    c.bz_grid = bz_grid;
    c.weight_threshold = weight_threshold;
    c.force = force;
    let r = py.detach(|| iface::verify_duality(&c)).map_err(py_err)?;
    Ok(PyDuality {
        delta: r.delta,
        delta_automatic: r.delta_automatic,
        common_gap: r.common_gap,
        mu: r.mu,
        n_minus: r.n_minus,
        n_plus: r.n_plus,
        winding_raw: r.winding_raw,
        winding_imag: r.winding_imag,
        winding: r.winding,
        winding_residual: r.winding_residual,
        converged: r.converged,
        spectral_flow: r.spectral_flow,
        spectral_flow_ambiguous: r.spectral_flow_ambiguous,
        conductance: r.conductance,
        duality_residual: r.duality_residual,
        duality_holds: r.duality_holds,
        reversed_duality_holds: r.reversed_duality_holds,
    })
}

/// `(decay_norm, sobolev_norm)` of the Harper Hamiltonian of `field` on the
/// window `[-L, L]^2`.
#[pyfunction]
#[pyo3(signature = (field, l, k, p=2, gauge="landau"))]
fn regularity_norms(py: Python<'_>, field: &PyField, l: usize, k: u32, p: u32, gauge: &str) -> PyResult<(f64, f64)> {
    let g = self::gauge(gauge)?;
    let f = field.0.clone();
    py.detach(|| {
        let d = LatticeDomain::square(l);
        let h = harper_hamiltonian(&build_potential(&f, g, d)?, d)?;
        core_norms(&h, k, p)
    })
    .map(|r| (r.decay_norm, r.sobolev_norm))
    .map_err(py_err)
}

#[pymodule]
fn maglat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyField>()?;
    m.add_class::<PyPowerRieffel>()?;
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyWinding>()?;
    m.add_class::<PyDuality>()?;
    m.add_function(wrap_pyfunction!(harper_bands, m)?)?;
    m.add_function(wrap_pyfunction!(harper_gaps, m)?)?;
    m.add_function(wrap_pyfunction!(chern_number, m)?)?;
    m.add_function(wrap_pyfunction!(power_rieffel, m)?)?;
    m.add_function(wrap_pyfunction!(interface_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(winding_number, m)?)?;
    m.add_function(wrap_pyfunction!(common_gaps, m)?)?;
    m.add_function(wrap_pyfunction!(verify_duality, m)?)?;
    m.add_function(wrap_pyfunction!(regularity_norms, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
