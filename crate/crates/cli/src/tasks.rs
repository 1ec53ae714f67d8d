use std::f64::consts::PI;

use maglat_core::fields::{build_potential, MagneticField};
use maglat_core::interface::{
    interface_scan, interface_spectrum, spectral_flow, verify_duality, DualityConfig, Flux, SwitchFunction,
};
use maglat_core::lattice::{
    cesaro_mean, fourier_coefficients, harper_hamiltonian, partial_sum, regularity_norms, LatticeOperator,
};
use maglat_core::linalg::eigh;
use maglat_core::nctorus::{berry_flux, fermi_projection, harper_bloch_family, harper_bloch_matrix, power_rieffel};
use maglat_core::LatticeDomain;
use serde_json::{json, Map, Value};

use crate::config::{DeltaSpec, FieldSpec, RunConfig, Task};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_float, Table};

/// Outcome of a task: the report body, CSV tables, and whether the numbers
/// converged (a non-converged run exits 3 with its report).
pub struct TaskOutput {
    pub result: Value,
    pub tables: Vec<Table>,
    pub converged: bool,
}

/// Dense trace norms need a full singular value decomposition.
const MAX_DENSE_SITES: usize = 1681;

pub fn run_task(c: &RunConfig) -> CliResult<TaskOutput> {
    let name = c.task.name();
    let core = |e| CliError::from_core(name, e);
    match c.task {
        Task::Spectrum => spectrum(c).map_err(core),
        Task::Butterfly => Ok(butterfly(c)),
        Task::Chern => chern(c).map_err(core),
        Task::Winding => winding(c).map_err(core),
        Task::Duality => duality(c).map_err(core),
        Task::PowerRieffel => power(c).map_err(core),
        Task::Fourier => fourier(c).map_err(core),
        Task::Norms => {
            let len = (2 * c.numerics.l + 1).pow(2);
            if c.numerics.p == 1 && len > MAX_DENSE_SITES {
                return Err(CliError::config("numerics.L", format!("p = 1 needs a dense SVD; use L <= 20 (got {})", c.numerics.l)));
            }
            norms(c).map_err(core)
        }
    }
}

type CoreResult<T> = maglat_core::Result<T>;

fn field(c: &RunConfig) -> CoreResult<MagneticField> {
    // check_required guarantees a field for tasks that call this.
    let spec = c.field.as_ref().expect("field presence is validated with the config");
    spec.build("model.field").map_err(|e| maglat_core::Error::InvalidField(e.to_string()))
}

fn interval(c: &RunConfig) -> Option<(f64, f64)> {
    match c.delta {
        Some(DeltaSpec::Interval(a, b)) => Some((a, b)),
        _ => None,
    }
}

fn spectrum(c: &RunConfig) -> CoreResult<TaskOutput> {
    let n = &c.numerics;
    let t = interface_spectrum(&field(c)?, n.k_points, n.m)?;
    let mut table = Table::new("spectrum_table", &["k", "index", "energy", "interface_weight"]);
    for r in t.rows() {
        table.push(vec![fmt_float(r.k), r.index.to_string(), fmt_float(r.energy), fmt_float(r.interface_weight)]);
    }
    let all = t.energies().iter().flatten();
    let mut result = json!({
        "levels": t.levels(),
        "k_points": t.ks().len(),
        "energy_min": all.clone().cloned().fold(f64::INFINITY, f64::min),
        "energy_max": all.cloned().fold(f64::NEG_INFINITY, f64::max),
    });
    if let Some(mu) = c.mu {
        let sf = spectral_flow(&t, mu, n.weight_threshold)?;
        result["mu"] = json!(mu);
        result["spectral_flow"] = json!(sf.value);
        result["spectral_flow_ambiguous"] = json!(sf.ambiguous);
    }
    Ok(TaskOutput { result, tables: vec![table], converged: true })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Band edges of the Harper operator for every flux `p/q` with `q <= q_max`;
/// the edges sit at the momenta `(0, 0)` and `(pi/q, pi)`.
fn butterfly(c: &RunConfig) -> TaskOutput {
    let mut table = Table::new("butterfly_spectrum", &["p", "q", "energy"]);
    let mut fluxes = 0;
    for q in 1..=c.numerics.q_max as i64 {
        for p in 0..q {
            if gcd(p, q) != 1 {
                continue;
            }
            fluxes += 1;
            let mut e: Vec<f64> = [(0.0, 0.0), (PI / q as f64, PI)]
                .iter()
                .flat_map(|&(k1, k2)| eigh(&harper_bloch_matrix(p, q, k1, k2)).0)
                .collect();
            e.sort_by(f64::total_cmp);
            for x in e {
                table.push(vec![p.to_string(), q.to_string(), fmt_float(x)]);
            }
        }
    }
    let rows = table.rows.len();
    TaskOutput { result: json!({"q_max": c.numerics.q_max, "fluxes": fluxes, "rows": rows}), tables: vec![table], converged: true }
}

fn chern(c: &RunConfig) -> CoreResult<TaskOutput> {
    let Some(FieldSpec::Constant { b }) = &c.field else { unreachable!("validated with the config") };
    let (p, q) = b.rational.expect("validated with the config");
    let family = harper_bloch_family(p, q, c.numerics.bz_grid)?;
    let gaps = family.gaps();
    let mus: Vec<f64> = match c.mu {
        Some(mu) => vec![mu],
        None => gaps.iter().map(|g| 0.5 * (g.0 + g.1)).collect(),
    };
    let mut table = Table::new("chern_gaps", &["mu", "chern", "berry_flux"]);
    let mut entries = Vec::new();
    for mu in mus {
        let flux = berry_flux(&fermi_projection(&family, mu)?)?;
        let ch = flux.round() as i64;
        table.push(vec![fmt_float(mu), ch.to_string(), fmt_float(flux)]);
        entries.push(json!({"mu": mu, "chern": ch, "berry_flux": flux}));
    }
    let bands: Vec<Value> = family.band_ranges().iter().map(|b| json!([b.0, b.1])).collect();
    let gap_list: Vec<Value> = gaps.iter().map(|g| json!([g.0, g.1])).collect();
    Ok(TaskOutput {
        result: json!({"p": p, "q": q, "bands": bands, "gaps": gap_list, "chern": entries}),
        tables: vec![table],
        converged: true,
    })
}

fn winding(c: &RunConfig) -> CoreResult<TaskOutput> {
    let n = &c.numerics;
    let (lo, hi) = interval(c).expect("validated with the config");
    let g = SwitchFunction::new(lo, hi, n.ramp)?;
    let scan = interface_scan(&field(c)?, n.m, n.k_points, &[g], &[n.w_f])?;
    let w = scan.windings[0][0];
    let mu = c.mu.unwrap_or(0.5 * (lo + hi));
    let sf = spectral_flow(&scan.spectrum, mu, n.weight_threshold)?;
    Ok(TaskOutput {
        result: json!({
            "winding_raw": w.raw,
            "winding_imag": w.imag,
            "winding": w.integer,
            "winding_residual": w.residual,
            "converged": w.converged,
            "conductance": w.integer as f64,
            "conductance_unit": "e^2/h",
            "mu": mu,
            "spectral_flow": sf.value,
            "spectral_flow_ambiguous": sf.ambiguous,
        }),
        tables: Vec::new(),
        converged: w.converged,
    })
}

fn flux_of(s: &crate::config::Strength) -> CoreResult<Flux> {
    let (p, q) = s.rational.expect("validated with the config");
    Flux::new(p, q)
}

fn duality(c: &RunConfig) -> CoreResult<TaskOutput> {
    let Some(FieldSpec::Iwatsuka { b_minus, b_zero, b_plus }) = &c.field else { unreachable!("validated with the config") };
    let n = &c.numerics;
    let mut cfg = DualityConfig::new(flux_of(b_minus)?, b_zero.value, flux_of(b_plus)?);
    cfg.delta = interval(c);
    cfg.mu = c.mu;
    cfg.half_width = n.m;
    cfg.k_points = n.k_points;
    cfg.filter = Some(n.w_f);
    cfg.ramp = n.ramp;
    cfg.bz_grid = n.bz_grid;
    cfg.weight_threshold = n.weight_threshold;
    let r = verify_duality(&cfg)?;
    Ok(TaskOutput {
        result: json!({
            "b_minus": {"p": r.b_minus.p(), "q": r.b_minus.q()},
            "b_plus": {"p": r.b_plus.p(), "q": r.b_plus.q()},
            "b_zero": r.b_zero,
            "delta": [r.delta.0, r.delta.1],
            "delta_automatic": r.delta_automatic,
            "common_gap": [r.common_gap.0, r.common_gap.1],
            "mu": r.mu,
            "N_minus": r.n_minus,
            "N_plus": r.n_plus,
            "winding_raw": r.winding_raw,
            "winding_imag": r.winding_imag,
            "winding": r.winding,
            "winding_residual": r.winding_residual,
            "converged": r.converged,
            "spectral_flow": r.spectral_flow,
            "spectral_flow_ambiguous": r.spectral_flow_ambiguous,
            "conductance": r.conductance,
            "conductance_unit": "e^2/h",
            "duality_residual": r.duality_residual,
            "duality_holds": r.duality_holds,
            "reversed_duality_holds": r.reversed_duality_holds,
        }),
        tables: Vec::new(),
        converged: r.converged,
    })
}

fn power(c: &RunConfig) -> CoreResult<TaskOutput> {
    let theta = c.theta.expect("validated with the config");
    let Some(DeltaSpec::Scalar(delta)) = c.delta else { unreachable!("validated with the config") };
    let rep = power_rieffel(theta, delta, c.numerics.k)?;
    let mut table = Table::new("power-rieffel_functions", &["x", "d0", "d1"]);
    for ((x, d0), d1) in rep.grid.iter().zip(&rep.d0).zip(&rep.d1) {
        table.push(vec![fmt_float(*x), fmt_float(*d0), fmt_float(*d1)]);
    }
    let r = rep.residuals;
    Ok(TaskOutput {
        result: json!({
            "theta": rep.theta,
            "delta": rep.delta,
            "K": rep.k,
            "trace": rep.trace,
            "chern": rep.chern,
            "chern_raw": [rep.chern_raw.re, rep.chern_raw.im],
            "chern_residual": rep.chern_residual,
            "converged": rep.chern_converged,
            "residuals": {
                "projection": r.projection,
                "self_adjoint": r.self_adjoint,
                "shifted_product": r.shifted_product,
                "partition": r.partition,
                "diagonal": r.diagonal,
                "support_identity": r.support_identity,
            },
        }),
        tables: vec![table],
        converged: rep.chern_converged,
    })
}

fn hamiltonian(c: &RunConfig) -> CoreResult<LatticeOperator> {
    let d = LatticeDomain::square(c.numerics.l);
    harper_hamiltonian(&build_potential(&field(c)?, c.gauge, d)?, d)
}

fn fourier(c: &RunConfig) -> CoreResult<TaskOutput> {
    let h = hamiltonian(c)?;
    let mut table = Table::new("fourier_coefficients", &["r", "s", "max_abs", "mean_abs"]);
    for (u, coeffs) in fourier_coefficients(&h) {
        let max = coeffs.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let mean = coeffs.iter().map(|x| x.norm()).sum::<f64>() / coeffs.len().max(1) as f64;
        table.push(vec![u.0.to_string(), u.1.to_string(), fmt_float(max), fmt_float(mean)]);
    }
    let band = h.band_radius().max(0) as usize;
    let partial_error = partial_sum(&h, band).max_coefficient_diff(&h);
    let mut cesaro = Map::new();
    let mut cesaro_table = Table::new("fourier_cesaro", &["order", "max_coefficient_error"]);
    for &order in &c.numerics.cesaro_orders {
        let e = cesaro_mean(&h, order).max_coefficient_diff(&h);
        cesaro.insert(order.to_string(), json!(e));
        cesaro_table.push(vec![order.to_string(), fmt_float(e)]);
    }
    Ok(TaskOutput {
        result: json!({
            "window_sites": h.domain().len(),
            "band_radius": band,
            "partial_sum_error": partial_error,
            "cesaro_error": cesaro,
        }),
        tables: vec![table, cesaro_table],
        converged: true,
    })
}

fn norms(c: &RunConfig) -> CoreResult<TaskOutput> {
    let h = hamiltonian(c)?;
    let mut table = Table::new("norms_orders", &["k", "decay_norm", "sobolev_norm"]);
    let mut entries = Vec::new();
    for &k in &c.numerics.sobolev_orders {
        let r = regularity_norms(&h, k, c.numerics.p)?;
        table.push(vec![k.to_string(), fmt_float(r.decay_norm), fmt_float(r.sobolev_norm)]);
        entries.push(json!({"k": k, "decay_norm": r.decay_norm, "sobolev_norm": r.sobolev_norm}));
    }
    Ok(TaskOutput {
        result: json!({"p": c.numerics.p, "window_sites": h.domain().len(), "orders": entries}),
        tables: vec![table],
        converged: true,
    })
}
