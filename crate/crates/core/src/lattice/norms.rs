use crate::error::{Error, Result};
use crate::lattice::{hop_derivation, LatticeOperator};

/// Decay norm `r_k` and Sobolev norm `||a||_{k,L^p}` of an operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularityNorms {
    pub decay_norm: f64,
    pub sobolev_norm: f64,
}

/// `r_k(a) = max_u (1 + r^2 + s^2)^{k/2} max_n |c_u(n)|`.
pub fn decay_norm(a: &LatticeOperator, k: u32) -> f64 {
    a.hops()
        .iter()
        .map(|(u, c)| {
            let w = (1.0 + (u.0 * u.0 + u.1 * u.1) as f64).powf(k as f64 / 2.0);
            w * c.iter().map(|x| x.norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// `T(|a|^p)^{1/p}` with the trace per unit volume of the whole window, for
/// `p = 1` (trace norm) or `p = 2` (Hilbert-Schmidt norm).
pub fn lp_norm(a: &LatticeOperator, p: u32) -> Result<f64> {
    let vol = a.domain().len().max(1) as f64;
    match p {
        1 => Ok(a.to_dense().singular_values().iter().sum::<f64>() / vol),
        2 => {
            // Distinct hops are distinct matrix entries unless they alias
            // around a small torus.
            let w = a.window();
            let aliasing = a.domain().is_torus() && 2 * a.band_radius() as usize >= w.width.min(w.height);
            let frobenius: f64 = if aliasing {
                a.to_dense().iter().map(|x| x.norm_sqr()).sum()
            } else {
                a.hops().values().flatten().map(|x| x.norm_sqr()).sum()
            };
            Ok((frobenius / vol).sqrt())
        }
        _ => Err(Error::InvalidArgument(format!("L^p norms are available for p = 1, 2, got {p}"))),
    }
}

/// `||a||_{k,L^p} = sum_{i <= k} sum_{alpha + beta = i} ||d1^alpha d2^beta a||_{L^p}` together
/// with the decay norm `r_k`.
pub fn regularity_norms(a: &LatticeOperator, k: u32, p: u32) -> Result<RegularityNorms> {
    let mut sobolev = 0.0;
    for i in 0..=k {
        for alpha in 0..=i {
            let mut b = a.clone();
            for _ in 0..alpha {
                b = hop_derivation(&b, 1)?;
            }
            for _ in 0..(i - alpha) {
                b = hop_derivation(&b, 2)?;
            }
            sobolev += lp_norm(&b, p)?;
        }
    }
    Ok(RegularityNorms { decay_norm: decay_norm(a, k), sobolev_norm: sobolev })
}
