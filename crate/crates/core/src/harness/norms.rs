//! Discrete error norms and experimental orders of convergence.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms {
    pub l2: f64,
    pub linf: f64,
    /// L2 error divided by the L2 norm of the reference; NaN for a zero reference.
    pub rel_l2: f64,
    /// Max error divided by the max magnitude of the reference.
    pub rel_linf: f64,
}

/// `L2 = sqrt(vol * sum e_i^2)`, `Linf = max |e_i|` and their relative forms.
pub fn error_norms(num: &[f64], reference: &[f64], cell_volume: f64) -> Result<Norms> {
    if num.is_empty() || num.len() != reference.len() {
        return Err(Error::InvalidInput(format!(
            "error norms need equal non-empty fields, got {} and {}",
            num.len(),
            reference.len()
        )));
    }
    let mut sq = 0.0;
    let mut linf: f64 = 0.0;
    let mut ref_sq = 0.0;
    let mut ref_max: f64 = 0.0;
    for (a, b) in num.iter().zip(reference) {
        let e = a - b;
        sq += e * e;
        linf = linf.max(e.abs());
        ref_sq += b * b;
        ref_max = ref_max.max(b.abs());
    }
    let l2 = (cell_volume * sq).sqrt();
    let ref_l2 = (cell_volume * ref_sq).sqrt();
    let ratio = |e: f64, r: f64| if r > 0.0 { e / r } else { f64::NAN };
    Ok(Norms {
        l2,
        linf,
        rel_l2: ratio(l2, ref_l2),
        rel_linf: ratio(linf, ref_max),
    })
}

/// Orders between consecutive grids, `log(e_{j-1}/e_j) / log(N_j/N_{j-1})`.
/// `None` marks pairs where an error vanishes and no order can be given.
pub fn eoc(errors: &[f64], ns: &[usize]) -> Result<Vec<Option<f64>>> {
    if errors.len() != ns.len() || errors.len() < 2 {
        return Err(Error::InvalidInput(
            "eoc needs at least two matching errors and grid sizes".into(),
        ));
    }
    Ok(errors
        .windows(2)
        .zip(ns.windows(2))
        .map(|(e, n)| {
            if e[0] > 0.0 && e[1] > 0.0 && e[0].is_finite() && e[1].is_finite() && n[1] != n[0] {
                Some((e[0] / e[1]).ln() / (n[1] as f64 / n[0] as f64).ln())
            } else {
                None
            }
        })
        .collect())
}
