//! Energy, H^{alpha/2} errors, running maxima and observed orders.
//!
//! Two conventions live side by side here. Error norms use the
//! coefficient-space Sobolev norm of [`crate::grid::sobolev_norm`] without
//! any volume factor. The energy is a physical integral over the domain, so
//! quadratic terms are `|Omega| * sum_l w_l |c_l|^2` and the potential term
//! is the node average times `|Omega|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{inverse_transform, SpectralField};
use crate::ops::ModelParams;
use crate::state::KgeState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub time: f64,
    pub energy: f64,
    pub relative_deviation: f64,
}

impl EnergyRecord {
    pub fn new(time: f64, energy: f64, initial: f64) -> Self {
        let relative_deviation = if initial == 0.0 {
            (energy - initial).abs()
        } else {
            ((energy - initial) / initial).abs()
        };
        EnergyRecord {
            time,
            energy,
            relative_deviation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub eps: f64,
    pub tau: f64,
    pub alpha: f64,
    pub p: u32,
    pub e1: f64,
    pub e1_max: f64,
    pub order: Option<f64>,
}

/// `int |eta|^2 + |(-Delta)^{alpha/4} psi|^2 + beta |psi|^2
///  + eps^{2p}/(p+1) |psi|^{2p+2} dx`.
pub fn energy(state: &KgeState, params: &ModelParams) -> f64 {
    let grid = state.psi.grid();
    let volume = grid.volume();
    let half_alpha = 0.5 * params.alpha;
    let quadratic: f64 = grid
        .frequency_sq()
        .iter()
        .zip(state.psi.coeffs())
        .zip(state.eta.coeffs())
        .map(|((w, psi), eta)| eta.norm_sqr() + (w.powf(half_alpha) + params.beta) * psi.norm_sqr())
        .sum();
    let coupling = params.coupling();
    let potential = if coupling == 0.0 {
        0.0
    } else {
        let exponent = (params.p + 1) as i32;
        let mean: f64 = inverse_transform(&state.psi)
            .iter()
            .map(|v| v.norm_sqr().powi(exponent))
            .sum::<f64>()
            / grid.len() as f64;
        coupling / (params.p + 1) as f64 * mean
    };
    volume * (quadratic + potential)
}

/// `|| reference - numeric ||_{alpha/2}`, comparing by mode number so the
/// reference may live on a finer grid over the same domain.
pub fn h_alpha_half_error(numeric: &SpectralField, reference: &SpectralField, alpha: f64) -> Result<f64> {
    let (ng, rg) = (numeric.grid(), reference.grid());
    if !ng.same_domain(rg) {
        return Err(Error::GridMismatch(format!(
            "error between different domains {:?} and {:?}",
            ng.axes(),
            rg.axes()
        )));
    }
    let m = 0.5 * alpha;
    let mut sum = 0.0;
    let ref_w = rg.frequency_sq();
    for (k, r) in reference.coeffs().iter().enumerate() {
        let n = numeric.coeff(rg.modes_of(k)).unwrap_or_default();
        sum += (1.0 + ref_w[k]).powf(m) * (r - n).norm_sqr();
    }
    let num_w = ng.frequency_sq();
    for (k, n) in numeric.coeffs().iter().enumerate() {
        if rg.slot_of(ng.modes_of(k)).is_none() {
            sum += (1.0 + num_w[k]).powf(m) * n.norm_sqr();
        }
    }
    Ok(sum.sqrt())
}

/// Prefix maximum of `(t, e)` samples.
pub fn running_max(errors: &[(f64, f64)]) -> Vec<(f64, f64)> {
    errors
        .iter()
        .scan(f64::NEG_INFINITY, |best, &(t, e)| {
            *best = best.max(e);
            Some((t, *best))
        })
        .collect()
}

/// `log(e_coarse / e_fine) / log(refinement)`; `None` when undefined.
pub fn convergence_order(e_coarse: f64, e_fine: f64, refinement: f64) -> Option<f64> {
    if e_coarse > 0.0 && e_fine > 0.0 && refinement > 1.0 && e_coarse.is_finite() && e_fine.is_finite() {
        Some((e_coarse / e_fine).ln() / refinement.ln())
    } else {
        None
    }
}
