//! Geometric phases of the paired ground state.
//!
//! Every `(k, -k)` pair is a two-level system whose Bloch vector sits at
//! polar angle `theta_k`. Rotating all spins about the field axis sweeps
//! that vector around a cone, and the enclosed solid angle gives
//! `Gamma_k = pi (1 - cos theta_k)`. Under the linear ramp `B(t) = -t / tau_q`
//! the same expression becomes a function of time, and its field
//! derivative peaks where the gap closes.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{bogoliubov_angle, dispersion, ChainSpec};

const TWO_PI: f64 = 2.0 * PI;

/// Phase of one mode at one point of a quench.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePhaseRecord {
    pub k: f64,
    pub t: f64,
    pub field: f64,
    pub gamma_k: f64,
    pub dgamma_db: f64,
}

impl ModePhaseRecord {
    pub fn at_time(k: f64, t: f64, tau_q: f64, alpha: f64) -> Result<Self> {
        let field = ramp_field(t, tau_q)?;
        Ok(Self {
            k,
            t,
            field,
            gamma_k: mode_phase(k, field, alpha)?,
            dgamma_db: dphase_db(k, field, alpha)?,
        })
    }
}

/// Phases at the start of the ramp, at the critical point `B = 1` and at the
/// end of the ramp with the kinked modes removed.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSummary {
    pub gamma_initial: f64,
    pub gamma_critical: f64,
    pub gamma_final: f64,
    pub excluded_modes: Vec<f64>,
}

impl PhaseSummary {
    pub fn new(spec: &ChainSpec, initial_field: f64, excluded: &[f64]) -> Result<Self> {
        let excluded_modes = excluded_indices(spec, excluded)?
            .into_iter()
            .map(|i| spec.momenta()[i])
            .collect();
        Ok(Self {
            gamma_initial: total_phase(spec, initial_field)?,
            gamma_critical: critical_phase(spec)?,
            gamma_final: final_phase(spec, excluded)?,
            excluded_modes,
        })
    }
}

fn ramp_field(t: f64, tau_q: f64) -> Result<f64> {
    if !(tau_q > 0.0 && tau_q.is_finite()) {
        return Err(Error::InvalidSchedule(format!("tau_q = {tau_q} must be positive")));
    }
    if t > 0.0 {
        return Err(Error::PositiveTime(t));
    }
    Ok(-t / tau_q)
}

/// `Gamma_k = pi (1 - cos theta_k)`, in `[0, 2 pi]`.
pub fn mode_phase(k: f64, field: f64, alpha: f64) -> Result<f64> {
    Ok(PI * (1.0 - bogoliubov_angle(k, field, alpha)?))
}

/// Phase of mode `k` at time `t <= 0` of the ramp `B = -t / tau_q`.
pub fn mode_phase_at_time(k: f64, t: f64, tau_q: f64, alpha: f64) -> Result<f64> {
    mode_phase(k, ramp_field(t, tau_q)?, alpha)
}

/// The `alpha = 0` limit: `2 pi` once the field has passed `cos k`, else 0.
///
/// The step edge `B = cos k` is gapless and returns [`Error::Gapless`]. For
/// `k -> 0` the step sits at `|t| = tau_q`.
pub fn mode_phase_xx(k: f64, t: f64, tau_q: f64) -> Result<f64> {
    let field = ramp_field(t, tau_q)?;
    let cos_k = k.cos();
    if field == cos_k {
        return Err(Error::Gapless { k, field });
    }
    Ok(if field > cos_k { TWO_PI } else { 0.0 })
}

/// `dGamma_k / dB = pi alpha^2 sin^2 k / Lambda_k^3`.
pub fn dphase_db(k: f64, field: f64, alpha: f64) -> Result<f64> {
    let lambda = dispersion(k, field, alpha);
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Gapless { k, field });
    }
    let pairing = alpha * k.sin();
    Ok(PI * pairing * pairing / (lambda * lambda * lambda))
}

pub fn dphase_db_at_time(k: f64, t: f64, tau_q: f64, alpha: f64) -> Result<f64> {
    dphase_db(k, ramp_field(t, tau_q)?, alpha)
}

/// Per-mode phases over the positive grid, one entry per `(k, -k)` pair.
pub fn mode_phases(spec: &ChainSpec, field: f64) -> Result<Vec<f64>> {
    spec.momenta()
        .into_iter()
        .map(|k| mode_phase(k, field, spec.alpha()))
        .collect()
}

/// `Gamma_g`, the sum of `Gamma_k` over the positive grid.
pub fn total_phase(spec: &ChainSpec, field: f64) -> Result<f64> {
    Ok(mode_phases(spec, field)?.iter().sum())
}

/// Total phase at the critical point of the ramp (`t = -tau_q`, `B = 1`).
///
/// On the half-integer grid `cos k > -1`, so no mode is gapless here.
pub fn critical_phase(spec: &ChainSpec) -> Result<f64> {
    total_phase(spec, 1.0)
}

/// Total phase at the end of the ramp (`B = 0`), dropping the excluded pairs.
pub fn final_phase(spec: &ChainSpec, excluded: &[f64]) -> Result<f64> {
    let skip = excluded_indices(spec, excluded)?;
    let phases = mode_phases(spec, 0.0)?;
    Ok(phases
        .iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, g)| g)
        .sum())
}

fn excluded_indices(spec: &ChainSpec, excluded: &[f64]) -> Result<BTreeSet<usize>> {
    excluded
        .iter()
        .map(|&k| spec.grid_index(k).ok_or(Error::OffGrid(k)))
        .collect()
}

/// One row of a non-contractibility scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub alpha: f64,
    pub n_sites: usize,
    /// `Gamma_g / M` with `M = N / 2` pairs.
    pub gamma_per_pair: f64,
}

/// Value `Gamma_g / M` approaches as `M -> inf` and then `alpha -> 0`:
/// `2 pi` times the fraction of `(0, pi)` where `cos k < B`.
pub fn noncontractible_limit(field: f64) -> f64 {
    TWO_PI * (1.0 - field.acos() / PI)
}

/// `Gamma_g / M` for every `(alpha, N)` combination, alpha-major.
///
/// Fields outside `(-1, 1)` are rejected: there the limit is trivially 0 or
/// `2 pi` because no mode crosses.
pub fn noncontractibility_scan(
    field: f64,
    alphas: &[f64],
    sizes: &[usize],
) -> Result<Vec<ScanRow>> {
    if !(field > -1.0 && field < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "field {field} outside (-1, 1): no gapless XX modes"
        )));
    }
    if let Some(&a) = alphas.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
        return Err(Error::InvalidAnisotropy(a));
    }
    let mut rows = Vec::with_capacity(alphas.len() * sizes.len());
    for &alpha in alphas {
        for &n in sizes {
            let spec = ChainSpec::new(n, alpha)?;
            rows.push(ScanRow {
                alpha,
                n_sites: n,
                gamma_per_pair: total_phase(&spec, field)? / spec.n_pairs() as f64,
            });
        }
    }
    Ok(rows)
}
