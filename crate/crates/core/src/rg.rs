//! Sine-Gordon renormalization-group flow and phase classification.
//!
//! The couplings run as
//!
//! ```text
//! d alpha / dl = (2 - 1/K) alpha
//! d K / dl     = alpha^2 / 4
//! ```
//!
//! so the coupling is relevant for `K > 1/2` and `K` never decreases.

use std::fmt;

use crate::error::{Error, Result};

pub const DEFAULT_DL: f64 = 1e-3;
pub const DEFAULT_ALPHA_CAP: f64 = 1e3;

/// Running couplings at log-scale `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RgState {
    pub alpha: f64,
    pub luttinger_k: f64,
    pub l: f64,
}

impl RgState {
    pub fn new(alpha: f64, luttinger_k: f64) -> Result<Self> {
        let s = Self { alpha, luttinger_k, l: 0.0 };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidRg(format!("alpha = {} must be >= 0", self.alpha)));
        }
        if !(self.luttinger_k > 0.0 && self.luttinger_k.is_finite()) {
            return Err(Error::InvalidRg(format!("K = {} must be > 0", self.luttinger_k)));
        }
        if !(self.l >= 0.0 && self.l.is_finite()) {
            return Err(Error::InvalidRg(format!("l = {} must be >= 0", self.l)));
        }
        Ok(())
    }

    /// `(d alpha/dl, dK/dl)`.
    pub fn derivative(&self) -> (f64, f64) {
        beta(self.alpha, self.luttinger_k)
    }
}

fn beta(alpha: f64, k: f64) -> (f64, f64) {
    ((2.0 - 1.0 / k) * alpha, 0.25 * alpha * alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowStatus {
    Completed,
    /// The coupling exceeded the cap and integration stopped early.
    StrongCoupling,
}

impl fmt::Display for FlowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlowStatus::Completed => "completed",
            FlowStatus::StrongCoupling => "strong_coupling",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<RgState>,
    pub status: FlowStatus,
}

impl Trajectory {
    pub fn last(&self) -> &RgState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Integrate the flow with fixed-step classical RK4 from `initial.l` to
/// `l_max`, stopping early once `alpha > alpha_cap`.
///
/// The step is `dl` shrunk just enough to land on `l_max` exactly.
pub fn rg_flow(initial: RgState, l_max: f64, dl: f64, alpha_cap: f64) -> Result<Trajectory> {
    initial.validate()?;
    if !(dl > 0.0 && dl.is_finite()) {
        return Err(Error::InvalidRg(format!("dl = {dl} must be positive")));
    }
    if !(l_max > initial.l && l_max.is_finite()) {
        return Err(Error::InvalidRg(format!("l_max = {l_max} must exceed l = {}", initial.l)));
    }
    if !(alpha_cap > 0.0) {
        return Err(Error::InvalidRg(format!("alpha cap {alpha_cap}")));
    }

    let steps = ((l_max - initial.l) / dl).ceil() as usize;
    let h = (l_max - initial.l) / steps as f64;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(initial);
    let (mut a, mut k) = (initial.alpha, initial.luttinger_k);
    for i in 1..=steps {
        let (a1, k1) = beta(a, k);
        let (a2, k2) = beta(a + 0.5 * h * a1, k + 0.5 * h * k1);
        let (a3, k3) = beta(a + 0.5 * h * a2, k + 0.5 * h * k2);
        let (a4, k4) = beta(a + h * a3, k + h * k3);
        a += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        k += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        states.push(RgState { alpha: a, luttinger_k: k, l: initial.l + i as f64 * h });
        if !(a.abs() <= alpha_cap) {
            return Ok(Trajectory { states, status: FlowStatus::StrongCoupling });
        }
    }
    Ok(Trajectory { states, status: FlowStatus::Completed })
}

/// Sine-Gordon mass gap `M = cutoff * (alpha / 2)^(1 / (2 - 1/K))`.
pub fn mass_gap(alpha: f64, luttinger_k: f64, cutoff: f64) -> Result<f64> {
    if !(luttinger_k > 0.5) {
        return Err(Error::IrrelevantCoupling(luttinger_k));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidRg(format!("alpha = {alpha} must be > 0")));
    }
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidRg(format!("cutoff = {cutoff} must be > 0")));
    }
    Ok(cutoff * (alpha / 2.0).powf(1.0 / (2.0 - 1.0 / luttinger_k)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseLabel {
    LuttingerLiquid,
    StaggeredOrder,
    Ferromagnetic,
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseLabel::LuttingerLiquid => "luttinger_liquid",
            PhaseLabel::StaggeredOrder => "staggered_order",
            PhaseLabel::Ferromagnetic => "ferromagnetic",
        })
    }
}

/// Thresholds that turn the qualitative phase criteria into numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCriteria {
    /// Relative width of the `B ~ M` window, in `(0, 1)`.
    pub band: f64,
    /// Field above which the `K <= 1/2` liquid is polarized.
    pub ferro_field: f64,
}

impl Default for PhaseCriteria {
    fn default() -> Self {
        Self { band: 0.5, ferro_field: 1.0 }
    }
}

/// Classify the phase at quench field `field`.
///
/// For `K > 1/2` the field is compared with the mass gap: well below it the
/// chain stays staggered, within `band` of it the gap is closed into a
/// liquid, and above it the chain polarizes. For `K <= 1/2` the liquid
/// polarizes once `field > criteria.ferro_field`.
pub fn classify_phase(
    luttinger_k: f64,
    alpha: f64,
    field: f64,
    cutoff: f64,
    criteria: PhaseCriteria,
) -> Result<PhaseLabel> {
    let PhaseCriteria { band, ferro_field } = criteria;
    if !(band > 0.0 && band < 1.0) {
        return Err(Error::InvalidArgument(format!("band {band} outside (0, 1)")));
    }
    if !(luttinger_k > 0.0) || !(alpha >= 0.0) || !field.is_finite() {
        return Err(Error::InvalidRg(format!(
            "K = {luttinger_k}, alpha = {alpha}, B = {field}"
        )));
    }
    let b = field.abs();
    if luttinger_k <= 0.5 {
        return Ok(if b > ferro_field {
            PhaseLabel::Ferromagnetic
        } else {
            PhaseLabel::LuttingerLiquid
        });
    }
    let gap = if alpha == 0.0 { 0.0 } else { mass_gap(alpha, luttinger_k, cutoff)? };
    Ok(if b > (1.0 + band) * gap {
        PhaseLabel::Ferromagnetic
    } else if b < (1.0 - band) * gap {
        PhaseLabel::StaggeredOrder
    } else {
        PhaseLabel::LuttingerLiquid
    })
}
