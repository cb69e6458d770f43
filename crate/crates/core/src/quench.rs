//! Linear field ramp, Landau-Zener excitation statistics and kink counting.
//!
//! [`evolve_mode`] integrates the Schrödinger equation of a single `(k, -k)`
//! pair through the ramp and is the numerical check on the closed-form
//! excitation probability [`lz_probability`].

use std::f64::consts::PI;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::model::ChainSpec;

type C64 = Complex<f64>;

/// Default margin for calling a ramp adiabatic: `tau_q > 10 N^2 / (2 pi^3)`.
pub const DEFAULT_SAFETY_FACTOR: f64 = 10.0;

/// The ramp `B(t) = -t / tau_q` on the window `[t_start, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchSchedule {
    tau_q: f64,
    t_start: f64,
    t_end: f64,
}

impl QuenchSchedule {
    pub fn new(tau_q: f64, t_start: f64, t_end: f64) -> Result<Self> {
        if !(tau_q > 0.0 && tau_q.is_finite()) {
            return Err(Error::InvalidSchedule(format!("tau_q = {tau_q} must be positive")));
        }
        if !(t_start < t_end && t_end <= 0.0 && t_start.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "need t_start < t_end <= 0, got [{t_start}, {t_end}]"
            )));
        }
        Ok(Self { tau_q, t_start, t_end })
    }

    /// Ramp from `B = 5` down to `B = 0`.
    pub fn standard(tau_q: f64) -> Result<Self> {
        Self::new(tau_q, -5.0 * tau_q, 0.0)
    }

    pub fn tau_q(&self) -> f64 {
        self.tau_q
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn field(&self, t: f64) -> f64 {
        -t / self.tau_q
    }
}

/// `B(t) = -t / tau_q` for `t <= 0`.
pub fn field_at(t: f64, tau_q: f64) -> Result<f64> {
    if !(tau_q > 0.0) {
        return Err(Error::InvalidSchedule(format!("tau_q = {tau_q} must be positive")));
    }
    if t > 0.0 {
        return Err(Error::PositiveTime(t));
    }
    Ok(-t / tau_q)
}

/// Landau-Zener estimate `p_k = exp(-2 pi tau_q k^2)`.
///
/// Carries no anisotropy dependence; [`evolve_mode`] measures how good the
/// approximation is.
pub fn lz_probability(k: f64, tau_q: f64) -> f64 {
    (-2.0 * PI * tau_q * k * k).exp()
}

/// `N^2 / (2 pi^3)`, the ramp time scale beyond which only the `k0` pair
/// is excited.
pub fn adiabatic_threshold(n_sites: usize) -> f64 {
    let n = n_sites as f64;
    n * n / (2.0 * PI.powi(3))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KinkReport {
    /// `(k, p_k)` for every mode, negative momenta included.
    pub per_mode_p: Vec<(f64, f64)>,
    pub kink_count: f64,
    pub threshold: f64,
    pub safety_factor: f64,
    pub adiabatic: bool,
}

/// Expected kink number `sum_k p_k` over all `N` grid modes (both signs of k).
pub fn kink_count(spec: &ChainSpec, tau_q: f64, safety_factor: f64) -> Result<KinkReport> {
    if !(tau_q >= 0.0) {
        return Err(Error::InvalidSchedule(format!("tau_q = {tau_q} must be non-negative")));
    }
    if !(safety_factor > 0.0) {
        return Err(Error::InvalidArgument(format!("safety factor {safety_factor}")));
    }
    let momenta = spec.momenta();
    let mut per_mode_p = Vec::with_capacity(2 * momenta.len());
    for &k in momenta.iter().rev() {
        per_mode_p.push((-k, lz_probability(-k, tau_q)));
    }
    for &k in &momenta {
        per_mode_p.push((k, lz_probability(k, tau_q)));
    }
    let threshold = adiabatic_threshold(spec.n_sites());
    Ok(KinkReport {
        kink_count: per_mode_p.iter().map(|&(_, p)| p).sum(),
        per_mode_p,
        threshold,
        safety_factor,
        adiabatic: tau_q > safety_factor * threshold,
    })
}

/// Outcome of integrating one pair through the ramp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEvolution {
    /// `|<excited(t_end)|psi(t_end)>|^2`.
    pub excitation: f64,
    /// Largest `| |psi|^2 - 1 |` seen during the run.
    pub norm_drift: f64,
    /// False when the field window misses `B = cos k`.
    pub crosses_gap_minimum: bool,
    /// False when `alpha sin k = 0`: the pair never mixes.
    pub coupled: bool,
    pub steps: usize,
}

/// Pair Hamiltonian `2 [-(cos k - B) Z + alpha sin k X]` on
/// `{|0>_k|0>_-k, |1>_k|1>_-k}`, returned as its `(x, z)` components.
fn pair_field(k: f64, field: f64, alpha: f64) -> (f64, f64) {
    (2.0 * alpha * k.sin(), -2.0 * (k.cos() - field))
}

/// Eigenvectors of `x X + z Z`: `(ground, excited)`.
fn eigenstates(x: f64, z: f64) -> ([C64; 2], [C64; 2]) {
    let half = 0.5 * x.atan2(z);
    let (s, c) = half.sin_cos();
    (
        [C64::new(-s, 0.0), C64::new(c, 0.0)],
        [C64::new(c, 0.0), C64::new(s, 0.0)],
    )
}

/// Exact propagator `exp(-i (x X + z Z) dt)` applied to `psi`.
fn step(psi: [C64; 2], x: f64, z: f64, dt: f64) -> [C64; 2] {
    let h = x.hypot(z);
    if h == 0.0 {
        return psi;
    }
    let (sin, cos) = (h * dt).sin_cos();
    let (nx, nz) = (x / h, z / h);
    let mi_sin = C64::new(0.0, -sin);
    [
        psi[0] * (cos + mi_sin * nz) + psi[1] * (mi_sin * nx),
        psi[0] * (mi_sin * nx) + psi[1] * (cos - mi_sin * nz),
    ]
}

fn norm_sqr(psi: &[C64; 2]) -> f64 {
    psi[0].norm_sqr() + psi[1].norm_sqr()
}

/// Integrate the pair `k` from the ground state at `t_start` to `t_end` with
/// midpoint exponential steps of at most `dt`.
pub fn evolve_mode(
    k: f64,
    alpha: f64,
    schedule: &QuenchSchedule,
    dt: f64,
) -> Result<ModeEvolution> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::UnstableStep(format!("dt = {dt}")));
    }
    let (b_start, b_end) = (schedule.field(schedule.t_start), schedule.field(schedule.t_end));
    // |H| is convex in B, so its maximum on the window is at an end point.
    let norm_at = |b: f64| {
        let (x, z) = pair_field(k, b, alpha);
        x.hypot(z)
    };
    let h_max = norm_at(b_start).max(norm_at(b_end));
    if dt * h_max >= 0.1 {
        return Err(Error::UnstableStep(format!(
            "dt * max|H| = {:.3} (must stay below 0.1)",
            dt * h_max
        )));
    }

    let window = schedule.t_end - schedule.t_start;
    let steps = (window / dt).ceil().max(1.0) as usize;
    let h = window / steps as f64;

    let (x0, z0) = pair_field(k, b_start, alpha);
    let mut psi = eigenstates(x0, z0).0;
    let mut norm_drift: f64 = 0.0;
    for i in 0..steps {
        let t_mid = schedule.t_start + (i as f64 + 0.5) * h;
        let (x, z) = pair_field(k, schedule.field(t_mid), alpha);
        psi = step(psi, x, z, h);
        norm_drift = norm_drift.max((norm_sqr(&psi) - 1.0).abs());
    }

    let (x1, z1) = pair_field(k, b_end, alpha);
    let excited = eigenstates(x1, z1).1;
    let overlap = excited[0].conj() * psi[0] + excited[1].conj() * psi[1];
    let cos_k = k.cos();
    Ok(ModeEvolution {
        excitation: overlap.norm_sqr(),
        norm_drift,
        crosses_gap_minimum: b_end.min(b_start) <= cos_k && cos_k <= b_end.max(b_start),
        coupled: alpha * k.sin() != 0.0,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn field_examples() {
        assert_eq!(field_at(-3.0, 3.0).unwrap(), 1.0);
        assert_eq!(field_at(0.0, 9.0).unwrap(), 0.0);
        assert_eq!(field_at(-2.5, 5.0).unwrap(), 0.5);
        assert_eq!(field_at(0.1, 1.0), Err(Error::PositiveTime(0.1)));
        assert!(field_at(-1.0, 0.0).is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!(QuenchSchedule::new(1.0, -1.0, 0.5).is_err());
        assert!(QuenchSchedule::new(1.0, -1.0, -2.0).is_err());
        assert!(QuenchSchedule::new(-1.0, -1.0, 0.0).is_err());
        let s = QuenchSchedule::standard(4.0).unwrap();
        assert_eq!(s.field(s.t_start()), 5.0);
        assert_eq!(s.field(s.t_end()), 0.0);
    }

    #[test]
    fn lz_examples() {
        assert_eq!(lz_probability(0.7, 0.0), 1.0);
        assert_relative_eq!(lz_probability(PI / 100.0, 10.0), (-0.0620126f64).exp(), epsilon = 1e-7);
        assert_relative_eq!(lz_probability(PI / 100.0, 10.0), 0.93987, epsilon = 1e-5);
        assert!(lz_probability(1e3, 1.0) < 1e-300);
    }

    #[test]
    fn threshold_and_kinks() {
        assert_relative_eq!(adiabatic_threshold(100), 1e4 / (2.0 * PI * PI * PI), max_relative = 1e-12);
        assert_relative_eq!(adiabatic_threshold(100), 161.26, epsilon = 5e-3);

        let spec = ChainSpec::new(100, 1.0).unwrap();
        let report = kink_count(&spec, 10.0, DEFAULT_SAFETY_FACTOR).unwrap();
        let brute: f64 = 2.0
            * (1..=50)
                .map(|m| {
                    let k = (2 * m - 1) as f64 * PI / 100.0;
                    (-2.0 * PI * 10.0 * k * k).exp()
                })
                .sum::<f64>();
        assert_relative_eq!(report.kink_count, brute, epsilon = 1e-12);
        assert_eq!(report.per_mode_p.len(), 100);

        let fast = kink_count(&spec, 0.0, DEFAULT_SAFETY_FACTOR).unwrap();
        assert_eq!(fast.kink_count, 100.0);

        assert!(kink_count(&spec, 1e9, 10.0).unwrap().kink_count < 1e-300);
        assert!(!kink_count(&spec, 1000.0, 10.0).unwrap().adiabatic);
        assert!(kink_count(&spec, 2000.0, 10.0).unwrap().adiabatic);
    }

    #[test]
    fn single_pair_regime() {
        for n in [10, 40, 100] {
            let spec = ChainSpec::new(n, 1.0).unwrap();
            let tau = 10.0 * adiabatic_threshold(n) * 1.01;
            let r = kink_count(&spec, tau, 10.0).unwrap();
            let p0 = lz_probability(spec.k0(), tau);
            assert!(r.kink_count < 2.0 * p0 * (1.0 + 1e-2));
        }
    }

    #[test]
    fn eigenstates_diagonalize() {
        for &(x, z) in &[(0.3, -1.2), (0.0, 2.0), (0.0, -2.0), (1.0, 0.0), (-0.4, 0.1)] {
            let (g, e) = eigenstates(x, z);
            let h = x.hypot(z);
            let apply = |v: [C64; 2]| [v[0] * z + v[1] * x, v[0] * x - v[1] * z];
            let hg = apply(g);
            let he = apply(e);
            for i in 0..2 {
                assert!((hg[i] + g[i] * h).norm() < 1e-14);
                assert!((he[i] - e[i] * h).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn uncoupled_mode_stays_diabatic() {
        // alpha = 0: no mixing, the pair stays occupied and ends up excited
        let s = QuenchSchedule::standard(1.0).unwrap();
        let r = evolve_mode(0.4, 0.0, &s, 1e-3).unwrap();
        assert!(!r.coupled);
        assert_relative_eq!(r.excitation, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn slow_ramp_is_adiabatic() {
        let k = PI / 100.0;
        let s = QuenchSchedule::standard(5000.0).unwrap();
        let r = evolve_mode(k, 1.0, &s, 0.01).unwrap();
        assert!(r.excitation < 1e-3, "{}", r.excitation);
        assert!(r.norm_drift < 1e-8);
    }

    #[test]
    fn unstable_step_rejected() {
        let s = QuenchSchedule::standard(1.0).unwrap();
        assert!(matches!(evolve_mode(0.1, 1.0, &s, 0.5), Err(Error::UnstableStep(_))));
    }

    #[test]
    fn window_missing_crossing_is_flagged() {
        let s = QuenchSchedule::new(1.0, -0.5, 0.0).unwrap();
        let r = evolve_mode(0.1, 1.0, &s, 1e-3).unwrap();
        assert!(!r.crosses_gap_minimum);
    }

    #[test]
    fn lz_oracle_single_point() {
        let k = PI / 100.0;
        let s = QuenchSchedule::standard(10.0).unwrap();
        let r = evolve_mode(k, 1.0, &s, 2e-3).unwrap();
        let p = lz_probability(k, 10.0);
        assert!((r.excitation - p).abs() / p < 0.1, "{} vs {}", r.excitation, p);
        assert!(r.norm_drift < 1e-8);
    }
}
