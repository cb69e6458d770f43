//! Sweep configuration from flags and an optional TOML file.
//!
//! Both sources share [`SweepArgs`]. A flag given on the command line wins
//! over the same key in the file, and anything left unset falls back to the
//! per-command defaults in [`SweepConfig::resolve`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Fig1,
    Fig2,
    Quench,
    Rg,
    Noncontract,
    Oracle,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Fig1 => "fig1",
            CommandKind::Fig2 => "fig2",
            CommandKind::Quench => "quench",
            CommandKind::Rg => "rg",
            CommandKind::Noncontract => "noncontract",
            CommandKind::Oracle => "oracle",
        }
    }
}

/// Every tunable, all optional. Used for both flags and the config file.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SweepArgs {
    /// Output CSV path (commands with several outputs derive names from its stem)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomly sampled oracle cases
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Anisotropy; repeat for several series
    #[arg(long, global = true)]
    #[serde(default)]
    pub alpha: Vec<f64>,
    /// Quench time scale; repeat for several series
    #[arg(long = "tauq", global = true)]
    #[serde(default)]
    pub tauq: Vec<f64>,
    /// Chain size; repeat for scans over size
    #[arg(long, global = true)]
    #[serde(default)]
    pub nsites: Vec<usize>,
    /// Momentum of the plotted mode
    #[arg(long, global = true)]
    pub k: Option<f64>,
    /// Transverse field (noncontract, rg classification)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub field: Option<f64>,
    /// Start of the time axis in units of tau_q
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tmin: Option<f64>,
    /// End of the time axis in units of tau_q
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tmax: Option<f64>,
    /// Number of time samples
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub alpha_min: Option<f64>,
    #[arg(long, global = true)]
    pub alpha_max: Option<f64>,
    /// Number of anisotropy samples (fig2)
    #[arg(long, global = true)]
    pub alpha_samples: Option<usize>,

    /// Relative width of the B ~ M window in phase classification
    #[arg(long, global = true)]
    pub band: Option<f64>,
    /// Field above which a K <= 1/2 liquid counts as polarized
    #[arg(long, global = true)]
    pub ferro_field: Option<f64>,
    /// Sine-Gordon cutoff
    #[arg(long, global = true)]
    pub cutoff: Option<f64>,
    /// Adiabatic when tau_q > safety_factor * N^2 / (2 pi^3)
    #[arg(long, global = true)]
    pub safety_factor: Option<f64>,

    /// Initial RG couplings as "alpha:K"; repeatable
    #[arg(long, global = true)]
    #[serde(default)]
    pub init: Vec<String>,
    #[arg(long, global = true)]
    pub lmax: Option<f64>,
    #[arg(long, global = true)]
    pub dl: Option<f64>,
    #[arg(long, global = true)]
    pub alpha_cap: Option<f64>,

    /// Cross-check each p_k by integrating the pair through the ramp
    #[arg(long, global = true)]
    #[serde(default)]
    pub evolve: bool,
    /// Integrator step for --evolve
    #[arg(long, global = true)]
    pub dt: Option<f64>,

    /// Loop resolution for the oracle's per-mode phases
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Loop resolution for the oracle's many-body phases
    #[arg(long, global = true)]
    pub loop_steps: Option<usize>,
    /// Random many-body loop cases per chain size
    #[arg(long, global = true)]
    pub cases: Option<usize>,
    /// Side of the random (B, alpha) grid of per-mode oracle cases
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub mode_tol: Option<f64>,
    #[arg(long, global = true)]
    pub loop_tol: Option<f64>,
    #[arg(long, global = true)]
    pub spectrum_tol: Option<f64>,
}

impl SweepArgs {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        Ok(toml::from_str(&text)?)
    }

    /// Fill everything unset here from `other`.
    pub fn or(self, other: SweepArgs) -> SweepArgs {
        fn vec_or<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        SweepArgs {
            out: self.out.or(other.out),
            seed: self.seed.or(other.seed),
            threads: self.threads.or(other.threads),
            alpha: vec_or(self.alpha, other.alpha),
            tauq: vec_or(self.tauq, other.tauq),
            nsites: vec_or(self.nsites, other.nsites),
            k: self.k.or(other.k),
            field: self.field.or(other.field),
            tmin: self.tmin.or(other.tmin),
            tmax: self.tmax.or(other.tmax),
            samples: self.samples.or(other.samples),
            alpha_min: self.alpha_min.or(other.alpha_min),
            alpha_max: self.alpha_max.or(other.alpha_max),
            alpha_samples: self.alpha_samples.or(other.alpha_samples),
            band: self.band.or(other.band),
            ferro_field: self.ferro_field.or(other.ferro_field),
            cutoff: self.cutoff.or(other.cutoff),
            safety_factor: self.safety_factor.or(other.safety_factor),
            init: vec_or(self.init, other.init),
            lmax: self.lmax.or(other.lmax),
            dl: self.dl.or(other.dl),
            alpha_cap: self.alpha_cap.or(other.alpha_cap),
            evolve: self.evolve || other.evolve,
            dt: self.dt.or(other.dt),
            steps: self.steps.or(other.steps),
            loop_steps: self.loop_steps.or(other.loop_steps),
            cases: self.cases.or(other.cases),
            grid: self.grid.or(other.grid),
            mode_tol: self.mode_tol.or(other.mode_tol),
            loop_tol: self.loop_tol.or(other.loop_tol),
            spectrum_tol: self.spectrum_tol.or(other.spectrum_tol),
        }
    }
}

/// Inclusive `(min, max, count)` axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self, CliError> {
        if count < 2 || !min.is_finite() || !max.is_finite() || min >= max {
            return Err(CliError::Args(format!(
                "axis [{min}, {max}] with {count} samples (need min < max, count >= 2)"
            )));
        }
        Ok(Self { min, max, count })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Config {
    pub k: f64,
    pub alphas: Vec<f64>,
    pub tau_qs: Vec<f64>,
    pub t_axis: Axis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Config {
    pub k: f64,
    pub tau_q: f64,
    pub alpha_axis: Axis,
    pub t_axis: Axis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuenchConfig {
    pub n_sites: usize,
    pub alpha: f64,
    pub tau_qs: Vec<f64>,
    pub safety_factor: f64,
    pub evolve: bool,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RgConfig {
    pub initial: Vec<(f64, f64)>,
    pub l_max: f64,
    pub dl: f64,
    pub alpha_cap: f64,
    pub field: f64,
    pub cutoff: f64,
    pub band: f64,
    pub ferro_field: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoncontractConfig {
    pub field: f64,
    pub alphas: Vec<f64>,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub grid: usize,
    pub mode_steps: usize,
    pub loop_steps: usize,
    pub loop_cases: usize,
    pub mode_tol: f64,
    pub loop_tol: f64,
    pub spectrum_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Settings {
    Fig1(Fig1Config),
    Fig2(Fig2Config),
    Quench(QuenchConfig),
    Rg(RgConfig),
    Noncontract(NoncontractConfig),
    Oracle(OracleConfig),
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub command: CommandKind,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub settings: Settings,
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Args(format!("--{name} must be positive, got {v}")))
    }
}

fn parse_init(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Args(format!("--init expects \"alpha:K\", got {s:?}"));
    let (a, k) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, k.trim().parse().map_err(|_| bad())?))
}

impl SweepConfig {
    pub fn resolve(command: CommandKind, args: SweepArgs) -> Result<Self, CliError> {
        let out = args
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", command.name())));
        if args.threads == Some(0) {
            return Err(CliError::Args("--threads must be at least 1".into()));
        }
        let first_size = |default: usize| args.nsites.first().copied().unwrap_or(default);
        let settings = match command {
            CommandKind::Fig1 => {
                let n = first_size(100);
                if n == 0 {
                    return Err(CliError::Args("--nsites must be positive".into()));
                }
                let tau_qs = if args.tauq.is_empty() { vec![1.0, 2.0, 5.0, 10.0] } else { args.tauq.clone() };
                for &t in &tau_qs {
                    positive("tauq", t)?;
                }
                Settings::Fig1(Fig1Config {
                    k: args.k.unwrap_or(PI / n as f64),
                    alphas: if args.alpha.is_empty() { vec![0.5, 0.0] } else { args.alpha.clone() },
                    tau_qs,
                    t_axis: Axis::new(args.tmin.unwrap_or(-3.0), args.tmax.unwrap_or(0.0), args.samples.unwrap_or(600))?,
                })
            }
            CommandKind::Fig2 => {
                if args.tauq.len() > 1 {
                    return Err(CliError::Args(
                        "fig2 is drawn in units of t / tau_q; give at most one --tauq".into(),
                    ));
                }
                Settings::Fig2(Fig2Config {
                    k: args.k.unwrap_or(PI / 2.0),
                    tau_q: positive("tauq", args.tauq.first().copied().unwrap_or(1.0))?,
                    alpha_axis: Axis::new(
                        args.alpha_min.unwrap_or(0.0),
                        args.alpha_max.unwrap_or(1.0),
                        args.alpha_samples.unwrap_or(200),
                    )?,
                    t_axis: Axis::new(args.tmin.unwrap_or(-3.0), args.tmax.unwrap_or(0.0), args.samples.unwrap_or(200))?,
                })
            }
            CommandKind::Quench => {
                let tau_qs = if args.tauq.is_empty() {
                    vec![0.0, 1.0, 10.0, 100.0, 1000.0, 2000.0]
                } else {
                    args.tauq.clone()
                };
                if let Some(t) = tau_qs.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
                    return Err(CliError::Args(format!("--tauq must be >= 0, got {t}")));
                }
                Settings::Quench(QuenchConfig {
                    n_sites: first_size(100),
                    alpha: args.alpha.first().copied().unwrap_or(1.0),
                    tau_qs,
                    safety_factor: positive("safety-factor", args.safety_factor.unwrap_or(10.0))?,
                    evolve: args.evolve,
                    dt: positive("dt", args.dt.unwrap_or(5e-3))?,
                })
            }
            CommandKind::Rg => {
                let initial = if args.init.is_empty() {
                    vec![(0.0, 0.3), (0.1, 1.0), (0.1, 0.3)]
                } else {
                    args.init.iter().map(|s| parse_init(s)).collect::<Result<_, _>>()?
                };
                Settings::Rg(RgConfig {
                    initial,
                    l_max: positive("lmax", args.lmax.unwrap_or(10.0))?,
                    dl: positive("dl", args.dl.unwrap_or(xyphase::rg::DEFAULT_DL))?,
                    alpha_cap: positive("alpha-cap", args.alpha_cap.unwrap_or(xyphase::rg::DEFAULT_ALPHA_CAP))?,
                    field: args.field.unwrap_or(0.0),
                    cutoff: positive("cutoff", args.cutoff.unwrap_or(1.0))?,
                    band: args.band.unwrap_or(0.5),
                    ferro_field: positive("ferro-field", args.ferro_field.unwrap_or(1.0))?,
                })
            }
            CommandKind::Noncontract => Settings::Noncontract(NoncontractConfig {
                field: args.field.unwrap_or(0.5),
                alphas: if args.alpha.is_empty() { vec![1e-1, 1e-2, 1e-3, 1e-4] } else { args.alpha.clone() },
                sizes: if args.nsites.is_empty() { vec![100, 1000, 10_000] } else { args.nsites.clone() },
            }),
            CommandKind::Oracle => {
                let sizes = if args.nsites.is_empty() { vec![4, 6] } else { args.nsites.clone() };
                if let Some(n) = sizes.iter().find(|&&n| !(2..=8).contains(&n) || n % 2 != 0) {
                    return Err(CliError::Args(format!("oracle chain sizes must be even and <= 8, got {n}")));
                }
                Settings::Oracle(OracleConfig {
                    seed: args.seed.unwrap_or(2024),
                    sizes,
                    grid: args.grid.unwrap_or(20).max(1),
                    mode_steps: args.steps.unwrap_or(10_000),
                    loop_steps: args.loop_steps.unwrap_or(4000),
                    loop_cases: args.cases.unwrap_or(3),
                    mode_tol: positive("mode-tol", args.mode_tol.unwrap_or(1e-4))?,
                    loop_tol: positive("loop-tol", args.loop_tol.unwrap_or(1e-3))?,
                    spectrum_tol: positive("spectrum-tol", args.spectrum_tol.unwrap_or(1e-10))?,
                })
            }
        };
        Ok(Self { command, out, threads: args.threads, settings })
    }
}
