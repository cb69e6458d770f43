//! The six sweeps. Each returns tables in deterministic row order; grid cells
//! are computed on the rayon pool and collected by index.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use xyphase::ed::{self, Boundary, Sector, SectorReport};
use xyphase::geophase::{self, dphase_db_at_time, mode_phase_at_time, mode_phase_xx};
use xyphase::quench::{self, QuenchSchedule};
use xyphase::rg::{self, PhaseCriteria, RgState};
use xyphase::{ChainSpec, Error};

use crate::config::*;
use crate::error::CliError;
use crate::table::Table;

const TWO_PI: f64 = 2.0 * PI;

/// Everything a run produced.
#[derive(Debug, Default)]
pub struct Output {
    pub files: Vec<(PathBuf, Table)>,
    /// Human-readable lines for stdout.
    pub summary: String,
    /// Set when the run completed but a check failed; files are still written.
    pub failure: Option<CliError>,
}

/// `dir/stem_suffix.csv` next to `out`.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn gapless_as_missing(v: xyphase::Result<f64>) -> Result<Option<f64>, CliError> {
    match v {
        Ok(v) => Ok(Some(v)),
        Err(Error::Gapless { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn check_phase(v: Option<f64>, what: &str) -> Result<Option<f64>, CliError> {
    match v {
        Some(g) if !(0.0..=TWO_PI).contains(&g) => {
            Err(CliError::Invariant(format!("{what}: phase {g} outside [0, 2 pi]")))
        }
        _ => Ok(v),
    }
}

fn check_derivative(v: Option<f64>, what: &str) -> Result<Option<f64>, CliError> {
    match v {
        Some(d) if !(d >= 0.0) => Err(CliError::Invariant(format!("{what}: derivative {d} < 0"))),
        _ => Ok(v),
    }
}

pub fn run(config: &SweepConfig) -> Result<Output, CliError> {
    match &config.settings {
        Settings::Fig1(c) => run_fig1(c, &config.out),
        Settings::Fig2(c) => run_fig2(c, &config.out),
        Settings::Quench(c) => run_quench(c, &config.out),
        Settings::Rg(c) => run_rg(c, &config.out),
        Settings::Noncontract(c) => run_noncontract(c, &config.out),
        Settings::Oracle(c) => run_oracle(c, &config.out),
    }
}

pub fn run_fig1(c: &Fig1Config, out: &Path) -> Result<Output, CliError> {
    let mut table = Table::new(["t_over_tauq", "tau_q", "alpha", "gamma_k"]);
    let ts = c.t_axis.values();
    for &alpha in &c.alphas {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidAnisotropy(alpha).into());
        }
        for &tau_q in &c.tau_qs {
            let gammas = ts
                .par_iter()
                .map(|&s| {
                    let t = s * tau_q;
                    let g = if alpha == 0.0 {
                        mode_phase_xx(c.k, t, tau_q)
                    } else {
                        mode_phase_at_time(c.k, t, tau_q, alpha)
                    };
                    check_phase(gapless_as_missing(g)?, "fig1")
                })
                .collect::<Result<Vec<_>, _>>()?;
            for (&s, g) in ts.iter().zip(gammas) {
                table.push(vec![s.into(), tau_q.into(), alpha.into(), g.into()]);
            }
        }
    }
    Ok(Output {
        summary: format!("fig1: {} rows, k = {}\n", table.rows.len(), c.k),
        files: vec![(out.to_path_buf(), table)],
        failure: None,
    })
}

pub fn run_fig2(c: &Fig2Config, out: &Path) -> Result<Output, CliError> {
    let alphas = c.alpha_axis.values();
    let ts = c.t_axis.values();
    if let Some(&a) = alphas.iter().find(|&&a| a < 0.0) {
        return Err(Error::InvalidAnisotropy(a).into());
    }
    let cells: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| ts.iter().map(move |&s| (a, s)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(alpha, s)| {
            let t = s * c.tau_q;
            let g = check_phase(gapless_as_missing(mode_phase_at_time(c.k, t, c.tau_q, alpha))?, "fig2")?;
            let d = check_derivative(
                gapless_as_missing(dphase_db_at_time(c.k, t, c.tau_q, alpha))?,
                "fig2",
            )?;
            Ok((g, d))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut phase = Table::new(["alpha", "t_over_tauq", "value"]);
    let mut deriv = Table::new(["alpha", "t_over_tauq", "value"]);
    for (&(a, s), (g, d)) in cells.iter().zip(values) {
        phase.push(vec![a.into(), s.into(), g.into()]);
        deriv.push(vec![a.into(), s.into(), d.into()]);
    }
    Ok(Output {
        summary: format!(
            "fig2: {}x{} grid, k = {}, tau_q = {}\n",
            alphas.len(),
            ts.len(),
            c.k,
            c.tau_q
        ),
        files: vec![(sibling(out, "phase"), phase), (sibling(out, "dphase_db"), deriv)],
        failure: None,
    })
}

pub fn run_quench(c: &QuenchConfig, out: &Path) -> Result<Output, CliError> {
    let spec = ChainSpec::new(c.n_sites, c.alpha)?;
    let mut summary_table = Table::new([
        "tau_q",
        "n_sites",
        "kink_count",
        "threshold",
        "safety_factor",
        "adiabatic",
    ]);
    let mut mode_columns = vec!["tau_q", "k", "p_k"];
    if c.evolve {
        mode_columns.push("p_evolve");
    }
    let mut modes = Table::new(mode_columns);
    let mut summary = String::new();
    for &tau_q in &c.tau_qs {
        let report = quench::kink_count(&spec, tau_q, c.safety_factor)?;
        summary_table.push(vec![
            tau_q.into(),
            c.n_sites.into(),
            report.kink_count.into(),
            report.threshold.into(),
            report.safety_factor.into(),
            report.adiabatic.into(),
        ]);
        writeln!(
            summary,
            "tau_q = {tau_q}: kinks = {:.6}, threshold = {:.4}, adiabatic = {}",
            report.kink_count, report.threshold, report.adiabatic
        )
        .unwrap();

        let evolved: Vec<Option<f64>> = if c.evolve && tau_q > 0.0 {
            let schedule = QuenchSchedule::standard(tau_q)?;
            report
                .per_mode_p
                .par_iter()
                .map(|&(k, _)| Ok(Some(quench::evolve_mode(k, c.alpha, &schedule, c.dt)?.excitation)))
                .collect::<Result<_, CliError>>()?
        } else {
            vec![None; report.per_mode_p.len()]
        };
        for (&(k, p), e) in report.per_mode_p.iter().zip(evolved) {
            let mut row = vec![tau_q.into(), k.into(), p.into()];
            if c.evolve {
                row.push(e.into());
            }
            modes.push(row);
        }
    }
    Ok(Output {
        summary,
        files: vec![(out.to_path_buf(), summary_table), (sibling(out, "modes"), modes)],
        failure: None,
    })
}

pub fn run_rg(c: &RgConfig, out: &Path) -> Result<Output, CliError> {
    let criteria = PhaseCriteria { band: c.band, ferro_field: c.ferro_field };
    let initial = c
        .initial
        .iter()
        .map(|&(a, k)| RgState::new(a, k))
        .collect::<Result<Vec<_>, _>>()?;
    let trajectories = initial
        .par_iter()
        .map(|&s| rg::rg_flow(s, c.l_max, c.dl, c.alpha_cap))
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(["trajectory", "l", "alpha", "K", "status"]);
    let mut summary = String::new();
    for (i, (s0, traj)) in initial.iter().zip(&trajectories).enumerate() {
        let status = traj.status.to_string();
        for s in &traj.states {
            table.push(vec![i.into(), s.l.into(), s.alpha.into(), s.luttinger_k.into(), status.as_str().into()]);
        }
        let label = rg::classify_phase(s0.luttinger_k, s0.alpha, c.field, c.cutoff, criteria)?;
        let end = traj.last();
        writeln!(
            summary,
            "trajectory {i}: alpha = {}, K = {} -> {status} at l = {:.4} (alpha = {:.6e}, K = {:.6}); phase at B = {}: {label}",
            s0.alpha, s0.luttinger_k, end.l, end.alpha, end.luttinger_k, c.field
        )
        .unwrap();
    }
    Ok(Output { summary, files: vec![(out.to_path_buf(), table)], failure: None })
}

pub fn run_noncontract(c: &NoncontractConfig, out: &Path) -> Result<Output, CliError> {
    if !(c.field > -1.0 && c.field < 1.0) {
        return Err(CliError::Args(format!("--field {} outside (-1, 1)", c.field)));
    }
    let rows = geophase::noncontractibility_scan(c.field, &c.alphas, &c.sizes)?;
    let mut table = Table::new(["alpha", "N", "gamma_g_over_M"]);
    for r in &rows {
        check_phase(Some(r.gamma_per_pair), "noncontract")?;
        table.push(vec![r.alpha.into(), r.n_sites.into(), r.gamma_per_pair.into()]);
    }
    let limit = geophase::noncontractible_limit(c.field);
    let summary = format!(
        "noncontract: B = {}, limit 2 pi (1 - arccos(B) / pi) = {limit:.10}, last row = {:.10}\n",
        c.field,
        rows.last().map_or(f64::NAN, |r| r.gamma_per_pair)
    );
    Ok(Output { summary, files: vec![(out.to_path_buf(), table)], failure: None })
}

/// Distance on the circle.
fn circular_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TWO_PI);
    d.min(TWO_PI - d)
}

struct Case {
    id: String,
    analytic: f64,
    numeric: f64,
    diff: f64,
    tol: f64,
}

impl Case {
    fn passed(&self) -> bool {
        self.diff <= self.tol
    }
}

fn mode_cases(c: &OracleConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Case>, CliError> {
    let fields: Vec<f64> = (0..c.grid).map(|i| grid_point(-1.5, 1.5, i, c.grid)).collect();
    let alphas: Vec<f64> = (0..c.grid).map(|i| grid_point(0.05, 2.0, i, c.grid)).collect();
    let mut points = Vec::with_capacity(c.grid * c.grid);
    for &b in &fields {
        for &a in &alphas {
            points.push((b, a, rng.random_range(0.02..PI - 0.02)));
        }
    }
    points
        .par_iter()
        .map(|&(b, a, k)| {
            let analytic = geophase::mode_phase(k, b, a)?;
            let numeric = ed::mode_berry_numeric(k, b, a, c.mode_steps)?;
            Ok(Case {
                id: format!("mode B={b:.6} alpha={a:.6} k={k:.6}"),
                analytic,
                numeric,
                diff: (analytic - numeric).abs(),
                tol: c.mode_tol,
            })
        })
        .collect()
}

fn grid_point(min: f64, max: f64, i: usize, count: usize) -> f64 {
    if count == 1 {
        0.5 * (min + max)
    } else {
        min + (max - min) * i as f64 / (count - 1) as f64
    }
}

fn loop_cases(c: &OracleConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Case>, CliError> {
    let mut params: Vec<(usize, f64, f64)> = Vec::new();
    for &n in &c.sizes {
        match n {
            6 => params.push((6, 1.0, 0.5)),
            4 => params.push((4, 0.5, 0.0)),
            _ => {}
        }
        for _ in 0..c.loop_cases {
            params.push((n, rng.random_range(0.3..1.5), rng.random_range(-0.8..0.8)));
        }
    }
    let mut cases = Vec::with_capacity(params.len());
    // each loop is already parallel over its eigensolves
    for (n, alpha, field) in params {
        let spec = ChainSpec::new(n, alpha)?;
        let analytic = geophase::total_phase(&spec, field)?;
        let result = ed::berry_phase_loop(n, alpha, field, c.loop_steps, Sector::Even)?;
        let h = ed::build_hamiltonian(n, alpha, field, 0.0, Boundary::Periodic)?;
        let note = if SectorReport::of(&h).even_is_ground() { "" } else { " odd-sector-ground" };
        let diff = if result.is_valid() { circular_diff(analytic, result.phase) } else { f64::INFINITY };
        cases.push(Case {
            id: format!("loop N={n} alpha={alpha:.6} B={field:.6}{note}"),
            analytic: analytic.rem_euclid(TWO_PI),
            numeric: result.phase,
            diff,
            tol: c.loop_tol,
        });
    }
    Ok(cases)
}

fn spectrum_cases(c: &OracleConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Case>, CliError> {
    let n = 6;
    let params: Vec<(f64, f64, f64)> = (0..20)
        .map(|_| {
            (
                rng.random_range(0.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(0.0..PI),
            )
        })
        .collect();
    params
        .par_iter()
        .map(|&(alpha, field, phi)| {
            let plain = ed::build_hamiltonian(n, alpha, field, 0.0, Boundary::Periodic)?.spectrum(Sector::Full);
            let rotated = ed::build_hamiltonian(n, alpha, field, phi, Boundary::Periodic)?.spectrum(Sector::Full);
            let diff = plain
                .iter()
                .zip(&rotated)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(Case {
                id: format!("spectrum N={n} alpha={alpha:.6} B={field:.6} phi={phi:.6}"),
                analytic: plain[0],
                numeric: rotated[0],
                diff,
                tol: c.spectrum_tol,
            })
        })
        .collect()
}

fn energy_cases(c: &OracleConfig) -> Result<Vec<Case>, CliError> {
    let mut cases = Vec::new();
    for &n in &c.sizes {
        for &(alpha, field) in &[(1.0, 0.5), (0.5, 0.0), (0.3, -0.7)] {
            let spec = ChainSpec::new(n, alpha)?;
            let analytic = -2.0 * spec.modes(field)?.iter().map(|m| m.lambda_k).sum::<f64>();
            let h = ed::build_hamiltonian(n, alpha, field, 0.0, Boundary::Periodic)?;
            let numeric = ed::ground_state(&h, Sector::Even)?.energy;
            cases.push(Case {
                id: format!("energy N={n} alpha={alpha:.6} B={field:.6}"),
                analytic,
                numeric,
                diff: (analytic - numeric).abs(),
                tol: c.spectrum_tol,
            });
        }
    }
    Ok(cases)
}

pub fn run_oracle(c: &OracleConfig, out: &Path) -> Result<Output, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut cases = mode_cases(c, &mut rng)?;
    cases.extend(loop_cases(c, &mut rng)?);
    cases.extend(spectrum_cases(c, &mut rng)?);
    cases.extend(energy_cases(c)?);

    let mut table = Table::new(["case", "analytic", "numeric", "abs_diff", "flag"]);
    let mut failed = Vec::new();
    for case in &cases {
        let flag = if case.passed() { "pass" } else { "FAIL" };
        if !case.passed() {
            failed.push(format!("{} |diff| = {:e} > {:e}", case.id, case.diff, case.tol));
        }
        table.push(vec![
            case.id.as_str().into(),
            case.analytic.into(),
            case.numeric.into(),
            case.diff.into(),
            flag.into(),
        ]);
    }
    let mut summary = format!("oracle: {} cases, {} failed\n", cases.len(), failed.len());
    for f in &failed {
        writeln!(summary, "  {f}").unwrap();
    }
    let failure = (!failed.is_empty())
        .then(|| CliError::OracleFailed(format!("{} of {} cases out of tolerance", failed.len(), cases.len())));
    Ok(Output { files: vec![(out.to_path_buf(), table)], summary, failure })
}
