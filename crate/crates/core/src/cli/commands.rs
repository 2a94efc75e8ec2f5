//! Subcommand implementations. Each returns a [`RunReport`] and writes its
//! CSV files into the configured output directory.

use std::path::Path;

use rayon::prelude::*;

use super::config::{config_for, ConfigError, GridSection, RunConfig, RunSection};
use super::report::{write_csv, RunReport, Verdict};
use super::CliError;
use crate::decoherence::{
    bath_excitation, excitation_fluctuation, fluctuation_relation_check, point, reduced_density_matrix,
    thermal_factor, vacuum_factor,
};
use crate::error::Error;
use crate::kernels::{back_action_f, back_action_f_quadrature, vacuum_overlap_integral, vacuum_overlap_quadrature, QuadratureSpec};
use crate::model::{preset_boson_mode, validate_config, BathInitialState, BathSpec, LevelPair, ValidatedModel};
use crate::oracle::{truncation_autotune, Oracle, ThermalOracle, Truncation, TAIL_MASS_LIMIT};

pub const ORACLE_TOL: f64 = 1e-8;
pub const POPULATION_TOL: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const QUADRATURE_GAP_TOL: f64 = 1e-8;
const THERMAL_M_MAX: usize = 5000;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SeriesOptions {
    pub magnitude_only: bool,
    pub verify_quadrature: bool,
}

fn pair_tag(pair: LevelPair) -> String {
    format!("{}_{}", pair.n(), pair.m())
}

fn non_finite(rows: &[Vec<f64>]) -> f64 {
    rows.iter().flatten().filter(|x| !x.is_finite()).count() as f64
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn cmd_series(cfg: &RunConfig, opts: SeriesOptions) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("series");
    for &pair in &cfg.pairs {
        let points = report.time(&format!("series {}", pair_tag(pair)), || {
            cfg.times
                .par_iter()
                .map(|&t| point(&cfg.model, pair, t, &cfg.quad))
                .collect::<Result<Vec<_>, _>>()
        })?;
        let rows: Vec<Vec<f64>> = points
            .iter()
            .map(|p| {
                let (exc, total, gauss) = if opts.magnitude_only {
                    (p.excitation_part.abs(), p.total.abs(), p.gaussian_total.abs())
                } else {
                    (p.excitation_part, p.total, p.gaussian_total)
                };
                vec![p.t, p.vacuum_part, exc, total, p.theta, gauss]
            })
            .collect();
        let name = format!("series_{}.csv", pair_tag(pair));
        report.files.push(write_csv(
            &cfg.output,
            &name,
            &["t", "vacuum", "excitation", "total", "theta", "gaussian"],
            &rows,
        )?);
        report.push(Verdict::new(format!("{name} finite"), non_finite(&rows), 0.0));
    }
    if opts.verify_quadrature {
        verify_quadrature(cfg, &mut report)?;
    }
    Ok(report)
}

/// Compare the closed-form spectral integrals with adaptive quadrature.
fn verify_quadrature(cfg: &RunConfig, report: &mut RunReport) -> Result<(), CliError> {
    let BathSpec::Ohmic { gamma, cutoff } = *cfg.model.bath() else {
        report.push(Verdict::new("quadrature gap", 0.0, QUADRATURE_GAP_TOL).with_detail("discrete bath uses exact sums"));
        return Ok(());
    };
    let gaps = report.time("verify quadrature", || {
        cfg.times
            .par_iter()
            .map(|&t| -> Result<f64, Error> {
                let bath = cfg.model.bath();
                let vac = relative_gap(vacuum_overlap_quadrature(gamma, cutoff, t, &cfg.quad)?.value, vacuum_overlap_integral(bath, t)?);
                let f = relative_gap(back_action_f_quadrature(gamma, cutoff, t, &cfg.quad)?.value, back_action_f(bath, t)?);
                Ok(vac.max(f))
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    let worst = gaps.into_iter().fold(0.0, f64::max);
    report.push(Verdict::new("quadrature gap", worst, QUADRATURE_GAP_TOL));
    Ok(())
}

pub fn cmd_thermal_map(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let BathInitialState::Thermal { temperature } = *cfg.model.state() else {
        return Err(ConfigError::new("initial_state.kind", "thermal-map needs a thermal initial state").into());
    };
    let temps = cfg.temperatures.clone().unwrap_or_else(|| vec![temperature]);
    let mut report = RunReport::new("thermal-map");
    let grid: Vec<(f64, f64)> = temps.iter().flat_map(|&temp| cfg.times.iter().map(move |&t| (temp, t))).collect();

    for &pair in &cfg.pairs {
        let values = report.time(&format!("thermal map {}", pair_tag(pair)), || {
            grid.par_iter()
                .map(|&(temp, t)| thermal_factor(&cfg.model, pair, t, temp, &cfg.quad))
                .collect::<Result<Vec<_>, _>>()
        })?;
        let rows: Vec<Vec<f64>> = grid.iter().zip(&values).map(|(&(temp, t), &d)| vec![t, temp, d]).collect();
        let name = format!("thermal_map_{}.csv", pair_tag(pair));
        report.files.push(write_csv(&cfg.output, &name, &["t", "T", "total"], &rows)?);
        report.push(Verdict::new(format!("{name} finite"), non_finite(&rows), 0.0));

        let nt = cfg.times.len();
        let mut order: Vec<usize> = (0..temps.len()).collect();
        order.sort_by(|&a, &b| temps[a].total_cmp(&temps[b]));
        let mut rise = 0.0f64;
        for w in order.windows(2) {
            for k in 0..nt {
                rise = rise.max(values[w[1] * nt + k] - values[w[0] * nt + k]);
            }
        }
        report.push(Verdict::new(format!("{name} nonincreasing in T"), rise, IDENTITY_TOL));

        if let Some(zero) = temps.iter().position(|&t| t == 0.0) {
            let mut gap = 0.0f64;
            for (k, &t) in cfg.times.iter().enumerate() {
                gap = gap.max((values[zero * nt + k] - vacuum_factor(&cfg.model, pair, t)?).abs());
            }
            report.push(Verdict::new(format!("{name} T=0 equals vacuum"), gap, IDENTITY_TOL));
        }
    }
    Ok(report)
}

pub fn cmd_relation(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("relation");
    for &pair in &cfg.pairs {
        let rows = report.time(&format!("relation {}", pair_tag(pair)), || {
            cfg.times
                .par_iter()
                .map(|&t| -> Result<Vec<f64>, Error> {
                    let check = fluctuation_relation_check(&cfg.model, pair, t)?;
                    let delta = excitation_fluctuation(&cfg.model, t)?;
                    Ok(vec![t, delta, check.predicted, check.exact_vacuum, check.residual])
                })
                .collect::<Result<Vec<_>, _>>()
        })?;
        let name = format!("relation_{}.csv", pair_tag(pair));
        report.files.push(write_csv(&cfg.output, &name, &["t", "delta_NB", "predicted", "vacuum", "residual"], &rows)?);
        report.push(Verdict::new(format!("{name} finite"), non_finite(&rows), 0.0));
        let worst = rows.iter().map(|r| r[4]).fold(0.0, f64::max);
        report.push(Verdict::new(format!("{name} residual"), worst, IDENTITY_TOL));
    }
    Ok(report)
}

/// Times used by the oracle suite when no config is given: 50 points on `[0, 10]`.
pub fn default_oracle_times() -> Vec<f64> {
    GridSection { start: 0.0, stop: 10.0, step: None, count: Some(50) }
        .points("run.time")
        .expect("static grid")
}

/// Compare analytic results with the truncated-Fock oracle on each case.
pub fn cmd_oracle_check(
    cases: &[(String, ValidatedModel)],
    times: &[f64],
    trunc_dims: Option<&[usize]>,
    quad: &QuadratureSpec,
) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("oracle-check");
    for (name, model) in cases {
        let modes = model.bath().modes().ok_or(Error::OracleNeedsDiscreteBath)?;
        let dims = trunc_dims.map(|d| if d.len() == modes.len() { d.to_vec() } else { vec![d[0]; modes.len()] });
        let stage = format!("oracle {name}");
        let start = std::time::Instant::now();
        match model.state() {
            BathInitialState::Thermal { temperature } => {
                thermal_case(name, model, *temperature, times, dims, quad, &mut report)?
            }
            _ => fock_case(name, model, times, dims, quad, &mut report)?,
        }
        report.timings.push(super::report::Timing { stage, seconds: start.elapsed().as_secs_f64() });
    }
    Ok(report)
}

fn fock_case(
    name: &str,
    model: &ValidatedModel,
    times: &[f64],
    dims: Option<Vec<usize>>,
    quad: &QuadratureSpec,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let trunc = match dims {
        Some(d) => Truncation::new(d),
        None => truncation_autotune(model, t_max, 1e-12)?,
    };
    let oracle = match Oracle::new(model, &trunc) {
        Ok(o) => o,
        Err(e @ Error::TruncationInsufficient { .. }) => {
            report.push(Verdict::failed(format!("{name}: truncation"), format!("{e} (dims {:?})", trunc.dims)));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let results = times
        .par_iter()
        .map(|&t| {
            let r = oracle.evaluate(t)?;
            let analytic = reduced_density_matrix(model, t, quad)?;
            let excitation = bath_excitation(model, t)?;
            let mut factor = 0.0f64;
            for (pair, overlap) in &r.branch_overlaps {
                let p = point(model, *pair, t, quad)?;
                factor = factor.max((overlap.norm() - p.vacuum_part * p.excitation_part.abs()).abs());
            }
            let populations = (0..model.levels())
                .map(|n| (r.reduced[(n, n)] - model.system().level(n).amplitude.norm_sqr()).norm())
                .fold(0.0, f64::max);
            Ok([
                (&analytic - &r.reduced).camax(),
                populations,
                factor,
                (r.bath_number - excitation.n0 - excitation.delta).abs(),
                r.tail_mass,
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let worst = |k: usize| results.iter().map(|r| r[k]).fold(0.0, f64::max);
    report.push(Verdict::new(format!("{name}: reduced density matrix"), worst(0), ORACLE_TOL));
    report.push(Verdict::new(format!("{name}: populations"), worst(1), POPULATION_TOL));
    report.push(Verdict::new(format!("{name}: factorization"), worst(2), ORACLE_TOL));
    report.push(Verdict::new(format!("{name}: bath number"), worst(3), ORACLE_TOL));
    report.push(tail_verdict(name, worst(4), &trunc));
    Ok(())
}

fn tail_verdict(name: &str, tail: f64, trunc: &Truncation) -> Verdict {
    let v = Verdict::new(format!("{name}: tail mass"), tail, TAIL_MASS_LIMIT);
    let v = Verdict { pass: tail < TAIL_MASS_LIMIT, ..v };
    if v.pass {
        v.with_detail(format!("dims {:?}", trunc.dims))
    } else {
        let e = Error::TruncationInsufficient { tail_mass: tail, limit: TAIL_MASS_LIMIT };
        v.with_detail(format!("{e} (dims {:?})", trunc.dims))
    }
}

fn thermal_case(
    name: &str,
    model: &ValidatedModel,
    temperature: f64,
    times: &[f64],
    dims: Option<Vec<usize>>,
    quad: &QuadratureSpec,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let given = dims.map(Truncation::new);
    let mut worst = 0.0f64;
    let mut tail = 0.0f64;
    let mut used = None;
    for pair in LevelPair::all(model.levels()) {
        let oracle = ThermalOracle::new(model, pair, temperature, given.as_ref(), THERMAL_M_MAX)?;
        let residuals = times
            .par_iter()
            .map(|&t| {
                let r = oracle.factor(t);
                let analytic = thermal_factor(model, pair, t, temperature, quad)?;
                Ok((relative_gap(r.value, analytic), r.tail_mass))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        for (res, tm) in residuals {
            worst = worst.max(res);
            tail = tail.max(tm);
        }
        used = Some(oracle.truncation().clone());
    }
    report.push(Verdict::new(format!("{name}: thermal factor (relative)"), worst, ORACLE_TOL));
    if let Some(trunc) = used {
        report.push(tail_verdict(name, tail, &trunc));
    }
    Ok(())
}

/// Ready-to-run config for a single boson mode read out through an Ohmic bath.
pub fn preset_boson_mode_config(omega0: f64, n_max: usize, gamma: f64, cutoff: f64) -> Result<String, CliError> {
    let model = validate_config(preset_boson_mode(omega0, n_max)?, BathSpec::Ohmic { gamma, cutoff }, BathInitialState::Vacuum)?;
    let run = RunSection {
        time: Some(GridSection { start: 0.0, stop: 10.0, step: Some(0.1), count: None }),
        ..Default::default()
    };
    let doc = config_for(&model, run);
    Ok(serde_json::to_string_pretty(&doc).expect("config serializes") + "\n")
}

pub fn write_preset(dir: Option<&Path>, text: &str) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("preset");
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("boson_mode.json"), text)?;
            report.files.push("boson_mode.json".into());
        }
        None => print!("{text}"),
    }
    Ok(report)
}
