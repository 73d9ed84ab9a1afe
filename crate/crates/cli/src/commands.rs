//! Subcommand implementations: each returns the fully rendered output
//! document so `main` owns all I/O and process-exit policy.

use clap::ValueEnum;
use dcqt::bath::BathSpectrum;
use dcqt::config::{Config, DesignConfig, InitialStateConfig};
use dcqt::lindblad::{build_rates, evolve, ground_state, superposition_01};
use dcqt::optimizer::{design_multi_peak, design_single_peak};
use dcqt::presets::{
    matched_sideband_study, single_tone_modulation, single_tone_study, two_tone_study,
};
use dcqt::qfi::{error_bound, qfi_closed_form, qfi_unmodulated, QfiParams};
use dcqt::scan::ScanRow;
use dcqt::sidebands::{default_cutoff, sideband_weights, sideband_weights_analytic, SidebandSet};
use dcqt::steady::{effective_boltzmann, steady_state, ProbeSpec};
use dcqt::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::output;

/// Output encoding for tabular commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Fixed-precision CSV (byte-deterministic).
    Csv,
    /// Pretty-printed JSON.
    Json,
}

/// Built-in study datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Two-peak sensitivity landscape of the single-tone drive (flat and
    /// sub-ohmic baths, undriven reference).
    Fig1,
    /// Temperature-independent error-bound plateau of the matched drive.
    Fig2,
    /// Multi-window sensitivity of the two-tone drive.
    Fig3,
}

/// Grid-scan worker pool; `None` uses all cores.
fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(Error::InvalidInput("--workers must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))
}

/// The sideband comb a config describes, honoring the `--sidebands`
/// cutoff override and the configured weight method.
fn comb(cfg: &Config, cutoff_flag: Option<u32>) -> Result<SidebandSet> {
    let mc = cfg.require_modulation()?;
    match mc.build()? {
        None => Ok(SidebandSet::carrier_only(mc.omega0())),
        Some(m) => {
            let cutoff = cutoff_flag.or(cfg.qfi.cutoff).unwrap_or_else(|| default_cutoff(&m));
            sideband_weights(&m, cutoff, cfg.qfi.weights.build())
        }
    }
}

#[derive(Serialize)]
struct SidebandRow {
    m: i32,
    omega_m: f64,
    p_m: f64,
    deficit: f64,
}

pub fn cmd_sidebands(cfg: &Config, cutoff_flag: Option<u32>, format: Format) -> Result<String> {
    let set = comb(cfg, cutoff_flag)?;
    let rows: Vec<SidebandRow> = set
        .entries()
        .iter()
        .map(|sb| SidebandRow { m: sb.m, omega_m: sb.omega, p_m: sb.weight, deficit: set.deficit })
        .collect();
    match format {
        Format::Json => output::json(&rows),
        Format::Csv => Ok(output::csv(
            "m,omega_m,P_m,deficit",
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.m.to_string(),
                        output::fmt_f64(r.omega_m),
                        output::fmt_f64(r.p_m),
                        output::fmt_f64(r.deficit),
                    ]
                })
                .collect::<Vec<_>>(),
        )),
    }
}

pub fn cmd_steady_state(cfg: &Config, cutoff_flag: Option<u32>, format: Format) -> Result<String> {
    let bath = cfg.bath.build()?;
    let set = comb(cfg, cutoff_flag)?;
    let t = cfg.require_temperature()?;
    set.require_completeness(cfg.qfi.completeness_tol)?;
    let x = effective_boltzmann(&bath, &set, t)?;
    let state = steady_state(&cfg.probe_spec()?, x, t)?;
    match format {
        Format::Json => output::json(&state),
        Format::Csv => Ok(output::csv(
            "n,rho_n",
            &state
                .populations
                .iter()
                .enumerate()
                .map(|(n, &p)| vec![n.to_string(), output::fmt_f64(p)])
                .collect::<Vec<_>>(),
        )),
    }
}

fn scan_csv(rows: &[ScanRow]) -> String {
    output::csv(
        "T,H,H_m1,H_0,H_p1,H_rem,xi,R",
        &rows
            .iter()
            .map(|r| {
                [r.t, r.h, r.h_m1, r.h_0, r.h_p1, r.h_rem, r.xi, r.r]
                    .iter()
                    .map(|&v| output::fmt_f64(v))
                    .collect()
            })
            .collect::<Vec<_>>(),
    )
}

pub fn cmd_qfi_scan(
    cfg: &Config,
    cutoff_flag: Option<u32>,
    workers: Option<usize>,
    format: Format,
) -> Result<String> {
    let bath = cfg.bath.build()?;
    let set = comb(cfg, cutoff_flag)?;
    let probe = cfg.probe_spec()?;
    let grid = cfg.require_grid()?;
    let params = cfg.qfi.params();
    let rows: Vec<ScanRow> = pool(workers)?.install(|| {
        grid.par_iter()
            .map(|&t| Ok(ScanRow::from_report(t, &qfi_closed_form(&probe, &bath, &set, t, &params)?)))
            .collect::<Result<_>>()
    })?;
    match format {
        Format::Json => output::json(&rows),
        Format::Csv => Ok(scan_csv(&rows)),
    }
}

#[derive(Serialize)]
struct BoundRow {
    t: f64,
    h: f64,
    xi: f64,
}

/// Relative-error bound over the grid (or at the single configured
/// temperature when no grid is given).
pub fn cmd_error_bound(
    cfg: &Config,
    cutoff_flag: Option<u32>,
    workers: Option<usize>,
    format: Format,
) -> Result<String> {
    let bath = cfg.bath.build()?;
    let set = comb(cfg, cutoff_flag)?;
    let probe = cfg.probe_spec()?;
    let params = cfg.qfi.params();
    let grid = match &cfg.grid {
        Some(_) => cfg.require_grid()?,
        None => vec![cfg.require_temperature()?],
    };
    let rows: Vec<BoundRow> = pool(workers)?.install(|| {
        grid.par_iter()
            .map(|&t| {
                let report = qfi_closed_form(&probe, &bath, &set, t, &params)?;
                Ok(BoundRow { t, h: report.h, xi: report.xi })
            })
            .collect::<Result<_>>()
    })?;
    match format {
        Format::Json => output::json(&rows),
        Format::Csv => Ok(output::csv(
            "T,H,xi",
            &rows
                .iter()
                .map(|r| vec![output::fmt_f64(r.t), output::fmt_f64(r.h), output::fmt_f64(r.xi)])
                .collect::<Vec<_>>(),
        )),
    }
}

/// Everything `main` needs to report a verification run.
pub struct VerifyOutcome {
    pub rendered: String,
    pub passed: bool,
    pub final_trace_distance: f64,
    pub threshold: f64,
}

pub fn cmd_lindblad_verify(
    cfg: &Config,
    cutoff_flag: Option<u32>,
    format: Format,
) -> Result<VerifyOutcome> {
    let bath = cfg.bath.build()?;
    let set = comb(cfg, cutoff_flag)?;
    let t = cfg.require_temperature()?;
    let lc = cfg.lindblad.unwrap_or_default();
    let rates = build_rates(&bath, &set, t)?;
    let dim = lc.n_max as usize + 1;
    let initial = match lc.initial {
        InitialStateConfig::Ground => ground_state(dim),
        InitialStateConfig::Superposition01 => superposition_01(dim),
    };
    let run = evolve(&rates, &initial, &lc.evolve_options())?;
    let rendered = match format {
        Format::Json => output::json(&run)?,
        Format::Csv => output::csv(
            "t,trace_distance,trace,min_eig",
            &run.checkpoints
                .iter()
                .map(|cp| {
                    [cp.t, cp.trace_distance, cp.trace, cp.min_eig]
                        .iter()
                        .map(|&v| output::fmt_f64(v))
                        .collect()
                })
                .collect::<Vec<_>>(),
        ),
    };
    Ok(VerifyOutcome {
        rendered,
        passed: run.final_trace_distance < lc.pass_threshold,
        final_trace_distance: run.final_trace_distance,
        threshold: lc.pass_threshold,
    })
}

/// Drive design. The result is a structured document, so this command
/// always emits JSON.
pub fn cmd_optimize(cfg: &Config) -> Result<String> {
    let bath = cfg.bath.build()?;
    let design = cfg
        .design
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("this command needs a `design` block".into()))?;
    let result = match design {
        DesignConfig::SinglePeak { omega0, t_target, options } => {
            design_single_peak(&bath, *omega0, *t_target, &options.build())?
        }
        DesignConfig::MultiPeak { omega0, targets, options } => {
            design_multi_peak(&bath, *omega0, targets, &options.build())?
        }
    };
    output::json(&result)
}

#[derive(Serialize)]
struct Fig1Row {
    t: f64,
    h_flat: f64,
    h_sub: f64,
    h_bare: f64,
}

#[derive(Serialize)]
struct Fig2Row {
    t: f64,
    delta: f64,
    xi_m1: f64,
    xi_m3: f64,
    xi_bare: f64,
}

#[derive(Serialize)]
struct Fig3Row {
    t: f64,
    h: f64,
    xi: f64,
    xi_bare: f64,
}

const OSC: ProbeSpec = ProbeSpec::OscillatorTruncated { n_max: None };

pub fn cmd_reproduce(figure: Figure, workers: Option<usize>, format: Format) -> Result<String> {
    match figure {
        Figure::Fig1 => {
            let study = single_tone_study(400)?;
            let set = sideband_weights_analytic(&single_tone_modulation(), 3)?;
            let sub = BathSpectrum::sub_ohmic(0.1, 100.0, 1e-8)?;
            let params = QfiParams::default();
            let h_sub: Vec<f64> = pool(workers)?.install(|| {
                study
                    .grid
                    .par_iter()
                    .map(|&t| Ok(qfi_closed_form(&OSC, &sub, &set, t, &params)?.h))
                    .collect::<Result<_>>()
            })?;
            let rows: Vec<Fig1Row> = study
                .grid
                .iter()
                .zip(&study.rows)
                .zip(h_sub.iter().zip(&study.h_unmodulated))
                .map(|((&t, row), (&h_sub, &h_bare))| Fig1Row { t, h_flat: row.h, h_sub, h_bare })
                .collect();
            match format {
                Format::Json => output::json(&rows),
                Format::Csv => Ok(output::csv(
                    "T,H_flat,H_sub,H_bare",
                    &rows
                        .iter()
                        .map(|r| {
                            [r.t, r.h_flat, r.h_sub, r.h_bare]
                                .iter()
                                .map(|&v| output::fmt_f64(v))
                                .collect()
                        })
                        .collect::<Vec<_>>(),
                )),
            }
        }
        Figure::Fig2 => {
            let study = matched_sideband_study(60)?;
            let rows: Vec<Fig2Row> = study
                .rows
                .iter()
                .map(|r| Fig2Row {
                    t: r.t,
                    delta: r.delta,
                    xi_m1: r.xi_first,
                    xi_m3: r.xi_third,
                    xi_bare: error_bound(qfi_unmodulated(1.0, r.t), r.t, 1),
                })
                .collect();
            match format {
                Format::Json => output::json(&rows),
                Format::Csv => Ok(output::csv(
                    "T,delta,xi_m1,xi_m3,xi_bare",
                    &rows
                        .iter()
                        .map(|r| {
                            [r.t, r.delta, r.xi_m1, r.xi_m3, r.xi_bare]
                                .iter()
                                .map(|&v| output::fmt_f64(v))
                                .collect()
                        })
                        .collect::<Vec<_>>(),
                )),
            }
        }
        Figure::Fig3 => {
            let study = two_tone_study(400)?;
            let rows: Vec<Fig3Row> = study
                .grid
                .iter()
                .zip(&study.rows)
                .zip(&study.xi_unmodulated)
                .map(|((&t, row), &xi_bare)| Fig3Row { t, h: row.h, xi: row.xi, xi_bare })
                .collect();
            match format {
                Format::Json => output::json(&rows),
                Format::Csv => Ok(output::csv(
                    "T,H,xi,xi_bare",
                    &rows
                        .iter()
                        .map(|r| {
                            [r.t, r.h, r.xi, r.xi_bare]
                                .iter()
                                .map(|&v| output::fmt_f64(v))
                                .collect()
                        })
                        .collect::<Vec<_>>(),
                )),
            }
        }
    }
}
