//! Temperature sweeps of the QFI and the grids they run on.

use crate::bath::BathSpectrum;
use crate::error::{Error, Result};
use crate::qfi::{qfi_closed_form, QfiParams, QfiReport};
use crate::sidebands::SidebandSet;
use crate::steady::ProbeSpec;
use serde::Serialize;

/// One temperature sample of a sensitivity scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanRow {
    pub t: f64,
    pub h: f64,
    pub h_m1: f64,
    pub h_0: f64,
    pub h_p1: f64,
    pub h_rem: f64,
    pub xi: f64,
    pub r: f64,
}

impl ScanRow {
    pub fn from_report(t: f64, report: &QfiReport) -> Self {
        ScanRow {
            t,
            h: report.h,
            h_m1: report.components.h_m1,
            h_0: report.components.h_0,
            h_p1: report.components.h_p1,
            h_rem: report.components.h_rem,
            xi: report.xi,
            r: report.r,
        }
    }
}

/// Sweep a fixed sideband comb over `t_grid`.
pub fn qfi_scan(
    probe: &ProbeSpec,
    bath: &BathSpectrum,
    sidebands: &SidebandSet,
    t_grid: &[f64],
    params: &QfiParams,
) -> Result<Vec<ScanRow>> {
    t_grid
        .iter()
        .map(|&t| Ok(ScanRow::from_report(t, &qfi_closed_form(probe, bath, sidebands, t, params)?)))
        .collect()
}

/// Sweep an arbitrary per-temperature evaluation (for schemes that retune
/// the drive at every grid point).
pub fn qfi_scan_with<F>(t_grid: &[f64], mut eval: F) -> Result<Vec<ScanRow>>
where
    F: FnMut(f64) -> Result<QfiReport>,
{
    t_grid.iter().map(|&t| Ok(ScanRow::from_report(t, &eval(t)?))).collect()
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "log grid needs 0 < lo < hi finite, got [{lo}, {hi}]"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("grid needs at least 2 points, got {n}")));
    }
    let ratio = hi / lo;
    Ok((0..n).map(|k| lo * ratio.powf(k as f64 / (n - 1) as f64)).collect())
}

/// `n` linearly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "linear grid needs lo < hi finite, got [{lo}, {hi}]"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("grid needs at least 2 points, got {n}")));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|k| lo + step * k as f64).collect())
}
