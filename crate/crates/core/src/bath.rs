//! Bath spectral-response models.
//!
//! A `BathSpectrum` gives the one-sided coupling spectrum `G(ω) ≥ 0` for
//! `ω ≥ 0`. Emission/absorption asymmetry at temperature `T` follows from
//! detailed balance: the response at a negative frequency is the positive-
//! frequency response damped by the thermal occupation factor,
//! `G(-|ω|) = G(|ω|)·e^{-|ω|/T}`.

use crate::error::{Error, Result};
use serde::Serialize;

/// One-sided bath coupling spectrum `G(ω)`, `ω ≥ 0`.
#[derive(Debug, Clone, Serialize)]
pub enum BathSpectrum {
    /// `G(ω) = γ · ω^s · ω_c^{1-s} · e^{-ω/ω_c}` — power-law family with an
    /// exponential cutoff (sub-Ohmic for `s < 1`, Ohmic at `s = 1`).
    SubOhmicClass { s: f64, omega_c: f64, gamma: f64 },
    /// Hard-edged plateau: `G(ω) = G₀` on `[ω_min, ω_c]`, zero outside.
    NearlyFlat { g0: f64, omega_min: f64, omega_c: f64 },
    /// Piecewise-linear interpolation of measured `(ω, G)` samples.
    /// Evaluation outside the tabulated range is an error, never an
    /// extrapolation.
    Tabulated { points: Vec<(f64, f64)> },
}

impl BathSpectrum {
    /// Power-law spectrum with exponential cutoff; validates parameters.
    pub fn sub_ohmic(s: f64, omega_c: f64, gamma: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidInput(format!(
                "spectral exponent s must be positive and finite, got {s}"
            )));
        }
        if !(omega_c > 0.0) || !omega_c.is_finite() {
            return Err(Error::InvalidInput(format!(
                "cutoff frequency omega_c must be positive and finite, got {omega_c}"
            )));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "coupling strength gamma must be positive and finite, got {gamma}"
            )));
        }
        Ok(BathSpectrum::SubOhmicClass { s, omega_c, gamma })
    }

    /// Flat plateau `G₀` on `[ω_min, ω_c]`; validates parameters.
    pub fn nearly_flat(g0: f64, omega_min: f64, omega_c: f64) -> Result<Self> {
        if !(g0 > 0.0) || !g0.is_finite() {
            return Err(Error::InvalidInput(format!(
                "plateau height g0 must be positive and finite, got {g0}"
            )));
        }
        if !(omega_min > 0.0) || !omega_min.is_finite() {
            return Err(Error::InvalidInput(format!(
                "lower edge omega_min must be positive and finite, got {omega_min}"
            )));
        }
        if !(omega_c > omega_min) || !omega_c.is_finite() {
            return Err(Error::InvalidInput(format!(
                "upper edge omega_c must exceed omega_min = {omega_min}, got {omega_c}"
            )));
        }
        Ok(BathSpectrum::NearlyFlat { g0, omega_min, omega_c })
    }

    /// Tabulated spectrum from `(ω, G)` samples with strictly increasing `ω`
    /// and non-negative `G`.
    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput(
                "tabulated spectrum needs at least two sample points".into(),
            ));
        }
        for (i, &(w, g)) in points.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "tabulated frequency #{i} must be finite and >= 0, got {w}"
                )));
            }
            if !g.is_finite() || g < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "tabulated response #{i} must be finite and >= 0, got {g}"
                )));
            }
            if i > 0 && w <= points[i - 1].0 {
                return Err(Error::InvalidInput(format!(
                    "tabulated frequencies must be strictly increasing (sample #{i})"
                )));
            }
        }
        Ok(BathSpectrum::Tabulated { points })
    }

    /// Parse a two-column `omega,G` CSV body (optional header line).
    pub fn tabulated_from_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.eq_ignore_ascii_case("omega,G")) {
                continue;
            }
            let mut cols = line.split(',');
            let (a, b) = (cols.next(), cols.next());
            if cols.next().is_some() {
                return Err(Error::InvalidInput(format!(
                    "spectrum CSV line {} has more than two columns",
                    lineno + 1
                )));
            }
            let parse = |field: Option<&str>| -> Result<f64> {
                field
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "spectrum CSV line {} is missing a column",
                            lineno + 1
                        ))
                    })?
                    .parse::<f64>()
                    .map_err(|e| {
                        Error::InvalidInput(format!("spectrum CSV line {}: {e}", lineno + 1))
                    })
            };
            points.push((parse(a)?, parse(b)?));
        }
        Self::tabulated(points)
    }

    /// Coupling spectrum at non-negative frequency. Negative `ω` is a domain
    /// error here; use [`BathSpectrum::kms_response`] for signed frequencies.
    pub fn spectral_response(&self, omega: f64) -> Result<f64> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::InvalidInput(format!(
                "spectral_response requires finite omega >= 0, got {omega}"
            )));
        }
        match self {
            BathSpectrum::SubOhmicClass { s, omega_c, gamma } => {
                if omega == 0.0 {
                    // ω^s → 0 for every s > 0.
                    return Ok(0.0);
                }
                Ok(gamma * omega.powf(*s) * omega_c.powf(1.0 - s) * (-omega / omega_c).exp())
            }
            BathSpectrum::NearlyFlat { g0, omega_min, omega_c } => {
                Ok(if omega >= *omega_min && omega <= *omega_c { *g0 } else { 0.0 })
            }
            BathSpectrum::Tabulated { points } => {
                let first = points.first().expect("validated: >= 2 points");
                let last = points.last().expect("validated: >= 2 points");
                if omega < first.0 || omega > last.0 {
                    return Err(Error::InvalidInput(format!(
                        "frequency {omega} is outside the tabulated range [{}, {}]; \
                         extrapolation is not performed",
                        first.0, last.0
                    )));
                }
                let idx = points.partition_point(|&(w, _)| w <= omega);
                if idx == 0 {
                    return Ok(first.1);
                }
                if idx == points.len() {
                    return Ok(last.1);
                }
                let (w0, g0) = points[idx - 1];
                let (w1, g1) = points[idx];
                Ok(g0 + (g1 - g0) * (omega - w0) / (w1 - w0))
            }
        }
    }

    /// Detailed-balance response at signed frequency:
    /// `G(ω)` for `ω ≥ 0` and `G(|ω|)·e^{-|ω|/T}` for `ω < 0`.
    pub fn kms_response(&self, omega: f64, temperature: f64) -> Result<f64> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::InvalidInput(format!(
                "kms_response requires temperature > 0, got {temperature}"
            )));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidInput(format!(
                "kms_response requires finite omega, got {omega}"
            )));
        }
        if omega >= 0.0 {
            self.spectral_response(omega)
        } else {
            Ok(self.spectral_response(-omega)? * (omega / temperature).exp())
        }
    }
}

/// Flat-plateau surrogate of a sub-Ohmic spectrum in its `s → 0` regime:
/// the power-law response is nearly constant above its rise, so it is
/// summarized by the plateau `G₀ = γ·s^s·ω_c·e^{-s}` (the value at the knee
/// `ω = s·ω_c`) on `[s·ω_c, ω_c]`. Only meaningful for `s < 1`.
pub fn nfbs_limit(s: f64, omega_c: f64, gamma: f64) -> Result<BathSpectrum> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidInput(format!(
            "flat-plateau surrogate requires 0 < s < 1, got {s}"
        )));
    }
    if !(omega_c > 0.0) || !omega_c.is_finite() {
        return Err(Error::InvalidInput(format!(
            "cutoff frequency omega_c must be positive and finite, got {omega_c}"
        )));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "coupling strength gamma must be positive and finite, got {gamma}"
        )));
    }
    let omega_min = s * omega_c;
    let g0 = gamma * s.powf(s) * omega_c * (-s).exp();
    BathSpectrum::nearly_flat(g0, omega_min, omega_c)
}
