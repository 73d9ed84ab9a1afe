//! Shared spectral sums over the sideband comb.
//!
//! Every steady-state, rate, and sensitivity formula in this crate reduces
//! to a handful of weighted sums of the bath response over the comb. This
//! kernel evaluates them once, in one place, so the analytic steady state,
//! the Fisher-information closed form, and the Lindblad rates are
//! arithmetically consistent by construction.

use crate::bath::BathSpectrum;
use crate::error::{Error, Result};
use crate::sidebands::SidebandSet;

/// Weighted comb sums at a fixed temperature.
///
/// "Positive" sums run over sidebands with `ω_m ≥ 0`, "negative" over
/// `ω_m < 0` (the drive-induced heating channels).
#[derive(Debug, Clone, Copy)]
pub(crate) struct SpectralSums {
    /// `ζ = Σ_{ω_m ≥ 0} P_m G(ω_m)` — downward (cooling) spectral mass.
    pub zeta: f64,
    /// `κ = Σ_{ω_m ≥ 0} P_m G(ω_m) e^{-ω_m/T}` — thermally activated upward mass.
    pub kappa: f64,
    /// `dκ/dT = Σ_{ω_m ≥ 0} P_m G(ω_m) e^{-ω_m/T} · ω_m/T²`.
    pub kappa_deriv: f64,
    /// `Σ_{ω_m < 0} P_m G(|ω_m|)` — temperature-independent upward (heating) mass.
    pub up_neg: f64,
    /// `Σ_{ω_m < 0} P_m G(|ω_m|) e^{-|ω_m|/T}` — damped downward mass of the
    /// heating channels.
    pub dn_neg: f64,
    /// `d/dT` of `dn_neg`.
    pub dn_neg_deriv: f64,
}

impl SpectralSums {
    pub fn collect(
        bath: &BathSpectrum,
        sidebands: &SidebandSet,
        temperature: f64,
    ) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::InvalidInput(format!(
                "temperature must be positive and finite, got {temperature}"
            )));
        }
        let mut sums = SpectralSums {
            zeta: 0.0,
            kappa: 0.0,
            kappa_deriv: 0.0,
            up_neg: 0.0,
            dn_neg: 0.0,
            dn_neg_deriv: 0.0,
        };
        let t2 = temperature * temperature;
        for sb in sidebands.entries() {
            if sb.weight == 0.0 {
                continue;
            }
            if sb.omega >= 0.0 {
                let g = bath.spectral_response(sb.omega)?;
                if g == 0.0 {
                    continue;
                }
                let pg = sb.weight * g;
                let boltz = (-sb.omega / temperature).exp();
                sums.zeta += pg;
                sums.kappa += pg * boltz;
                sums.kappa_deriv += pg * boltz * sb.omega / t2;
            } else {
                let abs = -sb.omega;
                let g = bath.spectral_response(abs)?;
                if g == 0.0 {
                    continue;
                }
                let pg = sb.weight * g;
                let boltz = (-abs / temperature).exp();
                sums.up_neg += pg;
                sums.dn_neg += pg * boltz;
                sums.dn_neg_deriv += pg * boltz * abs / t2;
            }
        }
        Ok(sums)
    }

    /// Total downward rate coefficient `C₁` (cooling).
    pub fn c1(&self) -> f64 {
        self.zeta + self.dn_neg
    }

    /// Total upward rate coefficient `C₂` (excitation).
    pub fn c2(&self) -> f64 {
        self.kappa + self.up_neg
    }

    /// Fraction of each rate carried by negative-frequency sidebands; the
    /// positive-channel closed forms are valid only when this is negligible.
    pub fn negative_weight(&self) -> f64 {
        let up = if self.c2() > 0.0 { self.up_neg / self.c2() } else { 0.0 };
        let dn = if self.c1() > 0.0 { self.dn_neg / self.c1() } else { 0.0 };
        up.max(dn)
    }

    /// Effective Boltzmann factor `x = C₂/C₁`, with regime checks.
    pub fn boltzmann(&self) -> Result<f64> {
        let c1 = self.c1();
        let c2 = self.c2();
        if c1 == 0.0 && c2 == 0.0 {
            return Err(Error::ProbeDecoupled);
        }
        if c1 == 0.0 {
            return Err(Error::RegimeViolation(
                "all spectral mass is on heating channels; no steady state exists".into(),
            ));
        }
        let x = c2 / c1;
        if !x.is_finite() || x >= 1.0 {
            return Err(Error::RegimeViolation(format!(
                "effective Boltzmann factor x = {x} is not in [0, 1): the comb pumps the \
                 probe harder than the bath cools it (population inversion)"
            )));
        }
        Ok(x)
    }

    /// `dx/dT` of the effective Boltzmann factor.
    pub fn boltzmann_derivative(&self) -> f64 {
        let c1 = self.c1();
        let x = self.c2() / c1;
        (self.kappa_deriv - x * self.dn_neg_deriv) / c1
    }
}
