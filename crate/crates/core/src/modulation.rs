//! Periodic frequency-modulation profiles.
//!
//! The probe gap is driven with period `τ = 2π/Δ`:
//! `ω(t) = ω₀ + Σ_j [s_j·sin(jΔt) + c_j·cos(jΔt)]`, plus the idealized
//! π-pulse train (instantaneous phase kicks every `τ`, not representable as
//! a finite Fourier sum). A *multi-harmonic* profile is specified by
//! dimensionless depths `μ_l`, one per harmonic `l`, with sine amplitude
//! `s_l = μ_l·l·Δ` — chosen so that the accumulated modulation phase of
//! harmonic `l` has amplitude exactly `μ_l`, which is the argument of the
//! Bessel weights downstream.

use crate::error::{Error, Result};
use serde::Serialize;

/// One Fourier component of the gap drive at `j·Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Harmonic {
    /// Harmonic index `j ≥ 1` (frequency `j·Δ`).
    pub index: u32,
    /// Amplitude of `sin(jΔt)` in the gap, same units as `ω₀`.
    pub sine: f64,
    /// Amplitude of `cos(jΔt)` in the gap, same units as `ω₀`.
    pub cosine: f64,
}

/// Which family the profile belongs to (retained so closed-form weight
/// formulas can specialize).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ModulationKind {
    /// Arbitrary finite Fourier drive.
    Generic,
    /// `ω(t) = ω₀ + μ·Δ·sin(Δt)`.
    Sinusoidal { mu: f64 },
    /// Several sine harmonics with depths `μ_l` (see module docs).
    MultiHarmonic { depths: Vec<(u32, f64)> },
    /// π phase kick once per period.
    PiPulse,
}

/// A validated periodic drive of the probe gap.
#[derive(Debug, Clone, Serialize)]
pub struct Modulation {
    omega0: f64,
    delta: f64,
    harmonics: Vec<Harmonic>,
    kind: ModulationKind,
}

impl Modulation {
    /// Single-harmonic drive `ω(t) = ω₀ + μΔ·sin(Δt)` with depth `μ ≥ 0`.
    pub fn sinusoidal(omega0: f64, delta: f64, mu: f64) -> Result<Self> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidInput(format!(
                "modulation depth mu must be finite and >= 0, got {mu}"
            )));
        }
        let harmonics = if mu > 0.0 {
            vec![Harmonic { index: 1, sine: mu * delta, cosine: 0.0 }]
        } else {
            Vec::new()
        };
        Self::validated(omega0, delta, harmonics, ModulationKind::Sinusoidal { mu })
    }

    /// Multi-harmonic sine drive with per-harmonic depths `μ_l`
    /// (gap amplitude `μ_l·l·Δ` at harmonic `l`).
    pub fn multi_harmonic(omega0: f64, delta: f64, depths: &[(u32, f64)]) -> Result<Self> {
        let mut harmonics = Vec::new();
        for &(l, mu) in depths {
            if l == 0 {
                return Err(Error::InvalidInput("harmonic index 0 is not a drive tone".into()));
            }
            if !(mu >= 0.0) || !mu.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "depth of harmonic {l} must be finite and >= 0, got {mu}"
                )));
            }
            if harmonics.iter().any(|h: &Harmonic| h.index == l) {
                return Err(Error::InvalidInput(format!("harmonic {l} specified twice")));
            }
            if mu > 0.0 {
                harmonics.push(Harmonic { index: l, sine: mu * f64::from(l) * delta, cosine: 0.0 });
            }
        }
        harmonics.sort_by_key(|h| h.index);
        Self::validated(
            omega0,
            delta,
            harmonics,
            ModulationKind::MultiHarmonic { depths: depths.to_vec() },
        )
    }

    /// Arbitrary finite Fourier drive from raw sine/cosine amplitudes.
    pub fn generic(omega0: f64, delta: f64, harmonics: Vec<Harmonic>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for h in &harmonics {
            if h.index == 0 {
                return Err(Error::InvalidInput("harmonic index 0 is not a drive tone".into()));
            }
            if !h.sine.is_finite() || !h.cosine.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "amplitudes of harmonic {} must be finite",
                    h.index
                )));
            }
            if !seen.insert(h.index) {
                return Err(Error::InvalidInput(format!("harmonic {} specified twice", h.index)));
            }
        }
        let mut harmonics: Vec<_> =
            harmonics.into_iter().filter(|h| h.sine != 0.0 || h.cosine != 0.0).collect();
        harmonics.sort_by_key(|h| h.index);
        Self::validated(omega0, delta, harmonics, ModulationKind::Generic)
    }

    /// π phase kick once per period `2π/Δ`.
    pub fn pi_pulse(omega0: f64, delta: f64) -> Result<Self> {
        Self::validated(omega0, delta, Vec::new(), ModulationKind::PiPulse)
    }

    fn validated(
        omega0: f64,
        delta: f64,
        harmonics: Vec<Harmonic>,
        kind: ModulationKind,
    ) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::InvalidInput(format!(
                "carrier frequency omega0 must be positive and finite, got {omega0}"
            )));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidInput(format!(
                "modulation frequency delta must be positive and finite, got {delta}"
            )));
        }
        // Resource bound: the fastest drive tone must stay below the carrier,
        // otherwise the time-scale separation behind the sideband picture is
        // gone. The kick train's fundamental is delta itself.
        let top = harmonics.iter().map(|h| h.index).max().unwrap_or(1);
        if f64::from(top) * delta >= omega0 {
            return Err(Error::InvalidInput(format!(
                "fastest drive tone {top}·delta = {} must stay below the carrier omega0 = {omega0}",
                f64::from(top) * delta
            )));
        }
        Ok(Modulation { omega0, delta, harmonics, kind })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn kind(&self) -> &ModulationKind {
        &self.kind
    }

    /// Fourier components of the drive (empty for π pulses and `μ = 0`).
    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    /// Drive period `τ = 2π/Δ`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.delta
    }

    /// Largest active harmonic index (1 when the drive has no Fourier tones).
    pub fn max_harmonic_index(&self) -> u32 {
        self.harmonics.iter().map(|h| h.index).max().unwrap_or(1)
    }

    /// Instantaneous gap `ω(t)`. For a π-pulse train this is the constant
    /// carrier: the kicks live in the phase, not in the gap.
    pub fn eval_omega(&self, t: f64) -> f64 {
        let mut w = self.omega0;
        for h in &self.harmonics {
            let th = f64::from(h.index) * self.delta * t;
            w += h.sine * th.sin() + h.cosine * th.cos();
        }
        w
    }

    /// Accumulated modulation phase `φ(t) = ∫₀ᵗ (ω(t') - ω₀) dt'`, in closed
    /// form. Zero for π pulses (their kicks are handled analytically by the
    /// weight formulas, not by this smooth phase).
    pub fn phase(&self, t: f64) -> f64 {
        let mut phi = 0.0;
        for h in &self.harmonics {
            let wj = f64::from(h.index) * self.delta;
            let th = wj * t;
            phi += (h.sine * (1.0 - th.cos()) + h.cosine * th.sin()) / wj;
        }
        phi
    }
}
