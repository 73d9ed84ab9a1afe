//! Declarative run configuration: JSON-friendly mirror types for baths,
//! drives, probes, grids, and solver options, each with strict field
//! checking and a `build` step that funnels into the validated
//! constructors.

use crate::bath::{nfbs_limit, BathSpectrum};
use crate::error::{Error, Result};
use crate::lindblad::EvolveOptions;
use crate::modulation::{Harmonic, Modulation};
use crate::nelder::NelderOptions;
use crate::optimizer::DesignOptions;
use crate::qfi::QfiParams;
use crate::scan::{linear_grid, log_grid};
use crate::sidebands::WeightMethod;
use crate::steady::ProbeSpec;
use serde::Deserialize;

/// Top-level run configuration.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub bath: BathConfig,
    #[serde(default)]
    pub modulation: Option<ModulationConfig>,
    #[serde(default)]
    pub probe: Option<ProbeConfig>,
    #[serde(default)]
    pub qfi: QfiConfig,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub lindblad: Option<LindbladConfig>,
    #[serde(default)]
    pub design: Option<DesignConfig>,
}

impl Config {
    pub fn from_str(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("config parse error: {e}")))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text)
    }

    pub fn require_modulation(&self) -> Result<&ModulationConfig> {
        self.modulation
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("this command needs a `modulation` block".into()))
    }

    pub fn require_temperature(&self) -> Result<f64> {
        match self.temperature {
            Some(t) if t > 0.0 && t.is_finite() => Ok(t),
            Some(t) => {
                Err(Error::InvalidInput(format!("`temperature` must be positive, got {t}")))
            }
            None => Err(Error::InvalidInput("this command needs a `temperature` field".into())),
        }
    }

    pub fn require_grid(&self) -> Result<Vec<f64>> {
        self.grid
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("this command needs a `grid` block".into()))?
            .build()
    }

    pub fn probe_spec(&self) -> Result<ProbeSpec> {
        match &self.probe {
            Some(p) => p.build(),
            None => Ok(ProbeSpec::OscillatorTruncated { n_max: None }),
        }
    }
}

/// Bath spectral density selection.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BathConfig {
    SubOhmic { s: f64, omega_c: f64, gamma: f64 },
    NearlyFlat { g0: f64, omega_min: f64, omega_c: f64 },
    /// The flat-band limit of the sub-ohmic family: plateau height and
    /// edges are derived from `(s, omega_c, gamma)`.
    NearlyFlatLimit { s: f64, omega_c: f64, gamma: f64 },
    Tabulated { points: Vec<(f64, f64)> },
    TabulatedCsv { path: String },
}

impl BathConfig {
    pub fn build(&self) -> Result<BathSpectrum> {
        match self {
            BathConfig::SubOhmic { s, omega_c, gamma } => {
                BathSpectrum::sub_ohmic(*s, *omega_c, *gamma)
            }
            BathConfig::NearlyFlat { g0, omega_min, omega_c } => {
                BathSpectrum::nearly_flat(*g0, *omega_min, *omega_c)
            }
            BathConfig::NearlyFlatLimit { s, omega_c, gamma } => nfbs_limit(*s, *omega_c, *gamma),
            BathConfig::Tabulated { points } => BathSpectrum::tabulated(points.clone()),
            BathConfig::TabulatedCsv { path } => {
                let text = std::fs::read_to_string(path)?;
                BathSpectrum::tabulated_from_csv(&text)
            }
        }
    }
}

/// One Fourier component of a generic periodic gap drive.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicConfig {
    pub index: u32,
    #[serde(default)]
    pub sine: f64,
    #[serde(default)]
    pub cosine: f64,
}

/// Drive selection. `none` means an unmodulated probe at `omega0`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulationConfig {
    None { omega0: f64 },
    Sinusoidal { omega0: f64, delta: f64, mu: f64 },
    MultiHarmonic { omega0: f64, delta: f64, depths: Vec<(u32, f64)> },
    Generic { omega0: f64, delta: f64, harmonics: Vec<HarmonicConfig> },
    PiPulse { omega0: f64, delta: f64 },
}

impl ModulationConfig {
    pub fn omega0(&self) -> f64 {
        match self {
            ModulationConfig::None { omega0 }
            | ModulationConfig::Sinusoidal { omega0, .. }
            | ModulationConfig::MultiHarmonic { omega0, .. }
            | ModulationConfig::Generic { omega0, .. }
            | ModulationConfig::PiPulse { omega0, .. } => *omega0,
        }
    }

    /// `None` for an unmodulated probe, the validated drive otherwise.
    pub fn build(&self) -> Result<Option<Modulation>> {
        match self {
            ModulationConfig::None { omega0 } => {
                if !(*omega0 > 0.0) || !omega0.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "carrier frequency must be positive and finite, got {omega0}"
                    )));
                }
                Ok(None)
            }
            ModulationConfig::Sinusoidal { omega0, delta, mu } => {
                Ok(Some(Modulation::sinusoidal(*omega0, *delta, *mu)?))
            }
            ModulationConfig::MultiHarmonic { omega0, delta, depths } => {
                Ok(Some(Modulation::multi_harmonic(*omega0, *delta, depths)?))
            }
            ModulationConfig::Generic { omega0, delta, harmonics } => {
                let hs: Vec<Harmonic> = harmonics
                    .iter()
                    .map(|h| Harmonic { index: h.index, sine: h.sine, cosine: h.cosine })
                    .collect();
                Ok(Some(Modulation::generic(*omega0, *delta, hs)?))
            }
            ModulationConfig::PiPulse { omega0, delta } => {
                Ok(Some(Modulation::pi_pulse(*omega0, *delta)?))
            }
        }
    }
}

/// Probe Hilbert-space selection.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeConfig {
    /// Harmonic ladder; `n_max` pins the truncation, otherwise it adapts.
    Oscillator {
        #[serde(default)]
        n_max: Option<u32>,
    },
    /// Hard-capped ladder with levels `0..=max_level`.
    FiniteLadder { max_level: u32 },
}

impl ProbeConfig {
    pub fn build(&self) -> Result<ProbeSpec> {
        let spec = match self {
            ProbeConfig::Oscillator { n_max } => ProbeSpec::OscillatorTruncated { n_max: *n_max },
            ProbeConfig::FiniteLadder { max_level } => {
                ProbeSpec::FiniteN { max_level: *max_level }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn default_m_measurements() -> u64 {
    1
}
fn default_completeness_tol() -> f64 {
    1e-3
}

/// How comb weights are computed.
#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum WeightMethodConfig {
    Analytic,
    Quadrature,
    Auto,
}

impl WeightMethodConfig {
    pub fn build(&self) -> WeightMethod {
        match self {
            WeightMethodConfig::Analytic => WeightMethod::Analytic,
            WeightMethodConfig::Quadrature => WeightMethod::Quadrature,
            WeightMethodConfig::Auto => WeightMethod::Auto,
        }
    }
}

impl Default for WeightMethodConfig {
    fn default() -> Self {
        WeightMethodConfig::Auto
    }
}

/// QFI evaluation controls.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QfiConfig {
    #[serde(default = "default_m_measurements")]
    pub m_measurements: u64,
    #[serde(default = "default_completeness_tol")]
    pub completeness_tol: f64,
    /// Comb cutoff `|m| <= cutoff`; `None` uses the drive's own default.
    #[serde(default)]
    pub cutoff: Option<u32>,
    #[serde(default)]
    pub weights: WeightMethodConfig,
}

impl Default for QfiConfig {
    fn default() -> Self {
        QfiConfig {
            m_measurements: default_m_measurements(),
            completeness_tol: default_completeness_tol(),
            cutoff: None,
            weights: WeightMethodConfig::Auto,
        }
    }
}

impl QfiConfig {
    pub fn params(&self) -> QfiParams {
        QfiParams {
            m_measurements: self.m_measurements,
            completeness_tol: self.completeness_tol,
        }
    }
}

/// Grid spacing.
#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum GridScale {
    Log,
    Linear,
}

impl Default for GridScale {
    fn default() -> Self {
        GridScale::Log
    }
}

/// A one-dimensional evaluation grid.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    #[serde(default)]
    pub scale: GridScale,
}

impl GridConfig {
    pub fn build(&self) -> Result<Vec<f64>> {
        match self.scale {
            GridScale::Log => log_grid(self.lo, self.hi, self.n),
            GridScale::Linear => linear_grid(self.lo, self.hi, self.n),
        }
    }
}

fn default_lindblad_n_max() -> u32 {
    60
}
fn default_n_checkpoints() -> usize {
    50
}
fn default_atol() -> f64 {
    1e-12
}
fn default_rtol() -> f64 {
    1e-10
}
fn default_pass_threshold() -> f64 {
    1e-8
}

/// Initial state for a relaxation run.
#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateConfig {
    Ground,
    Superposition01,
}

impl Default for InitialStateConfig {
    fn default() -> Self {
        InitialStateConfig::Ground
    }
}

/// Master-equation verification controls.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladConfig {
    #[serde(default = "default_lindblad_n_max")]
    pub n_max: u32,
    #[serde(default)]
    pub t_final: Option<f64>,
    #[serde(default = "default_n_checkpoints")]
    pub n_checkpoints: usize,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    /// Run passes when the final trace distance is below this.
    #[serde(default = "default_pass_threshold")]
    pub pass_threshold: f64,
    #[serde(default)]
    pub initial: InitialStateConfig,
}

impl Default for LindbladConfig {
    fn default() -> Self {
        LindbladConfig {
            n_max: default_lindblad_n_max(),
            t_final: None,
            n_checkpoints: default_n_checkpoints(),
            atol: default_atol(),
            rtol: default_rtol(),
            pass_threshold: default_pass_threshold(),
            initial: InitialStateConfig::Ground,
        }
    }
}

impl LindbladConfig {
    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            n_checkpoints: self.n_checkpoints,
            atol: self.atol,
            rtol: self.rtol,
            hamiltonian_gap: None,
            t_final: self.t_final,
            max_steps: 50_000_000,
        }
    }
}

/// Optional overrides for the designers.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignOptionsConfig {
    #[serde(default)]
    pub mu_max: Option<f64>,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub floor_factor: Option<f64>,
    #[serde(default)]
    pub pi_cutoff: Option<u32>,
    #[serde(default)]
    pub max_heating_fraction: Option<f64>,
    #[serde(default)]
    pub max_harmonic: Option<u32>,
}

impl DesignOptionsConfig {
    pub fn build(&self) -> DesignOptions {
        let d = DesignOptions::default();
        DesignOptions {
            mu_max: self.mu_max.unwrap_or(d.mu_max),
            kappa: self.kappa.unwrap_or(d.kappa),
            floor_factor: self.floor_factor.unwrap_or(d.floor_factor),
            pi_cutoff: self.pi_cutoff.unwrap_or(d.pi_cutoff),
            max_heating_fraction: self.max_heating_fraction.unwrap_or(d.max_heating_fraction),
            max_harmonic: self.max_harmonic.unwrap_or(d.max_harmonic),
            nelder: NelderOptions::default(),
        }
    }
}

/// Design problem selection.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DesignConfig {
    SinglePeak {
        omega0: f64,
        t_target: f64,
        #[serde(default)]
        options: DesignOptionsConfig,
    },
    MultiPeak {
        omega0: f64,
        targets: Vec<f64>,
        #[serde(default)]
        options: DesignOptionsConfig,
    },
}
