//! Driven-probe quantum thermometry.
//!
//! A harmonic (or finite-ladder) probe weakly coupled to a thermal bath is
//! frequency-modulated with period `2π/Δ`. The modulation splits the probe's
//! response into a comb of sidebands at `ω_m = ω₀ + mΔ` with weights `P_m`;
//! each sideband samples the bath spectrum at its own frequency, so the
//! steady state thermalizes to an *effective* Boltzmann factor that can be
//! made far more temperature-sensitive than the bare probe's. This crate
//! computes:
//!
//! - sideband weights for sinusoidal, multi-harmonic, generic-Fourier, and
//!   π-pulse modulation ([`sidebands`]), both in closed form and by
//!   quadrature of the modulation phase;
//! - the effective Boltzmann factor and dressed steady state ([`steady`]);
//! - the quantum Fisher information (QFI) for temperature estimation by
//!   three independent routes, its per-sideband decomposition, and the
//!   relative-error bound `ξ = 1/(T√(𝓜·H))` ([`qfi`]);
//! - a Lindblad master-equation cross-check of the analytic steady state
//!   ([`lindblad`]);
//! - modulation designers that place QFI peaks at requested temperatures
//!   ([`optimizer`]).
//!
//! All routines are deterministic: identical inputs produce bit-identical
//! outputs.

pub mod bath;
pub mod bessel;
pub mod config;
pub mod error;
pub mod lindblad;
pub mod modulation;
pub mod nelder;
pub mod ode;
pub mod optimizer;
pub mod peaks;
pub mod presets;
pub mod qfi;
pub mod scan;
pub mod sidebands;
pub(crate) mod spectral;
pub mod steady;

pub use error::{Error, Result};
