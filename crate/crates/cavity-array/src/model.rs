//! Core model parameters and the quantities every other layer is built on.
//!
//! The array is a tight-binding chain of identical cavities (bare frequency
//! `omega`, hopping `xi`, Kerr coefficient `g`) with a two-level atom
//! (transition frequency `omega_atom`) coupled to the central site. Two
//! couplings appear side by side because the scattering and dynamics layers
//! parameterize the atom differently: `j0` is the bare atom-field coupling
//! entering the equations of motion, while `j_eff = j0 * sqrt(<sigma_z>)`
//! is the effective strength the stationary theory sees on a background
//! with inversion `sigma_z_bg`.
//!
//! A mode with quasi-momentum k rides the intensity-shifted dispersion
//!
//! ```text
//! Omega_k = -2 xi cos k + omega + 2 g I
//! ```
//!
//! and the atom enters the stationary equations only through the detuning
//! coefficient D = J^2 / (Omega_k - Omega) (or its sign-flipped twin; both
//! printed forms are exposed and selected by [`SignConvention`]).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default epsilon below which |Omega_k - Omega| counts as an exact pole.
pub const RESONANCE_EPS_DEFAULT: f64 = 1e-12;

/// Physical parameters of the cavity array plus embedded atom.
///
/// Serializes to a flat JSON object with keys
/// `omega, xi, g, Omega, J, J0, sigma_z_bg, N`. Every key may be omitted
/// and falls back to the default value, except that a missing `J0`
/// defaults to whatever `J` resolved to rather than to the bare default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    /// Bare cavity frequency.
    pub omega: f64,
    /// Nearest-neighbour hopping; must be nonzero for any transport quantity.
    pub xi: f64,
    /// Kerr coefficient.
    pub g: f64,
    /// Atomic transition frequency.
    #[serde(rename = "Omega")]
    pub omega_atom: f64,
    /// Effective atom-field coupling used by the stationary scattering theory.
    #[serde(rename = "J")]
    pub j_eff: f64,
    /// Bare atom-field coupling used by the dynamics and fluctuation layers.
    #[serde(rename = "J0")]
    pub j0: f64,
    /// Background atomic inversion the effective coupling refers to.
    pub sigma_z_bg: f64,
    /// Half array length: sites run over -N..=N.
    #[serde(rename = "N")]
    pub half_len: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            omega: 2.0,
            xi: 1.0,
            g: 0.0,
            omega_atom: 3.0,
            j_eff: 1.0,
            j0: 1.0,
            sigma_z_bg: 1.0,
            half_len: 20,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelParamsWire {
    omega: Option<f64>,
    xi: Option<f64>,
    g: Option<f64>,
    #[serde(rename = "Omega")]
    omega_atom: Option<f64>,
    #[serde(rename = "J")]
    j_eff: Option<f64>,
    #[serde(rename = "J0")]
    j0: Option<f64>,
    sigma_z_bg: Option<f64>,
    #[serde(rename = "N")]
    half_len: Option<usize>,
}

impl<'de> Deserialize<'de> for ModelParams {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let wire = ModelParamsWire::deserialize(deserializer)?;
        let base = ModelParams::default();
        let j_eff = wire.j_eff.unwrap_or(base.j_eff);
        Ok(ModelParams {
            omega: wire.omega.unwrap_or(base.omega),
            xi: wire.xi.unwrap_or(base.xi),
            g: wire.g.unwrap_or(base.g),
            omega_atom: wire.omega_atom.unwrap_or(base.omega_atom),
            j_eff,
            j0: wire.j0.unwrap_or(j_eff),
            sigma_z_bg: wire.sigma_z_bg.unwrap_or(base.sigma_z_bg),
            half_len: wire.half_len.unwrap_or(base.half_len),
        })
    }
}

impl ModelParams {
    /// Number of sites, 2N + 1.
    pub fn n_sites(&self) -> usize {
        2 * self.half_len + 1
    }

    /// Checks the structural invariants shared by every operation.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega", self.omega),
            ("xi", self.xi),
            ("g", self.g),
            ("Omega", self.omega_atom),
            ("J", self.j_eff),
            ("J0", self.j0),
            ("sigma_z_bg", self.sigma_z_bg),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("parameter {name} is not finite: {v}")));
            }
        }
        Ok(())
    }
}

/// Which printed sign of the detuning coefficient to use.
///
/// The two stationary forms of the theory disagree on the sign of the
/// J^2 pole term; both are legitimate readings, so the choice is explicit.
/// `Eq9` (D = J^2 / (Omega_k - Omega)) is the default everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    /// D = J^2 / (Omega - Omega_k).
    Eq8,
    /// D = J^2 / (Omega_k - Omega).
    #[default]
    Eq9,
}

/// A travelling mode of the chain. `sin k = 0` is the band edge: the mode
/// carries no flux and none of the scattering machinery applies to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: f64,
}

impl Mode {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::invalid(format!("quasi-momentum must be finite, got {k}")));
        }
        if k.sin().abs() < BAND_EDGE_EPS {
            return Err(Error::BandEdge { k });
        }
        Ok(Mode { k })
    }
}

/// |sin k| below this counts as a band edge.
pub const BAND_EDGE_EPS: f64 = 1e-12;

/// Intensity-shifted dispersion Omega_k = -2 xi cos k + omega + 2 g I.
///
/// `intensity` is the squared field amplitude the Kerr term sees; which
/// amplitude that is (incident, transmitted, iterated) is the caller's
/// convention, not this function's.
pub fn dispersion_omega_k(params: &ModelParams, k: f64, intensity: f64) -> f64 {
    -2.0 * params.xi * k.cos() + params.omega + 2.0 * params.g * intensity
}

/// Detuning coefficient D with the default resonance epsilon.
pub fn detuning_coefficient(
    params: &ModelParams,
    omega_k: f64,
    sign: SignConvention,
) -> Result<f64> {
    detuning_coefficient_eps(params, omega_k, sign, RESONANCE_EPS_DEFAULT)
}

/// Detuning coefficient D = J^2 / ±(Omega_k - Omega) with an explicit pole
/// epsilon.
///
/// With J = 0 the coefficient is identically zero and no pole exists, so the
/// epsilon check is skipped; with J != 0, |Omega_k - Omega| < eps raises
/// [`Error::PoleAtResonance`].
pub fn detuning_coefficient_eps(
    params: &ModelParams,
    omega_k: f64,
    sign: SignConvention,
    eps: f64,
) -> Result<f64> {
    if params.j_eff == 0.0 {
        return Ok(0.0);
    }
    let gap = omega_k - params.omega_atom;
    if gap.abs() < eps {
        return Err(Error::PoleAtResonance { gap: gap.abs(), eps });
    }
    let j2 = params.j_eff * params.j_eff;
    Ok(match sign {
        SignConvention::Eq8 => j2 / -gap,
        SignConvention::Eq9 => j2 / gap,
    })
}

/// Effective coupling J = J0 sqrt(<sigma_z>), defined for <sigma_z> >= 0.
pub fn effective_coupling(j0: f64, sigma_z: f64) -> Result<f64> {
    if sigma_z < 0.0 {
        return Err(Error::invalid(format!(
            "effective coupling needs <sigma_z> >= 0, got {sigma_z}"
        )));
    }
    Ok(j0 * sigma_z.sqrt())
}
