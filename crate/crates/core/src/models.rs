//! Concrete systems on the interval `(0, π)`: damped wave, hinged beam with and
//! without rotational inertia, and the conservative Klein-Gordon equation.

use serde::{Deserialize, Serialize};

use crate::damping::DampingFunction;
use crate::error::{Error, Result};
use crate::spectrum::{Interval, SpectrumSpec, TailForm};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelPreset {
    pub name: String,
    pub spectrum: SpectrumSpec,
    pub damping: DampingFunction,
    /// `sup f/√s < ∞`.
    pub domain_factorizes: bool,
    pub notes: String,
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidParameter(format!("{what} must be finite, got {x}")))
    }
}

/// `ü − Δu + (−Δ)^θ u̇ = 0`: `λₙ = n²`, `f(s) = s^θ`.
pub fn wave(theta: f64) -> Result<ModelPreset> {
    let theta = finite(theta, "theta")?;
    Ok(ModelPreset {
        name: "wave".into(),
        spectrum: SpectrumSpec::from_tail(TailForm::Square, 1)?,
        damping: DampingFunction::Power { theta },
        domain_factorizes: theta <= 0.5,
        notes: format!("damped wave equation, lambda_n = n^2, f(s) = s^{theta}"),
    })
}

/// Hinged beam `ü + Δ²u + (Δ²)^(θ/2) u̇ = 0`: eigenvalues `n⁴`, `f(s) = s^(θ/2)`.
pub fn beam(theta: f64) -> Result<ModelPreset> {
    let theta = finite(theta, "theta")?;
    Ok(ModelPreset {
        name: "beam".into(),
        spectrum: SpectrumSpec::from_tail(TailForm::Fourth, 1)?,
        damping: DampingFunction::Power { theta: theta / 2.0 },
        domain_factorizes: theta <= 1.0,
        notes: format!("hinged beam, s_n = n^4, f(s) = s^({theta}/2)"),
    })
}

/// Beam with rotational inertia `ω`: eigenvalues `νₙ = n⁴/(1 + ωn²)`.
pub fn beam_rotational(theta: f64, omega: f64) -> Result<ModelPreset> {
    let theta = finite(theta, "theta")?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    Ok(ModelPreset {
        name: "beam-rot".into(),
        spectrum: SpectrumSpec::from_tail(TailForm::RotationalQuotient { omega }, 1)?,
        damping: DampingFunction::RotationalInertia { theta, omega },
        domain_factorizes: theta <= 1.5,
        notes: format!("beam with rotational inertia omega = {omega}, nu_n = n^4/(1 + omega n^2)"),
    })
}

/// Undamped `ü − Δu + m²u = 0` on the whole line: `σ(A) = [m², ∞)`.
pub fn klein_gordon(mass: f64) -> Result<ModelPreset> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
    }
    Ok(ModelPreset {
        name: "klein-gordon".into(),
        spectrum: SpectrumSpec::continuous(vec![Interval::unbounded(mass * mass)])?,
        damping: DampingFunction::Zero,
        domain_factorizes: true,
        notes: format!("Klein-Gordon, sigma(A) = [{}, inf), no damping", mass * mass),
    })
}

/// One-parameter model families addressable by name.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelFamily {
    Wave,
    Beam,
    #[serde(rename = "beam-rot")]
    BeamRotational {
        omega: f64,
    },
    /// Parametrized by the mass.
    KleinGordon,
}

pub const PRESET_NAMES: [&str; 4] = ["wave", "beam", "beam-rot", "klein-gordon"];

impl ModelFamily {
    /// `omega` is used only by `beam-rot`.
    pub fn from_name(name: &str, omega: f64) -> Result<Self> {
        match name {
            "wave" => Ok(ModelFamily::Wave),
            "beam" => Ok(ModelFamily::Beam),
            "beam-rot" => Ok(ModelFamily::BeamRotational { omega }),
            "klein-gordon" => Ok(ModelFamily::KleinGordon),
            _ => Err(Error::InvalidParameter(format!(
                "unknown model '{name}', expected one of {}",
                PRESET_NAMES.join(", ")
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelFamily::Wave => "wave",
            ModelFamily::Beam => "beam",
            ModelFamily::BeamRotational { .. } => "beam-rot",
            ModelFamily::KleinGordon => "klein-gordon",
        }
    }

    pub fn preset(&self, parameter: f64) -> Result<ModelPreset> {
        match *self {
            ModelFamily::Wave => wave(parameter),
            ModelFamily::Beam => beam(parameter),
            ModelFamily::BeamRotational { omega } => beam_rotational(parameter, omega),
            ModelFamily::KleinGordon => klein_gordon(parameter),
        }
    }
}
