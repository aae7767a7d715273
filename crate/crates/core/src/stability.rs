//! Stability classification of `ü + Au + f(A)u̇ = 0` from the damping alone.

use rayon::prelude::*;
use serde::Serialize;

use crate::damping::DampingFunction;
use crate::error::Result;
use crate::generator::portrait;
use crate::models::{ModelFamily, ModelPreset};
use crate::spectrum::{zero_set, SamplingPolicy, SpectrumSpec, Tri, DEFAULT_ZERO_TOL};

/// Modes sampled for the spectral bound when no certificate is available.
pub const SPECTRAL_BOUND_BUDGET: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    NotStable,
    StableOnly,
    Semiuniform,
    Exponential,
    Unknown,
}

impl Verdict {
    /// Position in the chain `NotStable < StableOnly < Semiuniform < Exponential`.
    pub fn rank(self) -> Option<u8> {
        match self {
            Verdict::NotStable => Some(0),
            Verdict::StableOnly => Some(1),
            Verdict::Semiuniform => Some(2),
            Verdict::Exponential => Some(3),
            Verdict::Unknown => None,
        }
    }

    /// `true` when every trajectory tends to zero.
    pub fn is_stable(self) -> bool {
        self.rank().is_some_and(|r| r >= 1)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NotStable => "NotStable",
            Verdict::StableOnly => "StableOnly",
            Verdict::Semiuniform => "Semiuniform",
            Verdict::Exponential => "Exponential",
            Verdict::Unknown => "Unknown",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Conditions {
    pub inf_f_positive: Tri,
    pub sup_ratio_finite: Tri,
    pub zero_set_empty: Tri,
    pub zero_set_countable: Tri,
    pub zero_set_null_measure: Tri,
}

/// Polynomial rates for `ψ(t) = ‖S(t)𝔄⁻¹‖`, stored as exponents of `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rates {
    pub alpha: f64,
    pub beta: f64,
    /// `ψ(t) = O(t^rate_lower)` with `rate_lower = −1/(2α)`.
    pub rate_lower: f64,
    /// `ψ(t)` is not `o(t^rate_upper)` with `rate_upper = −1/(2β)`.
    pub rate_upper: f64,
    pub optimal: bool,
}

impl Rates {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Rates {
            alpha,
            beta,
            rate_lower: -1.0 / (2.0 * alpha),
            rate_upper: -1.0 / (2.0 * beta),
            optimal: alpha == beta,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reason {
    pub condition: String,
    pub theorem: String,
}

impl Reason {
    fn new(condition: impl Into<String>, theorem: impl Into<String>) -> Self {
        Reason {
            condition: condition.into(),
            theorem: theorem.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub verdict: Verdict,
    pub conditions: Conditions,
    pub rates: Option<Rates>,
    /// `σ* = sup Re σ(𝔄)`; `σ* <= ω* <= 0` for the growth bound `ω*`.
    pub spectral_bound: f64,
    pub reasons: Vec<Reason>,
    #[serde(skip)]
    pub spectral_bound_exact: bool,
}

const SPECTRAL: &str = "spectral theorem for f(A)";
const ABLV: &str = "Arendt-Batty-Lyubich-Vu";
const GEARHART: &str = "Gearhart-Pruss";
const BATTY: &str = "Batty";
const BT: &str = "Borichev-Tomilov";
const BD: &str = "Batty-Duyckaerts";

fn show(t: Tri) -> &'static str {
    match t {
        Some(true) => "true",
        Some(false) => "false",
        None => "unknown",
    }
}

/// Classifies the semigroup generated by `(u, v) ↦ (v, −Au − f(A)v)`.
pub fn classify(f: &DampingFunction, spec: &SpectrumSpec) -> StabilityReport {
    let ext = f.extremes(spec);
    let zs = zero_set(spec, f, DEFAULT_ZERO_TOL);
    let mut c = Conditions {
        inf_f_positive: ext.inf_f_positive(),
        sup_ratio_finite: ext.sup_ratio_finite(),
        zero_set_empty: zs.is_empty,
        zero_set_countable: zs.countable,
        zero_set_null_measure: zs.has_positive_measure.map(|p| !p),
    };
    let mut reasons = Vec::new();
    if spec.is_bounded() && c.zero_set_empty == Some(true) {
        // A continuous f without zeros on a compact set is bounded below.
        c.inf_f_positive = Some(true);
        reasons.push(Reason::new(
            "bounded spectrum: semiuniform and exponential stability coincide",
            "compactness of sigma(A)",
        ));
    }

    let verdict = if c.zero_set_null_measure == Some(false) {
        reasons.push(Reason::new("zero set has positive spectral measure", SPECTRAL));
        Verdict::NotStable
    } else if c.inf_f_positive == Some(true) && c.sup_ratio_finite == Some(true) {
        reasons.push(Reason::new("inf f > 0", GEARHART));
        reasons.push(Reason::new("sup f/s < inf", GEARHART));
        Verdict::Exponential
    } else if c.zero_set_empty == Some(true) && c.sup_ratio_finite == Some(true) {
        reasons.push(Reason::new("zero set empty", BATTY));
        reasons.push(Reason::new("sup f/s < inf", BATTY));
        reasons.push(Reason::new(
            format!("inf f > 0 is {}", show(c.inf_f_positive)),
            GEARHART,
        ));
        Verdict::Semiuniform
    } else if c.zero_set_null_measure == Some(true) && c.zero_set_countable == Some(true) {
        reasons.push(Reason::new("zero set null and at most countable", ABLV));
        reasons.push(Reason::new(
            format!(
                "zero set empty is {}, sup f/s < inf is {}",
                show(c.zero_set_empty),
                show(c.sup_ratio_finite)
            ),
            BATTY,
        ));
        Verdict::StableOnly
    } else {
        reasons.push(Reason::new(
            format!(
                "undecided: zero set null measure is {}, countable is {}",
                show(c.zero_set_null_measure),
                show(c.zero_set_countable)
            ),
            ABLV,
        ));
        Verdict::Unknown
    };

    let rates = (verdict == Verdict::Semiuniform)
        .then(|| f.rate_exponents(spec))
        .and_then(|r| Some(Rates::new(r.alpha?, r.beta?)));
    if let Some(r) = rates {
        reasons.push(Reason::new(format!("inf s^{} f(s) > 0", r.alpha), BT));
        reasons.push(Reason::new(format!("sup s^{} f(s) < inf", r.beta), BD));
    }

    let (spectral_bound, spectral_bound_exact) =
        match portrait(f, spec, SPECTRAL_BOUND_BUDGET, &SamplingPolicy::default()) {
            Ok(p) => (p.spectral_bound, p.spectral_bound_exact),
            Err(_) => (0.0, false),
        };
    StabilityReport {
        verdict,
        conditions: c,
        rates,
        spectral_bound,
        reasons,
        spectral_bound_exact,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub parameter: f64,
    pub verdict: Verdict,
    pub report: StabilityReport,
}

/// One classification per grid value of `θ` (or of the mass for Klein-Gordon).
pub fn classification_table(family: ModelFamily, grid: &[f64]) -> Result<Vec<TableRow>> {
    let presets: Vec<(f64, ModelPreset)> = grid
        .iter()
        .map(|&p| Ok((p, family.preset(p)?)))
        .collect::<Result<_>>()?;
    Ok(presets
        .par_iter()
        .map(|(p, m)| {
            let report = classify(&m.damping, &m.spectrum);
            TableRow {
                parameter: *p,
                verdict: report.verdict,
                report,
            }
        })
        .collect())
}
