//! Spectrum of the generator `𝔄(u, v) = (v, −Au − f(A)v)`.
//!
//! Away from zero the spectrum is the union of the roots `ξ±` of
//! `ξ² + f(s)ξ + s = 0` over `s ∈ σ(A)`, plus the points `−1/ℓ` for every limit
//! `ℓ` of `f(s)/s` at infinity. Zero belongs to it exactly when `f(s)/s` is
//! unbounded.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::damping::{DampingFunction, Quantity};
use crate::error::Result;
use crate::spectrum::{zero_set, Interval, SamplingPolicy, SpectrumSpec, Tri, DEFAULT_ZERO_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    Overdamped,
    Critical,
    Underdamped,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Overdamped => "overdamped",
            Regime::Critical => "critical",
            Regime::Underdamped => "underdamped",
        }
    }
}

/// Relative band on `f² − 4s` inside which the double root is emitted.
pub const CRITICAL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct XiPair {
    /// Root with the larger real part (the `+` branch).
    pub xi_plus: Complex64,
    pub xi_minus: Complex64,
    pub regime: Regime,
}

pub fn regime(s: f64, fs: f64) -> Regime {
    let disc = fs * fs - 4.0 * s;
    if disc.abs() <= CRITICAL_TOL * (fs * fs).max(4.0 * s) {
        Regime::Critical
    } else if disc > 0.0 {
        Regime::Overdamped
    } else {
        Regime::Underdamped
    }
}

/// Roots of `ξ² + fs·ξ + s = 0`.
///
/// In the overdamped regime the large root is formed first and the small one
/// recovered from the product `ξ₊ξ₋ = s`, so heavy damping loses no digits.
pub fn xi_pair(s: f64, fs: f64) -> XiPair {
    let r = regime(s, fs);
    let two_root_s = 2.0 * s.sqrt();
    match r {
        Regime::Critical => {
            let xi = Complex64::new(-fs / 2.0, 0.0);
            XiPair {
                xi_plus: xi,
                xi_minus: xi,
                regime: r,
            }
        }
        Regime::Overdamped => {
            let sq = ((fs - two_root_s) * (fs + two_root_s)).sqrt();
            let big = -(fs + sq) / 2.0;
            XiPair {
                xi_plus: Complex64::new(s / big, 0.0),
                xi_minus: Complex64::new(big, 0.0),
                regime: r,
            }
        }
        Regime::Underdamped => {
            let w = ((two_root_s - fs) * (two_root_s + fs)).sqrt() / 2.0;
            XiPair {
                xi_plus: Complex64::new(-fs / 2.0, w),
                xi_minus: Complex64::new(-fs / 2.0, -w),
                regime: r,
            }
        }
    }
}

/// Whether `0 ∉ σ(𝔄)`, i.e. `sup f(s)/s < ∞`.
pub fn is_bijective(f: &DampingFunction, spec: &SpectrumSpec) -> Tri {
    if spec.is_bounded() {
        return Some(true);
    }
    f.extremes(spec).sup_ratio_finite()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointLabel {
    XiPlus,
    XiMinus,
    LambdaPoint,
    Zero,
}

impl PointLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PointLabel::XiPlus => "xi_plus",
            PointLabel::XiMinus => "xi_minus",
            PointLabel::LambdaPoint => "lambda_point",
            PointLabel::Zero => "zero",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PortraitPoint {
    pub value: Complex64,
    pub label: PointLabel,
    /// `s` for branch points, `ℓ` for Λ-points, 0 for the origin.
    pub source: f64,
    /// The point is an eigenvalue of the generator (true for discrete `σ(A)`).
    pub eigenvalue: bool,
    pub regime: Option<Regime>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorPortrait {
    pub points: Vec<PortraitPoint>,
    pub contains_zero: Tri,
    /// `sup Re σ(𝔄)`, always `<= 0`.
    pub spectral_bound: f64,
    /// `false` when the bound is a supremum over samples only.
    pub spectral_bound_exact: bool,
    /// `false` when Λ could not be certified (tabulated data without tail law).
    pub lambda_certified: bool,
}

impl GeneratorPortrait {
    pub fn xi_points(&self) -> impl Iterator<Item = &PortraitPoint> {
        self.points
            .iter()
            .filter(|p| matches!(p.label, PointLabel::XiPlus | PointLabel::XiMinus))
    }
}

/// Real part of `ξ₊(s)` as `s → ∞` along an unbounded spectrum.
fn tail_real_part(f: &DampingFunction) -> Option<f64> {
    let g = f.limit_at_infinity(Quantity::FOverSqrtS)?;
    if g < 2.0 {
        Some(-f.limit_at_infinity(Quantity::F)? / 2.0)
    } else if g > 2.0 {
        let ell = f.limit_at_infinity(Quantity::FOverS)?;
        Some(if ell.is_infinite() {
            0.0
        } else if ell == 0.0 {
            f64::NEG_INFINITY
        } else {
            -1.0 / ell
        })
    } else {
        Some(f64::NEG_INFINITY)
    }
}

/// Sampled portrait of `σ(𝔄)` with its spectral bound.
pub fn portrait(
    f: &DampingFunction,
    spec: &SpectrumSpec,
    budget: usize,
    policy: &SamplingPolicy,
) -> Result<GeneratorPortrait> {
    let modes = spec.sample_modes(budget, policy);
    let eigen = spec.is_discrete();
    let pairs: Vec<(f64, XiPair)> = modes
        .par_iter()
        .map(|&s| Ok((s, xi_pair(s, f.eval(s)?))))
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(2 * pairs.len() + 2);
    for &(s, xi) in &pairs {
        for (value, label) in [(xi.xi_plus, PointLabel::XiPlus), (xi.xi_minus, PointLabel::XiMinus)] {
            points.push(PortraitPoint {
                value,
                label,
                source: s,
                eigenvalue: eigen,
                regime: Some(xi.regime),
            });
        }
    }
    let lambda = f.lambda_limit_set(spec);
    for &ell in &lambda.points {
        points.push(PortraitPoint {
            value: Complex64::new(-1.0 / ell, 0.0),
            label: PointLabel::LambdaPoint,
            source: ell,
            eigenvalue: false,
            regime: None,
        });
    }
    let contains_zero = is_bijective(f, spec).map(|b| !b);
    if contains_zero == Some(true) {
        points.push(PortraitPoint {
            value: Complex64::new(0.0, 0.0),
            label: PointLabel::Zero,
            source: 0.0,
            eigenvalue: false,
            regime: None,
        });
    }

    let mut bound = points.iter().map(|p| p.value.re).fold(f64::NEG_INFINITY, f64::max);
    let tail = if spec.is_bounded() { None } else { tail_real_part(f) };
    if let Some(t) = tail {
        bound = bound.max(t);
    }
    let ext = f.extremes(spec);
    let all_sampled = spec.eigenvalue_count().is_some_and(|n| n <= modes.len());
    let mut exact = all_sampled || contains_zero == Some(true) || tail == Some(0.0);
    if contains_zero == Some(true) || tail == Some(0.0) {
        bound = 0.0;
    }
    // Underdamped everywhere: Re ξ₊ = −f/2, so the bound is −inf f / 2.
    let under = ext.sup_f_over_sqrt_s;
    if !exact && under.exact && under.value < 2.0 && ext.inf_f.exact {
        bound = -ext.inf_f.value / 2.0;
        exact = true;
    }
    Ok(GeneratorPortrait {
        points,
        contains_zero,
        spectral_bound: bound.min(0.0),
        spectral_bound_exact: exact,
        lambda_certified: lambda.certified,
    })
}

/// `(σ(𝔄) ∖ {0}) ∩ iℝ`, stored through the positive frequencies `λ`; the set
/// itself is `{±iλ}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImaginarySpectrum {
    /// `√s` for isolated zeros `s` of `f`.
    pub points: Vec<f64>,
    /// `[√a, √b]` for zero intervals `[a, b]` of `f`.
    pub bands: Vec<Interval>,
    /// `f` vanishes on a discrete spectrum with infinitely many eigenvalues:
    /// every `√λₙ` is included.
    pub all_eigenvalues: bool,
    /// `false` when the zero set could not be decided.
    pub certified: bool,
    #[serde(skip)]
    spec: SpectrumSpec,
}

/// Tolerance for `|λ − √s|` when deciding that `iλ` hits the spectrum.
pub fn on_spectrum_tol(root_s: f64) -> f64 {
    1e-9 * (1.0 + root_s)
}

impl ImaginarySpectrum {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.bands.is_empty() && !self.all_eigenvalues
    }

    /// Whether `iλ` (λ ≠ 0) lies on the computed imaginary spectrum.
    pub fn contains(&self, lambda: f64) -> bool {
        let l = lambda.abs();
        if l == 0.0 {
            return false;
        }
        let hit = |r: f64| (l - r).abs() <= on_spectrum_tol(r);
        if self.points.iter().any(|&r| hit(r)) {
            return true;
        }
        if self
            .bands
            .iter()
            .any(|b| l >= b.lo - on_spectrum_tol(b.lo) && l <= b.upper() + on_spectrum_tol(b.upper()))
        {
            return true;
        }
        if self.all_eigenvalues {
            let s = l * l;
            let near = [self.spec.first_at_or_above(s), self.spec.last_at_or_below(s)];
            return near.iter().flatten().any(|&e| hit(e.sqrt()));
        }
        false
    }
}

pub fn imaginary_spectrum(f: &DampingFunction, spec: &SpectrumSpec) -> ImaginarySpectrum {
    let z = zero_set(spec, f, DEFAULT_ZERO_TOL);
    let all_eigenvalues = z.whole_spectrum && spec.is_discrete() && !spec.is_bounded();
    let points = if all_eigenvalues {
        Vec::new()
    } else {
        z.points.iter().map(|s| s.sqrt()).collect()
    };
    let bands = z
        .intervals
        .iter()
        .map(|iv| Interval::new(iv.lo.sqrt(), iv.hi.map(f64::sqrt)))
        .collect();
    ImaginarySpectrum {
        points,
        bands,
        all_eigenvalues,
        certified: z.is_empty.is_some(),
        spec: spec.clone(),
    }
}
