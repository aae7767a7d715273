//! Resolvent norms `‖(iλ − 𝔄)⁻¹‖` along the imaginary axis and the polynomial
//! growth they exhibit, cross-checked against the decay of `ψ(t)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::damping::DampingFunction;
use crate::error::{Error, Result};
use crate::fit::{loglog_fit, LineFit};
use crate::generator::{imaginary_spectrum, is_bijective, ImaginarySpectrum};
use crate::linalg::{self, CMat2};
use crate::modal::PsiScan;
use crate::spectrum::{log_grid, SamplingPolicy, SpectrumSpec};
use crate::stability::{classify, Verdict};

/// `(iλI − Ã_s)⁻¹ = adj / det` with `det = s − λ² + iλf`.
pub fn modal_resolvent(s: f64, fs: f64, lambda: f64) -> CMat2 {
    let r = Complex64::new(s.sqrt(), 0.0);
    let il = Complex64::new(0.0, lambda);
    let det = Complex64::new(s - lambda * lambda, lambda * fs);
    let k = det.inv();
    [[(il + fs) * k, r * k], [-r * k, il * k]]
}

/// `‖(iλI − Ã_s)⁻¹‖₂` as the norm of the adjugate over `|det|`.
pub fn modal_resolvent_norm(s: f64, fs: f64, lambda: f64) -> f64 {
    let r = Complex64::new(s.sqrt(), 0.0);
    let il = Complex64::new(0.0, lambda);
    let det = Complex64::new(s - lambda * lambda, lambda * fs).norm();
    linalg::cnorm2(&[[il + fs, r], [-r, il]]) / det
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResolventSample {
    pub lambda: f64,
    pub norm: f64,
    pub maximizing_s: f64,
}

/// Modes and imaginary spectrum prepared once for repeated evaluations.
#[derive(Clone, Debug)]
pub struct ResolventScan {
    modes: Vec<(f64, f64)>,
    imaginary: ImaginarySpectrum,
    bijective: Option<bool>,
    bounded_discrete: bool,
}

impl ResolventScan {
    pub fn new(f: &DampingFunction, spec: &SpectrumSpec, budget: usize, policy: &SamplingPolicy) -> Result<Self> {
        let modes = spec
            .sample_modes(budget, policy)
            .into_iter()
            .map(|s| Ok((s, f.eval(s)?)))
            .collect::<Result<Vec<_>>>()?;
        let bounded_discrete = spec.eigenvalue_count().is_some_and(|n| n <= modes.len());
        Ok(ResolventScan {
            modes,
            imaginary: imaginary_spectrum(f, spec),
            bijective: is_bijective(f, spec),
            bounded_discrete,
        })
    }

    /// Largest sampled `s`.
    pub fn horizon(&self) -> f64 {
        self.modes.last().map_or(0.0, |m| m.0)
    }

    /// `true` when every eigenvalue is sampled, so no peak is missing.
    pub fn is_complete(&self) -> bool {
        self.bounded_discrete
    }

    pub fn modes(&self) -> &[(f64, f64)] {
        &self.modes
    }

    pub fn norm_at(&self, lambda: f64) -> Result<ResolventSample> {
        if (lambda == 0.0 && self.bijective == Some(false)) || self.imaginary.contains(lambda) {
            return Err(Error::OnSpectrum(lambda));
        }
        let mut best = ResolventSample {
            lambda,
            norm: 0.0,
            maximizing_s: f64::NAN,
        };
        for &(s, fs) in &self.modes {
            let n = modal_resolvent_norm(s, fs, lambda);
            if n > best.norm {
                best.norm = n;
                best.maximizing_s = s;
            }
        }
        Ok(best)
    }

    pub fn profile(&self, lambdas: &[f64]) -> Result<Vec<ResolventSample>> {
        let mut ls = lambdas.to_vec();
        ls.sort_by(f64::total_cmp);
        ls.dedup();
        ls.par_iter().map(|&l| self.norm_at(l)).collect()
    }
}

/// Largest modal resolvent norm at `iλ` over the first `budget` modes.
///
/// For continuous spectra this is a lower bound of the operator norm.
pub fn resolvent_norm(f: &DampingFunction, spec: &SpectrumSpec, lambda: f64, budget: usize) -> Result<f64> {
    Ok(ResolventScan::new(f, spec, budget, &SamplingPolicy::default())?
        .norm_at(lambda)?
        .norm)
}

/// Union of a log grid over `[lo, hi]`, the resonance points `√s` inside and
/// the midpoints between consecutive resonances.
pub fn lambda_grid(scan: &ResolventScan, lo: f64, hi: f64, log_points: usize) -> Vec<f64> {
    let mut g = log_grid(lo, hi, log_points);
    let res: Vec<f64> = scan
        .modes
        .iter()
        .map(|m| m.0.sqrt())
        .filter(|&r| r >= lo && r <= hi)
        .collect();
    g.extend(res.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    g.extend(res);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Interior local maxima of a profile sorted by `λ`.
pub fn envelope(samples: &[ResolventSample]) -> Vec<ResolventSample> {
    samples
        .windows(3)
        .filter(|w| w[1].norm >= w[0].norm && w[1].norm >= w[2].norm)
        .map(|w| w[1])
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolventProfile {
    pub samples: Vec<ResolventSample>,
    pub fit: Option<LineFit>,
    pub warnings: Vec<String>,
}

/// Minimum number of envelope maxima needed for an exponent fit.
pub const MIN_ENVELOPE_POINTS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    /// Fitted `ν̂` in `‖(iλ − 𝔄)⁻¹‖ ≈ C|λ|^ν̂`.
    pub exponent: f64,
    pub fit: LineFit,
    pub envelope: Vec<ResolventSample>,
    pub warnings: Vec<String>,
}

/// Envelope fit of the resolvent growth over `λ ∈ [lo, hi]`.
///
/// Only resonance peaks with `λ² <=` the largest sampled `s` are used; the rest
/// of the range is reported in `warnings`.
pub fn growth_exponent(
    f: &DampingFunction,
    spec: &SpectrumSpec,
    range: (f64, f64),
    budget: usize,
) -> Result<GrowthFit> {
    let scan = ResolventScan::new(f, spec, budget, &SamplingPolicy::default())?;
    growth_exponent_with(&scan, range, 200)
}

pub fn growth_exponent_with(scan: &ResolventScan, (lo, hi): (f64, f64), log_points: usize) -> Result<GrowthFit> {
    let mut warnings = Vec::new();
    let mut top = hi;
    if !scan.is_complete() {
        let h = scan.horizon().sqrt();
        if h < hi {
            warnings.push(format!("range cut at lambda = {h} by the mode budget (requested {hi})"));
            top = h;
        }
    }
    if top <= lo {
        return Err(Error::InsufficientRange {
            found: 0,
            needed: MIN_ENVELOPE_POINTS,
        });
    }
    let profile = scan.profile(&lambda_grid(scan, lo, top, log_points))?;
    let env = envelope(&profile);
    if env.len() < MIN_ENVELOPE_POINTS {
        return Err(Error::InsufficientRange {
            found: env.len(),
            needed: MIN_ENVELOPE_POINTS,
        });
    }
    let xs: Vec<f64> = env.iter().map(|p| p.lambda).collect();
    let ys: Vec<f64> = env.iter().map(|p| p.norm).collect();
    let fit = loglog_fit(&xs, &ys).ok_or(Error::InsufficientRange {
        found: env.len(),
        needed: 2,
    })?;
    Ok(GrowthFit {
        exponent: fit.slope,
        fit,
        envelope: env,
        warnings,
    })
}

/// Fit ranges for the two sides of the resolvent/decay cross-check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BtConfig {
    pub lambda_range: (f64, f64),
    pub time_range: (f64, f64),
    pub time_points: usize,
    pub lambda_log_points: usize,
    /// Allowed `|ν̂ − ν̃|`.
    pub tolerance: f64,
}

impl Default for BtConfig {
    fn default() -> Self {
        BtConfig {
            lambda_range: (10.0, 1e3),
            time_range: (10.0, 1e3),
            time_points: 60,
            lambda_log_points: 200,
            tolerance: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BtReport {
    /// Resolvent growth exponent `ν̂`.
    pub resolvent_exponent: f64,
    /// Fitted log-log slope of `ψ(t)`.
    pub psi_slope: f64,
    /// `ν̃ = −1/slope`.
    pub psi_exponent: f64,
    pub difference: f64,
    pub consistent: bool,
    pub psi_points_used: usize,
    pub warnings: Vec<String>,
}

/// Compares the resolvent growth `|λ|^ν̂` with the decay `ψ(t) ~ t^(−1/ν̃)`.
/// The semigroup must be semiuniformly (and not exponentially) stable.
pub fn bt_consistency(f: &DampingFunction, spec: &SpectrumSpec, budget: usize, cfg: &BtConfig) -> Result<BtReport> {
    let report = classify(f, spec);
    if report.verdict != Verdict::Semiuniform {
        return Err(Error::Precondition(format!(
            "semiuniform stability required, classification is {:?}",
            report.verdict
        )));
    }
    let policy = SamplingPolicy::default();
    let scan = ResolventScan::new(f, spec, budget, &policy)?;
    let growth = growth_exponent_with(&scan, cfg.lambda_range, cfg.lambda_log_points)?;
    let psi = PsiScan::new(f, spec, budget, &policy)?;
    let times = log_grid(cfg.time_range.0, cfg.time_range.1, cfg.time_points);
    let mut warnings = growth.warnings.clone();
    let certified: Vec<_> = psi.profile(&times).into_iter().filter(|p| !p.truncated).collect();
    if certified.len() < times.len() {
        warnings.push(format!(
            "{} of {} psi samples dropped: maximizer on the last mode",
            times.len() - certified.len(),
            times.len()
        ));
    }
    let xs: Vec<f64> = certified.iter().map(|p| p.t).collect();
    let ys: Vec<f64> = certified.iter().map(|p| p.value).collect();
    let fit = loglog_fit(&xs, &ys).ok_or(Error::InsufficientRange {
        found: xs.len(),
        needed: 2,
    })?;
    let psi_exponent = -1.0 / fit.slope;
    let difference = (growth.exponent - psi_exponent).abs();
    Ok(BtReport {
        resolvent_exponent: growth.exponent,
        psi_slope: fit.slope,
        psi_exponent,
        difference,
        consistent: difference <= cfg.tolerance,
        psi_points_used: certified.len(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modal::mode_matrix;
    use crate::spectrum::{Interval, TailForm};

    fn squares() -> SpectrumSpec {
        SpectrumSpec::from_tail(TailForm::Square, 1).unwrap()
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn modal_resolvent_inverts() {
        for &(s, fs, l) in &[
            (1.0, 0.5, 0.3),
            (9.0, 1.0 / 9.0, 3.0),
            (100.0, 1e3, -5.0),
            (2.0, 0.0, 7.0),
        ] {
            let r = modal_resolvent(s, fs, l);
            let a = mode_matrix(s, fs).entries();
            // (iλI − Ã)·R
            let m = [
                [Complex64::new(-a[0][0], l), Complex64::new(-a[0][1], 0.0)],
                [Complex64::new(-a[1][0], 0.0), Complex64::new(-a[1][1], l)],
            ];
            for i in 0..2 {
                for j in 0..2 {
                    let v = m[i][0] * r[0][j] + m[i][1] * r[1][j];
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert!((v - id).norm() < 1e-10);
                }
            }
            assert!((linalg::cnorm2(&r) - modal_resolvent_norm(s, fs, l)).abs() < 1e-10 * linalg::cnorm2(&r));
        }
    }

    #[test]
    fn on_spectrum_is_rejected() {
        let kg = SpectrumSpec::continuous(vec![Interval::unbounded(1.0)]).unwrap();
        assert_eq!(
            resolvent_norm(&DampingFunction::Zero, &kg, 1.0, 50),
            Err(Error::OnSpectrum(1.0))
        );
        assert!(resolvent_norm(&DampingFunction::Zero, &kg, 0.5, 50).is_ok());
        assert_eq!(
            resolvent_norm(&DampingFunction::Power { theta: 2.0 }, &squares(), 0.0, 50),
            Err(Error::OnSpectrum(0.0))
        );
    }

    #[test]
    fn norm_at_zero_matches_psi_at_zero() {
        let n = resolvent_norm(&DampingFunction::Power { theta: 0.0 }, &squares(), 0.0, 1000).unwrap();
        assert!((n - ((3.0 + 5f64.sqrt()) / 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn budget_growth_never_lowers_the_norm() {
        let f = DampingFunction::Power { theta: -0.7 };
        let sq = squares();
        for l in [0.5, 3.0, 17.2, 60.0] {
            let mut prev = 0.0;
            for b in [5, 20, 80, 200] {
                let n = resolvent_norm(&f, &sq, l, b).unwrap();
                assert!(n >= prev);
                prev = n;
            }
        }
    }

    #[test]
    fn envelope_picks_interior_peaks() {
        let mk = |lambda: f64, norm: f64| ResolventSample {
            lambda,
            norm,
            maximizing_s: 1.0,
        };
        let s = [mk(1.0, 1.0), mk(2.0, 3.0), mk(3.0, 1.0), mk(4.0, 5.0), mk(5.0, 2.0)];
        let e = envelope(&s);
        assert_eq!(e.iter().map(|p| p.lambda).collect::<Vec<_>>(), vec![2.0, 4.0]);
    }

    #[test]
    fn growth_needs_enough_peaks() {
        let r = growth_exponent(&DampingFunction::Power { theta: -1.0 }, &squares(), (10.0, 12.0), 200);
        assert!(matches!(r, Err(Error::InsufficientRange { .. })));
    }

    #[test]
    fn bt_requires_semiuniform_verdict() {
        let r = bt_consistency(
            &DampingFunction::Power { theta: 0.0 },
            &squares(),
            100,
            &BtConfig::default(),
        );
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
