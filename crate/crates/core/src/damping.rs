//! The damping function `f` and the extremal quantities built from it.
//!
//! Every stability criterion is an infimum or supremum of `f(s)`, `f(s)/s` or
//! `f(s)/√s` over `σ(A)`. Each family describes these quantities as functions
//! that are monotone between a handful of known breakpoints, with a known limit
//! at infinity, so the extremes over any spectrum reduce to evaluating a few
//! spectrum points per monotone piece.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{zero_set, SpectrumSpec, Tri, DEFAULT_ZERO_TOL};

/// Asymptotic law `f(s) ~ C sᵖ` beyond the last knot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailAsymptote {
    pub p: f64,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
struct RawTable {
    knots: Vec<(f64, f64)>,
    tail: Option<TailAsymptote>,
}

/// Piecewise-linear damping data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct Table {
    knots: Vec<(f64, f64)>,
    tail: Option<TailAsymptote>,
}

impl TryFrom<RawTable> for Table {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        Table::new(raw.knots, raw.tail)
    }
}

impl Table {
    pub fn new(knots: Vec<(f64, f64)>, tail: Option<TailAsymptote>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidParameter(
                "tabulated damping needs at least one knot".into(),
            ));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParameter(format!(
                    "knots must be strictly increasing in s ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(s, v) in &knots {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::NonPositivePoint(s));
            }
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("f({s}) = {v} must be finite and >= 0")));
            }
        }
        if let Some(t) = tail {
            if !(t.c > 0.0) || !t.c.is_finite() || !t.p.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "tail needs C > 0 and finite p, got C = {}, p = {}",
                    t.c, t.p
                )));
            }
        }
        Ok(Table { knots, tail })
    }

    /// Reads a two-column `s,f` CSV. A header row is accepted and skipped.
    pub fn read_csv<R: Read>(reader: R, tail: Option<TailAsymptote>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut knots = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Parse(format!("line {}: expected two columns", line + 1)));
            }
            let parse = |x: &str| x.parse::<f64>();
            match (parse(&rec[0]), parse(&rec[1])) {
                (Ok(s), Ok(v)) => knots.push((s, v)),
                _ if line == 0 => continue,
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: cannot parse `{}`, `{}` as numbers",
                        line + 1,
                        &rec[0],
                        &rec[1]
                    )))
                }
            }
        }
        Table::new(knots, tail)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn tail(&self) -> Option<TailAsymptote> {
        self.tail
    }

    pub fn knot_range(&self) -> (f64, f64) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    /// `E` in the tail law `f(s) = sᵖ (C + E/s)`, which matches the last knot
    /// and stays positive for `s` past it.
    fn tail_offset(&self, t: TailAsymptote) -> f64 {
        let (sk, fk) = self.knots[self.knots.len() - 1];
        (fk * sk.powf(-t.p) - t.c) * sk
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        let (lo, hi) = self.knot_range();
        if s < lo {
            return Err(Error::OutOfRange { s, lo, hi });
        }
        if s > hi {
            return match self.tail {
                Some(t) => Ok(s.powf(t.p) * (t.c + self.tail_offset(t) / s)),
                None => Err(Error::OutOfRange { s, lo, hi }),
            };
        }
        let i = self.knots.partition_point(|k| k.0 < s);
        if i < self.knots.len() && self.knots[i].0 == s {
            return Ok(self.knots[i].1);
        }
        let (s1, f1) = self.knots[i - 1];
        let (s2, f2) = self.knots[i];
        let w = (s - s1) / (s2 - s1);
        Ok(f1 + w * (f2 - f1))
    }
}

/// The nonnegative continuous damping function `f` on `σ(A)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DampingFunction {
    Zero,
    Constant {
        c: f64,
    },
    /// `f(s) = s^θ`
    Power {
        theta: f64,
    },
    /// `f(s) = s ((ωs + √(ω²s² + 4s))/2)^(θ−2)`, i.e. `λ^θ/(1 + ωλ)` at `s = λ²/(1 + ωλ)`.
    RotationalInertia {
        theta: f64,
        omega: f64,
    },
    Tabulated(Table),
}

/// The three ratios the criteria are phrased in: `f(s)/s^q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    F,
    FOverS,
    FOverSqrtS,
}

impl Quantity {
    fn exponent(self) -> f64 {
        match self {
            Quantity::F => 0.0,
            Quantity::FOverS => 1.0,
            Quantity::FOverSqrtS => 0.5,
        }
    }
}

/// Where a quantity is known and how it can be split into monotone pieces.
struct Cover {
    lo: f64,
    hi: f64,
    breaks: Vec<f64>,
    /// Limit as `s → ∞`, meaningful when `hi` is infinite.
    limit: f64,
}

impl Cover {
    fn everywhere(limit: f64) -> Self {
        Cover {
            lo: 0.0,
            hi: f64::INFINITY,
            breaks: Vec::new(),
            limit,
        }
    }
}

fn power_limit(e: f64) -> f64 {
    if e > 0.0 {
        f64::INFINITY
    } else if e == 0.0 {
        1.0
    } else {
        0.0
    }
}

/// `(ωs + √(ω²s² + 4s))/2`, the `λ` with `λ²/(1+ωλ) = s`.
pub fn rotational_root(s: f64, omega: f64) -> f64 {
    (omega * s + (omega * omega * s * s + 4.0 * s).sqrt()) / 2.0
}

fn rotational_s(lambda: f64, omega: f64) -> f64 {
    lambda * lambda / (1.0 + omega * lambda)
}

/// Extremum over `σ(A)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Extremum {
    /// Possibly `+∞` for suprema.
    pub value: f64,
    /// `false` when the value is only approached as `s → ∞`.
    pub attained: bool,
    /// `false` when part of `σ(A)` lies where `f` is unknown; the value then
    /// covers the known part only.
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DampingExtremes {
    pub inf_f: Extremum,
    pub sup_f_over_s: Extremum,
    pub sup_f_over_sqrt_s: Extremum,
    pub bounded: bool,
}

impl DampingExtremes {
    /// `inf f > 0` over `σ(A)`.
    pub fn inf_f_positive(&self) -> Tri {
        let e = self.inf_f;
        if e.exact {
            Some(e.value > 0.0)
        } else if e.value == 0.0 && e.attained {
            Some(false)
        } else {
            None
        }
    }

    /// `sup f/s < ∞`; automatic on bounded spectra.
    pub fn sup_ratio_finite(&self) -> Tri {
        finite_sup(self.sup_f_over_s, self.bounded)
    }

    /// `sup f/√s < ∞`, the condition under which the generator domain factorizes.
    pub fn domain_factorizes(&self) -> Tri {
        finite_sup(self.sup_f_over_sqrt_s, self.bounded)
    }
}

fn finite_sup(e: Extremum, bounded: bool) -> Tri {
    if bounded {
        Some(true)
    } else if e.exact {
        Some(e.value.is_finite())
    } else if !e.value.is_finite() {
        Some(false)
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateExponents {
    /// Least `α` with `inf s^α f(s) > 0`.
    pub alpha: Option<f64>,
    /// Greatest `β` with `sup s^β f(s) < ∞`.
    pub beta: Option<f64>,
    /// Closed-form value of `sup s^β f(s)` when known.
    pub beta_bound: Option<f64>,
    pub exact: bool,
}

/// The set of limits `ℓ > 0` of `f(s_n)/s_n` along `s_n → ∞`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaSet {
    pub points: Vec<f64>,
    /// `false` when tabulated data carries no tail law and nothing can be said.
    pub certified: bool,
}

impl DampingFunction {
    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64, what: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} must be finite")))
            }
        };
        match *self {
            DampingFunction::Zero | DampingFunction::Tabulated(_) => Ok(()),
            DampingFunction::Constant { c } => {
                finite(c, "c")?;
                if c < 0.0 {
                    return Err(Error::InvalidParameter(format!("constant damping {c} < 0")));
                }
                Ok(())
            }
            DampingFunction::Power { theta } => finite(theta, "theta"),
            DampingFunction::RotationalInertia { theta, omega } => {
                finite(theta, "theta")?;
                finite(omega, "omega")?;
                if !(omega > 0.0) {
                    return Err(Error::InvalidParameter(format!("omega = {omega} must be > 0")));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::NonPositivePoint(s));
        }
        Ok(match self {
            DampingFunction::Zero => 0.0,
            DampingFunction::Constant { c } => *c,
            DampingFunction::Power { theta } => s.powf(*theta),
            DampingFunction::RotationalInertia { theta, omega } => s * rotational_root(s, *omega).powf(theta - 2.0),
            DampingFunction::Tabulated(t) => return t.eval(s),
        })
    }

    fn ratio(&self, s: f64, q: Quantity) -> Option<f64> {
        let v = self.eval(s).ok()?;
        Some(match q {
            Quantity::F => v,
            Quantity::FOverS => v / s,
            Quantity::FOverSqrtS => v / s.sqrt(),
        })
    }

    fn cover(&self, q: Quantity) -> Cover {
        let e = q.exponent();
        match self {
            DampingFunction::Zero => Cover::everywhere(0.0),
            DampingFunction::Constant { c } => Cover::everywhere(if e == 0.0 { *c } else { 0.0 }),
            DampingFunction::Power { theta } => Cover::everywhere(power_limit(theta - e)),
            DampingFunction::RotationalInertia { theta, omega } => {
                let (theta, omega) = (*theta, *omega);
                let (peak, limit) = match q {
                    Quantity::F => {
                        let peak = (theta > 0.0 && theta < 1.0).then(|| theta / ((1.0 - theta) * omega));
                        let limit = if theta < 1.0 {
                            0.0
                        } else if theta == 1.0 {
                            1.0 / omega
                        } else {
                            f64::INFINITY
                        };
                        (peak, limit)
                    }
                    Quantity::FOverS => (None, power_limit(theta - 2.0)),
                    Quantity::FOverSqrtS => {
                        let peak = (theta > 1.0 && theta < 1.5).then(|| (theta - 1.0) / ((1.5 - theta) * omega));
                        let limit = if theta < 1.5 {
                            0.0
                        } else if theta == 1.5 {
                            omega.powf(-0.5)
                        } else {
                            f64::INFINITY
                        };
                        (peak, limit)
                    }
                };
                Cover {
                    lo: 0.0,
                    hi: f64::INFINITY,
                    breaks: peak.map(|l| rotational_s(l, omega)).into_iter().collect(),
                    limit,
                }
            }
            DampingFunction::Tabulated(t) => {
                let (lo, k_hi) = t.knot_range();
                let mut breaks: Vec<f64> = t.knots().iter().map(|k| k.0).collect();
                if q == Quantity::FOverSqrtS {
                    // a/√s + b√s has an interior minimum at s = a/b when a, b > 0.
                    for w in t.knots().windows(2) {
                        let b = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                        let a = w[0].1 - b * w[0].0;
                        if a > 0.0 && b > 0.0 {
                            breaks.push(a / b);
                        }
                    }
                }
                let (hi, limit) = match t.tail() {
                    Some(tail) => {
                        let r = tail.p - e;
                        let big_e = t.tail_offset(tail);
                        if r != 0.0 {
                            let crit = (1.0 - r) * big_e / (r * tail.c);
                            if crit > k_hi && crit.is_finite() {
                                breaks.push(crit);
                            }
                        }
                        let limit = if r > 0.0 {
                            f64::INFINITY
                        } else if r == 0.0 {
                            tail.c
                        } else {
                            0.0
                        };
                        (f64::INFINITY, limit)
                    }
                    None => (k_hi, f64::NAN),
                };
                breaks.sort_by(f64::total_cmp);
                Cover { lo, hi, breaks, limit }
            }
        }
    }

    /// Limit of `f/s^q` as `s → ∞`, when `f` is known out there.
    pub fn limit_at_infinity(&self, q: Quantity) -> Option<f64> {
        let cov = self.cover(q);
        (cov.hi.is_infinite() && !cov.limit.is_nan()).then_some(cov.limit)
    }

    /// Infimum (`want_sup = false`) or supremum of `f/s^q` over `σ(A)`.
    pub fn extreme(&self, spec: &SpectrumSpec, q: Quantity, want_sup: bool) -> Option<Extremum> {
        let cov = self.cover(q);
        let mut bounds = vec![cov.lo];
        bounds.extend(cov.breaks.iter().copied().filter(|&b| b > cov.lo && b < cov.hi));
        bounds.push(cov.hi);
        let mut cands: Vec<(f64, bool)> = Vec::new();
        for w in bounds.windows(2) {
            let (a, b) = (w[0], w[1]);
            if let Some(p) = spec.first_at_or_above(a).filter(|&p| p <= b) {
                cands.extend(self.ratio(p, q).map(|v| (v, true)));
            }
            if b.is_finite() {
                if let Some(r) = spec.last_at_or_below(b).filter(|&r| r >= a) {
                    cands.extend(self.ratio(r, q).map(|v| (v, true)));
                }
            } else if let Some(m) = spec.max() {
                if m >= a {
                    cands.extend(self.ratio(m, q).map(|v| (v, true)));
                }
            } else {
                cands.push((cov.limit, false));
            }
        }
        let exact = spec.s0() >= cov.lo && (cov.hi.is_infinite() || spec.max().is_some_and(|m| m <= cov.hi));
        let pick = |x: &(f64, bool), y: &(f64, bool)| {
            let ord = x.0.total_cmp(&y.0);
            // prefer attained values on ties
            ord.then(x.1.cmp(&y.1))
        };
        let best = if want_sup {
            cands.into_iter().max_by(pick)
        } else {
            cands.into_iter().min_by(|x, y| x.0.total_cmp(&y.0).then(y.1.cmp(&x.1)))
        }?;
        Some(Extremum {
            value: best.0,
            attained: best.1,
            exact,
        })
    }

    /// `inf f`, `sup f/s` and `sup f/√s` over `σ(A)`.
    ///
    /// Values are exact whenever `f` is known on all of `σ(A)`, which holds for
    /// every parametric family and for tables with a tail law covering `s0`.
    pub fn extremes(&self, spec: &SpectrumSpec) -> DampingExtremes {
        let none_inf = Extremum {
            value: f64::INFINITY,
            attained: false,
            exact: false,
        };
        let none_sup = Extremum {
            value: 0.0,
            attained: false,
            exact: false,
        };
        DampingExtremes {
            inf_f: self.extreme(spec, Quantity::F, false).unwrap_or(none_inf),
            sup_f_over_s: self.extreme(spec, Quantity::FOverS, true).unwrap_or(none_sup),
            sup_f_over_sqrt_s: self.extreme(spec, Quantity::FOverSqrtS, true).unwrap_or(none_sup),
            bounded: spec.is_bounded(),
        }
    }

    /// Polynomial decay exponents of `f` along an unbounded spectrum.
    pub fn rate_exponents(&self, spec: &SpectrumSpec) -> RateExponents {
        let none = |exact| RateExponents {
            alpha: None,
            beta: None,
            beta_bound: None,
            exact,
        };
        if spec.is_bounded() {
            return none(true);
        }
        match *self {
            DampingFunction::Power { theta } if theta < 0.0 => RateExponents {
                alpha: Some(-theta),
                beta: Some(-theta),
                beta_bound: Some(1.0),
                exact: true,
            },
            DampingFunction::RotationalInertia { theta, omega } if theta < 1.0 => RateExponents {
                alpha: Some(1.0 - theta),
                beta: Some(1.0 - theta),
                // s^(1−θ) f(s) = (s/λ)^(2−θ) and s/λ < 1/ω.
                beta_bound: Some(omega.powf(theta - 2.0)),
                exact: true,
            },
            DampingFunction::Tabulated(ref t) => match t.tail() {
                Some(tail) if tail.p < 0.0 => {
                    let positive =
                        zero_set(spec, self, DEFAULT_ZERO_TOL).is_empty == Some(true) && spec.s0() >= t.knot_range().0;
                    RateExponents {
                        alpha: positive.then_some(-tail.p),
                        beta: Some(-tail.p),
                        beta_bound: None,
                        exact: true,
                    }
                }
                Some(_) => none(true),
                None => none(false),
            },
            _ => none(true),
        }
    }

    /// Limits of `f(s)/s` along sequences in `σ(A)` tending to infinity.
    pub fn lambda_limit_set(&self, spec: &SpectrumSpec) -> LambdaSet {
        let set = |points: Vec<f64>| LambdaSet {
            points,
            certified: true,
        };
        if spec.is_bounded() {
            return set(Vec::new());
        }
        match *self {
            DampingFunction::Power { theta: 1.0 } => set(vec![1.0]),
            DampingFunction::RotationalInertia { theta: 2.0, .. } => set(vec![1.0]),
            DampingFunction::Tabulated(ref t) => match t.tail() {
                Some(tail) if tail.p == 1.0 => set(vec![tail.c]),
                Some(_) => set(Vec::new()),
                None => LambdaSet {
                    points: Vec::new(),
                    certified: false,
                },
            },
            _ => set(Vec::new()),
        }
    }

    /// Short human-readable description, used in reports.
    pub fn describe(&self) -> String {
        match self {
            DampingFunction::Zero => "f = 0".into(),
            DampingFunction::Constant { c } => format!("f = {c}"),
            DampingFunction::Power { theta } => format!("f(s) = s^{theta}"),
            DampingFunction::RotationalInertia { theta, omega } => {
                format!("rotational inertia, theta = {theta}, omega = {omega}")
            }
            DampingFunction::Tabulated(t) => format!("tabulated, {} knots", t.knots().len()),
        }
    }
}
