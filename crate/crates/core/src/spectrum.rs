//! Descriptions of the spectrum of the positive selfadjoint operator `A`.
//!
//! A spectrum is either a (possibly infinite) increasing eigenvalue sequence or
//! a finite union of closed intervals in `(0, ∞)`. Everything downstream only
//! needs the minimum `s0`, ordered neighbourhood queries and finite samples, so
//! no operator representation of `A` is kept.

use serde::{Deserialize, Serialize};

use crate::damping::DampingFunction;
use crate::error::{Error, Result};

/// Closed-form generator for the eigenvalues beyond an explicit prefix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum TailForm {
    /// `λ_n = n²`
    Square,
    /// `λ_n = n⁴`
    Fourth,
    /// `ν_n = n⁴ / (1 + ω n²)`
    RotationalQuotient { omega: f64 },
    /// `λ_n = c nᵖ`
    PowerLaw { c: f64, p: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFormula {
    #[serde(flatten)]
    pub form: TailForm,
    pub start_index: u64,
}

impl TailFormula {
    pub fn new(form: TailForm, start_index: u64) -> Result<Self> {
        if start_index == 0 {
            return Err(Error::InvalidSpectrum("tail start index must be >= 1".into()));
        }
        match form {
            TailForm::RotationalQuotient { omega } if !(omega >= 0.0 && omega.is_finite()) => {
                return Err(Error::InvalidSpectrum(format!("rotational omega {omega} must be >= 0")));
            }
            TailForm::PowerLaw { c, p } if !(c > 0.0 && p > 0.0 && c.is_finite() && p.is_finite()) => {
                return Err(Error::InvalidSpectrum(format!(
                    "power-law tail needs c > 0 and p > 0, got c = {c}, p = {p}"
                )));
            }
            _ => {}
        }
        Ok(TailFormula { form, start_index })
    }

    pub fn value(&self, n: u64) -> f64 {
        let x = n as f64;
        match self.form {
            TailForm::Square => x * x,
            TailForm::Fourth => (x * x) * (x * x),
            TailForm::RotationalQuotient { omega } => (x * x) * (x * x) / (1.0 + omega * x * x),
            TailForm::PowerLaw { c, p } => c * x.powf(p),
        }
    }

    /// Real `n` solving `value(n) = s`.
    fn inverse(&self, s: f64) -> f64 {
        match self.form {
            TailForm::Square => s.sqrt(),
            TailForm::Fourth => s.sqrt().sqrt(),
            TailForm::RotationalQuotient { omega } => {
                ((omega * s + (omega * omega * s * s + 4.0 * s).sqrt()) / 2.0).sqrt()
            }
            TailForm::PowerLaw { c, p } => (s / c).powf(1.0 / p),
        }
    }

    /// Smallest index `n >= start` with `value(n) >= s`.
    fn index_at_or_above(&self, s: f64) -> u64 {
        let est = self.inverse(s).ceil();
        let mut n = if est.is_finite() && est > self.start_index as f64 {
            est as u64
        } else {
            self.start_index
        };
        while n > self.start_index && self.value(n - 1) >= s {
            n -= 1;
        }
        while self.value(n) < s {
            n += 1;
        }
        n
    }

    /// Largest index `n >= start` with `value(n) <= s`, if any.
    fn index_at_or_below(&self, s: f64) -> Option<u64> {
        if self.value(self.start_index) > s {
            return None;
        }
        let est = self.inverse(s).floor();
        let mut n = if est.is_finite() && est > self.start_index as f64 {
            est as u64
        } else {
            self.start_index
        };
        while self.value(n + 1) <= s {
            n += 1;
        }
        while n > self.start_index && self.value(n) > s {
            n -= 1;
        }
        Some(n)
    }
}

/// Closed interval `[lo, hi]`; `hi = None` stands for `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: Option<f64>,
}

impl Interval {
    pub fn new(lo: f64, hi: Option<f64>) -> Self {
        Interval { lo, hi }
    }

    pub fn unbounded(lo: f64) -> Self {
        Interval { lo, hi: None }
    }

    pub fn upper(&self) -> f64 {
        self.hi.unwrap_or(f64::INFINITY)
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.lo && s <= self.upper()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpectrumKind {
    Discrete {
        eigenvalues: Vec<f64>,
        tail: Option<TailFormula>,
    },
    Continuous {
        intervals: Vec<Interval>,
    },
}

/// A validated description of `σ(A)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSpec {
    kind: SpectrumKind,
    s0: f64,
    bounded: bool,
}

/// Upper cap applied when sampling unbounded intervals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPolicy {
    pub cap: f64,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy { cap: 1e6 }
    }
}

/// Validates a raw description and computes `s0` and boundedness.
///
/// Eigenvalue lists are sorted and deduplicated; overlapping intervals are
/// merged.
pub fn make_spectrum(kind: SpectrumKind) -> Result<SpectrumSpec> {
    match kind {
        SpectrumKind::Discrete { mut eigenvalues, tail } => {
            for &e in &eigenvalues {
                if !(e > 0.0) || !e.is_finite() {
                    return Err(Error::NonPositivePoint(e));
                }
            }
            eigenvalues.sort_by(f64::total_cmp);
            eigenvalues.dedup();
            if let Some(t) = tail {
                let t = TailFormula::new(t.form, t.start_index)?;
                let first = t.value(t.start_index);
                if !(first > 0.0) {
                    return Err(Error::NonPositivePoint(first));
                }
                if let Some(&last) = eigenvalues.last() {
                    if first <= last {
                        return Err(Error::InvalidSpectrum(format!(
                            "tail starts at {first}, not above the last explicit eigenvalue {last}"
                        )));
                    }
                }
            }
            let s0 = match (eigenvalues.first(), tail) {
                (Some(&e), _) => e,
                (None, Some(t)) => t.value(t.start_index),
                (None, None) => return Err(Error::EmptySpectrum),
            };
            Ok(SpectrumSpec {
                bounded: tail.is_none(),
                kind: SpectrumKind::Discrete { eigenvalues, tail },
                s0,
            })
        }
        SpectrumKind::Continuous { mut intervals } => {
            if intervals.is_empty() {
                return Err(Error::EmptySpectrum);
            }
            for iv in &intervals {
                if !(iv.lo > 0.0) || !iv.lo.is_finite() {
                    return Err(Error::NonPositivePoint(iv.lo));
                }
                if let Some(hi) = iv.hi {
                    if !(hi > iv.lo) || !hi.is_finite() {
                        return Err(Error::InvalidSpectrum(format!(
                            "interval [{}, {hi}] must have hi > lo",
                            iv.lo
                        )));
                    }
                }
            }
            intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
            for iv in intervals {
                match merged.last_mut() {
                    Some(last) if iv.lo <= last.upper() => {
                        if iv.upper() > last.upper() {
                            last.hi = iv.hi;
                        }
                    }
                    _ => merged.push(iv),
                }
            }
            let s0 = merged[0].lo;
            let bounded = merged.iter().all(|iv| iv.hi.is_some());
            Ok(SpectrumSpec {
                kind: SpectrumKind::Continuous { intervals: merged },
                s0,
                bounded,
            })
        }
    }
}

impl SpectrumSpec {
    pub fn discrete(eigenvalues: Vec<f64>, tail: Option<TailFormula>) -> Result<Self> {
        make_spectrum(SpectrumKind::Discrete { eigenvalues, tail })
    }

    pub fn continuous(intervals: Vec<Interval>) -> Result<Self> {
        make_spectrum(SpectrumKind::Continuous { intervals })
    }

    /// Eigenvalues `tail(start), tail(start + 1), …` with no explicit prefix.
    pub fn from_tail(form: TailForm, start_index: u64) -> Result<Self> {
        Self::discrete(Vec::new(), Some(TailFormula::new(form, start_index)?))
    }

    pub fn kind(&self) -> &SpectrumKind {
        &self.kind
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, SpectrumKind::Discrete { .. })
    }

    /// Largest spectrum point, `None` when `A` is unbounded.
    pub fn max(&self) -> Option<f64> {
        if !self.bounded {
            return None;
        }
        match &self.kind {
            SpectrumKind::Discrete { eigenvalues, .. } => eigenvalues.last().copied(),
            SpectrumKind::Continuous { intervals } => intervals.last().and_then(|iv| iv.hi),
        }
    }

    /// Number of eigenvalues of a discrete spectrum (`None` when infinite or continuous).
    pub fn eigenvalue_count(&self) -> Option<usize> {
        match &self.kind {
            SpectrumKind::Discrete {
                eigenvalues,
                tail: None,
            } => Some(eigenvalues.len()),
            _ => None,
        }
    }

    /// The `k`-th eigenvalue (0-based) of a discrete spectrum.
    pub fn eigenvalue(&self, k: usize) -> Option<f64> {
        match &self.kind {
            SpectrumKind::Discrete { eigenvalues, tail } => {
                if k < eigenvalues.len() {
                    Some(eigenvalues[k])
                } else {
                    tail.map(|t| t.value(t.start_index + (k - eigenvalues.len()) as u64))
                }
            }
            SpectrumKind::Continuous { .. } => None,
        }
    }

    /// Smallest spectrum point `>= x`.
    pub fn first_at_or_above(&self, x: f64) -> Option<f64> {
        if x <= self.s0 {
            return Some(self.s0);
        }
        match &self.kind {
            SpectrumKind::Discrete { eigenvalues, tail } => {
                let i = eigenvalues.partition_point(|&e| e < x);
                if i < eigenvalues.len() {
                    return Some(eigenvalues[i]);
                }
                tail.map(|t| t.value(t.index_at_or_above(x)))
            }
            SpectrumKind::Continuous { intervals } => {
                intervals.iter().find(|iv| iv.upper() >= x).map(|iv| iv.lo.max(x))
            }
        }
    }

    /// Largest spectrum point `<= x`.
    pub fn last_at_or_below(&self, x: f64) -> Option<f64> {
        if x < self.s0 {
            return None;
        }
        match &self.kind {
            SpectrumKind::Discrete { eigenvalues, tail } => {
                if let Some(n) = tail.and_then(|t| t.index_at_or_below(x)) {
                    return tail.map(|t| t.value(n));
                }
                let i = eigenvalues.partition_point(|&e| e <= x);
                (i > 0).then(|| eigenvalues[i - 1])
            }
            SpectrumKind::Continuous { intervals } => {
                intervals.iter().rev().find(|iv| iv.lo <= x).map(|iv| iv.upper().min(x))
            }
        }
    }

    /// Membership test with relative tolerance `rel_tol`.
    pub fn contains(&self, s: f64, rel_tol: f64) -> bool {
        let tol = rel_tol * s.abs().max(1.0);
        match &self.kind {
            SpectrumKind::Discrete { .. } => {
                let near = |e: Option<f64>| e.is_some_and(|e| (e - s).abs() <= tol);
                near(self.first_at_or_above(s)) || near(self.last_at_or_below(s))
            }
            SpectrumKind::Continuous { intervals } => {
                intervals.iter().any(|iv| s >= iv.lo - tol && s <= iv.upper() + tol)
            }
        }
    }

    /// Finite sample of `σ(A)`.
    ///
    /// Discrete spectra yield the first `budget` eigenvalues. Continuous spectra
    /// yield logarithmic grids per interval (unbounded intervals are cut at
    /// `policy.cap`); every interval gets its left endpoint and bounded
    /// intervals get both endpoints when the budget allows.
    pub fn sample_modes(&self, budget: usize, policy: &SamplingPolicy) -> Vec<f64> {
        match &self.kind {
            SpectrumKind::Discrete { eigenvalues, tail } => {
                let total = if tail.is_some() {
                    budget
                } else {
                    budget.min(eigenvalues.len())
                };
                (0..total).filter_map(|k| self.eigenvalue(k)).collect()
            }
            SpectrumKind::Continuous { intervals } => sample_intervals(intervals, budget, policy),
        }
    }
}

fn sample_intervals(intervals: &[Interval], budget: usize, policy: &SamplingPolicy) -> Vec<f64> {
    if budget == 0 {
        return Vec::new();
    }
    let spans: Vec<(f64, f64)> = intervals
        .iter()
        .map(|iv| (iv.lo, iv.hi.unwrap_or(policy.cap.max(iv.lo))))
        .collect();
    let k = spans.len();
    if budget <= k {
        return spans.iter().take(budget).map(|&(lo, _)| lo).collect();
    }
    let mut counts = vec![1usize; k];
    let mut left = budget - k;
    for (i, &(lo, hi)) in spans.iter().enumerate() {
        if left == 0 {
            break;
        }
        if hi > lo {
            counts[i] += 1;
            left -= 1;
        }
    }
    // Largest-remainder split of what is left, weighted by log-length.
    let weights: Vec<f64> = spans.iter().map(|&(lo, hi)| (hi / lo).ln()).collect();
    let total_w: f64 = weights.iter().sum();
    if left > 0 && total_w > 0.0 {
        let shares: Vec<f64> = weights.iter().map(|w| w / total_w * left as f64).collect();
        let mut given = 0;
        for (c, sh) in counts.iter_mut().zip(&shares) {
            let whole = sh.floor() as usize;
            *c += whole;
            given += whole;
        }
        let mut order: Vec<usize> = (0..k).filter(|&i| weights[i] > 0.0).collect();
        order.sort_by(|&a, &b| {
            let ra = shares[a] - shares[a].floor();
            let rb = shares[b] - shares[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &i in order.iter().cycle().take(left - given) {
            counts[i] += 1;
        }
    }
    let mut out = Vec::with_capacity(budget);
    for (&(lo, hi), &n) in spans.iter().zip(&counts) {
        out.extend(log_grid(lo, hi, n));
    }
    out.dedup();
    out
}

/// `n` logarithmically spaced points from `lo` to `hi`, endpoints exact.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let mut g: Vec<f64> = (0..n)
                .map(|j| (a + (b - a) * j as f64 / (n - 1) as f64).exp())
                .collect();
            g[0] = lo;
            g[n - 1] = hi;
            g
        }
    }
}

/// Tri-state result: `None` means the available evidence does not decide.
pub type Tri = Option<bool>;

/// The zero set `{s ∈ σ(A) : f(s) = 0}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSetReport {
    /// Isolated zeros (eigenvalues for discrete spectra).
    pub points: Vec<f64>,
    /// Subintervals of a continuous spectrum on which `f` vanishes.
    pub intervals: Vec<Interval>,
    /// `f` vanishes on all of `σ(A)`.
    pub whole_spectrum: bool,
    pub is_empty: Tri,
    pub countable: Tri,
    pub has_positive_measure: Tri,
    /// Zeros were detected as `f(s) <= tol` with `tol > 0`.
    pub approximate: bool,
}

impl ZeroSetReport {
    fn empty() -> Self {
        ZeroSetReport {
            points: Vec::new(),
            intervals: Vec::new(),
            whole_spectrum: false,
            is_empty: Some(true),
            countable: Some(true),
            has_positive_measure: Some(false),
            approximate: false,
        }
    }

    fn whole(spec: &SpectrumSpec) -> Self {
        let (points, intervals, countable) = match spec.kind() {
            SpectrumKind::Discrete { eigenvalues, tail } => {
                let pts = if tail.is_none() {
                    eigenvalues.clone()
                } else {
                    Vec::new()
                };
                (pts, Vec::new(), true)
            }
            SpectrumKind::Continuous { intervals } => (Vec::new(), intervals.clone(), false),
        };
        ZeroSetReport {
            points,
            intervals,
            whole_spectrum: true,
            is_empty: Some(false),
            countable: Some(countable),
            has_positive_measure: Some(true),
            approximate: false,
        }
    }

    /// Whether `s` (a point of `σ(A)`) is a detected zero.
    pub fn contains(&self, spec: &SpectrumSpec, s: f64) -> bool {
        (self.whole_spectrum && spec.contains(s, 1e-12))
            || self.points.iter().any(|&p| (p - s).abs() <= 1e-12 * p.max(1.0))
            || self.intervals.iter().any(|iv| iv.contains(s))
    }
}

/// Default threshold below which a tabulated value counts as a zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

/// Locates the zero set of `f` on `σ(A)`.
pub fn zero_set(spec: &SpectrumSpec, f: &DampingFunction, tol: f64) -> ZeroSetReport {
    match f {
        DampingFunction::Zero => ZeroSetReport::whole(spec),
        DampingFunction::Constant { c } if *c <= tol => ZeroSetReport::whole(spec),
        DampingFunction::Constant { .. }
        | DampingFunction::Power { .. }
        | DampingFunction::RotationalInertia { .. } => ZeroSetReport::empty(),
        DampingFunction::Tabulated(table) => {
            let (k_lo, k_hi) = table.knot_range();
            // With tail metadata f > 0 beyond the last knot.
            let cover_hi = if table.tail().is_some() { f64::INFINITY } else { k_hi };
            let complete = spec.s0() >= k_lo && spec.max().unwrap_or(f64::INFINITY) <= cover_hi;
            let approximate = tol > 0.0;
            match spec.kind() {
                SpectrumKind::Discrete { .. } => {
                    let mut points = Vec::new();
                    let mut s = spec.first_at_or_above(k_lo);
                    while let Some(x) = s.filter(|&x| x <= k_hi) {
                        if table.eval(x).is_ok_and(|v| v <= tol) {
                            points.push(x);
                        }
                        s = spec.first_at_or_above(next_up(x));
                    }
                    let found = !points.is_empty();
                    ZeroSetReport {
                        points,
                        intervals: Vec::new(),
                        whole_spectrum: false,
                        is_empty: if found {
                            Some(false)
                        } else if complete {
                            Some(true)
                        } else {
                            None
                        },
                        countable: Some(true),
                        has_positive_measure: if found {
                            Some(true)
                        } else if complete {
                            Some(false)
                        } else {
                            None
                        },
                        approximate,
                    }
                }
                SpectrumKind::Continuous { intervals } => {
                    let mut points = Vec::new();
                    let mut zero_ivs = Vec::new();
                    for iv in intervals {
                        let lo = iv.lo.max(k_lo);
                        let hi = iv.upper().min(k_hi);
                        if lo > hi {
                            continue;
                        }
                        let mut xs = vec![lo];
                        xs.extend(table.knots().iter().map(|k| k.0).filter(|&x| x > lo && x < hi));
                        if hi > lo {
                            xs.push(hi);
                        }
                        let zs: Vec<bool> = xs.iter().map(|&x| table.eval(x).is_ok_and(|v| v <= tol)).collect();
                        let mut i = 0;
                        while i < xs.len() {
                            if !zs[i] {
                                i += 1;
                                continue;
                            }
                            let mut j = i;
                            while j + 1 < xs.len() && zs[j + 1] {
                                j += 1;
                            }
                            if j > i {
                                zero_ivs.push(Interval::new(xs[i], Some(xs[j])));
                            } else {
                                points.push(xs[i]);
                            }
                            i = j + 1;
                        }
                    }
                    let found = !points.is_empty() || !zero_ivs.is_empty();
                    let (is_empty, countable, positive) = if !zero_ivs.is_empty() {
                        (Some(false), Some(false), Some(true))
                    } else if found {
                        (Some(false), None, None)
                    } else if complete {
                        (Some(true), Some(true), Some(false))
                    } else {
                        (None, None, None)
                    };
                    ZeroSetReport {
                        points,
                        intervals: zero_ivs,
                        whole_spectrum: false,
                        is_empty,
                        countable,
                        has_positive_measure: positive,
                        approximate,
                    }
                }
            }
        }
    }
}

fn next_up(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}
