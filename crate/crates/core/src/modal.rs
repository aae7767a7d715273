//! Exact modal simulation of the contraction semigroup `S(t) = e^{t𝔄}`.
//!
//! Each spectral mode `s` carries coordinates `(w, v) = (√s·u, v)` in which the
//! phase-space energy norm is Euclidean and the generator restricts to
//! `[[0, √s], [−√s, −f(s)]]`. Propagators are closed-form 2×2 exponentials, so
//! trajectories carry no time-discretisation error.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::damping::DampingFunction;
use crate::error::{Error, Result};
use crate::generator::{is_bijective, regime, xi_pair, Regime, XiPair};
use crate::linalg::{self, Mat2};
use crate::spectrum::{zero_set, SamplingPolicy, SpectrumKind, SpectrumSpec, DEFAULT_ZERO_TOL};

/// Restriction of the generator to the mode `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeMatrix {
    pub s: f64,
    pub fs: f64,
}

impl ModeMatrix {
    pub fn new(s: f64, fs: f64) -> Self {
        ModeMatrix { s, fs }
    }

    pub fn entries(&self) -> Mat2 {
        let r = self.s.sqrt();
        [[0.0, r], [-r, -self.fs]]
    }

    pub fn trace(&self) -> f64 {
        -self.fs
    }

    pub fn determinant(&self) -> f64 {
        self.s
    }

    pub fn eigenvalues(&self) -> XiPair {
        xi_pair(self.s, self.fs)
    }

    /// `(1/s) [[−f, −√s], [√s, 0]]`
    pub fn inverse(&self) -> Mat2 {
        let r = self.s.sqrt();
        let k = 1.0 / self.s;
        [[-self.fs * k, -r * k], [r * k, 0.0]]
    }

    /// `exp(t·Ã_s)`, real because `Ã_s` is.
    pub fn propagator(&self, t: f64) -> Mat2 {
        mode_propagator(self.s, self.fs, t)
    }
}

pub fn mode_matrix(s: f64, fs: f64) -> ModeMatrix {
    ModeMatrix::new(s, fs)
}

/// `exp(t·[[0, √s], [−√s, −fs]])` in closed form.
///
/// With `c = −fs/2` the exponential is `e^{ct}(a(t)·I + b(t)·(Ã − cI))` where
/// `a, b` are `cos, sin/ω` (underdamped), `1, t` (critical) or `cosh, sinh/d`
/// (overdamped). The overdamped branch is written around the slow root so that
/// large damping never overflows.
pub fn mode_propagator(s: f64, fs: f64, t: f64) -> Mat2 {
    if t == 0.0 {
        return linalg::IDENTITY;
    }
    let r = s.sqrt();
    let c = -fs / 2.0;
    // Ã − cI
    let shifted: Mat2 = [[-c, r], [-r, -fs - c]];
    let (scale, a, b) = match regime(s, fs) {
        Regime::Critical => ((c * t).exp(), 1.0, t),
        Regime::Underdamped => {
            let omega = ((2.0 * r - fs) * (2.0 * r + fs)).sqrt() / 2.0;
            let (sn, cs) = (omega * t).sin_cos();
            ((c * t).exp(), cs, sn / omega)
        }
        Regime::Overdamped => {
            let d = ((fs - 2.0 * r) * (fs + 2.0 * r)).sqrt() / 2.0;
            let slow = xi_pair(s, fs).xi_plus.re;
            let decay = (-2.0 * d * t).exp();
            (
                (slow * t).exp(),
                (1.0 + decay) / 2.0,
                -(-2.0 * d * t).exp_m1() / (2.0 * d),
            )
        }
    };
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { a } else { 0.0 };
            m[i][j] = scale * (id + b * shifted[i][j]);
        }
    }
    m
}

/// One mode of a phase-space vector in energy coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Mode {
    pub s: f64,
    pub fs: f64,
    pub w: Complex64,
    pub v: Complex64,
}

/// Truncated modal representation of `z = (u, v)`. Modes are kept in ascending
/// `s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModalState {
    pub modes: Vec<Mode>,
    pub time: f64,
}

impl ModalState {
    /// Builds a state from `(s, w, v)` triples, evaluating `f` once per mode.
    pub fn new(f: &DampingFunction, coords: &[(f64, Complex64, Complex64)]) -> Result<Self> {
        let mut modes = coords
            .iter()
            .map(|&(s, w, v)| {
                Ok(Mode {
                    s,
                    fs: f.eval(s)?,
                    w,
                    v,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        modes.sort_by(|a, b| a.s.total_cmp(&b.s));
        Ok(ModalState { modes, time: 0.0 })
    }

    /// Seeded random state on the first `budget` sampled modes, scaled to unit
    /// energy. Coefficients are independent standard complex normals drawn in
    /// ascending mode order from ChaCha8 seeded with `seed`.
    pub fn random(
        f: &DampingFunction,
        spec: &SpectrumSpec,
        budget: usize,
        policy: &SamplingPolicy,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
        let coords: Vec<_> = spec
            .sample_modes(budget, policy)
            .into_iter()
            .map(|s| {
                let w = Complex64::new(draw(), draw());
                let v = Complex64::new(draw(), draw());
                (s, w, v)
            })
            .collect();
        let mut state = ModalState::new(f, &coords)?;
        let e = state.energy();
        if e > 0.0 {
            let k = (0.5 / e).sqrt();
            for m in &mut state.modes {
                m.w *= k;
                m.v *= k;
            }
        }
        Ok(state)
    }

    /// `S(dt)` applied mode by mode.
    pub fn evolve(&self, dt: f64) -> ModalState {
        let modes = self
            .modes
            .iter()
            .map(|m| {
                let p = mode_propagator(m.s, m.fs, dt);
                let [w, v] = linalg::apply(&p, [m.w, m.v]);
                Mode { w, v, ..*m }
            })
            .collect();
        ModalState {
            modes,
            time: self.time + dt,
        }
    }

    /// `½ Σ (|w|² + |v|²)`, summed in ascending `s` with compensation.
    pub fn energy(&self) -> f64 {
        0.5 * linalg::compensated_sum(self.modes.iter().map(|m| m.w.norm_sqr() + m.v.norm_sqr()))
    }

    /// Phase-space norm `‖z‖ = √(2ℰ)`.
    pub fn norm(&self) -> f64 {
        (2.0 * self.energy()).sqrt()
    }

    /// `dℰ/dt = −Σ f(s)|v|²`.
    pub fn dissipation_rate(&self) -> f64 {
        -linalg::compensated_sum(self.modes.iter().map(|m| m.fs * m.v.norm_sqr()))
    }
}

/// Finite-truncation estimate of `ψ(t) = ‖S(t)𝔄⁻¹‖`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PsiEstimate {
    pub t: f64,
    pub value: f64,
    /// Index (0-based, ascending `s`) of the maximizing mode.
    pub argmax_index: usize,
    pub argmax_s: f64,
    /// The maximizer sits on the last sampled mode, so the truncation is what
    /// sets the value.
    pub truncated: bool,
}

/// Per-mode data shared by repeated ψ evaluations.
#[derive(Clone, Debug)]
pub struct PsiScan {
    modes: Vec<ModeMatrix>,
    inverses: Vec<Mat2>,
}

impl PsiScan {
    pub fn new(f: &DampingFunction, spec: &SpectrumSpec, budget: usize, policy: &SamplingPolicy) -> Result<Self> {
        if is_bijective(f, spec) == Some(false) {
            return Err(Error::NotBijective);
        }
        let modes = spec
            .sample_modes(budget, policy)
            .into_iter()
            .map(|s| Ok(ModeMatrix::new(s, f.eval(s)?)))
            .collect::<Result<Vec<_>>>()?;
        let inverses = modes.iter().map(ModeMatrix::inverse).collect();
        Ok(PsiScan { modes, inverses })
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn at(&self, t: f64) -> PsiEstimate {
        let mut best = (0usize, f64::NEG_INFINITY);
        for (k, (m, inv)) in self.modes.iter().zip(&self.inverses).enumerate() {
            let v = linalg::norm2(&linalg::mul(&m.propagator(t), inv));
            if v > best.1 {
                best = (k, v);
            }
        }
        PsiEstimate {
            t,
            value: best.1.max(0.0),
            argmax_index: best.0,
            argmax_s: self.modes.get(best.0).map_or(f64::NAN, |m| m.s),
            truncated: self.modes.len() > 1 && best.0 + 1 == self.modes.len(),
        }
    }

    pub fn profile(&self, times: &[f64]) -> Vec<PsiEstimate> {
        times.par_iter().map(|&t| self.at(t)).collect()
    }
}

pub fn psi_norm(f: &DampingFunction, spec: &SpectrumSpec, t: f64, budget: usize) -> Result<PsiEstimate> {
    Ok(PsiScan::new(f, spec, budget, &SamplingPolicy::default())?.at(t))
}

/// A solution of constant positive energy, built on an eigenvalue where `f`
/// vanishes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyWitness {
    pub state: ModalState,
    pub initial_energy: f64,
    /// `max |ℰ(t) − ℰ(0)| / ℰ(0)` over the verification grid.
    pub max_relative_drift: f64,
    pub horizon: f64,
    pub verified: bool,
}

/// Tolerance on the relative energy drift of a witness trajectory.
pub const WITNESS_TOL: f64 = 1e-12;

/// Looks for an eigenvalue `s*` of `A` in the zero set and returns the
/// single-mode datum `z₀ = (0, A^{-1/2}e)`, i.e. `(w, v) = (0, s*^{-1/2})`,
/// verified on `steps + 1` equally spaced times in `[0, horizon]`.
pub fn constant_energy_witness(
    f: &DampingFunction,
    spec: &SpectrumSpec,
    horizon: f64,
    steps: usize,
) -> Result<Option<EnergyWitness>> {
    let z = zero_set(spec, f, DEFAULT_ZERO_TOL);
    let star = match spec.kind() {
        SpectrumKind::Discrete { .. } if z.whole_spectrum => Some(spec.s0()),
        SpectrumKind::Discrete { .. } => z.points.first().copied(),
        SpectrumKind::Continuous { .. } => None,
    };
    let Some(s) = star else { return Ok(None) };
    let state = ModalState::new(f, &[(s, Complex64::new(0.0, 0.0), Complex64::new(s.powf(-0.5), 0.0))])?;
    let e0 = state.energy();
    let steps = steps.max(1);
    let drift = (0..=steps)
        .map(|k| {
            let t = horizon * k as f64 / steps as f64;
            ((state.evolve(t).energy() - e0) / e0).abs()
        })
        .fold(0.0, f64::max);
    Ok(Some(EnergyWitness {
        state,
        initial_energy: e0,
        max_relative_drift: drift,
        horizon,
        verified: drift <= WITNESS_TOL,
    }))
}

/// One row of an exported trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub energy: f64,
    pub dissipation_rate: f64,
    pub psi: Option<PsiEstimate>,
}

/// Energy, dissipation and ψ along `times`, each evolved exactly from `state`.
pub fn trajectory(state: &ModalState, times: &[f64], psi: Option<&PsiScan>) -> Vec<TrajectoryRow> {
    times
        .par_iter()
        .map(|&t| {
            let z = state.evolve(t - state.time);
            TrajectoryRow {
                t,
                energy: z.energy(),
                dissipation_rate: z.dissipation_rate(),
                psi: psi.map(|p| p.at(t)),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::TailForm;
    use std::f64::consts::PI;

    fn squares() -> SpectrumSpec {
        SpectrumSpec::from_tail(TailForm::Square, 1).unwrap()
    }

    fn max_diff(a: &Mat2, b: &Mat2) -> f64 {
        (0..4)
            .map(|k| (a[k / 2][k % 2] - b[k / 2][k % 2]).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn mode_matrix_examples() {
        assert_eq!(mode_matrix(1.0, 0.0).entries(), [[0.0, 1.0], [-1.0, 0.0]]);
        assert_eq!(mode_matrix(4.0, 1.0).entries(), [[0.0, 2.0], [-2.0, -1.0]]);
        let m = mode_matrix(1.0, 1.0);
        assert_eq!(m.trace(), -1.0);
        assert_eq!(m.determinant(), 1.0);
        let ev = m.eigenvalues();
        assert!((ev.xi_plus - Complex64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
        let prod = linalg::mul(&m.entries(), &m.inverse());
        assert!(max_diff(&prod, &linalg::IDENTITY) < 1e-15);
    }

    #[test]
    fn propagator_examples() {
        assert_eq!(mode_propagator(3.0, 2.0, 0.0), linalg::IDENTITY);
        let rot = mode_propagator(1.0, 0.0, PI / 2.0);
        assert!(max_diff(&rot, &[[0.0, 1.0], [-1.0, 0.0]]) < 1e-15);
        let crit = mode_propagator(4.0, 4.0, 1.0);
        let e = (-2.0f64).exp();
        // e^{-2}(I + (Ã + 2I)) with Ã + 2I = [[2, 2], [-2, -2]]
        let want = [[3.0 * e, 2.0 * e], [-2.0 * e, -e]];
        assert!(max_diff(&crit, &want) < 1e-15);
    }

    #[test]
    fn propagator_branches_agree_near_critical() {
        // Approach the critical damping from both sides; the closed forms must
        // join continuously.
        let s = 4.0;
        let base = mode_propagator(s, 4.0, 0.7);
        for eps in [1e-6, 1e-8] {
            let under = mode_propagator(s, 4.0 - eps, 0.7);
            let over = mode_propagator(s, 4.0 + eps, 0.7);
            assert!(max_diff(&under, &base) < 1e-5);
            assert!(max_diff(&over, &base) < 1e-5);
        }
    }

    #[test]
    fn heavy_damping_does_not_overflow() {
        let p = mode_propagator(1e4, 1e8, 50.0);
        assert!(p.iter().flatten().all(|x| x.is_finite()));
        assert!(linalg::norm2(&p) <= 1.0 + 1e-12);
    }

    #[test]
    fn evolve_examples() {
        let f = DampingFunction::Zero;
        let z = ModalState::new(&f, &[(1.0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))]).unwrap();
        let back = z.evolve(2.0 * PI);
        assert!((back.modes[0].w - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(back.modes[0].v.norm() < 1e-12);
        assert_eq!(z.evolve(0.0).modes, z.modes);
    }

    #[test]
    fn energy_examples() {
        let z = ModalState::new(
            &DampingFunction::Zero,
            &[(1.0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))],
        )
        .unwrap();
        assert_eq!((z.energy(), z.dissipation_rate()), (0.5, 0.0));
        let z = ModalState::new(
            &DampingFunction::Constant { c: 1.0 },
            &[(1.0, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))],
        )
        .unwrap();
        assert_eq!((z.energy(), z.dissipation_rate()), (0.5, -1.0));
    }

    #[test]
    fn central_difference_matches_dissipation() {
        let f = DampingFunction::Power { theta: 0.5 };
        let z = ModalState::random(&f, &squares(), 30, &SamplingPolicy::default(), 7).unwrap();
        let h = 1e-5;
        for t in [0.3, 1.0, 4.0] {
            let fd = (z.evolve(t + h).energy() - z.evolve(t - h).energy()) / (2.0 * h);
            let rate = z.evolve(t).dissipation_rate();
            assert!(((fd - rate) / rate).abs() < 1e-6, "t = {t}: {fd} vs {rate}");
        }
    }

    #[test]
    fn psi_at_zero_is_max_inverse_norm() {
        let f = DampingFunction::Power { theta: 0.0 };
        let p = psi_norm(&f, &squares(), 0.0, 1000).unwrap();
        let golden = ((3.0 + 5f64.sqrt()) / 2.0).sqrt();
        assert!((p.value - golden).abs() < 1e-14);
        assert_eq!(p.argmax_s, 1.0);
        assert!(!p.truncated);
    }

    #[test]
    fn psi_is_constant_without_damping() {
        let sq = squares();
        let a = psi_norm(&DampingFunction::Zero, &sq, 0.0, 50).unwrap();
        let b = psi_norm(&DampingFunction::Zero, &sq, 37.0, 50).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
        assert!((a.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn psi_requires_bijective_generator() {
        let r = psi_norm(&DampingFunction::Power { theta: 2.0 }, &squares(), 1.0, 10);
        assert_eq!(r.unwrap_err(), Error::NotBijective);
    }

    #[test]
    fn witness_examples() {
        use crate::damping::Table;
        let small = SpectrumSpec::discrete(vec![1.0, 4.0, 9.0], None).unwrap();
        let tab = DampingFunction::Tabulated(Table::new(vec![(1.0, 1.0), (4.0, 0.0), (9.0, 2.0)], None).unwrap());
        let w = constant_energy_witness(&tab, &small, 100.0, 1000).unwrap().unwrap();
        assert_eq!(w.state.modes[0].s, 4.0);
        assert_eq!(w.initial_energy, 0.125);
        assert!(w.verified, "drift {}", w.max_relative_drift);

        assert!(
            constant_energy_witness(&DampingFunction::Power { theta: -1.0 }, &squares(), 10.0, 10)
                .unwrap()
                .is_none()
        );

        let one = SpectrumSpec::discrete(vec![1.0], None).unwrap();
        let w = constant_energy_witness(&DampingFunction::Zero, &one, 100.0, 100)
            .unwrap()
            .unwrap();
        assert!(w.verified);
    }
}
