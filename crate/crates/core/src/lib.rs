//! Spectral analysis, stability classification and exact modal simulation of
//! `ü + Au + f(A)u̇ = 0` for a positive selfadjoint `A` given through its
//! spectrum and a nonnegative damping function `f`.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod damping;
pub mod error;
pub mod fit;
pub mod generator;
pub mod linalg;
pub mod modal;
pub mod models;
pub mod report;
pub mod resolvent;
pub mod spectrum;
pub mod stability;

pub use damping::{DampingExtremes, DampingFunction, Quantity, Table, TailAsymptote};
pub use error::{Error, Result};
pub use generator::{imaginary_spectrum, portrait, xi_pair, GeneratorPortrait, PointLabel, Regime};
pub use modal::{constant_energy_witness, psi_norm, trajectory, ModalState, PsiEstimate, PsiScan};
pub use models::{beam, beam_rotational, klein_gordon, wave, ModelFamily, ModelPreset};
pub use resolvent::{bt_consistency, growth_exponent, resolvent_norm, BtConfig, BtReport, ResolventScan};
pub use spectrum::{zero_set, Interval, SamplingPolicy, SpectrumSpec, TailForm, TailFormula, ZeroSetReport};
pub use stability::{classification_table, classify, StabilityReport, Verdict};
