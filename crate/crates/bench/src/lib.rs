//! Fixtures shared by the benchmarks in `benches/`.

use dampspec::models::{self, ModelPreset};

/// Semiuniform wave model `f(s) = 1/s`.
pub fn slow_wave() -> ModelPreset {
    models::wave(-1.0).expect("valid preset")
}

/// Kelvin-Voigt type model, strongly overdamped at high modes.
pub fn kelvin_voigt() -> ModelPreset {
    models::wave(1.0).expect("valid preset")
}

pub fn rotational() -> ModelPreset {
    models::beam_rotational(0.0, 1.0).expect("valid preset")
}
