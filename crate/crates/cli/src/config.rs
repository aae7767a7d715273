//! Run configuration: TOML file merged with command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use dampspec::damping::{DampingFunction, Table, TailAsymptote};
use dampspec::models::ModelFamily;
use dampspec::spectrum::{make_spectrum, SpectrumKind, SpectrumSpec};
use serde::Deserialize;

/// Keys accepted in a config file. Every key is optional and command-line
/// flags take precedence.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    pub theta: Option<f64>,
    pub omega: Option<f64>,
    pub mass: Option<f64>,
    pub spectrum: Option<SpectrumKind>,
    pub damping: Option<DampingFunction>,
    /// Two-column CSV `s,f(s)` used as tabulated damping.
    pub damping_table: Option<PathBuf>,
    pub damping_tail: Option<TailAsymptote>,
    pub modes: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub time: Option<GridConfig>,
    pub lambda: Option<GridConfig>,
    pub grid: Option<Vec<f64>>,
    pub initial: Option<Vec<InitialMode>>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
}

/// One mode of explicit initial data in energy coordinates.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialMode {
    pub s: f64,
    /// `√s·u`, as `[re, im]`.
    pub w: [f64; 2],
    /// `u̇`, as `[re, im]`.
    pub v: [f64; 2],
}

pub fn load(path: &Path) -> anyhow::Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// Parse errors carry the line and column of the offending key.
pub fn parse(text: &str) -> Result<FileConfig, toml::de::Error> {
    toml::from_str(text)
}

/// The system being analysed.
pub struct Input {
    pub label: String,
    pub spectrum: SpectrumSpec,
    pub damping: DampingFunction,
}

/// Model selection after merging flags over the file.
#[derive(Clone, Debug, Default)]
pub struct ModelArgs {
    pub model: Option<String>,
    pub theta: Option<f64>,
    pub omega: Option<f64>,
    pub mass: Option<f64>,
}

impl ModelArgs {
    pub fn merged(&self, file: &FileConfig) -> ModelArgs {
        ModelArgs {
            model: self.model.clone().or_else(|| file.model.clone()),
            theta: self.theta.or(file.theta),
            omega: self.omega.or(file.omega),
            mass: self.mass.or(file.mass),
        }
    }

    pub fn family(&self) -> anyhow::Result<ModelFamily> {
        let name = self
            .model
            .as_deref()
            .ok_or_else(|| anyhow!("a model preset is required"))?;
        Ok(ModelFamily::from_name(name, self.omega.unwrap_or(1.0))?)
    }

    /// `θ` for the oscillator families, the mass for Klein-Gordon.
    pub fn parameter(&self, family: ModelFamily) -> anyhow::Result<f64> {
        match family {
            ModelFamily::KleinGordon => Ok(self.mass.unwrap_or(1.0)),
            _ => self
                .theta
                .ok_or_else(|| anyhow!("--theta is required for model '{}'", family.name())),
        }
    }
}

/// Resolves exactly one input source: a preset or a raw spectrum with damping.
pub fn resolve_input(args: &ModelArgs, file: &FileConfig, base: &Path) -> anyhow::Result<Input> {
    let raw_damping = file.damping.is_some() || file.damping_table.is_some();
    let raw = file.spectrum.is_some() || raw_damping;
    match (&args.model, raw) {
        (Some(_), true) => bail!("give either a model preset or a raw spectrum and damping, not both"),
        (None, false) => bail!("no input: give --model or a config with [spectrum] and [damping]"),
        (Some(_), false) => {
            let family = args.family()?;
            let preset = family.preset(args.parameter(family)?)?;
            Ok(Input {
                label: preset.notes.clone(),
                spectrum: preset.spectrum,
                damping: preset.damping,
            })
        }
        (None, true) => {
            let kind = file
                .spectrum
                .clone()
                .ok_or_else(|| anyhow!("raw input needs a [spectrum] table"))?;
            let spectrum = make_spectrum(kind)?;
            let damping = match (&file.damping, &file.damping_table) {
                (Some(_), Some(_)) => bail!("give either [damping] or damping_table, not both"),
                (Some(d), None) => {
                    d.validate()?;
                    d.clone()
                }
                (None, Some(path)) => {
                    let path = base.join(path);
                    let fh = std::fs::File::open(&path).with_context(|| format!("opening {}", path.display()))?;
                    DampingFunction::Tabulated(Table::read_csv(fh, file.damping_tail)?)
                }
                (None, None) => bail!("raw input needs [damping] or damping_table"),
            };
            Ok(Input {
                label: damping.describe(),
                spectrum,
                damping,
            })
        }
    }
}

/// Increasing grid with at least one point.
pub fn check_grid(min: f64, max: f64, points: usize, what: &str) -> anyhow::Result<()> {
    if points == 0 {
        bail!("{what} grid needs at least one point");
    }
    if !(min.is_finite() && max.is_finite()) || (points > 1 && min >= max) {
        bail!("{what} grid must be increasing, got [{min}, {max}]");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_reports_its_line() {
        let err = parse("model = \"wave\"\ntheta = 1.0\nbudgte = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("budgte"), "{msg}");
    }

    #[test]
    fn raw_input() {
        let cfg = parse(
            "[spectrum]\nkind = \"discrete\"\neigenvalues = [1.0, 4.0, 9.0]\n\n\
             [damping]\nfamily = \"tabulated\"\nknots = [[1.0, 1.0], [4.0, 0.0], [9.0, 1.0]]\n",
        )
        .unwrap();
        let input = resolve_input(&ModelArgs::default(), &cfg, Path::new(".")).unwrap();
        assert_eq!(input.spectrum.eigenvalue_count(), Some(3));
        assert!(matches!(input.damping, DampingFunction::Tabulated(_)));
    }

    #[test]
    fn preset_and_raw_conflict() {
        let cfg = parse("model = \"wave\"\ntheta = 0.0\n[damping]\nfamily = \"zero\"\n").unwrap();
        let args = ModelArgs::default().merged(&cfg);
        assert!(resolve_input(&args, &cfg, Path::new(".")).is_err());
    }

    #[test]
    fn missing_input() {
        assert!(resolve_input(&ModelArgs::default(), &FileConfig::default(), Path::new(".")).is_err());
    }
}
