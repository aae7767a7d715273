mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::bail;
use clap::{Args, Parser, Subcommand};
use dampspec::fit::loglog_fit;
use dampspec::generator::portrait;
use dampspec::modal::{trajectory, ModalState, PsiScan};
use dampspec::report::{self, emit_svg, Plot, SvgStyle};
use dampspec::resolvent::{bt_consistency, growth_exponent_with, lambda_grid, BtConfig, ResolventScan};
use dampspec::spectrum::{log_grid, SamplingPolicy};
use dampspec::stability::{classification_table, classify};
use num_complex::Complex64;
use serde::Serialize;

use config::{check_grid, FileConfig, Input, ModelArgs};
use output::Sink;

const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser)]
#[command(
    name = "dampspec",
    version,
    about = "Spectra, stability and decay of ü + Au + f(A)u̇ = 0"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// Preset: wave, beam, beam-rot or klein-gordon.
    #[arg(long)]
    model: Option<String>,
    /// Damping exponent of the preset.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Rotational inertia for beam-rot (default 1).
    #[arg(long)]
    omega: Option<f64>,
    /// Klein-Gordon mass (default 1).
    #[arg(long)]
    mass: Option<f64>,
    /// Number of sampled modes.
    #[arg(long)]
    modes: Option<usize>,
    /// Seed for random initial data.
    #[arg(long)]
    seed: Option<u64>,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; without it the main artifact goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Copy, Debug)]
struct Grid {
    /// Grid start (time or lambda).
    #[arg(long, allow_hyphen_values = true)]
    min: Option<f64>,
    /// Grid end.
    #[arg(long)]
    max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Portrait of σ(𝔄): CSV and SVG.
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Stability classification as JSON.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Energy trajectory from seeded random or configured initial data.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        time: Grid,
        /// Also record ψ(t) and its maximizing mode.
        #[arg(long)]
        psi: bool,
    },
    /// ψ(t) = ‖S(t)𝔄⁻¹‖ on a log grid with a log-log slope.
    Psi {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        time: Grid,
    },
    /// Resolvent norms on iℝ with an envelope exponent fit.
    Resolvent {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        lambda: Grid,
    },
    /// Compares resolvent growth with the decay of ψ.
    BtCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Classification over a parameter grid.
    Table {
        #[command(flatten)]
        common: Common,
        /// Comma-separated parameter values (default -2 to 3 in steps of 0.25).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
    },
}

struct Run {
    file: FileConfig,
    base: PathBuf,
    model: ModelArgs,
    budget: usize,
    seed: u64,
    sink: Sink,
}

impl Run {
    fn new(c: &Common) -> anyhow::Result<Self> {
        let (file, base) = match &c.config {
            Some(p) => (config::load(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
            None => (FileConfig::default(), PathBuf::new()),
        };
        let model = ModelArgs {
            model: c.model.clone(),
            theta: c.theta,
            omega: c.omega,
            mass: c.mass,
        }
        .merged(&file);
        let budget = c.modes.or(file.modes).unwrap_or(200);
        if budget == 0 {
            bail!("--modes must be at least 1");
        }
        let seed = c.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
        let out = c.out.clone().or_else(|| file.out.as_ref().map(|o| base.join(o)));
        Ok(Run {
            file,
            base,
            model,
            budget,
            seed,
            sink: Sink::new(out),
        })
    }

    fn input(&self) -> anyhow::Result<Input> {
        config::resolve_input(&self.model, &self.file, &self.base)
    }

    fn grid(
        &self,
        flags: &Grid,
        file: Option<config::GridConfig>,
        default: (f64, f64, usize),
        what: &str,
    ) -> anyhow::Result<(f64, f64, usize)> {
        let file = file.unwrap_or_default();
        let min = flags.min.or(file.min).unwrap_or(default.0);
        let max = flags.max.or(file.max).unwrap_or(default.1);
        let points = flags.points.or(file.points).unwrap_or(default.2);
        check_grid(min, max, points, what)?;
        Ok((min, max, points))
    }
}

fn style(title: &str) -> SvgStyle {
    SvgStyle {
        title: title.to_string(),
        ..SvgStyle::default()
    }
}

fn spectrum(run: &Run) -> anyhow::Result<()> {
    let input = run.input()?;
    let p = portrait(&input.damping, &input.spectrum, run.budget, &SamplingPolicy::default())?;
    let mut csv = Vec::new();
    report::write_portrait_csv(&mut csv, &p)?;
    run.sink.primary("portrait.csv", &csv)?;
    let svg = emit_svg(Plot::Portrait(&p), &style(&input.label));
    run.sink.extra("portrait.svg", svg.as_bytes())
}

fn classify_cmd(run: &Run) -> anyhow::Result<()> {
    let input = run.input()?;
    let r = classify(&input.damping, &input.spectrum);
    run.sink.primary("classify.json", report::to_json(&r)?.as_bytes())
}

fn simulate(run: &Run, time: &Grid, with_psi: bool) -> anyhow::Result<()> {
    let input = run.input()?;
    let (lo, hi, n) = run.grid(time, run.file.time, (0.0, 10.0, 101), "time")?;
    let times: Vec<f64> = if n == 1 {
        vec![lo]
    } else {
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    };
    let policy = SamplingPolicy::default();
    let state = match &run.file.initial {
        Some(modes) => {
            let coords: Vec<_> = modes
                .iter()
                .map(|m| (m.s, Complex64::new(m.w[0], m.w[1]), Complex64::new(m.v[0], m.v[1])))
                .collect();
            for &(s, ..) in &coords {
                if !input.spectrum.contains(s, 1e-12) {
                    bail!("initial mode s = {s} is not in the spectrum");
                }
            }
            ModalState::new(&input.damping, &coords)?
        }
        None => ModalState::random(&input.damping, &input.spectrum, run.budget, &policy, run.seed)?,
    };
    let scan = if with_psi {
        Some(PsiScan::new(&input.damping, &input.spectrum, run.budget, &policy)?)
    } else {
        None
    };
    let rows = trajectory(&state, &times, scan.as_ref());
    let mut csv = Vec::new();
    report::write_trajectory_csv(&mut csv, &rows)?;
    run.sink.primary("trajectory.csv", &csv)
}

#[derive(Serialize)]
struct SlopeReport {
    fit: Option<dampspec::fit::LineFit>,
    points_used: usize,
    points_dropped: usize,
}

fn psi(run: &Run, time: &Grid) -> anyhow::Result<()> {
    let input = run.input()?;
    let (lo, hi, n) = run.grid(time, run.file.time, (10.0, 1000.0, 60), "time")?;
    if lo <= 0.0 {
        bail!("psi uses a log grid; time min must be positive");
    }
    let scan = PsiScan::new(&input.damping, &input.spectrum, run.budget, &SamplingPolicy::default())?;
    let rows = scan.profile(&log_grid(lo, hi, n));
    let kept: Vec<_> = rows.iter().filter(|r| !r.truncated).collect();
    let fit = loglog_fit(
        &kept.iter().map(|r| r.t).collect::<Vec<_>>(),
        &kept.iter().map(|r| r.value).collect::<Vec<_>>(),
    );
    let mut csv = Vec::new();
    report::write_psi_csv(&mut csv, &rows)?;
    run.sink.primary("psi.csv", &csv)?;
    let slope = SlopeReport {
        fit,
        points_used: kept.len(),
        points_dropped: rows.len() - kept.len(),
    };
    match fit {
        Some(f) => eprintln!("psi log-log slope {:.6} over {} points", f.slope, kept.len()),
        None => eprintln!("psi slope not fitted: fewer than two certified points"),
    }
    run.sink.extra("psi_fit.json", report::to_json(&slope)?.as_bytes())?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.value)).collect();
    let svg = emit_svg(
        Plot::LogLogCurve {
            points: &pts,
            x_label: "t",
            y_label: "psi",
        },
        &style(&input.label),
    );
    run.sink.extra("psi.svg", svg.as_bytes())
}

fn resolvent(run: &Run, lambda: &Grid) -> anyhow::Result<()> {
    let input = run.input()?;
    let (lo, hi, n) = run.grid(lambda, run.file.lambda, (10.0, 1000.0, 200), "lambda")?;
    if lo <= 0.0 {
        bail!("resolvent uses a log grid; lambda min must be positive");
    }
    let scan = ResolventScan::new(&input.damping, &input.spectrum, run.budget, &SamplingPolicy::default())?;
    let samples = scan.profile(&lambda_grid(&scan, lo, hi, n))?;
    let mut csv = Vec::new();
    report::write_resolvent_csv(&mut csv, &samples)?;
    run.sink.primary("resolvent.csv", &csv)?;
    let fit = match growth_exponent_with(&scan, (lo, hi), n) {
        Ok(g) => {
            eprintln!(
                "resolvent growth exponent {:.6} from {} peaks",
                g.exponent,
                g.envelope.len()
            );
            serde_json::json!({ "exponent": g.exponent, "fit": g.fit, "warnings": g.warnings })
        }
        Err(e) => {
            eprintln!("resolvent exponent not fitted: {e}");
            serde_json::json!({ "exponent": null, "error": e.name(), "message": e.to_string() })
        }
    };
    run.sink
        .extra("resolvent_fit.json", report::to_json(&fit)?.as_bytes())?;
    let pts: Vec<(f64, f64)> = samples.iter().map(|r| (r.lambda, r.norm)).collect();
    let svg = emit_svg(
        Plot::LogLogCurve {
            points: &pts,
            x_label: "lambda",
            y_label: "norm",
        },
        &style(&input.label),
    );
    run.sink.extra("resolvent.svg", svg.as_bytes())
}

fn bt_check(run: &Run) -> anyhow::Result<()> {
    let input = run.input()?;
    let r = bt_consistency(&input.damping, &input.spectrum, run.budget, &BtConfig::default())?;
    run.sink.primary("bt.json", report::to_json(&r)?.as_bytes())
}

fn table(run: &Run, values: &Option<Vec<f64>>) -> anyhow::Result<()> {
    let family = run.model.family()?;
    let grid = values
        .clone()
        .or_else(|| run.file.grid.clone())
        .unwrap_or_else(|| (0..=20).map(|k| -2.0 + 0.25 * f64::from(k)).collect());
    if grid.is_empty() {
        bail!("parameter grid is empty");
    }
    let rows = classification_table(family, &grid)?;
    let mut csv = Vec::new();
    report::write_table_csv(&mut csv, &rows)?;
    run.sink.primary("table.csv", &csv)
}

fn dispatch(cmd: &Command) -> anyhow::Result<()> {
    match cmd {
        Command::Spectrum { common } => spectrum(&Run::new(common)?),
        Command::Classify { common } => classify_cmd(&Run::new(common)?),
        Command::Simulate { common, time, psi } => simulate(&Run::new(common)?, time, *psi),
        Command::Psi { common, time } => psi(&Run::new(common)?, time),
        Command::Resolvent { common, lambda } => resolvent(&Run::new(common)?, lambda),
        Command::BtCheck { common } => bt_check(&Run::new(common)?),
        Command::Table { common, values } => table(&Run::new(common)?, values),
    }
}

fn error_name(e: &anyhow::Error) -> &'static str {
    if let Some(d) = e.downcast_ref::<dampspec::Error>() {
        d.name()
    } else if e.chain().any(|c| c.is::<toml::de::Error>()) {
        "Config"
    } else if e.chain().any(|c| c.is::<std::io::Error>()) {
        "Io"
    } else {
        "Config"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e:#}", error_name(&e));
            ExitCode::FAILURE
        }
    }
}
