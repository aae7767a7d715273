//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use dampspec::damping::{DampingFunction, Table};
use dampspec::fit::loglog_fit;
use dampspec::generator::{portrait, PointLabel};
use dampspec::modal::{constant_energy_witness, ModalState, PsiScan};
use dampspec::models::{self, ModelFamily};
use dampspec::resolvent::{bt_consistency, growth_exponent, BtConfig, ResolventScan};
use dampspec::spectrum::{log_grid, SamplingPolicy, SpectrumSpec};
use dampspec::stability::{classification_table, Verdict};
use nalgebra::{Complex, Matrix2};

/// `min_k λₖ^(−2)‖(iλₖ − 𝔄)⁻¹‖` for `f(s) = 1/s`, `λₖ = k` and `k = 10..1000`,
/// as first measured by the SVD oracle below.
const BELOWRES_CONSTANT: f64 = 1.99;

/// Membership of `θ` in a stability window.
type Window = fn(f64) -> bool;

/// Name, check and runtime limit.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn policy() -> SamplingPolicy {
    SamplingPolicy::default()
}

fn c1() -> Outcome {
    let m = models::wave(0.0).unwrap();
    let p = portrait(&m.damping, &m.spectrum, 50, &policy()).unwrap();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for pt in p.xi_points() {
        let n = pt.source.sqrt();
        let im = (4.0 * n * n - 1.0).sqrt() / 2.0;
        let sign = if pt.label == PointLabel::XiPlus { 1.0 } else { -1.0 };
        worst = worst
            .max((pt.value.re + 0.5).abs())
            .max((pt.value.im - sign * im).abs());
        count += 1;
    }
    outcome(
        count == 100 && worst <= 1e-12,
        format!("{count} roots, max error {worst:.2e}"),
    )
}

/// Root of `ξ² + fξ + s` near `x0`, polished by Newton steps.
fn newton_root(s: f64, f: f64, x0: f64) -> f64 {
    let mut x = x0;
    for _ in 0..60 {
        let step = (x * x + f * x + s) / (2.0 * x + f);
        x -= step;
        if step.abs() <= 1e-17 * x.abs() {
            break;
        }
    }
    x
}

fn c2() -> Outcome {
    let m = models::wave(1.0).unwrap();
    let p = portrait(&m.damping, &m.spectrum, 400, &policy()).unwrap();
    let has_point = p
        .points
        .iter()
        .any(|q| q.label == PointLabel::LambdaPoint && q.value.re == -1.0 && q.value.im == 0.0);
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for q in p.points.iter().filter(|q| q.label == PointLabel::XiPlus) {
        let n = q.source.sqrt().round();
        if n < 3.0 {
            continue;
        }
        let gap = (q.value.re + 1.0).abs();
        worst_ratio = worst_ratio.max(gap * n * n / 2.0);
        ok &= gap <= 2.0 / (n * n) && q.value.im == 0.0;
        let oracle = newton_root(q.source, q.source, -1.0);
        worst_oracle = worst_oracle.max((oracle - q.value.re).abs() / oracle.abs());
    }
    outcome(
        has_point && ok && worst_oracle <= 1e-13,
        format!(
            "-1 in portrait: {has_point}; max n^2|xi+1|/2 = {worst_ratio:.4}; oracle rel. error {worst_oracle:.1e}"
        ),
    )
}

fn c3() -> Outcome {
    let grid: Vec<f64> = (0..=20).map(|k| -2.0 + 0.25 * f64::from(k)).collect();
    let cases: [(ModelFamily, Window, Window); 3] = [
        (ModelFamily::Wave, |t| (0.0..=1.0).contains(&t), |t| t <= 1.0),
        (ModelFamily::Beam, |t| (0.0..=2.0).contains(&t), |t| t <= 2.0),
        (
            ModelFamily::BeamRotational { omega: 1.0 },
            |t| (1.0..=2.0).contains(&t),
            |t| t <= 2.0,
        ),
    ];
    let mut mismatches = Vec::new();
    for (fam, exp, semi) in cases {
        for row in classification_table(fam, &grid).unwrap() {
            let t = row.parameter;
            let want = if exp(t) {
                Verdict::Exponential
            } else if semi(t) {
                Verdict::Semiuniform
            } else {
                Verdict::StableOnly
            };
            if row.verdict != want {
                mismatches.push(format!("{} theta={t}: {:?}", fam.name(), row.verdict));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{} rows checked, mismatches: {:?}", 3 * grid.len(), mismatches),
    )
}

fn c4() -> Outcome {
    let times: Vec<f64> = (1..=40).map(|k| 0.25 * f64::from(k)).collect();
    let mut worst_rel: f64 = 0.0;
    let mut increases = 0;
    let mut states = 0;
    for (i, (theta, seeds)) in [(-1.0, 7), (0.0, 7), (1.0, 6)].into_iter().enumerate() {
        let m = models::wave(theta).unwrap();
        for seed in 0..seeds {
            states += 1;
            let z = ModalState::random(&m.damping, &m.spectrum, 100, &policy(), 1000 * i as u64 + seed).unwrap();
            let mut prev = z.energy();
            for &t in &times {
                let e = z.evolve(t).energy();
                if e > prev {
                    increases += 1;
                }
                prev = e;
                let h = 1e-6 * t.max(1.0);
                let fd = (z.evolve(t + h).energy() - z.evolve(t - h).energy()) / (2.0 * h);
                let zt = z.evolve(t);
                let exact: f64 = -zt.modes.iter().map(|md| md.fs * md.v.norm_sqr()).sum::<f64>();
                let lib = zt.dissipation_rate();
                let rel = ((fd - exact) / exact).abs().max(((lib - exact) / exact).abs());
                worst_rel = worst_rel.max(rel);
            }
        }
    }
    outcome(
        states == 20 && increases == 0 && worst_rel <= 1e-6,
        format!("{states} states, {increases} energy increases, max rel. error {worst_rel:.2e}"),
    )
}

fn c5() -> Outcome {
    let spec = SpectrumSpec::discrete(vec![1.0, 4.0, 9.0], None).unwrap();
    let f = DampingFunction::Tabulated(Table::new(vec![(1.0, 1.0), (4.0, 0.0), (9.0, 1.0)], None).unwrap());
    let w = constant_energy_witness(&f, &spec, 100.0, 2000).unwrap();
    match w {
        Some(w) => outcome(
            w.max_relative_drift <= 1e-12 && w.state.modes[0].s == 4.0,
            format!(
                "witness on s = {}, drift {:.1e}",
                w.state.modes[0].s, w.max_relative_drift
            ),
        ),
        None => outcome(false, "no witness found"),
    }
}

fn psi_slope(m: &models::ModelPreset, budget: usize) -> (f64, usize) {
    let scan = PsiScan::new(&m.damping, &m.spectrum, budget, &policy()).unwrap();
    let rows: Vec<_> = scan
        .profile(&log_grid(10.0, 1e3, 60))
        .into_iter()
        .filter(|r| !r.truncated)
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.value).collect();
    (loglog_fit(&xs, &ys).map_or(f64::NAN, |f| f.slope), rows.len())
}

fn c6() -> Outcome {
    let (a, na) = psi_slope(&models::wave(-1.0).unwrap(), 300);
    let (b, nb) = psi_slope(&models::wave(-0.5).unwrap(), 1000);
    let (c, nc) = psi_slope(&models::beam_rotational(0.0, 1.0).unwrap(), 300);
    let pass =
        (a + 0.5).abs() <= 0.05 && (b + 1.0).abs() <= 0.1 && (c + 0.5).abs() <= 0.05 && na > 10 && nb > 10 && nc > 10;
    outcome(
        pass,
        format!("wave(-1) {a:.4} [{na} pts], wave(-1/2) {b:.4} [{nb} pts], beam-rot(0,1) {c:.4} [{nc} pts]"),
    )
}

/// `‖(iλ − Ã_s)⁻¹‖₂` by explicit inversion and SVD.
fn oracle_mode_norm(s: f64, fs: f64, lambda: f64) -> f64 {
    let r = s.sqrt();
    let a = Matrix2::new(
        Complex::new(0.0, lambda),
        Complex::new(-r, 0.0),
        Complex::new(r, 0.0),
        Complex::new(fs, lambda),
    );
    let inv = a.try_inverse().expect("off the spectrum");
    inv.singular_values().max()
}

fn c7() -> Outcome {
    let m = models::wave(-1.0).unwrap();
    let g = growth_exponent(&m.damping, &m.spectrum, (10.0, 1e3), 1000);
    let (nu, peaks) = g.as_ref().map_or((f64::NAN, 0), |g| (g.exponent, g.envelope.len()));
    let scan = ResolventScan::new(&m.damping, &m.spectrum, 1000, &policy()).unwrap();
    let mut lib_min = f64::INFINITY;
    let mut oracle_min = f64::INFINITY;
    let mut max_dev: f64 = 0.0;
    for k in (10..=1000).step_by(10) {
        let lk = f64::from(k);
        let lib = scan.norm_at(lk).unwrap().norm;
        let oracle = (1..=1000)
            .map(|n| {
                let s = f64::from(n * n);
                oracle_mode_norm(s, 1.0 / s, lk)
            })
            .fold(0.0, f64::max);
        lib_min = lib_min.min(lib / (lk * lk));
        oracle_min = oracle_min.min(oracle / (lk * lk));
        max_dev = max_dev.max((lib - oracle).abs() / oracle);
    }
    let pass = (nu - 2.0).abs() <= 0.1 && lib_min >= BELOWRES_CONSTANT && max_dev <= 1e-9;
    outcome(
        pass,
        format!(
            "exponent {nu:.4} from {peaks} peaks; min lambda^-2 norm {lib_min:.6} (oracle {oracle_min:.6}, floor {BELOWRES_CONSTANT}); oracle dev {max_dev:.1e}"
        ),
    )
}

fn c8() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for theta in [-1.0, -0.5] {
        let m = models::wave(theta).unwrap();
        match bt_consistency(&m.damping, &m.spectrum, 1000, &BtConfig::default()) {
            Ok(r) => {
                pass &= r.consistent && r.difference <= 0.2;
                parts.push(format!(
                    "theta={theta}: nu_res {:.4}, nu_psi {:.4}, diff {:.4}",
                    r.resolvent_exponent, r.psi_exponent, r.difference
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("theta={theta}: {e}"));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn c9() -> Outcome {
    let m = models::wave(0.0).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let z = ModalState::random(&m.damping, &m.spectrum, 100, &policy(), 9000 + seed).unwrap();
        let n0 = z.norm();
        for k in 0..=400 {
            let t = 0.05 * f64::from(k);
            worst = worst.max(z.evolve(t).norm() / (n0 * (-0.49 * t).exp()));
        }
    }
    outcome(
        worst <= 10.0,
        format!("max ||S(t)z||/(e^(-0.49t)||z||) = {worst:.4} over 20 states"),
    )
}

fn c10() -> Outcome {
    let m = models::wave(1.0).unwrap();
    let sup = |budget: usize| {
        let scan = ResolventScan::new(&m.damping, &m.spectrum, budget, &policy()).unwrap();
        let mut grid: Vec<f64> = (0..=4000).map(|k| -1e3 + 0.5 * f64::from(k)).collect();
        for &(s, _) in scan.modes() {
            let r = s.sqrt();
            if r <= 1e3 {
                grid.extend([r, -r]);
            }
        }
        grid.iter().map(|&l| scan.norm_at(l).unwrap().norm).fold(0.0, f64::max)
    };
    let (a, b) = (sup(100), sup(1000));
    let rel = (a - b).abs() / b;
    outcome(
        a.is_finite() && rel <= 0.01,
        format!("sup norm {a:.6} (100 modes) vs {b:.6} (1000 modes), rel. diff {rel:.1e}"),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dampspec"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn c11() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(
        &cfg,
        "model = \"beam-rot\"\ntheta = 0.0\nomega = 1.0\nmodes = 120\nseed = 11\n",
    )
    .unwrap();
    let cfg = cfg.to_string_lossy().into_owned();
    let commands: Vec<Vec<&str>> = vec![
        vec!["spectrum", "--model", "wave", "--theta", "0", "--modes", "50"],
        vec!["classify", "--model", "wave", "--theta", "-1"],
        vec![
            "simulate", "--model", "wave", "--theta", "-1", "--modes", "100", "--seed", "5", "--psi",
        ],
        vec!["simulate", "--config", &cfg],
        vec!["psi", "--model", "wave", "--theta", "-1", "--modes", "300"],
        vec!["resolvent", "--model", "wave", "--theta", "-1", "--modes", "1000"],
        vec!["bt-check", "--model", "wave", "--theta", "-0.5", "--modes", "1000"],
        vec!["table", "--model", "beam-rot", "--omega", "1"],
    ];
    let mut files = 0;
    let mut differing = Vec::new();
    for (i, args) in commands.iter().enumerate() {
        let a = tmp.path().join(format!("a{i}"));
        let b = tmp.path().join(format!("b{i}"));
        if let Err(e) = run_cli(&a, args).and_then(|_| run_cli(&b, args)) {
            return outcome(false, e);
        }
        let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for name in names {
            files += 1;
            let x = std::fs::read(a.join(&name)).unwrap();
            let y = std::fs::read(b.join(&name)).unwrap_or_default();
            if x != y {
                differing.push(name.to_string_lossy().into_owned());
            }
        }
    }
    outcome(
        differing.is_empty() && files >= commands.len(),
        format!(
            "{} commands, {files} files compared, differing: {differing:?}",
            commands.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("spectrum closed forms", c1, Some(Duration::from_secs(1))),
        ("lambda point and accumulation", c2, Some(Duration::from_secs(1))),
        ("classification tables", c3, Some(Duration::from_secs(1))),
        ("dissipation identity", c4, Some(Duration::from_secs(5))),
        ("constant-energy witness", c5, Some(Duration::from_secs(1))),
        ("semiuniform decay slope", c6, Some(Duration::from_secs(30))),
        ("resolvent growth exponent", c7, Some(Duration::from_secs(10))),
        ("resolvent/decay consistency", c8, Some(Duration::from_secs(30))),
        ("exponential decay", c9, None),
        ("bounded resolvent", c10, None),
        ("determinism", c11, None),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = limit.map_or(String::new(), |l| format!(" / limit {:.0} s", l.as_secs_f64()));
        println!(
            "criterion {:>2} {} {name}: {} ({:.3} s{budget})",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
