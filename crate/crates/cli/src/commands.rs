use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use chancoh_core::io::{channel_to_json, read_channel, ReportFile};
use chancoh_core::linalg::pauli;
use chancoh_core::monotones::{c_r_b_lower, c_r_i, diamond_distance};
use chancoh_core::verify::{run_all, VerifyConfig};
use chancoh_core::{analyze as analyze_channel, Error, QChannel, QState, SearchConfig};

use crate::format::fixed;
use crate::ChannelKind;

pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Solver { .. } | Error::NoConvergence(_) => Self::numerical(e.to_string()),
            _ => Self::input(e.to_string()),
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn search_config(
    ancilla_dim: Option<usize>,
    restarts: usize,
    seed: u64,
    tolerance: f64,
) -> Result<SearchConfig, Failure> {
    if ancilla_dim == Some(0) {
        return Err(Failure::input("--ancilla-dim must be at least 1"));
    }
    if restarts == 0 {
        return Err(Failure::input("--restarts must be at least 1"));
    }
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Failure::input("--tolerance must be a positive number"));
    }
    Ok(SearchConfig {
        ancilla_dim,
        restarts,
        rng_seed: seed,
        sdp_tolerance: tolerance,
        ..SearchConfig::default()
    })
}

fn finite(name: &str, v: f64) -> Result<f64, Failure> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::numerical(format!("{name} is not finite")))
    }
}

pub fn analyze(
    path: &Path,
    ancilla_dim: Option<usize>,
    restarts: usize,
    seed: u64,
    tolerance: f64,
    out: Option<&Path>,
) -> Outcome {
    let cfg = search_config(ancilla_dim, restarts, seed, tolerance)?;
    let n = read_channel(path)?;
    let r = analyze_channel(&n, &cfg)?;
    for (name, v) in [
        ("c_r_i", r.c_r_i),
        ("c_r_b_lower", r.c_r_b_lower),
        ("c_max", r.c_max),
    ] {
        finite(name, v)?;
    }

    let mut text = String::new();
    let p = |v: f64| fixed(v, 6);
    let _ = writeln!(text, "channel: {} -> {}", n.dim_in(), n.dim_out());
    let _ = writeln!(text, "ancilla_dim: {}", r.ancilla_dim);
    let _ = writeln!(text, "c_r_i: {}", p(r.c_r_i));
    let _ = writeln!(text, "c_r_b_lower: {}", p(r.c_r_b_lower));
    let _ = writeln!(text, "c_max: {}", p(r.c_max));
    let _ = writeln!(text, "distill_parallel: {}", p(r.distill_parallel));
    let _ = writeln!(
        text,
        "distill_iterative_lower: {}",
        p(r.distill_iterative_lower)
    );
    let _ = writeln!(
        text,
        "dilute_interval: [{}, {}]",
        p(r.dilute_interval.0),
        p(r.dilute_interval.1)
    );
    let _ = writeln!(
        text,
        "irreversibility_gap_lower: {}",
        p(r.irreversibility_gap_lower)
    );
    print!("{text}");

    if let Some(out) = out {
        write_file(out, &(ReportFile::new(&n, &r).to_json() + "\n"))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep_rows(
    theta_min: f64,
    theta_max: f64,
    steps: usize,
    cfg: &SearchConfig,
) -> Result<String, Failure> {
    let mut csv = String::from("theta,c_r_i,c_r_b_lower,gap\n");
    for k in 0..steps {
        let theta = theta_min + (theta_max - theta_min) * k as f64 / (steps - 1) as f64;
        let n = QChannel::rotation(theta);
        let gen = finite("c_r_i", c_r_i(&n))?;
        let boost = finite("c_r_b_lower", c_r_b_lower(&n, cfg)?.value)?;
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fixed(theta, 8),
            fixed(gen, 8),
            fixed(boost, 8),
            fixed(boost - gen, 8)
        );
    }
    Ok(csv)
}

pub fn sweep_rotation(
    theta_min: f64,
    theta_max: f64,
    steps: usize,
    ancilla_dim: usize,
    restarts: usize,
    seed: u64,
    out: &Path,
) -> Outcome {
    if steps < 2 {
        return Err(Failure::input("--steps must be at least 2"));
    }
    if !(theta_min.is_finite() && theta_max.is_finite() && theta_min < theta_max) {
        return Err(Failure::input("need finite --theta-min < --theta-max"));
    }
    let cfg = search_config(
        Some(ancilla_dim),
        restarts,
        seed,
        SearchConfig::default().sdp_tolerance,
    )?;
    let result =
        sweep_rows(theta_min, theta_max, steps, &cfg).and_then(|csv| write_file(out, &csv));
    if let Err(failure) = result {
        let _ = std::fs::remove_file(out);
        return Err(failure);
    }
    Ok(ExitCode::SUCCESS)
}

pub fn diamond(first: &Path, second: &Path) -> Outcome {
    let n = read_channel(first)?;
    let m = read_channel(second)?;
    let d = finite("diamond distance", diamond_distance(&n, &m)?)?;
    println!("{}", fixed(d, 8));
    Ok(ExitCode::SUCCESS)
}

pub fn verify(
    seed: u64,
    trials: Option<usize>,
    diagnostics: &Path,
    tolerance_scale: f64,
) -> Outcome {
    if trials == Some(0) {
        return Err(Failure::input("--trials must be at least 1"));
    }
    let cfg = VerifyConfig {
        seed,
        trials,
        tolerance_scale,
    };
    let report = run_all(&cfg)?;
    for s in &report.suites {
        println!(
            "{}: {} checks, {} violations",
            s.name, s.checks, s.violations
        );
    }
    let total = report.violations();
    if total == 0 {
        println!("all invariants hold");
        return Ok(ExitCode::SUCCESS);
    }
    let worst = report.worst().expect("a violation was recorded");
    println!(
        "FAILED: {total} violations; worst: {} / {} (margin {:.3e})",
        worst.suite, worst.check, worst.margin
    );
    let body = serde_json::json!({ "worst": worst, "report": report });
    write_file(
        diagnostics,
        &(serde_json::to_string_pretty(&body).expect("plain data") + "\n"),
    )?;
    println!("diagnostics written to {}", diagnostics.display());
    Ok(ExitCode::from(EXIT_VIOLATION))
}

pub fn export_channel(kind: ChannelKind, theta: f64, dim: usize, out: Option<&Path>) -> Outcome {
    if dim == 0 {
        return Err(Failure::input("--dim must be at least 1"));
    }
    let n = match kind {
        ChannelKind::Rotation => QChannel::rotation(theta),
        ChannelKind::Hadamard => QChannel::unitary(&pauli::hadamard())?,
        ChannelKind::PauliX => QChannel::unitary(&pauli::x())?,
        ChannelKind::Identity => QChannel::identity(dim),
        ChannelKind::Dephasing => QChannel::dephasing(dim),
        ChannelKind::MaxCoherent => QChannel::constant(dim, &QState::max_coherent(dim))?,
    };
    let json = channel_to_json(&n) + "\n";
    match out {
        Some(path) => write_file(path, &json)?,
        None => print!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}
