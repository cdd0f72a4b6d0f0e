//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
//!
//! Run with `cargo test -p chancoh-cli --test acceptance`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::{FRAC_PI_4, PI};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use chancoh_core::coherence::{is_mio, sample_free_channel, sample_free_superop};
use chancoh_core::io::channel_to_json;
use chancoh_core::monotones::{analyze, c_max, c_max_tensor, c_r_b_lower, c_r_i, diamond_distance};
use chancoh_core::random::{derive_seed, random_channel, rng_from_seed};
use chancoh_core::{QChannel, SearchConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail = format!("{} [{:.2?}]", out.detail, elapsed);
    if let Some(limit) = limit {
        if elapsed > limit {
            out.pass = false;
            out.detail += &format!(" exceeds the {limit:?} limit");
        }
    }
    out
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_chancoh")
}

fn rotation() -> QChannel {
    QChannel::rotation(PI / 10.0)
}

fn boost_config() -> SearchConfig {
    SearchConfig {
        ancilla_dim: Some(2),
        restarts: 200,
        ..SearchConfig::default()
    }
}

fn criterion_1(dir: &Path) -> Outcome {
    let path = dir.join("rotation.json");
    std::fs::write(&path, channel_to_json(&rotation())).unwrap();
    let out = Command::new(bin())
        .arg("analyze")
        .arg(&path)
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    let value = stdout
        .lines()
        .find_map(|l| l.strip_prefix("c_r_i: "))
        .and_then(|v| v.trim().parse::<f64>().ok());
    match value {
        Some(v) if out.status.success() => Outcome {
            pass: (v - 0.4545).abs() <= 5e-4,
            detail: format!("analyze reports c_r_i = {v:.6} (target 0.4545 ± 5e-4)"),
        },
        _ => Outcome {
            pass: false,
            detail: format!(
                "analyze failed: {:?} {}",
                out.status,
                String::from_utf8_lossy(&out.stderr)
            ),
        },
    }
}

fn criterion_2() -> Outcome {
    match c_r_b_lower(&rotation(), &boost_config()) {
        Ok(b) => Outcome {
            pass: b.value >= 0.5683,
            detail: format!(
                "c_r_b_lower = {:.7} with ancilla 2, 200 restarts (target >= 0.5683)",
                b.value
            ),
        },
        Err(e) => Outcome {
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn criterion_3() -> Outcome {
    match analyze(&rotation(), &boost_config()) {
        Ok(r) => Outcome {
            pass: r.irreversibility_gap_lower >= 0.1138,
            detail: format!(
                "gap_lower = {:.7} (target >= 0.1138)",
                r.irreversibility_gap_lower
            ),
        },
        Err(e) => Outcome {
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn criterion_4(dir: &Path) -> Outcome {
    let path = dir.join("sweep.csv");
    let status = Command::new(bin())
        .args(["sweep-rotation", "--theta-min", "0", "--theta-max"])
        .arg(FRAC_PI_4.to_string())
        .args(["--steps", "50", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    if !status.success() {
        return Outcome {
            pass: false,
            detail: format!("sweep-rotation exited with {status:?}"),
        };
    }
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header_ok = lines.next() == Some("theta,c_r_i,c_r_b_lower,gap");
    let rows: Vec<[f64; 4]> = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect();
    let mut problems = Vec::new();
    if !header_ok {
        problems.push("bad header".to_string());
    }
    if rows.len() != 50 {
        problems.push(format!("{} rows", rows.len()));
    }
    for r in &rows {
        if r[2] < r[1] - 1e-6 {
            problems.push(format!("c_r_b_lower < c_r_i at theta {}", r[0]));
        }
    }
    for w in rows.windows(2) {
        if w[1][1] < w[0][1] {
            problems.push(format!("c_r_i decreases at theta {}", w[1][0]));
        }
        if w[1][0] <= w[0][0] {
            problems.push("theta not increasing".into());
        }
    }
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    if first[1] != 0.0 || first[2] != 0.0 {
        problems.push("curves nonzero at theta = 0".into());
    }
    if (last[1] - 1.0).abs() > 1e-6 {
        problems.push(format!("c_r_i(pi/4) = {}", last[1]));
    }
    Outcome {
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "50 rows; c_r_i(pi/4) = {:.8}, boost >= c_r_i pointwise, c_r_i non-decreasing",
                last[1]
            )
        } else {
            problems.join("; ")
        },
    }
}

fn criterion_5() -> Outcome {
    let mut rng = rng_from_seed(5);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let n = random_channel(2, 2, 1 + k % 4, &mut rng);
        let m = random_channel(2, 2, 1 + (k / 4) % 4, &mut rng);
        worst = worst.max((c_r_i(&n.tensor(&m)) - c_r_i(&n) - c_r_i(&m)).abs());
    }
    Outcome {
        pass: worst < 1e-8,
        detail: format!("20 qubit pairs, max |c_r_i(N x M) - c_r_i(N) - c_r_i(M)| = {worst:.2e}"),
    }
}

fn criterion_6() -> Outcome {
    let mut rng = rng_from_seed(6);
    let (mut violations, mut worst, mut total) = (0, f64::NEG_INFINITY, 0);
    for k in 0..10u64 {
        let din = 2 + (k as usize) % 2;
        let dout = 2 + (k as usize / 2) % 2;
        let n = random_channel(din, dout, 2, &mut rng);
        let base = c_r_i(&n);
        for t in 0..100u64 {
            let seed = derive_seed(k, t);
            let lambda = sample_free_superop(din, dout, 1 + (t as usize) % 2, seed).unwrap();
            let margin = c_r_i(&lambda.apply(&n).unwrap()) - base;
            worst = worst.max(margin);
            total += 1;
            if margin > 1e-8 {
                violations += 1;
            }
        }
    }
    Outcome {
        pass: violations == 0,
        detail: format!("{total} free super-ops over 10 channels, {violations} violations, worst margin {worst:.2e}"),
    }
}

fn criterion_7() -> Outcome {
    let mut problems = Vec::new();
    let mut worst_mio: f64 = 0.0;
    for seed in 0..10u64 {
        let n = sample_free_channel(2 + (seed as usize) % 2, seed).unwrap();
        assert!(is_mio(&n, 1e-9));
        match c_max(&n) {
            Ok(v) => worst_mio = worst_mio.max(v.abs()),
            Err(e) => problems.push(e.to_string()),
        }
    }
    if worst_mio > 1e-6 {
        problems.push(format!("c_max on MIO up to {worst_mio:.2e}"));
    }

    let mut rng = rng_from_seed(7);
    let mut worst_brute: f64 = 0.0;
    let mut worst_self: f64 = 0.0;
    for k in 0..5 {
        let n = random_channel(2, 2, 1 + k % 4, &mut rng);
        let m = random_channel(2, 2, 2, &mut rng);
        let sdp = diamond_distance(&n, &m).unwrap();
        let brute = common::brute_force_diamond(&n, &m, 100_000, k as u64);
        worst_brute = worst_brute.max((sdp - brute).abs());
        worst_self = worst_self.max(diamond_distance(&n, &n).unwrap());
    }
    if worst_brute >= 1e-3 {
        problems.push(format!("diamond vs brute force off by {worst_brute:.2e}"));
    }
    if worst_self >= 1e-7 {
        problems.push(format!("diamond(n, n) = {worst_self:.2e}"));
    }

    let mut worst_chain = f64::NEG_INFINITY;
    for k in 0..20 {
        let n = random_channel(1 + k % 3, 2 + (k / 3) % 2, 1 + k % 4, &mut rng);
        worst_chain = worst_chain.max(c_r_i(&n) - c_max(&n).unwrap());
    }
    if worst_chain > 1e-6 {
        problems.push(format!("c_r_i exceeds c_max by {worst_chain:.2e}"));
    }
    Outcome {
        pass: problems.is_empty(),
        detail: format!(
            "max |c_max(MIO)| = {worst_mio:.1e}, max |sdp - brute| = {worst_brute:.1e}, max diamond(n,n) = {worst_self:.1e}, max c_r_i - c_max = {worst_chain:.1e}{}",
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    }
}

fn criterion_8() -> Outcome {
    match (c_max(&rotation()), c_max_tensor(&rotation(), 2)) {
        (Ok(one), Ok(two)) => Outcome {
            pass: two <= one + 1e-6,
            detail: format!("c_max = {one:.9}, two-copy per-copy c_max = {two:.9}"),
        },
        (a, b) => Outcome {
            pass: false,
            detail: format!("solver failure: {:?} {:?}", a.err(), b.err()),
        },
    }
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().unwrap();
    let criteria: Vec<(u32, &str, Outcome)> = vec![
        (
            1,
            "C_r,I of the pi/10 rotation",
            timed(Some(Duration::from_secs(1)), || criterion_1(dir.path())),
        ),
        (
            2,
            "C_r,b lower bound of the pi/10 rotation",
            timed(Some(Duration::from_secs(60)), criterion_2),
        ),
        (3, "irreversibility gap", timed(None, criterion_3)),
        (
            4,
            "rotation sweep shape",
            timed(None, || criterion_4(dir.path())),
        ),
        (
            5,
            "additivity of C_r,I",
            timed(Some(Duration::from_secs(10)), criterion_5),
        ),
        (6, "monotonicity battery", timed(None, criterion_6)),
        (7, "SDP cross-checks", timed(None, criterion_7)),
        (
            8,
            "two-copy C_max",
            timed(Some(Duration::from_secs(300)), criterion_8),
        ),
    ];
    let mut failed = 0;
    for (n, name, out) in &criteria {
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {n} ({name}): {tag}: {}", out.detail);
        failed += usize::from(!out.pass);
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
