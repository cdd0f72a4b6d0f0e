//! Seeded invariant batteries, one suite per module.
//!
//! Every check is phrased as `lhs ≤ rhs + tol`; the signed excess
//! `lhs − rhs − tol` is its margin and a positive margin is a violation.

use rand::Rng;
use serde::Serialize;

use crate::channel::{QChannel, QState};
use crate::coherence::{
    c_r, dephase, is_incoherent, is_mio, mio_violation, rel_entropy, sample_free_channel,
    sample_free_superop,
};
use crate::error::Result;
use crate::linalg::{herm_eig, kron, partial_trace, trace_norm, ComplexMatrix, C64};
use crate::monotones::{
    analyze, c_max, c_max_tensor, c_r_b_lower, c_r_i, diamond_distance, product_seed,
    verify_monotonicity, SearchConfig,
};
use crate::random::{
    derive_seed, random_channel, random_hermitian, random_matrix, random_probabilities,
    random_pure_state, random_state, rng_from_seed, SeededRng,
};
use crate::sdp::{complex_to_real_embedding, real_to_complex, solve, SolverOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Samples per check; `None` keeps each check's own default count.
    pub trials: Option<usize>,
    /// Multiplies every tolerance. Anything other than 1 is a negative control.
    pub tolerance_scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: None,
            tolerance_scale: 1.0,
        }
    }
}

impl VerifyConfig {
    fn count(&self, default: usize) -> usize {
        self.trials.unwrap_or(default).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub suite: String,
    pub check: String,
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    pub violations: usize,
    pub worst: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn violations(&self) -> usize {
        self.suites.iter().map(|s| s.violations).sum()
    }

    pub fn worst(&self) -> Option<&Violation> {
        self.suites
            .iter()
            .filter_map(|s| s.worst.as_ref())
            .max_by(|a, b| a.margin.total_cmp(&b.margin))
    }
}

struct Suite {
    result: SuiteResult,
    scale: f64,
}

impl Suite {
    fn new(name: &str, cfg: &VerifyConfig) -> Self {
        Self {
            result: SuiteResult {
                name: name.into(),
                checks: 0,
                violations: 0,
                worst: None,
            },
            scale: cfg.tolerance_scale,
        }
    }

    fn le(&mut self, check: &str, lhs: f64, rhs: f64, tol: f64, detail: impl FnOnce() -> String) {
        self.result.checks += 1;
        let margin = lhs - rhs - tol * self.scale;
        // NaN never passes.
        if margin > 0.0 || margin.is_nan() {
            self.result.violations += 1;
            let margin = if margin.is_nan() { f64::MAX } else { margin };
            if self
                .result
                .worst
                .as_ref()
                .map_or(true, |w| margin > w.margin)
            {
                self.result.worst = Some(Violation {
                    suite: self.result.name.clone(),
                    check: check.into(),
                    margin,
                    detail: format!("lhs = {lhs:.6e}, rhs = {rhs:.6e}; {}", detail()),
                });
            }
        }
    }

    fn close(&mut self, check: &str, a: f64, b: f64, tol: f64, detail: impl FnOnce() -> String) {
        self.le(check, (a - b).abs(), 0.0, tol, detail);
    }

    fn holds(&mut self, check: &str, ok: bool, detail: impl FnOnce() -> String) {
        self.le(check, if ok { 0.0 } else { 1.0 }, 0.0, 0.0, detail);
    }
}

fn rng_for(cfg: &VerifyConfig, suite: u64) -> SeededRng {
    rng_from_seed(derive_seed(cfg.seed, suite))
}

fn state_of(kind: usize, d: usize, rng: &mut SeededRng) -> QState {
    match kind % 3 {
        0 => random_state(d, rng),
        1 => random_pure_state(d, rng),
        _ => QState::diagonal(&random_probabilities(d, rng)).expect("probabilities"),
    }
}

fn random_small_channel(rng: &mut SeededRng, max_dim: usize) -> QChannel {
    let din = rng.random_range(1..=max_dim);
    let dout = rng.random_range(1..=max_dim);
    let rank = rng.random_range(1..=din * dout);
    random_channel(din, dout, rank, rng)
}

fn choi_is_cptp(n: &QChannel) -> (f64, f64) {
    let j = n.choi();
    let min_eig = herm_eig(&j.hermitian_part())
        .map(|e| e.min_eigenvalue())
        .unwrap_or(f64::NEG_INFINITY);
    let tr_out = partial_trace(j, &[n.dim_in(), n.dim_out()], &[0]).expect("Choi shape");
    (
        min_eig,
        tr_out.max_abs_diff(&ComplexMatrix::identity(n.dim_in())),
    )
}

pub fn linalg_suite(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut s = Suite::new("linalg", cfg);
    let mut rng = rng_for(cfg, 1);
    for t in 0..cfg.count(200) {
        let n = 1 + t % 8;
        let h = random_hermitian(n, &mut rng);
        let e = herm_eig(&h)?;
        let v = ComplexMatrix::from_fn(n, n, |r, c| e.eigenvectors[(r, c)]);
        s.le(
            "eig reconstruction",
            e.reconstruct().max_abs_diff(&h),
            0.0,
            1e-10,
            || format!("sample {t}, dim {n}"),
        );
        s.le(
            "eigenvectors orthonormal",
            (&v.adjoint() * &v).max_abs_diff(&ComplexMatrix::identity(n)),
            0.0,
            1e-10,
            || format!("sample {t}, dim {n}"),
        );
    }
    for t in 0..cfg.count(100) {
        let dims = [1 + t % 3, 1 + (t / 3) % 3, 2];
        let total: usize = dims.iter().product();
        let m = random_matrix(total, total, &mut rng);
        let tr = partial_trace(&m, &dims, &[])?;
        s.le(
            "partial trace over everything",
            (tr[(0, 0)] - m.trace()).norm(),
            0.0,
            1e-12,
            || format!("sample {t}, dims {dims:?}"),
        );
        let a = random_matrix(2 + t % 3, 2 + t % 3, &mut rng);
        s.le(
            "trace norm bounds trace",
            a.trace().norm(),
            trace_norm(&a)?,
            1e-12,
            || format!("sample {t}"),
        );
        // integer entries keep every product exact
        let mut int_matrix = |r: usize, c: usize| {
            ComplexMatrix::from_fn(r, c, |_, _| {
                C64::new(
                    rng.random_range(-8..=8) as f64,
                    rng.random_range(-8..=8) as f64,
                )
            })
        };
        let (x, y, z) = (
            int_matrix(1 + t % 2, 2),
            int_matrix(2, 1 + t % 3),
            int_matrix(2, 2),
        );
        let lhs = kron(&kron(&x, &y), &z);
        let rhs = kron(&x, &kron(&y, &z));
        s.holds("kron associativity", lhs == rhs, || format!("sample {t}"));
    }
    Ok(s.result)
}

pub fn channel_suite(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut s = Suite::new("channel", cfg);
    let mut rng = rng_for(cfg, 2);
    for t in 0..cfg.count(100) {
        let n = random_small_channel(&mut rng, 4);
        let back = QChannel::from_choi(n.choi(), n.dim_in(), n.dim_out())?;
        let rho = random_state(n.dim_in(), &mut rng);
        let diff = n
            .apply(&rho)?
            .matrix()
            .max_abs_diff(back.apply(&rho)?.matrix());
        s.le("choi/kraus round trip", diff, 0.0, 1e-9, || {
            format!("sample {t}, {} -> {}", n.dim_in(), n.dim_out())
        });

        let m = random_small_channel(&mut rng, 2);
        let (eig, tp) = choi_is_cptp(&n.tensor(&m));
        s.le("tensor is CP", -eig, 0.0, 1e-9, || format!("sample {t}"));
        s.le("tensor is TP", tp, 0.0, 1e-9, || format!("sample {t}"));
        let after = random_channel(n.dim_out(), 1 + t % 3, 2, &mut rng);
        let (eig, tp) = choi_is_cptp(&QChannel::compose(&after, &n)?);
        s.le("compose is CP", -eig, 0.0, 1e-9, || format!("sample {t}"));
        s.le("compose is TP", tp, 0.0, 1e-9, || format!("sample {t}"));
    }
    for t in 0..cfg.count(50) {
        let (din, dout, anc) = (2 + t % 2, 2 + (t / 2) % 2, 1 + (t / 4) % 2);
        let seed = derive_seed(cfg.seed ^ 0x5eed, t as u64);
        let n = if din == dout {
            sample_free_channel(din, seed)?
        } else {
            QChannel::compose(
                &QChannel::constant(din, &QState::basis(dout, t % dout))?,
                &sample_free_channel(din, seed)?,
            )?
        };
        let lambda = sample_free_superop(din, dout, anc, seed.wrapping_add(1))?;
        s.le(
            "free super-operations preserve MIO",
            mio_violation(&lambda.apply(&n)?),
            0.0,
            1e-8,
            || format!("sample {t}, seed {seed}, {din} -> {dout}, ancilla {anc}"),
        );
    }
    Ok(s.result)
}

pub fn coherence_suite(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut s = Suite::new("coherence", cfg);
    let mut rng = rng_for(cfg, 3);
    for t in 0..cfg.count(500) {
        let d = 2 + t % 3;
        let rho = state_of(t, d, &mut rng);
        let v = c_r(&rho);
        s.le("c_r nonnegative", -v, 0.0, 1e-12, || {
            format!("sample {t}, dim {d}")
        });
        let incoherent = is_incoherent(&rho, 1e-9);
        if incoherent {
            s.le("incoherent implies c_r = 0", v, 0.0, 1e-9, || {
                format!("sample {t}")
            });
        } else {
            s.holds("c_r = 0 implies incoherent", v > 1e-9 * s.scale, || {
                format!("sample {t}, c_r = {v:e}")
            });
        }
    }
    for t in 0..cfg.count(200) {
        let d = 2 + t % 3;
        let rho = state_of(t, d, &mut rng);
        let phi = sample_free_channel(d, rng.random())?;
        s.le(
            "c_r monotone under free channels",
            c_r(&phi.apply(&rho)?),
            c_r(&rho),
            1e-8,
            || format!("sample {t}, dim {d}"),
        );
    }
    for t in 0..cfg.count(100) {
        let (a, b) = (
            state_of(t, 2 + t % 2, &mut rng),
            state_of(t + 1, 2, &mut rng),
        );
        s.close(
            "c_r additive",
            c_r(&a.tensor(&b)),
            c_r(&a) + c_r(&b),
            1e-9,
            || format!("sample {t}"),
        );
        s.close(
            "relative entropy to dephased state",
            rel_entropy(&a, &dephase(&a))?,
            c_r(&a),
            1e-10,
            || format!("sample {t}"),
        );
        let once = dephase(&a);
        s.holds("dephase idempotent", dephase(&once) == once, || {
            format!("sample {t}")
        });
    }
    for d in 2..=4 {
        s.holds(
            "dephasing is MIO",
            is_mio(&QChannel::dephasing(d), 1e-12),
            || format!("dim {d}"),
        );
        let g = QChannel::constant(d, &QState::max_coherent(d))?;
        s.holds(
            "constant max-coherent channel is not MIO",
            !is_mio(&g, 1e-8),
            || format!("dim {d}"),
        );
    }
    Ok(s.result)
}

pub fn sdp_suite(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut s = Suite::new("sdp", cfg);
    let mut rng = rng_for(cfg, 4);
    let opts = SolverOptions::default();
    for t in 0..cfg.count(10) {
        let n = random_channel(2, 2, 1 + t % 4, &mut rng);
        let m = random_channel(2, 2, 1 + t % 3, &mut rng);
        let problems = [
            crate::monotones::c_max_program(n.choi(), 2, 2),
            crate::monotones::diamond_program(&(n.choi() - m.choi()), 2, 2),
        ];
        for (k, p) in problems.iter().enumerate() {
            let a = solve(p, &opts)?;
            let b = solve(p, &opts)?;
            let same = a.primal_value.to_bits() == b.primal_value.to_bits()
                && a.iterations == b.iterations
                && a.primal_point == b.primal_point;
            s.holds("deterministic", same, || format!("sample {t}, problem {k}"));
            s.holds("optimal status", a.is_optimal(), || {
                format!("sample {t}, problem {k}, {:?}", a.status)
            });
            if a.is_optimal() {
                let gap = (a.primal_value - a.dual_value).abs() / (1.0 + a.primal_value.abs());
                s.le("duality gap", gap, 0.0, 1e-7, || {
                    format!("sample {t}, problem {k}")
                });
                s.le("primal residual", a.primal_residual, 0.0, 1e-7, || {
                    format!("sample {t}, problem {k}")
                });
                s.le("primal PSD", -a.primal_min_eigenvalue(), 0.0, 1e-8, || {
                    format!("sample {t}, problem {k}")
                });
            }
        }
    }
    for t in 0..cfg.count(100) {
        let h = random_hermitian(1 + t % 6, &mut rng);
        let back = real_to_complex(&complex_to_real_embedding(&h)?);
        s.holds("embedding round trip", back == h, || format!("sample {t}"));
    }
    Ok(s.result)
}

pub fn monotones_suite(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut s = Suite::new("monotones", cfg);
    let mut rng = rng_for(cfg, 5);
    for t in 0..cfg.count(20) {
        let n = random_channel(2, 2, 1 + t % 4, &mut rng);
        let m = random_channel(2, 2, 1 + (t / 4) % 4, &mut rng);
        s.close(
            "c_r_i additive",
            c_r_i(&n.tensor(&m)),
            c_r_i(&n) + c_r_i(&m),
            1e-8,
            || format!("sample {t}"),
        );

        let k = random_small_channel(&mut rng, 3);
        s.le("c_r_i <= c_max", c_r_i(&k), c_max(&k)?, 1e-6, || {
            format!("sample {t}, {} -> {}", k.dim_in(), k.dim_out())
        });

        let free = if t % 2 == 0 {
            sample_free_channel(2 + t % 3, rng.random())?
        } else {
            k
        };
        let zero = c_r_i(&free) <= 1e-10;
        s.holds("c_r_i = 0 iff MIO", zero == is_mio(&free, 1e-8), || {
            format!("sample {t}, c_r_i = {:e}", c_r_i(&free))
        });
    }
    for t in 0..cfg.count(50) {
        let eps = if t % 2 == 0 { 1e-3 } else { 1e-2 };
        let n = random_channel(2, 2, 1 + t % 4, &mut rng);
        let r = random_channel(2, 2, 1 + t % 3, &mut rng);
        let w = rng.random_range(0.0..eps / 2.0);
        let m = QChannel::mixture(&[(1.0 - w, &n), (w, &r)])?;
        let dist = diamond_distance(&n, &m)?;
        s.le("perturbation within eps", dist, eps, 1e-7, || {
            format!("sample {t}")
        });
        s.le(
            "c_r_i continuity",
            (c_r_i(&n) - c_r_i(&m)).abs(),
            4.0 * eps * 2f64.log2(),
            1e-6,
            || format!("sample {t}, eps {eps}, distance {dist:e}"),
        );
    }
    for t in 0..cfg.count(5) {
        let n = random_channel(2, 2, 1 + t % 3, &mut rng);
        s.le(
            "c_max subadditive",
            c_max_tensor(&n, 2)?,
            c_max(&n)?,
            1e-6,
            || format!("sample {t}"),
        );
    }

    let search = SearchConfig {
        ancilla_dim: Some(2),
        restarts: 8,
        rng_seed: cfg.seed,
        ..SearchConfig::default()
    };
    for t in 0..cfg.count(3) {
        let n = random_channel(2, 2, 1 + t % 2, &mut rng);
        let m = random_channel(2, 2, 2, &mut rng);
        let bn = c_r_b_lower(&n, &search)?;
        let bm = c_r_b_lower(&m, &search)?;
        let joint = SearchConfig {
            ancilla_dim: Some(4),
            restarts: 2,
            seed_states: vec![product_seed(
                &bn.witness_vector,
                (2, 2),
                &bm.witness_vector,
                (2, 2),
            )],
            ..search.clone()
        };
        let bnm = c_r_b_lower(&n.tensor(&m), &joint)?;
        s.le(
            "boost search superadditive",
            bn.value + bm.value,
            bnm.value,
            2e-3,
            || format!("sample {t}"),
        );

        let rep = analyze(&n, &search)?;
        s.le("c_r_i <= boost", rep.c_r_i, rep.c_r_b_lower, 1e-6, || {
            format!("sample {t}")
        });
        s.le("boost <= c_max", rep.c_r_b_lower, rep.c_max, 1e-6, || {
            format!("sample {t}")
        });
    }
    for t in 0..cfg.count(10) {
        let n = random_small_channel(&mut rng, 3);
        let seed = derive_seed(cfg.seed, 1000 + t as u64);
        let rep = verify_monotonicity(&n, cfg.count(10), seed, None)?;
        s.le(
            "c_r_i monotone under free super-operations",
            rep.worst_c_r_i_margin,
            0.0,
            1e-8,
            || {
                format!(
                    "channel {t}, {} -> {}, super-op seed {:?}",
                    n.dim_in(),
                    n.dim_out(),
                    rep.worst_seed
                )
            },
        );
    }
    for t in 0..cfg.count(2) {
        let n = random_channel(2, 2, 2, &mut rng);
        let seed = derive_seed(cfg.seed, 2000 + t as u64);
        let rep = verify_monotonicity(&n, 2, seed, Some(&search))?;
        s.le(
            "boost search monotone under free super-operations",
            rep.worst_c_r_b_margin,
            0.0,
            2e-3,
            || format!("channel {t}"),
        );
    }
    Ok(s.result)
}

/// Runs every suite.
pub fn run_all(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let suites = vec![
        linalg_suite(cfg)?,
        channel_suite(cfg)?,
        coherence_suite(cfg)?,
        sdp_suite(cfg)?,
        monotones_suite(cfg)?,
    ];
    Ok(VerifyReport {
        seed: cfg.seed,
        suites,
    })
}
