//! Channel coherence monotones and the distillation/dilution report.

mod boost;
mod sdp_programs;

use serde::{Deserialize, Serialize};

pub use boost::{c_r_b_lower, product_seed, BoostSearch};
pub use sdp_programs::{
    c_max, c_max_program, c_max_tensor, c_max_tensor_with, c_max_with, diamond_distance,
    diamond_distance_with, diamond_norm, diamond_norm_with, diamond_program, MAX_CHOI_DIM,
};

use crate::channel::{QChannel, QState};
use crate::coherence::{c_r_matrix, sample_free_superop};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::random::derive_seed;
use crate::sdp::SolverOptions;

/// Knobs of the boosting-power search and the SDP calls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Ancilla dimension; `None` means the channel input dimension.
    pub ancilla_dim: Option<usize>,
    /// Random starts, on top of the basis and uniform starts.
    pub restarts: usize,
    pub max_ascent_steps: usize,
    /// An ascent stops once one accepted step gains less than this.
    pub step_tolerance: f64,
    pub rng_seed: u64,
    pub sdp_tolerance: f64,
    /// Extra starting amplitudes on `A ⊗ E`.
    #[serde(skip)]
    pub seed_states: Vec<Vec<C64>>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            ancilla_dim: None,
            restarts: 64,
            max_ascent_steps: 500,
            step_tolerance: 1e-9,
            rng_seed: 0,
            sdp_tolerance: 1e-8,
            seed_states: Vec::new(),
        }
    }
}

impl SearchConfig {
    pub fn ancilla_dim_for(&self, n: &QChannel) -> usize {
        self.ancilla_dim.unwrap_or(n.dim_in())
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tolerance: self.sdp_tolerance,
            ..SolverOptions::default()
        }
    }
}

/// `max_i C_r(N(|i⟩⟨i|))` and the smallest maximizing index.
pub fn c_r_i_argmax(n: &QChannel) -> (f64, usize) {
    let (din, dout) = (n.dim_in(), n.dim_out());
    let j = n.choi();
    let mut best = (f64::NEG_INFINITY, 0);
    for i in 0..din {
        // N(|i⟩⟨i|) is the i-th diagonal block of the Choi matrix.
        let block = crate::linalg::ComplexMatrix::from_fn(dout, dout, |a, b| {
            j[(i * dout + a, i * dout + b)]
        });
        let v = c_r_matrix(&block.hermitian_part());
        if v > best.0 + 1e-12 {
            best = (v, i);
        }
    }
    (best.0.max(0.0), best.1)
}

/// Coherence generating power `max_i C_r(N(|i⟩⟨i|))`, in bits.
pub fn c_r_i(n: &QChannel) -> f64 {
    c_r_i_argmax(n).0
}

#[derive(Debug, Clone)]
pub struct MonotoneReport {
    pub c_r_i: f64,
    pub c_r_b_lower: f64,
    pub c_r_b_witness: QState,
    /// Single-copy, unsmoothed.
    pub c_max: f64,
    pub distill_parallel: f64,
    pub distill_iterative_lower: f64,
    pub dilute_interval: (f64, f64),
    pub irreversibility_gap_lower: f64,
    pub ancilla_dim: usize,
    pub config: SearchConfig,
}

pub fn analyze(n: &QChannel, cfg: &SearchConfig) -> Result<MonotoneReport> {
    let anc = cfg.ancilla_dim_for(n);
    if anc == 0 {
        return Err(Error::InvalidArgument(
            "ancilla dimension must be positive".into(),
        ));
    }
    if n.dim_out() == 1 {
        return Ok(MonotoneReport {
            c_r_i: 0.0,
            c_r_b_lower: 0.0,
            c_r_b_witness: QState::basis(n.dim_in() * anc, 0),
            c_max: 0.0,
            distill_parallel: 0.0,
            distill_iterative_lower: 0.0,
            dilute_interval: (0.0, 0.0),
            irreversibility_gap_lower: 0.0,
            ancilla_dim: anc,
            config: cfg.clone(),
        });
    }
    let gen = c_r_i(n);
    let boost = c_r_b_lower(n, cfg)?;
    let (cmax, _) = c_max_with(n, &cfg.solver_options())?;
    Ok(MonotoneReport {
        c_r_i: gen,
        c_r_b_lower: boost.value,
        c_r_b_witness: boost.witness,
        c_max: cmax,
        distill_parallel: gen,
        distill_iterative_lower: boost.value,
        dilute_interval: (boost.value, cmax),
        irreversibility_gap_lower: boost.value - gen,
        ancilla_dim: anc,
        config: cfg.clone(),
    })
}

/// Monotone values must not grow under free super-operations beyond these.
pub const C_R_I_MONOTONE_TOL: f64 = 1e-8;
pub const C_R_B_MONOTONE_TOL: f64 = 2e-3;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub trials: usize,
    pub c_r_i_violations: usize,
    pub c_r_b_violations: usize,
    /// Largest `value(Λ(N)) − value(N)` seen; positive means growth.
    pub worst_c_r_i_margin: f64,
    pub worst_c_r_b_margin: f64,
    /// Seed of the super-operation with the worst `c_r_i` margin.
    pub worst_seed: Option<u64>,
}

impl MonotonicityReport {
    pub fn violations(&self) -> usize {
        self.c_r_i_violations + self.c_r_b_violations
    }
}

/// Samples `trials` free super-operations (ancilla dimensions alternating
/// between 1 and 2) and checks that `c_r_i` and, when `boost` is given, the
/// boosting search value do not increase.
pub fn verify_monotonicity(
    n: &QChannel,
    trials: usize,
    rng_seed: u64,
    boost: Option<&SearchConfig>,
) -> Result<MonotonicityReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let base_i = c_r_i(n);
    let base_b = match boost {
        Some(cfg) => Some(c_r_b_lower(n, cfg)?.value),
        None => None,
    };
    let mut report = MonotonicityReport {
        trials,
        worst_c_r_i_margin: f64::NEG_INFINITY,
        worst_c_r_b_margin: f64::NEG_INFINITY,
        ..MonotonicityReport::default()
    };
    for t in 0..trials {
        let seed = derive_seed(rng_seed, t as u64);
        let anc = 1 + t % 2;
        let lambda = sample_free_superop(n.dim_in(), n.dim_out(), anc, seed)?;
        let image = lambda.apply(n)?;

        let margin = c_r_i(&image) - base_i;
        if margin > report.worst_c_r_i_margin {
            report.worst_c_r_i_margin = margin;
            report.worst_seed = Some(seed);
        }
        if margin > C_R_I_MONOTONE_TOL {
            report.c_r_i_violations += 1;
        }

        if let (Some(cfg), Some(base)) = (boost, base_b) {
            let margin = c_r_b_lower(&image, cfg)?.value - base;
            report.worst_c_r_b_margin = report.worst_c_r_b_margin.max(margin);
            if margin > C_R_B_MONOTONE_TOL {
                report.c_r_b_violations += 1;
            }
        }
    }
    if base_b.is_none() {
        report.worst_c_r_b_margin = 0.0;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::rotation_unitary;
    use crate::coherence::sample_free_channel;
    use crate::linalg::pauli;
    use std::f64::consts::PI;

    #[test]
    fn c_r_i_examples() {
        let r = QChannel::rotation(PI / 10.0);
        assert!((c_r_i(&r) - 0.4545).abs() < 5e-4);
        let h = QChannel::unitary(&pauli::hadamard()).unwrap();
        assert!((c_r_i(&h) - 1.0).abs() < 1e-12);
        assert_eq!(c_r_i(&QChannel::dephasing(3)), 0.0);
        let free = sample_free_channel(3, 4).unwrap();
        assert!(c_r_i(&free) < 1e-10);
    }

    #[test]
    fn c_r_i_matches_state_pipeline() {
        let u = rotation_unitary(0.37);
        let n = QChannel::unitary(&u).unwrap();
        let direct = (0..2)
            .map(|i| crate::coherence::c_r(&n.apply(&QState::basis(2, i)).unwrap()))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((c_r_i(&n) - direct).abs() < 1e-12);
    }

    #[test]
    fn c_r_i_tie_breaks_to_smallest_index() {
        let h = QChannel::unitary(&pauli::hadamard()).unwrap();
        assert_eq!(c_r_i_argmax(&h).1, 0);
        let r = QChannel::rotation(PI / 10.0);
        assert_eq!(c_r_i_argmax(&r).1, 0);
    }

    #[test]
    fn analyze_mio_channel_is_zero() {
        let cfg = SearchConfig {
            restarts: 4,
            ..SearchConfig::default()
        };
        let rep = analyze(&QChannel::dephasing(2), &cfg).unwrap();
        for v in [
            rep.c_r_i,
            rep.c_r_b_lower,
            rep.c_max,
            rep.irreversibility_gap_lower,
        ] {
            assert!(v.abs() < 1e-6, "{v}");
        }
    }

    #[test]
    fn analyze_degenerate_output() {
        let n = QChannel::trace_out_last(1, 3);
        let rep = analyze(&n, &SearchConfig::default()).unwrap();
        assert_eq!(rep.c_max, 0.0);
        assert_eq!(rep.c_r_b_lower, 0.0);
        assert_eq!(rep.ancilla_dim, 3);
    }

    #[test]
    fn analyze_hadamard() {
        let h = QChannel::unitary(&pauli::hadamard()).unwrap();
        let cfg = SearchConfig {
            restarts: 8,
            ..SearchConfig::default()
        };
        let rep = analyze(&h, &cfg).unwrap();
        assert!((rep.c_r_i - 1.0).abs() < 1e-12);
        assert!(rep.c_r_b_lower >= rep.c_r_i - 1e-6);
        assert!((rep.c_max - 1.0).abs() < 1e-6);
        assert_eq!(rep.dilute_interval, (rep.c_r_b_lower, rep.c_max));
    }

    #[test]
    fn identity_has_no_boost() {
        let cfg = SearchConfig {
            restarts: 4,
            ..SearchConfig::default()
        };
        assert!(
            c_r_b_lower(&QChannel::identity(2), &cfg)
                .unwrap()
                .value
                .abs()
                < 1e-6
        );
    }

    #[test]
    fn monotonicity_on_rotation() {
        let r = QChannel::rotation(PI / 10.0);
        let rep = verify_monotonicity(&r, 20, 3, None).unwrap();
        assert_eq!(rep.c_r_i_violations, 0, "{rep:?}");
        assert!(verify_monotonicity(&r, 0, 3, None).is_err());
    }

    #[test]
    fn constant_post_kills_coherence() {
        let r = QChannel::rotation(PI / 10.0);
        let delta = QState::diagonal(&[0.3, 0.7]).unwrap();
        let lambda = crate::channel::FreeSuperOp::new(
            QChannel::identity(2),
            QChannel::constant(2, &delta).unwrap(),
            1,
        )
        .unwrap();
        assert!(c_r_i(&lambda.apply(&r).unwrap()) < 1e-12);
    }
}
