//! Lower bound on the coherence boosting power by multi-start ascent over
//! pure inputs on the channel input plus an ancilla.

use rayon::prelude::*;

use super::SearchConfig;
use crate::channel::{QChannel, QState};
use crate::coherence::{c_r, shannon_entropy};
use crate::error::{Error, Result};
use crate::linalg::{herm_eigenvalues, ComplexMatrix, C64, ZERO};
use crate::random::{derive_seed, random_unit_vector, rng_from_seed};

const FD_STEP: f64 = 1e-5;
const ARMIJO: f64 = 1e-4;
const MAX_ANGLE: f64 = std::f64::consts::FRAC_PI_4;
const MIN_ANGLE: f64 = 1e-12;

/// Outcome of the boosting-power search.
#[derive(Debug, Clone)]
pub struct BoostSearch {
    /// `C_r((N ⊗ id)(ψ)) − C_r(ψ)` re-evaluated at the witness.
    pub value: f64,
    pub witness: QState,
    /// The witness amplitudes on `A ⊗ E`, input index most significant.
    pub witness_vector: Vec<C64>,
    pub ancilla_dim: usize,
    /// Number of ascents run (random, basis, uniform and seeded starts).
    pub starts: usize,
}

/// `ψ ↦ C_r((N ⊗ id_E)(ψψ†)) − C_r(ψψ†)` on unnormalized amplitudes.
struct BoostObjective<'a> {
    kraus: &'a [ComplexMatrix],
    dim_in: usize,
    dim_out: usize,
    anc: usize,
}

impl BoostObjective<'_> {
    fn len(&self) -> usize {
        self.dim_in * self.anc
    }

    fn eval(&self, psi: &[C64]) -> f64 {
        let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let inv = 1.0 / norm_sq.sqrt();
        let probs_in: Vec<f64> = psi.iter().map(|z| z.norm_sqr() / norm_sq).collect();
        let input = shannon_entropy(&probs_in);

        let d_out = self.dim_out * self.anc;
        // φ_k = (K_k ⊗ I) ψ / ‖ψ‖
        let phis: Vec<Vec<C64>> = self
            .kraus
            .iter()
            .map(|k| {
                let mut phi = vec![ZERO; d_out];
                for x in 0..self.dim_out {
                    for a in 0..self.dim_in {
                        let kxa = k[(x, a)];
                        if kxa == ZERO {
                            continue;
                        }
                        for e in 0..self.anc {
                            phi[x * self.anc + e] += kxa * psi[a * self.anc + e] * inv;
                        }
                    }
                }
                phi
            })
            .collect();

        let diag: Vec<f64> = (0..d_out)
            .map(|i| phis.iter().map(|p| p[i].norm_sqr()).sum())
            .collect();
        // Nonzero spectrum of Σ φφ† equals that of the Gram matrix ⟨φ_k|φ_l⟩.
        let r = phis.len();
        let spectrum = if r < d_out {
            let gram = ComplexMatrix::from_fn(r, r, |k, l| {
                phis[k]
                    .iter()
                    .zip(&phis[l])
                    .map(|(a, b)| a.conj() * b)
                    .sum()
            });
            herm_eigenvalues(&gram.hermitian_part())
        } else {
            let rho = ComplexMatrix::from_fn(d_out, d_out, |i, j| {
                phis.iter().map(|p| p[i] * p[j].conj()).sum()
            });
            herm_eigenvalues(&rho.hermitian_part())
        }
        .expect("Hermitian by construction");
        shannon_entropy(&diag) - shannon_entropy(&spectrum) - input
    }

    fn eval_real(&self, x: &[f64]) -> f64 {
        self.eval(&to_complex(x))
    }
}

fn to_complex(x: &[f64]) -> Vec<C64> {
    let d = x.len() / 2;
    (0..d).map(|i| C64::new(x[i], x[d + i])).collect()
}

fn to_real(v: &[C64]) -> Vec<f64> {
    v.iter()
        .map(|z| z.re)
        .chain(v.iter().map(|z| z.im))
        .collect()
}

fn normalized(mut x: Vec<f64>) -> Vec<f64> {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= n);
    x
}

/// Projected gradient ascent on the unit sphere with central differences and
/// Armijo backtracking along great circles.
fn ascend(obj: &BoostObjective<'_>, start: Vec<f64>, cfg: &SearchConfig) -> (f64, Vec<f64>) {
    let mut x = normalized(start);
    let mut f = obj.eval_real(&x);
    let mut angle = MAX_ANGLE / 4.0;
    let dim = x.len();
    let mut probe = x.clone();

    for _ in 0..cfg.max_ascent_steps {
        let mut g = vec![0.0; dim];
        for i in 0..dim {
            probe.copy_from_slice(&x);
            probe[i] = x[i] + FD_STEP;
            let up = obj.eval_real(&probe);
            probe[i] = x[i] - FD_STEP;
            let down = obj.eval_real(&probe);
            g[i] = (up - down) / (2.0 * FD_STEP);
        }
        let radial: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
        g.iter_mut().zip(&x).for_each(|(gi, xi)| *gi -= radial * xi);
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm < 1e-14 {
            break;
        }
        let u: Vec<f64> = g.iter().map(|v| v / gnorm).collect();

        let mut t = (angle * 2.0).min(MAX_ANGLE);
        let mut accepted = None;
        while t >= MIN_ANGLE {
            let (s, c) = t.sin_cos();
            let cand: Vec<f64> = x.iter().zip(&u).map(|(xi, ui)| c * xi + s * ui).collect();
            let fc = obj.eval_real(&cand);
            if fc >= f + ARMIJO * t * gnorm {
                accepted = Some((fc, normalized(cand)));
                break;
            }
            t *= 0.5;
        }
        let Some((fc, xc)) = accepted else {
            break;
        };
        let gain = fc - f;
        x = xc;
        f = fc;
        angle = t;
        if gain < cfg.step_tolerance {
            break;
        }
    }
    (f, x)
}

/// Best found `C_r((N ⊗ id_E)(|ψ⟩⟨ψ|)) − C_r(|ψ⟩⟨ψ|)`, a lower bound on the
/// coherence boosting power of `n`.
pub fn c_r_b_lower(n: &QChannel, cfg: &SearchConfig) -> Result<BoostSearch> {
    let anc = cfg.ancilla_dim_for(n);
    if anc == 0 {
        return Err(Error::InvalidArgument(
            "ancilla dimension must be positive".into(),
        ));
    }
    let obj = BoostObjective {
        kraus: n.kraus(),
        dim_in: n.dim_in(),
        dim_out: n.dim_out(),
        anc,
    };
    let d = obj.len();
    if let Some(bad) = cfg.seed_states.iter().position(|s| s.len() != d) {
        return Err(Error::DimensionMismatch(format!(
            "seed state {bad} has {} amplitudes, search space has {d}",
            cfg.seed_states[bad].len()
        )));
    }

    if n.dim_out() == 1 {
        let witness = QState::basis(d, 0);
        let mut v = vec![ZERO; d];
        v[0] = C64::new(1.0, 0.0);
        return Ok(BoostSearch {
            value: 0.0,
            witness,
            witness_vector: v,
            ancilla_dim: anc,
            starts: 0,
        });
    }

    let mut starts: Vec<Vec<f64>> = Vec::new();
    for k in 0..cfg.restarts {
        let mut rng = rng_from_seed(derive_seed(cfg.rng_seed, k as u64));
        starts.push(to_real(&random_unit_vector(d, &mut rng)));
    }
    for i in 0..d {
        let mut v = vec![0.0; 2 * d];
        v[i] = 1.0;
        starts.push(v);
    }
    starts.push(vec![1.0; d].into_iter().chain(vec![0.0; d]).collect());
    starts.extend(cfg.seed_states.iter().map(|s| to_real(s)));

    let results: Vec<(f64, Vec<f64>)> = starts
        .par_iter()
        .map(|s| ascend(&obj, s.clone(), cfg))
        .collect();
    let mut best = 0;
    for (k, r) in results.iter().enumerate() {
        if r.0 > results[best].0 {
            best = k;
        }
    }

    let witness_vector = to_complex(&results[best].1);
    let witness = QState::pure(&witness_vector)?;
    let extended = n.tensor(&QChannel::identity(anc));
    let output = extended.apply(&witness)?;
    let value = c_r(&output) - c_r(&witness);
    Ok(BoostSearch {
        value,
        witness,
        witness_vector,
        ancilla_dim: anc,
        starts: starts.len(),
    })
}

/// Reorders a product `|a_N e_N⟩ ⊗ |a_M e_M⟩` into the `A_N A_M E_N E_M`
/// layout used when searching `N ⊗ M` with ancilla `E_N ⊗ E_M`.
pub fn product_seed(
    first: &[C64],
    first_dims: (usize, usize),
    second: &[C64],
    second_dims: (usize, usize),
) -> Vec<C64> {
    let (an, en) = first_dims;
    let (am, em) = second_dims;
    assert_eq!(first.len(), an * en);
    assert_eq!(second.len(), am * em);
    let mut out = vec![ZERO; an * en * am * em];
    for a1 in 0..an {
        for e1 in 0..en {
            for a2 in 0..am {
                for e2 in 0..em {
                    let idx = ((a1 * am + a2) * en + e1) * em + e2;
                    out[idx] = first[a1 * en + e1] * second[a2 * em + e2];
                }
            }
        }
    }
    out
}
