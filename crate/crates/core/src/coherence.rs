//! State-level resource theory of coherence in the computational basis.
//!
//! Entropies are in bits, so the maximally coherent qubit carries one unit.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::channel::{FreeSuperOp, QChannel, QState};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, herm_eigenvalues, ComplexMatrix, C64, ZERO};
use crate::random::{random_probabilities, rng_from_seed};

/// σ-eigenvalues below this count as outside the support of σ.
pub const SUPPORT_EIG_CUTOFF: f64 = 1e-12;
/// ρ-weight on σ's kernel above this makes the relative entropy infinite.
pub const SUPPORT_WEIGHT_CUTOFF: f64 = 1e-10;

/// Shannon entropy in bits, with `0 log 0 = 0`. Entries are clamped to `[0, 1]`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .map(|&p| p.clamp(0.0, 1.0))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// The completely dephased state `Δ(ρ)`.
pub fn dephase(rho: &QState) -> QState {
    QState::from_trusted(rho.matrix().diagonal_part())
}

pub fn von_neumann_entropy(rho: &QState) -> f64 {
    matrix_entropy(rho.matrix())
}

/// Entropy of a matrix already known to be a density operator.
pub(crate) fn matrix_entropy(m: &ComplexMatrix) -> f64 {
    let spectrum = herm_eigenvalues(m).expect("density matrices are Hermitian");
    shannon_entropy(&spectrum)
}

/// Quantum relative entropy `S(ρ‖σ)` in bits; `f64::INFINITY` when the support
/// of ρ is not contained in that of σ.
pub fn rel_entropy(rho: &QState, sigma: &QState) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy of a {}-dimensional state against a {}-dimensional one",
            rho.dim(),
            sigma.dim()
        )));
    }
    let r = herm_eig(rho.matrix())?;
    let s = herm_eig(sigma.matrix())?;
    let n = rho.dim();

    // overlap[i][j] = |⟨u_i|w_j⟩|²
    let u = &r.eigenvectors;
    let w = &s.eigenvectors;
    let mut cross = 0.0;
    for j in 0..n {
        let mut weight = 0.0;
        for i in 0..n {
            let p = r.eigenvalues[i].clamp(0.0, 1.0);
            if p == 0.0 {
                continue;
            }
            let mut amp = ZERO;
            for k in 0..n {
                amp += u[(k, i)].conj() * w[(k, j)];
            }
            weight += p * amp.norm_sqr();
        }
        let q = s.eigenvalues[j];
        if q < SUPPORT_EIG_CUTOFF {
            if weight > SUPPORT_WEIGHT_CUTOFF {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * q.log2();
    }
    Ok(-shannon_entropy(&r.eigenvalues) - cross)
}

/// Relative entropy of coherence `C_r(ρ) = S(Δ(ρ)) − S(ρ)`.
pub fn c_r(rho: &QState) -> f64 {
    c_r_matrix(rho.matrix())
}

pub(crate) fn c_r_matrix(m: &ComplexMatrix) -> f64 {
    let diag: Vec<f64> = m.diagonal().iter().map(|z| z.re).collect();
    shannon_entropy(&diag) - matrix_entropy(m)
}

/// True iff every off-diagonal entry has magnitude below `tol`.
pub fn is_incoherent(rho: &QState, tol: f64) -> bool {
    off_diagonal_max(rho.matrix()) < tol
}

fn off_diagonal_max(m: &ComplexMatrix) -> f64 {
    let mut max: f64 = 0.0;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if r != c {
                max = max.max(m[(r, c)].norm());
            }
        }
    }
    max
}

/// Largest off-diagonal magnitude over the outputs `N(|i⟩⟨i|)`, read off the
/// diagonal input blocks of the Choi matrix.
pub fn mio_violation(n: &QChannel) -> f64 {
    let d = n.dim_out();
    let j = n.choi();
    let mut max: f64 = 0.0;
    for i in 0..n.dim_in() {
        for a in 0..d {
            for b in 0..d {
                if a != b {
                    max = max.max(j[(i * d + a, i * d + b)].norm());
                }
            }
        }
    }
    max
}

/// Whether `n` maps every incoherent state to an incoherent state. By
/// convexity it suffices to check the basis states.
pub fn is_mio(n: &QChannel, tol: f64) -> bool {
    mio_violation(n) < tol
}

/// `|π(i)⟩⟨i|` with a diagonal phase, the incoherent unitaries.
pub fn permutation_phase_unitary(perm: &[usize], phases: &[f64]) -> Result<ComplexMatrix> {
    let d = perm.len();
    let mut seen = vec![false; d];
    for &p in perm {
        if p >= d || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation"
            )));
        }
    }
    if phases.len() != d {
        return Err(Error::DimensionMismatch("one phase per basis state".into()));
    }
    Ok(ComplexMatrix::from_fn(d, d, |r, c| {
        if perm[c] == r {
            C64::from_polar(1.0, phases[c])
        } else {
            ZERO
        }
    }))
}

/// A random channel on dimension `d` that is MIO by construction.
///
/// Convex mixture, with flat-Dirichlet weights, of two permutation-phase
/// unitaries, the dephasing channel and two replacement channels with random
/// diagonal outputs. This covers only part of MIO.
pub fn sample_free_channel(d: usize, seed: u64) -> Result<QChannel> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "free channel sampler needs d >= 2, got {d}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut parts = Vec::with_capacity(5);
    for _ in 0..2 {
        let mut perm: Vec<usize> = (0..d).collect();
        perm.shuffle(&mut rng);
        let phases: Vec<f64> = (0..d)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        parts.push(QChannel::unitary(&permutation_phase_unitary(
            &perm, &phases,
        )?)?);
    }
    parts.push(QChannel::dephasing(d));
    for _ in 0..2 {
        let delta = QState::diagonal(&random_probabilities(d, &mut rng))?;
        parts.push(QChannel::constant(d, &delta)?);
    }
    let weights = random_probabilities(parts.len(), &mut rng);
    let weighted: Vec<(f64, &QChannel)> = weights.iter().copied().zip(parts.iter()).collect();
    QChannel::mixture(&weighted)
}

/// A random free super-operation for channels `dim_in -> dim_out`.
///
/// `pre` appends an ancilla in `|0⟩` and applies a sampled free channel on the
/// joint system; `post` applies a sampled free channel and discards the
/// ancilla. Both stages are MIO.
pub fn sample_free_superop(
    dim_in: usize,
    dim_out: usize,
    ancilla_dim: usize,
    seed: u64,
) -> Result<FreeSuperOp> {
    let mut rng = rng_from_seed(seed);
    let pre_seed: u64 = rng.random();
    let post_seed: u64 = rng.random();
    let free_on = |d: usize, s: u64| -> Result<QChannel> {
        if d == 1 {
            Ok(QChannel::identity(1))
        } else {
            sample_free_channel(d, s)
        }
    };
    let pre = QChannel::compose(
        &free_on(dim_in * ancilla_dim, pre_seed)?,
        &QChannel::append_zero_ancilla(dim_in, ancilla_dim),
    )?;
    let post = QChannel::compose(
        &QChannel::trace_out_last(dim_out, ancilla_dim),
        &free_on(dim_out * ancilla_dim, post_seed)?,
    )?;
    FreeSuperOp::new(pre, post, ancilla_dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::random::{random_state, rng_from_seed};

    fn binary_entropy(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn dephase_examples() {
        let diag = QState::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(dephase(&diag), diag);
        let out = dephase(&QState::max_coherent(2));
        assert!(
            out.matrix()
                .max_abs_diff(QState::maximally_mixed(2).matrix())
                < 1e-15
        );

        let rho = random_state(2, &mut rng_from_seed(1));
        let d = dephase(&rho);
        assert_eq!(d.matrix()[(0, 1)], ZERO);
        assert_eq!(d.matrix()[(1, 0)], ZERO);
        assert_eq!(d.matrix()[(0, 0)], rho.matrix()[(0, 0)]);
        assert_eq!(d.matrix()[(1, 1)], rho.matrix()[(1, 1)]);
    }

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&QState::max_coherent(3)).abs() < 1e-12);
        for d in 2..6 {
            let s = von_neumann_entropy(&QState::maximally_mixed(d));
            assert!((s - (d as f64).log2()).abs() < 1e-12);
        }
        let s = von_neumann_entropy(&QState::diagonal(&[0.75, 0.25]).unwrap());
        assert!((s - binary_entropy(0.75)).abs() < 1e-14);
    }

    #[test]
    fn rel_entropy_examples() {
        let rho = random_state(3, &mut rng_from_seed(2));
        assert!(rel_entropy(&rho, &rho).unwrap().abs() < 1e-10);

        let inf = rel_entropy(&QState::basis(2, 0), &QState::basis(2, 1)).unwrap();
        assert_eq!(inf, f64::INFINITY);

        let one = rel_entropy(&QState::max_coherent(2), &QState::maximally_mixed(2)).unwrap();
        assert!((one - 1.0).abs() < 1e-12);

        assert!(rel_entropy(&rho, &QState::basis(2, 0)).is_err());
    }

    #[test]
    fn c_r_examples() {
        assert!(c_r(&QState::diagonal(&[0.1, 0.9]).unwrap()).abs() < 1e-14);
        assert!((c_r(&QState::max_coherent(2)) - 1.0).abs() < 1e-12);

        // Oracle: eigenvalues of [[3/4, 1/4], [1/4, 1/4]] are 1/2 ± √2/4.
        let rho =
            QState::new(ComplexMatrix::from_real_rows(&[&[0.75, 0.25], &[0.25, 0.25]]).unwrap())
                .unwrap();
        let l = 0.5 + 2f64.sqrt() / 4.0;
        let expect = binary_entropy(0.75) - binary_entropy(l);
        assert!((c_r(&rho) - expect).abs() < 1e-12);
    }

    #[test]
    fn incoherence_examples() {
        assert!(is_incoherent(&QState::maximally_mixed(4), 1e-12));
        assert!(!is_incoherent(&QState::max_coherent(2), 1e-3));
        let rho = random_state(3, &mut rng_from_seed(4));
        assert!(is_incoherent(&dephase(&rho), 1e-15));
    }

    #[test]
    fn mio_examples() {
        assert!(is_mio(&QChannel::dephasing(3), 1e-12));
        assert!(!is_mio(
            &QChannel::unitary(&pauli::hadamard()).unwrap(),
            1e-3
        ));
        let perm = permutation_phase_unitary(&[2, 0, 1], &[0.0, 1.0, 2.0]).unwrap();
        assert!(is_mio(&QChannel::unitary(&perm).unwrap(), 1e-12));
        let g = QChannel::constant(2, &QState::max_coherent(2)).unwrap();
        assert!(!is_mio(&g, 1e-3));
    }

    #[test]
    fn permutation_validation() {
        assert!(permutation_phase_unitary(&[0, 0], &[0.0, 0.0]).is_err());
        assert!(permutation_phase_unitary(&[0, 1], &[0.0]).is_err());
    }

    #[test]
    fn sampler_outputs_are_mio() {
        for d in 2..=3 {
            for seed in 0..50 {
                let n = sample_free_channel(d, seed).unwrap();
                assert!(is_mio(&n, 1e-9), "d={d} seed={seed}: {}", mio_violation(&n));
            }
        }
        assert!(sample_free_channel(1, 0).is_err());
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = sample_free_channel(3, 7).unwrap();
        let b = sample_free_channel(3, 7).unwrap();
        assert_eq!(a.choi(), b.choi());
    }

    #[test]
    fn full_weight_on_dephasing_is_dephasing() {
        let d = QChannel::dephasing(2);
        let u = QChannel::unitary(&pauli::x()).unwrap();
        let m = QChannel::mixture(&[(1.0, &d), (0.0, &u)]).unwrap();
        assert!(m.choi().max_abs_diff(d.choi()) < 1e-15);
    }

    #[test]
    fn sampled_superops_are_free() {
        for seed in 0..10 {
            let s = sample_free_superop(2, 2, 2, seed).unwrap();
            assert!(is_mio(&s.pre, 1e-9));
            assert!(is_mio(&s.post, 1e-9));
            assert_eq!(s.pre.dim_out(), 4);
            assert_eq!(s.post.dim_in(), 4);
        }
    }
}
