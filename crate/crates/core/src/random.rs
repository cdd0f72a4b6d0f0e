//! Seeded generators for random matrices, states and channels.
//!
//! All sampling goes through [`ChaCha8Rng`] so results are reproducible
//! across platforms for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{QChannel, QState};
use crate::linalg::{ComplexMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for sub-task `index` of a seeded job.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_matrix(n, n, rng).hermitian_part()
}

/// Haar-random unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n).map(|_| gaussian_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

pub fn random_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> QState {
    QState::pure(&random_unit_vector(n, rng)).expect("unit vector is a valid state")
}

/// Full-rank mixed state `G G† / Tr(G G†)` from a Ginibre matrix.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> QState {
    let g = random_matrix(n, n, rng);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    QState::new(rho.scale_real(1.0 / tr).hermitian_part()).expect("Wishart matrix is a valid state")
}

/// Matrix with orthonormal columns obtained by Gram-Schmidt on a Ginibre draw.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(cols <= rows, "an isometry needs rows >= cols");
    let g = random_matrix(rows, cols, rng);
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for c in 0..cols {
        let mut v = g.col(c);
        // twice is enough for numerical orthogonality
        for _ in 0..2 {
            for u in &q {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        q.push(v);
    }
    ComplexMatrix::from_fn(rows, cols, |r, c| q[c][r])
}

pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_isometry(n, n, rng)
}

/// Random CPTP map with `rank` Kraus operators, cut from a random isometry
/// `C^{dim_in} -> C^{rank} ⊗ C^{dim_out}`.
pub fn random_channel<R: Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    rank: usize,
    rng: &mut R,
) -> QChannel {
    let rank = rank.max(1.max(dim_in.div_ceil(dim_out)));
    let v = random_isometry(rank * dim_out, dim_in, rng);
    let kraus = (0..rank)
        .map(|k| ComplexMatrix::from_fn(dim_out, dim_in, |r, c| v[(k * dim_out + r, c)]))
        .collect();
    QChannel::from_kraus(kraus).expect("isometry blocks form a channel")
}

/// Random diagonal probability vector (flat Dirichlet).
pub fn random_probabilities<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(rand_distr::Exp1))
        .collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}
