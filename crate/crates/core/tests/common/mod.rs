//! Brute-force reference for the diamond distance, shared by integration
//! tests across the workspace.

#![allow(dead_code)]

use chancoh_core::linalg::trace_norm;
use chancoh_core::random::{random_unit_vector, rng_from_seed};
use chancoh_core::{ComplexMatrix, QChannel, C64};
use rand::Rng;

fn objective(nx: &QChannel, mx: &QChannel, psi: &[C64]) -> f64 {
    let rho = ComplexMatrix::outer(psi, psi);
    let diff = &nx.apply_matrix(&rho).unwrap() - &mx.apply_matrix(&rho).unwrap();
    trace_norm(&diff).unwrap()
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
}

/// `max_ψ ‖((N − M) ⊗ id)(ψψ†)‖₁` over `samples` random pure inputs on
/// `A ⊗ A`, followed by random-perturbation hill climbing from the best few.
/// Always a lower bound on the diamond distance.
pub fn brute_force_diamond(n: &QChannel, m: &QChannel, samples: usize, seed: u64) -> f64 {
    let d = n.dim_in();
    let id = QChannel::identity(d);
    let (nx, mx) = (n.tensor(&id), m.tensor(&id));
    let mut rng = rng_from_seed(seed);

    let mut pool: Vec<(f64, Vec<C64>)> = (0..samples)
        .map(|_| {
            let v = random_unit_vector(d * d, &mut rng);
            (objective(&nx, &mx, &v), v)
        })
        .collect();
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));
    pool.truncate(8);

    let mut best = pool[0].0;
    for (mut f, mut v) in pool {
        let mut step = 0.1;
        while step > 1e-7 {
            let mut improved = false;
            for _ in 0..40 {
                let mut cand: Vec<C64> = v
                    .iter()
                    .map(|z| {
                        z + C64::new(rng.random_range(-step..step), rng.random_range(-step..step))
                    })
                    .collect();
                normalize(&mut cand);
                let fc = objective(&nx, &mx, &cand);
                if fc > f {
                    (f, v) = (fc, cand);
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.max(f);
    }
    best
}
