//! The two semidefinite programs on Choi matrices: max-coherence of a channel
//! and the diamond norm of a Hermiticity-preserving map.

use crate::channel::QChannel;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::sdp::{solve, LinearFunctional, SdpProblem, SdpSolution, SolverOptions};

/// Largest Choi dimension `(d_in d_out)^copies` accepted by [`c_max_tensor`].
pub const MAX_CHOI_DIM: usize = 64;

fn require_optimal(sol: SdpSolution) -> Result<SdpSolution> {
    if sol.is_optimal() {
        Ok(sol)
    } else {
        Err(Error::Solver {
            status: sol.status,
            iterations: sol.iterations,
        })
    }
}

/// Pins `X_block[r, c] = value` through its real and imaginary parts.
fn pin_entry(p: &mut SdpProblem, block: usize, r: usize, c: usize, value: C64) {
    let mut f = LinearFunctional::new();
    f.add_re(block, r, c, 1.0);
    p.add_constraint(f, value.re);
    if r != c {
        let mut f = LinearFunctional::new();
        f.add_im(block, r, c, 1.0);
        p.add_constraint(f, value.im);
    }
}

/// The max-coherence program for a Choi matrix `J`:
///
/// ```text
/// minimize λ  over Hermitian S ⪰ 0, λ ≥ 0, with K = S + J,
///   Tr_out K = λ I_in,
///   K[(i,a),(i,b)] = 0 for a ≠ b   (K/λ is the Choi matrix of an MIO)
/// ```
///
/// `K ⪰ 0` is implied by `K ⪰ J ⪰ 0`.
pub fn c_max_program(j: &ComplexMatrix, dim_in: usize, dim_out: usize) -> SdpProblem {
    let n = dim_in * dim_out;
    let (s_blk, l_blk) = (0, 1);
    let mut p = SdpProblem::new(vec![n, 1]);
    let mut obj = LinearFunctional::new();
    obj.add_re(l_blk, 0, 0, 1.0);
    p.set_objective(obj);

    for i in 0..dim_in {
        for k in i..dim_in {
            // Σ_a S[(i,a),(k,a)] − δ_ik λ = −Σ_a J[(i,a),(k,a)]
            let jsum: C64 = (0..dim_out)
                .map(|a| j[(i * dim_out + a, k * dim_out + a)])
                .sum();
            let mut re = LinearFunctional::new();
            for a in 0..dim_out {
                re.add_re(s_blk, i * dim_out + a, k * dim_out + a, 1.0);
            }
            if i == k {
                re.add_re(l_blk, 0, 0, -1.0);
                p.add_constraint(re, -jsum.re);
            } else {
                p.add_constraint(re, -jsum.re);
                let mut im = LinearFunctional::new();
                for a in 0..dim_out {
                    im.add_im(s_blk, i * dim_out + a, k * dim_out + a, 1.0);
                }
                p.add_constraint(im, -jsum.im);
            }
        }
        for a in 0..dim_out {
            for b in a + 1..dim_out {
                let (r, c) = (i * dim_out + a, i * dim_out + b);
                pin_entry(&mut p, s_blk, r, c, -j[(r, c)]);
            }
        }
    }
    p
}

/// `log₂ λ*` of the max-coherence program, with its solver certificate.
pub fn c_max_with(n: &QChannel, opts: &SolverOptions) -> Result<(f64, SdpSolution)> {
    if n.dim_out() == 1 {
        return Ok((0.0, trivial_solution()));
    }
    let prob = c_max_program(n.choi(), n.dim_in(), n.dim_out());
    let sol = require_optimal(solve(&prob, opts)?)?;
    // λ ≥ 1 always (trace preservation); clamp the solver's tolerance slack.
    let lambda = sol.primal_value.max(1.0);
    Ok((lambda.log2(), sol))
}

/// Max entropy of channel coherence (unsmoothed), in bits.
pub fn c_max(n: &QChannel) -> Result<f64> {
    c_max_with(n, &SolverOptions::default()).map(|(v, _)| v)
}

/// `c_max(n^{⊗copies}) / copies`.
pub fn c_max_tensor(n: &QChannel, copies: usize) -> Result<f64> {
    c_max_tensor_with(n, copies, &SolverOptions::default())
}

pub fn c_max_tensor_with(n: &QChannel, copies: usize, opts: &SolverOptions) -> Result<f64> {
    if copies == 0 {
        return Err(Error::InvalidArgument("copies must be at least 1".into()));
    }
    let choi_dim = (n.dim_in() * n.dim_out())
        .checked_pow(copies as u32)
        .unwrap_or(usize::MAX);
    if choi_dim > MAX_CHOI_DIM {
        return Err(Error::TooLarge(format!(
            "{copies} copies give a {choi_dim}-dimensional Choi matrix (limit {MAX_CHOI_DIM})"
        )));
    }
    let power = n.tensor_power(copies);
    c_max_with(&power, opts).map(|(v, _)| v / copies as f64)
}

/// The diamond-norm program for the Choi matrix `J` of a Hermiticity
/// preserving map:
///
/// ```text
/// minimize ½ (t₀ + t₁)  subject to
///   W = [[Y₀, −J], [−J†, Y₁]] ⪰ 0,
///   t₀ I − Tr_out Y₀ ⪰ 0,  t₁ I − Tr_out Y₁ ⪰ 0,  t₀, t₁ ≥ 0
/// ```
///
/// with the two epigraph slacks as their own PSD blocks.
pub fn diamond_program(j: &ComplexMatrix, dim_in: usize, dim_out: usize) -> SdpProblem {
    let n = dim_in * dim_out;
    let (w, p0, p1, t0, t1) = (0, 1, 2, 3, 4);
    let mut p = SdpProblem::new(vec![2 * n, dim_in, dim_in, 1, 1]);
    let mut obj = LinearFunctional::new();
    obj.add_re(t0, 0, 0, 0.5);
    obj.add_re(t1, 0, 0, 0.5);
    p.set_objective(obj);

    for r in 0..n {
        for c in 0..n {
            let target = -j[(r, c)];
            let mut re = LinearFunctional::new();
            re.add_re(w, r, n + c, 1.0);
            p.add_constraint(re, target.re);
            let mut im = LinearFunctional::new();
            im.add_im(w, r, n + c, 1.0);
            p.add_constraint(im, target.im);
        }
    }

    for (offset, slack, t) in [(0, p0, t0), (n, p1, t1)] {
        for i in 0..dim_in {
            for k in i..dim_in {
                // P[i,k] + Σ_a Y[(i,a),(k,a)] − δ_ik t = 0
                let mut re = LinearFunctional::new();
                re.add_re(slack, i, k, 1.0);
                for a in 0..dim_out {
                    re.add_re(w, offset + i * dim_out + a, offset + k * dim_out + a, 1.0);
                }
                if i == k {
                    re.add_re(t, 0, 0, -1.0);
                }
                p.add_constraint(re, 0.0);
                if i != k {
                    let mut im = LinearFunctional::new();
                    im.add_im(slack, i, k, 1.0);
                    for a in 0..dim_out {
                        im.add_im(w, offset + i * dim_out + a, offset + k * dim_out + a, 1.0);
                    }
                    p.add_constraint(im, 0.0);
                }
            }
        }
    }
    p
}

pub fn diamond_norm_with(
    delta_choi: &ComplexMatrix,
    dim_in: usize,
    dim_out: usize,
    opts: &SolverOptions,
) -> Result<f64> {
    let n = dim_in * dim_out;
    if delta_choi.rows() != n || delta_choi.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "Choi matrix must be {n}x{n}, got {}x{}",
            delta_choi.rows(),
            delta_choi.cols()
        )));
    }
    let dev = delta_choi.hermitian_deviation();
    if dev > 1e-9 {
        return Err(Error::NotHermitian(dev));
    }
    let j = delta_choi.hermitian_part();
    let sol = require_optimal(solve(&diamond_program(&j, dim_in, dim_out), opts)?)?;
    Ok(sol.primal_value.max(0.0))
}

/// Diamond norm of the map with Choi matrix `delta_choi`.
pub fn diamond_norm(delta_choi: &ComplexMatrix, dim_in: usize, dim_out: usize) -> Result<f64> {
    diamond_norm_with(delta_choi, dim_in, dim_out, &SolverOptions::default())
}

/// `‖N − M‖_⋄`.
pub fn diamond_distance(n: &QChannel, m: &QChannel) -> Result<f64> {
    diamond_distance_with(n, m, &SolverOptions::default())
}

pub fn diamond_distance_with(n: &QChannel, m: &QChannel, opts: &SolverOptions) -> Result<f64> {
    if n.dim_in() != m.dim_in() || n.dim_out() != m.dim_out() {
        return Err(Error::DimensionMismatch(format!(
            "channels {} -> {} and {} -> {} differ in shape",
            n.dim_in(),
            n.dim_out(),
            m.dim_in(),
            m.dim_out()
        )));
    }
    diamond_norm_with(&(n.choi() - m.choi()), n.dim_in(), n.dim_out(), opts)
}

fn trivial_solution() -> SdpSolution {
    SdpSolution {
        status: crate::sdp::SdpStatus::Optimal,
        primal_value: 1.0,
        dual_value: 1.0,
        primal_point: Vec::new(),
        dual_vector: Vec::new(),
        iterations: 0,
        primal_residual: 0.0,
        dual_residual: 0.0,
        relative_gap: 0.0,
    }
}
