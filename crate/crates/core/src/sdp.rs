//! Small dense semidefinite programs over Hermitian blocks.
//!
//! Problems are stated over a block-diagonal Hermitian variable `X` with
//! real linear functionals:
//!
//! ```text
//! minimize    f_0(X)
//! subject to  f_k(X) = b_k,   k = 1..m
//!             X_b ⪰ 0 for every block b
//! ```
//!
//! Each complex block of size `n` is solved through its real `2n x 2n`
//! embedding `[[Re X, −Im X], [Im X, Re X]]`. The solver is a primal-dual
//! path-following method with the HKM search direction and Mehrotra
//! predictor-corrector steps.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, HERMITIAN_TOL};

/// One term `Re(coeff · X_block[row, col])` of a linear functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub coeff: C64,
}

/// A real linear functional on block-diagonal Hermitian matrices, the sum of
/// its terms.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearFunctional {
    terms: Vec<Term>,
}

impl LinearFunctional {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `Re(coeff · X[row, col])`.
    pub fn push(&mut self, block: usize, row: usize, col: usize, coeff: C64) {
        self.terms.push(Term {
            block,
            row,
            col,
            coeff,
        });
    }

    /// Adds `w · Re X[row, col]`.
    pub fn add_re(&mut self, block: usize, row: usize, col: usize, w: f64) {
        self.push(block, row, col, C64::new(w, 0.0));
    }

    /// Adds `w · Im X[row, col]`.
    pub fn add_im(&mut self, block: usize, row: usize, col: usize, w: f64) {
        self.push(block, row, col, C64::new(0.0, -w));
    }

    /// Adds `w · Tr X_block` for a block of dimension `dim`.
    pub fn add_trace(&mut self, block: usize, dim: usize, w: f64) {
        for i in 0..dim {
            self.add_re(block, i, i, w);
        }
    }

    /// Adds `Re Tr(H X_block)` for a dense coefficient matrix `H`.
    pub fn add_dense(&mut self, block: usize, h: &ComplexMatrix) {
        for r in 0..h.rows() {
            for c in 0..h.cols() {
                let v = h[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    // Tr(H X) = Σ H[r,c] X[c,r]
                    self.push(block, c, r, v);
                }
            }
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn evaluate(&self, blocks: &[ComplexMatrix]) -> f64 {
        self.terms
            .iter()
            .map(|t| (t.coeff * blocks[t.block][(t.row, t.col)]).re)
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    blocks: Vec<usize>,
    objective: LinearFunctional,
    constraints: Vec<(LinearFunctional, f64)>,
}

impl SdpProblem {
    /// A problem over Hermitian blocks of the given dimensions with a zero
    /// objective and no constraints.
    pub fn new(blocks: Vec<usize>) -> Self {
        Self {
            blocks,
            objective: LinearFunctional::new(),
            constraints: Vec::new(),
        }
    }

    pub fn set_objective(&mut self, f: LinearFunctional) {
        self.objective = f;
    }

    pub fn add_constraint(&mut self, f: LinearFunctional, rhs: f64) {
        self.constraints.push((f, rhs));
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn objective(&self) -> &LinearFunctional {
        &self.objective
    }

    pub fn constraints(&self) -> &[(LinearFunctional, f64)] {
        &self.constraints
    }

    fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() || self.blocks.contains(&0) {
            return Err(Error::InconsistentProblem(
                "block dimensions must be positive".into(),
            ));
        }
        let check = |f: &LinearFunctional, what: &str| -> Result<()> {
            for t in &f.terms {
                let dim = *self.blocks.get(t.block).ok_or_else(|| {
                    Error::InconsistentProblem(format!(
                        "{what} refers to missing block {}",
                        t.block
                    ))
                })?;
                if t.row >= dim || t.col >= dim {
                    return Err(Error::InconsistentProblem(format!(
                        "{what} entry ({}, {}) outside block {} of dimension {dim}",
                        t.row, t.col, t.block
                    )));
                }
                if !t.coeff.re.is_finite() || !t.coeff.im.is_finite() {
                    return Err(Error::InconsistentProblem(format!(
                        "{what} has a non-finite coefficient"
                    )));
                }
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for (k, (f, b)) in self.constraints.iter().enumerate() {
            check(f, &format!("constraint {k}"))?;
            if !b.is_finite() {
                return Err(Error::InconsistentProblem(format!(
                    "constraint {k} has a non-finite bound"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Optimal,
    MaxIterations,
    Infeasible,
    /// The Newton system or a slack factorization broke down.
    NumericalFailure,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub primal_value: f64,
    pub dual_value: f64,
    /// One Hermitian matrix per block.
    pub primal_point: Vec<ComplexMatrix>,
    /// Equality multipliers `y`.
    pub dual_vector: Vec<f64>,
    pub iterations: usize,
    /// `‖b − A(X)‖₂ / (1 + ‖b‖₂)`.
    pub primal_residual: f64,
    /// `‖C − A*(y) − Z‖_F / (1 + ‖C‖_F)`.
    pub dual_residual: f64,
    /// `|primal − dual| / (1 + |primal|)`.
    pub relative_gap: f64,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }

    /// Smallest eigenvalue over the blocks of the primal point.
    pub fn primal_min_eigenvalue(&self) -> f64 {
        self.primal_point
            .iter()
            .map(|b| {
                crate::linalg::herm_eigenvalues(b)
                    .map(|e| e[0])
                    .unwrap_or(f64::NEG_INFINITY)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Real symmetric image `[[Re h, −Im h], [Im h, Re h]]` of a Hermitian matrix.
pub fn complex_to_real_embedding(h: &ComplexMatrix) -> Result<DMatrix<f64>> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let dev = h.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = h.rows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let z = h[(r, c)];
            out[(r, c)] = z.re;
            out[(r + n, c + n)] = z.re;
            out[(r, c + n)] = -z.im;
            out[(r + n, c)] = z.im;
        }
    }
    Ok(out)
}

/// Inverse of [`complex_to_real_embedding`]; averages the redundant copies,
/// so it also projects an arbitrary real matrix onto the embedded subspace.
pub fn real_to_complex(w: &DMatrix<f64>) -> ComplexMatrix {
    let n = w.nrows() / 2;
    ComplexMatrix::from_fn(n, n, |r, c| {
        C64::new(
            0.5 * (w[(r, c)] + w[(r + n, c + n)]),
            0.5 * (w[(r + n, c)] - w[(r, c + n)]),
        )
    })
}

/// A symmetric real matrix as explicit `(block, row, col, value)` entries.
#[derive(Debug, Clone, Default)]
struct SparseSym {
    entries: Vec<(usize, usize, usize, f64)>,
}

impl SparseSym {
    /// Real coefficient matrix `½ emb(H)` with `H` the Hermitian part of the
    /// functional's coefficient matrix, so that `⟨A, emb(X)⟩ = f(X)`.
    fn from_functional(f: &LinearFunctional, dims: &[usize]) -> Self {
        let mut acc: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
        let mut add = |b: usize, r: usize, c: usize, v: f64| {
            if v != 0.0 {
                *acc.entry((b, r, c)).or_insert(0.0) += v;
            }
        };
        for t in &f.terms {
            let n = dims[t.block];
            // H gets c/2 at (col,row) and conj(c)/2 at (row,col); A = emb(H)/2.
            for (a, b, h) in [
                (t.col, t.row, t.coeff * 0.5),
                (t.row, t.col, t.coeff.conj() * 0.5),
            ] {
                add(t.block, a, b, 0.5 * h.re);
                add(t.block, a + n, b + n, 0.5 * h.re);
                add(t.block, a, b + n, -0.5 * h.im);
                add(t.block, a + n, b, 0.5 * h.im);
            }
        }
        Self {
            entries: acc
                .into_iter()
                .filter(|(_, v)| *v != 0.0)
                .map(|((b, r, c), v)| (b, r, c, v))
                .collect(),
        }
    }

    fn dot(&self, w: &[DMatrix<f64>]) -> f64 {
        self.entries
            .iter()
            .map(|&(b, r, c, v)| v * w[b][(r, c)])
            .sum()
    }

    fn scatter_into(&self, scale: f64, w: &mut [DMatrix<f64>]) {
        for &(b, r, c, v) in &self.entries {
            w[b][(r, c)] += scale * v;
        }
    }

    fn block_entries(&self, block: usize) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries
            .iter()
            .filter(move |e| e.0 == block)
            .map(|&(_, r, c, v)| (r, c, v))
    }
}

/// `(row, col, value)` of one nonzero in a real block.
type Entry = (usize, usize, f64);

struct RealProblem {
    dims: Vec<usize>,
    c: Vec<DMatrix<f64>>,
    a: Vec<SparseSym>,
    b: DVector<f64>,
    /// Per block, the constraints touching it together with their entries.
    by_block: Vec<Vec<(usize, Vec<Entry>)>>,
}

impl RealProblem {
    fn from_problem(p: &SdpProblem) -> Self {
        let dims: Vec<usize> = p.blocks.iter().map(|n| 2 * n).collect();
        let obj = SparseSym::from_functional(&p.objective, &p.blocks);
        let mut c: Vec<DMatrix<f64>> = dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        obj.scatter_into(1.0, &mut c);
        let a: Vec<SparseSym> = p
            .constraints
            .iter()
            .map(|(f, _)| SparseSym::from_functional(f, &p.blocks))
            .collect();
        let b = DVector::from_iterator(a.len(), p.constraints.iter().map(|(_, b)| *b));
        let by_block = (0..dims.len())
            .map(|blk| {
                a.iter()
                    .enumerate()
                    .filter_map(|(k, ak)| {
                        let e: Vec<_> = ak.block_entries(blk).collect();
                        (!e.is_empty()).then_some((k, e))
                    })
                    .collect()
            })
            .collect();
        Self {
            dims,
            c,
            a,
            b,
            by_block,
        }
    }

    fn m(&self) -> usize {
        self.a.len()
    }

    fn apply_a(&self, w: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.a.iter().map(|ak| ak.dot(w)))
    }

    fn apply_adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out = zeros_like(&self.dims);
        for (ak, &yk) in self.a.iter().zip(y.iter()) {
            ak.scatter_into(yk, &mut out);
        }
        out
    }

    /// Schur complement `M_ij = Tr(A_i X A_j Z⁻¹)`.
    fn schur(&self, x: &[DMatrix<f64>], zinv: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.m();
        let columns: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let mut col = vec![0.0; m];
                for (blk, list) in self.by_block.iter().enumerate() {
                    let Some((_, aj)) = list.iter().find(|(k, _)| *k == j) else {
                        continue;
                    };
                    let n = self.dims[blk];
                    let (xb, zb) = (&x[blk], &zinv[blk]);
                    let block_nnz: usize = list.iter().map(|(_, e)| e.len()).sum();
                    if n * n <= block_nnz {
                        // G = X A_j Z⁻¹, then M_ij = Σ_{(a,b)∈A_i} v G[b,a]
                        let mut g = DMatrix::<f64>::zeros(n, n);
                        for &(r, c, v) in aj {
                            for col_a in 0..n {
                                let zv = v * zb[(c, col_a)];
                                if zv == 0.0 {
                                    continue;
                                }
                                for row_b in 0..n {
                                    g[(row_b, col_a)] += xb[(row_b, r)] * zv;
                                }
                            }
                        }
                        for (i, ai) in list {
                            col[*i] += ai.iter().map(|&(a, b, v)| v * g[(b, a)]).sum::<f64>();
                        }
                    } else {
                        for (i, ai) in list {
                            let mut s = 0.0;
                            for &(a, b, vi) in ai {
                                for &(r, c, vj) in aj {
                                    s += vi * vj * xb[(b, r)] * zb[(c, a)];
                                }
                            }
                            col[*i] += s;
                        }
                    }
                }
                col
            })
            .collect();
        let mut mat = DMatrix::from_fn(m, m, |i, j| columns[j][i]);
        let sym = (&mat + mat.transpose()) * 0.5;
        mat.copy_from(&sym);
        mat
    }
}

fn zeros_like(dims: &[usize]) -> Vec<DMatrix<f64>> {
    dims.iter().map(|&n| DMatrix::zeros(n, n)).collect()
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn frob(a: &[DMatrix<f64>]) -> f64 {
    inner(a, a).sqrt()
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = (&*m + m.transpose()) * 0.5;
    m.copy_from(&t);
}

/// Largest `α` with `X + α D ⪰ 0`, given the Cholesky factor of `X`.
fn max_step(chol: &[Cholesky<f64, nalgebra::Dyn>], d: &[DMatrix<f64>]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (ch, db) in chol.iter().zip(d) {
        let l = ch.l();
        let Some(linv) = l.clone().try_inverse() else {
            return 0.0;
        };
        let mut w = &linv * db * linv.transpose();
        symmetrize(&mut w);
        let min = SymmetricEigen::new(w).eigenvalues.min();
        if min < 0.0 {
            alpha = alpha.min(-1.0 / min);
        }
    }
    alpha
}

fn cholesky_all(m: &[DMatrix<f64>]) -> Option<Vec<Cholesky<f64, nalgebra::Dyn>>> {
    m.iter().map(|b| Cholesky::new(b.clone())).collect()
}

fn solve_spd(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if m.nrows() == 0 {
        return Some(DVector::zeros(0));
    }
    if let Some(ch) = Cholesky::new(m.clone()) {
        return Some(ch.solve(rhs));
    }
    let scale = m.diagonal().amax().max(1e-300);
    for shift in [1e-14, 1e-12, 1e-10] {
        let reg = m + DMatrix::identity(m.nrows(), m.ncols()) * (shift * scale);
        if let Some(ch) = Cholesky::new(reg) {
            return Some(ch.solve(rhs));
        }
    }
    m.clone().lu().solve(rhs)
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    dy: DVector<f64>,
    dz: Vec<DMatrix<f64>>,
}

/// Solves an SDP to the requested relative tolerance.
pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    p.validate()?;
    let rp = RealProblem::from_problem(p);
    let dims = rp.dims.clone();
    let n_total: usize = dims.iter().sum();
    let m = rp.m();

    let norm_c = frob(&rp.c);
    let norm_b = rp.b.norm();
    let a_norms: Vec<f64> =
        rp.a.iter()
            .map(|a| a.entries.iter().map(|e| e.3 * e.3).sum::<f64>().sqrt())
            .collect();

    let sqrt_n = (n_total as f64).sqrt();
    let xi = a_norms
        .iter()
        .zip(rp.b.iter())
        .map(|(an, bk)| n_total as f64 * (1.0 + bk.abs()) / (1.0 + an))
        .fold(10f64.max(sqrt_n), f64::max);
    let eta = a_norms
        .iter()
        .copied()
        .fold(10f64.max(sqrt_n).max(norm_c), f64::max);

    let mut x: Vec<DMatrix<f64>> = dims.iter().map(|&n| DMatrix::identity(n, n) * xi).collect();
    let mut z: Vec<DMatrix<f64>> = dims
        .iter()
        .map(|&n| DMatrix::identity(n, n) * eta)
        .collect();
    let mut y = DVector::<f64>::zeros(m);

    let gamma = 0.95;
    let mut status = SdpStatus::MaxIterations;
    let mut iterations = 0;
    let (mut pinf, mut dinf, mut gap): (f64, f64, f64);
    let (mut pobj, mut dobj): (f64, f64);

    loop {
        let ax = rp.apply_a(&x);
        let r_p = &rp.b - &ax;
        let aty = rp.apply_adjoint(&y);
        let r_d: Vec<DMatrix<f64>> =
            rp.c.iter()
                .zip(&aty)
                .zip(&z)
                .map(|((c, a), zb)| c - a - zb)
                .collect();
        pobj = inner(&rp.c, &x);
        dobj = rp.b.dot(&y);
        pinf = r_p.norm() / (1.0 + norm_b);
        dinf = frob(&r_d) / (1.0 + norm_c);
        gap = (pobj - dobj).abs() / (1.0 + pobj.abs());
        let mu = inner(&x, &z) / n_total as f64;

        if pinf < opts.tolerance && dinf < opts.tolerance && gap < opts.tolerance {
            status = SdpStatus::Optimal;
            break;
        }
        if mu < 1e-14 * (1.0 + pobj.abs()) && pinf > 1e-6 {
            status = SdpStatus::Infeasible;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;

        let (Some(xchol), Some(zchol)) = (cholesky_all(&x), cholesky_all(&z)) else {
            status = SdpStatus::NumericalFailure;
            break;
        };
        let zinv: Vec<DMatrix<f64>> = zchol.iter().map(|c| c.inverse()).collect();
        let schur = rp.schur(&x, &zinv);
        let x_rd_zinv: Vec<DMatrix<f64>> = x
            .iter()
            .zip(&r_d)
            .zip(&zinv)
            .map(|((xb, rd), zi)| xb * rd * zi)
            .collect();
        let a_x_rd_zinv = rp.apply_a(&x_rd_zinv);

        let direction = |target: f64, corr: Option<&[DMatrix<f64>]>| -> Option<Direction> {
            // Rc Z⁻¹ with Rc = target I − XZ − corr
            let rc_zinv: Vec<DMatrix<f64>> = (0..dims.len())
                .map(|b| {
                    let mut t = &zinv[b] * target - &x[b];
                    if let Some(cr) = corr {
                        t -= &cr[b] * &zinv[b];
                    }
                    t
                })
                .collect();
            let rhs = &r_p - rp.apply_a(&rc_zinv) + &a_x_rd_zinv;
            let dy = solve_spd(&schur, &rhs)?;
            let atdy = rp.apply_adjoint(&dy);
            let dz: Vec<DMatrix<f64>> = r_d.iter().zip(&atdy).map(|(rd, a)| rd - a).collect();
            let dx: Vec<DMatrix<f64>> = (0..dims.len())
                .map(|b| {
                    let mut d = &rc_zinv[b] - &x[b] * &dz[b] * &zinv[b];
                    symmetrize(&mut d);
                    d
                })
                .collect();
            if dy.iter().any(|v| !v.is_finite()) {
                return None;
            }
            Some(Direction { dx, dy, dz })
        };

        let Some(pred) = direction(0.0, None) else {
            status = SdpStatus::NumericalFailure;
            break;
        };
        let ap = max_step(&xchol, &pred.dx).min(1.0);
        let ad = max_step(&zchol, &pred.dz).min(1.0);
        let x_aff: Vec<DMatrix<f64>> = x.iter().zip(&pred.dx).map(|(a, d)| a + d * ap).collect();
        let z_aff: Vec<DMatrix<f64>> = z.iter().zip(&pred.dz).map(|(a, d)| a + d * ad).collect();
        let mu_aff = inner(&x_aff, &z_aff) / n_total as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let corr: Vec<DMatrix<f64>> = pred.dx.iter().zip(&pred.dz).map(|(a, b)| a * b).collect();
        let Some(step) = direction(sigma * mu, Some(&corr)) else {
            status = SdpStatus::NumericalFailure;
            break;
        };
        let ap = (gamma * max_step(&xchol, &step.dx)).min(1.0);
        let ad = (gamma * max_step(&zchol, &step.dz)).min(1.0);
        for b in 0..dims.len() {
            x[b] += &step.dx[b] * ap;
            z[b] += &step.dz[b] * ad;
            symmetrize(&mut x[b]);
            symmetrize(&mut z[b]);
        }
        y += &step.dy * ad;
    }

    Ok(SdpSolution {
        status,
        primal_value: pobj,
        dual_value: dobj,
        primal_point: x.iter().map(real_to_complex).collect(),
        dual_vector: y.iter().copied().collect(),
        iterations,
        primal_residual: pinf,
        dual_residual: dinf,
        relative_gap: gap,
    })
}
