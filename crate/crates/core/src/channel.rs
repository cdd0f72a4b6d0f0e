//! Density matrices, CPTP channels and free super-operations.
//!
//! Choi convention: `J(N) = Σ_ij |i⟩⟨j| ⊗ N(|i⟩⟨j|)`, input factor first and
//! unnormalized, so `Tr_out J = I_in`. Row `(i, a)` of the Choi matrix is
//! `i * dim_out + a`.

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, kron, partial_trace, ComplexMatrix, C64, HERMITIAN_TOL, ONE, ZERO};

/// Tolerance for trace, Hermiticity and positivity of density matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance for trace preservation and complete positivity of channels.
pub const CPTP_TOL: f64 = 1e-9;
/// Kraus operators with smaller Frobenius norm are dropped.
pub const KRAUS_PRUNE: f64 = 1e-12;
/// Choi eigenvalues below this are dropped when recovering Kraus operators.
pub const CHOI_EIG_CUTOFF: f64 = 1e-12;
const FROM_CHOI_TRACE_TOL: f64 = 1e-8;

/// A validated density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct QState {
    matrix: ComplexMatrix,
}

impl QState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let dev = matrix.hermitian_deviation();
        if dev > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let matrix = matrix.hermitian_part();
        let min = herm_eig(&matrix)?.min_eigenvalue();
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn pure(v: &[C64]) -> Result<Self> {
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if v.is_empty() || norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(Error::InvalidState(
                "pure state needs a nonzero vector".into(),
            ));
        }
        let n = norm_sq.sqrt();
        let u: Vec<C64> = v.iter().map(|z| z / n).collect();
        Ok(Self {
            matrix: ComplexMatrix::outer(&u, &u).hermitian_part(),
        })
    }

    /// `|i⟩⟨i|`.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index {i} out of range for dimension {dim}");
        Self {
            matrix: ComplexMatrix::unit(dim, i, i),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::diagonal(&vec![1.0 / dim as f64; dim]).expect("uniform distribution")
    }

    /// Uniform superposition `Ψ_d = |Ψ⟩⟨Ψ|` with `|Ψ⟩ = Σ_i |i⟩ / √d`.
    pub fn max_coherent(dim: usize) -> Self {
        let amp = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self::pure(&vec![amp; dim]).expect("nonzero vector")
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        if probs.iter().any(|&p| p < -STATE_TOL) {
            return Err(Error::InvalidState("negative probability".into()));
        }
        Self::new(ComplexMatrix::diag_real(probs))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    /// Skips validation; the caller guarantees a density operator.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }
}

/// A CPTP map held as a Kraus list with its Choi matrix cached.
#[derive(Debug, Clone)]
pub struct QChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    choi: ComplexMatrix,
}

impl QChannel {
    pub fn from_kraus(ops: Vec<ComplexMatrix>) -> Result<Self> {
        Self::from_kraus_with_tol(ops, CPTP_TOL)
    }

    fn from_kraus_with_tol(ops: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::InvalidKraus {
            index: 0,
            reason: "empty Kraus list".into(),
        })?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        for (index, k) in ops.iter().enumerate() {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::InvalidKraus {
                    index,
                    reason: format!(
                        "shape {}x{} differs from {dim_out}x{dim_in}",
                        k.rows(),
                        k.cols()
                    ),
                });
            }
            if k.data()
                .iter()
                .any(|z| !z.re.is_finite() || !z.im.is_finite())
            {
                return Err(Error::InvalidKraus {
                    index,
                    reason: "non-finite entry".into(),
                });
            }
        }
        let kraus: Vec<ComplexMatrix> = ops
            .into_iter()
            .filter(|k| k.frobenius_norm() >= KRAUS_PRUNE)
            .collect();
        if kraus.is_empty() {
            return Err(Error::NotCptp("every Kraus operator is zero".into()));
        }

        let mut sum = ComplexMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim_in));
        if dev > tol {
            return Err(Error::NotCptp(format!(
                "sum of K†K deviates from identity by {dev:.3e}"
            )));
        }

        let choi = choi_from_kraus(&kraus, dim_in, dim_out);
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
            choi,
        })
    }

    /// Recovers a Kraus representation from the spectral decomposition of `j`.
    pub fn from_choi(j: &ComplexMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        let n = dim_in * dim_out;
        if j.rows() != n || j.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix must be {n}x{n}, got {}x{}",
                j.rows(),
                j.cols()
            )));
        }
        let dev = j.hermitian_deviation();
        if dev > CPTP_TOL {
            return Err(Error::NotCptp(format!(
                "Choi matrix not Hermitian ({dev:.3e})"
            )));
        }
        let j = j.hermitian_part();
        let reduced = partial_trace(&j, &[dim_in, dim_out], &[0])?;
        let tp_dev = reduced.max_abs_diff(&ComplexMatrix::identity(dim_in));
        if tp_dev > FROM_CHOI_TRACE_TOL {
            return Err(Error::NotCptp(format!(
                "partial trace of Choi matrix deviates from identity by {tp_dev:.3e}"
            )));
        }
        let eig = herm_eig(&j)?;
        if eig.min_eigenvalue() < -CPTP_TOL {
            return Err(Error::NotCptp(format!(
                "Choi matrix has negative eigenvalue {:.3e}",
                eig.min_eigenvalue()
            )));
        }
        let kraus: Vec<ComplexMatrix> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > CHOI_EIG_CUTOFF)
            .map(|(k, &l)| {
                let s = l.sqrt();
                ComplexMatrix::from_fn(dim_out, dim_in, |a, i| {
                    eig.eigenvectors[(i * dim_out + a, k)] * s
                })
            })
            .collect();
        Self::from_kraus_with_tol(kraus, FROM_CHOI_TRACE_TOL)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_kraus(vec![ComplexMatrix::identity(dim)]).expect("identity is CPTP")
    }

    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        if !u.is_unitary(HERMITIAN_TOL) {
            let dev = if u.is_square() {
                (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(u.cols()))
            } else {
                f64::INFINITY
            };
            return Err(Error::NotUnitary(dev));
        }
        Self::from_kraus(vec![u.clone()])
    }

    /// The replacement channel `ρ ↦ Tr(ρ) σ` on a `dim_in`-dimensional input.
    pub fn constant(dim_in: usize, sigma: &QState) -> Result<Self> {
        let eig = herm_eig(sigma.matrix())?;
        let dim_out = sigma.dim();
        let mut kraus = Vec::new();
        for (k, &p) in eig.eigenvalues.iter().enumerate() {
            if p <= CHOI_EIG_CUTOFF {
                continue;
            }
            let v = eig.eigenvectors.col(k);
            for i in 0..dim_in {
                kraus.push(ComplexMatrix::from_fn(dim_out, dim_in, |a, c| {
                    if c == i {
                        v[a] * p.sqrt()
                    } else {
                        ZERO
                    }
                }));
            }
        }
        Self::from_kraus(kraus)
    }

    /// Completely dephasing channel `Δ` in dimension `dim`.
    pub fn dephasing(dim: usize) -> Self {
        let kraus = (0..dim).map(|i| ComplexMatrix::unit(dim, i, i)).collect();
        Self::from_kraus(kraus).expect("projectors form a channel")
    }

    /// Conjugation by the real rotation `[[cos θ, −sin θ], [sin θ, cos θ]]`.
    pub fn rotation(theta: f64) -> Self {
        Self::unitary(&rotation_unitary(theta)).expect("rotations are unitary")
    }

    /// Partial trace over the last factor of `dims`, as a channel.
    pub fn trace_out_last(dim_keep: usize, dim_discard: usize) -> Self {
        let kraus = (0..dim_discard)
            .map(|e| {
                ComplexMatrix::from_fn(dim_keep, dim_keep * dim_discard, |r, c| {
                    if c == r * dim_discard + e {
                        ONE
                    } else {
                        ZERO
                    }
                })
            })
            .collect();
        Self::from_kraus(kraus).expect("partial trace is CPTP")
    }

    /// `ρ ↦ ρ ⊗ |0⟩⟨0|` appending a `dim_anc`-dimensional register.
    pub fn append_zero_ancilla(dim: usize, dim_anc: usize) -> Self {
        let k = ComplexMatrix::from_fn(dim * dim_anc, dim, |r, c| {
            if r == c * dim_anc {
                ONE
            } else {
                ZERO
            }
        });
        Self::from_kraus(vec![k]).expect("isometry is CPTP")
    }

    /// Convex combination `Σ w_k N_k`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &QChannel)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?
            .1;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "mixture weights must be a probability vector (sum {total})"
            )));
        }
        let mut kraus = Vec::new();
        for (w, n) in parts {
            if n.dim_in != first.dim_in || n.dim_out != first.dim_out {
                return Err(Error::DimensionMismatch(
                    "mixture components differ in shape".into(),
                ));
            }
            kraus.extend(n.kraus.iter().map(|k| k.scale_real(w.sqrt())));
        }
        Self::from_kraus(kraus)?.compressed()
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn apply(&self, rho: &QState) -> Result<QState> {
        let out = self.apply_matrix(rho.matrix())?;
        QState::new(out)
    }

    /// Linear action on an arbitrary `dim_in x dim_in` operator.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.dim_in || m.cols() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "channel input dimension is {}, operator is {}x{}",
                self.dim_in,
                m.rows(),
                m.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = &out + &k.conjugate(m)?;
        }
        Ok(out)
    }

    /// Action computed from the Choi matrix: `N(X) = Tr_in[(Xᵀ ⊗ I) J]`.
    pub fn apply_via_choi(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.dim_in || m.cols() != self.dim_in {
            return Err(Error::DimensionMismatch(
                "operator does not match channel input".into(),
            ));
        }
        let d = self.dim_out;
        Ok(ComplexMatrix::from_fn(d, d, |a, b| {
            let mut s = ZERO;
            for i in 0..self.dim_in {
                for j in 0..self.dim_in {
                    s += m[(i, j)] * self.choi[(i * d + a, j * d + b)];
                }
            }
            s
        }))
    }

    /// `self ⊗ other` with Kraus set `{K_i ⊗ L_j}`.
    pub fn tensor(&self, other: &Self) -> Self {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|k| other.kraus.iter().map(move |l| kron(k, l)))
            .collect();
        Self::from_kraus(kraus)
            .and_then(Self::compressed)
            .expect("tensor product of channels is CPTP")
    }

    pub fn tensor_power(&self, copies: usize) -> Self {
        assert!(copies >= 1);
        (1..copies).fold(self.clone(), |acc, _| acc.tensor(self))
    }

    /// `after ∘ before`.
    pub fn compose(after: &Self, before: &Self) -> Result<Self> {
        if before.dim_out != after.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "cannot feed a {}-dimensional output into a {}-dimensional input",
                before.dim_out, after.dim_in
            )));
        }
        let mut kraus = Vec::with_capacity(after.kraus.len() * before.kraus.len());
        for a in &after.kraus {
            for b in &before.kraus {
                kraus.push(a.matmul(b)?);
            }
        }
        Self::from_kraus(kraus)?.compressed()
    }

    /// Replaces an over-complete Kraus list by the minimal one from the Choi
    /// spectrum. Lists already at most `dim_in * dim_out` long are kept.
    pub fn compressed(self) -> Result<Self> {
        if self.kraus.len() <= self.dim_in * self.dim_out {
            return Ok(self);
        }
        Self::from_choi(&self.choi, self.dim_in, self.dim_out)
    }
}

fn choi_from_kraus(kraus: &[ComplexMatrix], dim_in: usize, dim_out: usize) -> ComplexMatrix {
    let n = dim_in * dim_out;
    let mut j = ComplexMatrix::zeros(n, n);
    for k in kraus {
        // vec(K) with row index i * dim_out + a holding K[a][i]
        let v: Vec<C64> = (0..n).map(|r| k[(r % dim_out, r / dim_out)]).collect();
        for r in 0..n {
            if v[r] == ZERO {
                continue;
            }
            for c in 0..n {
                j[(r, c)] += v[r] * v[c].conj();
            }
        }
    }
    j.hermitian_part()
}

/// `[[cos θ, −sin θ], [sin θ, cos θ]] = exp(−iθσ_y)`.
pub fn rotation_unitary(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]]).expect("2x2")
}

/// A super-operation `N ↦ post ∘ (N ⊗ id_anc) ∘ pre`.
///
/// With MIO `pre` and `post` this is a free super-operation of the channel
/// coherence theory; with general channels it is an arbitrary super-channel.
#[derive(Debug, Clone)]
pub struct FreeSuperOp {
    pub pre: QChannel,
    pub post: QChannel,
    pub ancilla_dim: usize,
}

impl FreeSuperOp {
    pub fn new(pre: QChannel, post: QChannel, ancilla_dim: usize) -> Result<Self> {
        if ancilla_dim == 0 {
            return Err(Error::InvalidArgument(
                "ancilla dimension must be positive".into(),
            ));
        }
        if pre.dim_out % ancilla_dim != 0 || post.dim_in % ancilla_dim != 0 {
            return Err(Error::DimensionMismatch(format!(
                "ancilla dimension {ancilla_dim} does not divide pre output {} / post input {}",
                pre.dim_out, post.dim_in
            )));
        }
        Ok(Self {
            pre,
            post,
            ancilla_dim,
        })
    }

    /// The identity super-operation on channels `dim_in -> dim_out`.
    pub fn identity(dim_in: usize, dim_out: usize) -> Self {
        Self {
            pre: QChannel::identity(dim_in),
            post: QChannel::identity(dim_out),
            ancilla_dim: 1,
        }
    }

    pub fn apply(&self, n: &QChannel) -> Result<QChannel> {
        if self.pre.dim_out != n.dim_in * self.ancilla_dim
            || self.post.dim_in != n.dim_out * self.ancilla_dim
        {
            return Err(Error::DimensionMismatch(format!(
                "super-operation expects a channel {} -> {}, got {} -> {}",
                self.pre.dim_out / self.ancilla_dim,
                self.post.dim_in / self.ancilla_dim,
                n.dim_in,
                n.dim_out
            )));
        }
        let middle = n.tensor(&QChannel::identity(self.ancilla_dim));
        QChannel::compose(&self.post, &QChannel::compose(&middle, &self.pre)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::random::{random_channel, random_state, random_unitary, rng_from_seed};
    use std::f64::consts::{FRAC_PI_4, PI};

    fn assert_same_action(a: &QChannel, b: &QChannel, seed: u64, tol: f64) {
        let mut rng = rng_from_seed(seed);
        for _ in 0..10 {
            let rho = random_state(a.dim_in(), &mut rng);
            let x = a.apply_matrix(rho.matrix()).unwrap();
            let y = b.apply_matrix(rho.matrix()).unwrap();
            assert!(
                x.max_abs_diff(&y) < tol,
                "actions differ by {}",
                x.max_abs_diff(&y)
            );
        }
    }

    #[test]
    fn identity_choi_is_unnormalized_bell_projector() {
        let id = QChannel::identity(2);
        let mut expect = ComplexMatrix::zeros(4, 4);
        for &(r, c) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            expect[(r, c)] = ONE;
        }
        assert_eq!(id.choi(), &expect);
    }

    #[test]
    fn dephasing_choi_is_diagonal() {
        let d = QChannel::dephasing(2);
        assert_eq!(d.choi(), &ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn from_kraus_rejects_non_tp() {
        let k = ComplexMatrix::diag_real(&[1.0, 0.5]);
        assert!(matches!(
            QChannel::from_kraus(vec![k]),
            Err(Error::NotCptp(_))
        ));
    }

    #[test]
    fn from_kraus_names_bad_index() {
        let ops = vec![ComplexMatrix::identity(2), ComplexMatrix::zeros(3, 2)];
        match QChannel::from_kraus(ops) {
            Err(Error::InvalidKraus { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn from_kraus_prunes_zero_operators() {
        let ops = vec![ComplexMatrix::identity(2), ComplexMatrix::zeros(2, 2)];
        assert_eq!(QChannel::from_kraus(ops).unwrap().kraus().len(), 1);
    }

    #[test]
    fn choi_round_trips() {
        let id = QChannel::identity(2);
        let back = QChannel::from_choi(id.choi(), 2, 2).unwrap();
        assert_same_action(&id, &back, 1, 1e-9);

        let d = QChannel::dephasing(3);
        let back = QChannel::from_choi(d.choi(), 3, 3).unwrap();
        assert_same_action(&d, &back, 2, 1e-9);

        let mut rng = rng_from_seed(3);
        let n = random_channel(2, 3, 3, &mut rng);
        let back = QChannel::from_choi(n.choi(), 2, 3).unwrap();
        assert_same_action(&n, &back, 4, 1e-9);
    }

    #[test]
    fn from_choi_rejects_invalid() {
        let j = ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.5]);
        assert!(QChannel::from_choi(&j, 2, 2).is_err());
        let j = ComplexMatrix::diag_real(&[1.5, -0.5, 0.0, 1.0]);
        assert!(QChannel::from_choi(&j, 2, 2).is_err());
    }

    #[test]
    fn apply_examples() {
        let mut rng = rng_from_seed(5);
        let rho = random_state(2, &mut rng);
        let out = QChannel::identity(2).apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);

        let plus = QState::max_coherent(2);
        let out = QChannel::dephasing(2).apply(&plus).unwrap();
        assert!(
            out.matrix()
                .max_abs_diff(QState::maximally_mixed(2).matrix())
                < 1e-15
        );

        let out = QChannel::rotation(PI / 10.0)
            .apply(&QState::basis(2, 0))
            .unwrap();
        let (s, c) = (PI / 10.0).sin_cos();
        let expect = QState::pure(&[C64::new(c, 0.0), C64::new(s, 0.0)]).unwrap();
        assert!(out.matrix().max_abs_diff(expect.matrix()) < 1e-15);

        assert!(QChannel::identity(3).apply(&rho).is_err());
    }

    #[test]
    fn rotation_examples() {
        assert_same_action(&QChannel::rotation(0.0), &QChannel::identity(2), 6, 1e-15);
        let out = QChannel::rotation(FRAC_PI_4)
            .apply(&QState::basis(2, 0))
            .unwrap();
        assert!(out.matrix().max_abs_diff(QState::max_coherent(2).matrix()) < 1e-15);
    }

    #[test]
    fn constant_channel_outputs_sigma() {
        let psi = QState::max_coherent(2);
        let g = QChannel::constant(2, &psi).unwrap();
        let mut rng = rng_from_seed(7);
        for _ in 0..5 {
            let out = g.apply(&random_state(2, &mut rng)).unwrap();
            assert!(out.matrix().max_abs_diff(psi.matrix()) < 1e-12);
        }
    }

    #[test]
    fn unitary_rejects_non_unitary() {
        let m = ComplexMatrix::diag_real(&[1.0, 2.0]);
        assert!(matches!(QChannel::unitary(&m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn tensor_examples() {
        let id = QChannel::identity(2).tensor(&QChannel::identity(2));
        assert_same_action(&id, &QChannel::identity(4), 8, 1e-15);

        let mut rng = rng_from_seed(9);
        let n = random_channel(2, 2, 2, &mut rng);
        let rho = random_state(2, &mut rng);
        let sigma = random_state(2, &mut rng);
        let nid = n.tensor(&QChannel::identity(2));
        let lhs = nid.apply(&rho.tensor(&sigma)).unwrap();
        let rhs = n.apply(&rho).unwrap().tensor(&sigma);
        assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-12);
    }

    #[test]
    fn tensor_choi_is_permuted_kron() {
        // J(N⊗M)[(i1 i2, a1 a2), (j1 j2, b1 b2)] = J(N)[(i1,a1),(j1,b1)] J(M)[(i2,a2),(j2,b2)]
        let mut rng = rng_from_seed(10);
        let n = random_channel(2, 2, 2, &mut rng);
        let m = random_channel(2, 3, 2, &mut rng);
        let t = n.tensor(&m);
        let (jn, jm, jt) = (n.choi(), m.choi(), t.choi());
        let idx = |i1: usize, i2: usize, a1: usize, a2: usize| ((i1 * 2 + i2) * 2 + a1) * 3 + a2;
        for i1 in 0..2 {
            for i2 in 0..2 {
                for a1 in 0..2 {
                    for a2 in 0..3 {
                        for j1 in 0..2 {
                            for j2 in 0..2 {
                                for b1 in 0..2 {
                                    for b2 in 0..3 {
                                        let lhs = jt[(idx(i1, i2, a1, a2), idx(j1, j2, b1, b2))];
                                        let rhs = jn[(i1 * 2 + a1, j1 * 2 + b1)]
                                            * jm[(i2 * 3 + a2, j2 * 3 + b2)];
                                        assert!((lhs - rhs).norm() < 1e-12);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn compose_examples() {
        let d = QChannel::dephasing(2);
        assert_same_action(&QChannel::compose(&d, &d).unwrap(), &d, 11, 1e-15);

        let mut rng = rng_from_seed(12);
        let u = random_unitary(3, &mut rng);
        let fwd = QChannel::unitary(&u).unwrap();
        let back = QChannel::unitary(&u.adjoint()).unwrap();
        assert_same_action(
            &QChannel::compose(&back, &fwd).unwrap(),
            &QChannel::identity(3),
            13,
            1e-12,
        );

        let a = random_channel(2, 3, 2, &mut rng);
        let b = random_channel(3, 2, 3, &mut rng);
        let ab = QChannel::compose(&b, &a).unwrap();
        for _ in 0..20 {
            let rho = random_state(2, &mut rng);
            let seq = b
                .apply_matrix(&a.apply_matrix(rho.matrix()).unwrap())
                .unwrap();
            assert!(ab.apply_matrix(rho.matrix()).unwrap().max_abs_diff(&seq) < 1e-10);
        }
        assert!(QChannel::compose(&a, &a).is_err());
    }

    #[test]
    fn superop_examples() {
        let mut rng = rng_from_seed(14);
        let n = random_channel(2, 2, 2, &mut rng);
        let same = FreeSuperOp::identity(2, 2).apply(&n).unwrap();
        assert_same_action(&same, &n, 15, 1e-12);

        let delta = QState::diagonal(&[0.3, 0.7]).unwrap();
        let absorb = FreeSuperOp::new(
            QChannel::append_zero_ancilla(2, 2),
            QChannel::constant(4, &delta).unwrap(),
            2,
        )
        .unwrap();
        let out = absorb.apply(&n).unwrap();
        let expect = QChannel::constant(2, &delta).unwrap();
        assert_same_action(&out, &expect, 16, 1e-12);

        assert!(absorb.apply(&QChannel::identity(3)).is_err());
    }

    #[test]
    fn choi_and_kraus_actions_agree() {
        let mut rng = rng_from_seed(17);
        let n = random_channel(3, 2, 4, &mut rng);
        for _ in 0..10 {
            let rho = random_state(3, &mut rng);
            let a = n.apply_matrix(rho.matrix()).unwrap();
            let b = n.apply_via_choi(rho.matrix()).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-9);
        }
    }

    #[test]
    fn state_validation() {
        assert!(QState::new(ComplexMatrix::diag_real(&[0.5, 0.6])).is_err());
        assert!(QState::new(ComplexMatrix::diag_real(&[1.5, -0.5])).is_err());
        assert!(QState::new(pauli::x()).is_err());
        assert!(QState::pure(&[ZERO, ZERO]).is_err());
    }

    #[test]
    fn helper_channels_are_cptp() {
        let t = QChannel::trace_out_last(2, 3);
        assert_eq!((t.dim_in(), t.dim_out()), (6, 2));
        let a = QChannel::append_zero_ancilla(2, 3);
        let rt = QChannel::compose(&t, &a).unwrap();
        assert_same_action(&rt, &QChannel::identity(2), 18, 1e-15);
    }
}
