"""Independent cvxpy evaluation of the max-coherence and diamond-norm programs.

Values printed here are frozen into the Rust test suites.  Run with
`python3 sdp_oracle.py`; requires numpy and cvxpy (CLARABEL or CVXOPT).
"""
import numpy as np
import cvxpy as cp


def choi(kraus, din):
    dout = kraus[0].shape[0]
    J = np.zeros((din * dout, din * dout), dtype=complex)
    for i in range(din):
        for j in range(din):
            E = np.zeros((din, din), dtype=complex)
            E[i, j] = 1
            out = sum(K @ E @ K.conj().T for K in kraus)
            J += np.kron(E, out)
    return J


def c_max(J, din, dout):
    n = din * dout
    K = cp.Variable((n, n), hermitian=True)
    lam = cp.Variable()
    cons = [K - J >> 0]
    for i in range(din):
        for j in range(din):
            s = sum(K[i * dout + a, j * dout + a] for a in range(dout))
            cons.append(s == (lam if i == j else 0))
        for a in range(dout):
            for b in range(dout):
                if a != b:
                    cons.append(K[i * dout + a, i * dout + b] == 0)
    prob = cp.Problem(cp.Minimize(lam), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    return np.log2(lam.value)


def diamond(J, din, dout):
    n = din * dout
    Y0 = cp.Variable((n, n), hermitian=True)
    Y1 = cp.Variable((n, n), hermitian=True)
    t0 = cp.Variable()
    t1 = cp.Variable()

    def ptr(Y):
        return cp.bmat([[sum(Y[i * dout + a, j * dout + a] for a in range(dout))
                         for j in range(din)] for i in range(din)])

    big = cp.bmat([[Y0, -J], [-J.conj().T, Y1]])
    cons = [big >> 0, Y0 >> 0, Y1 >> 0,
            t0 * np.eye(din) - ptr(Y0) >> 0, t1 * np.eye(din) - ptr(Y1) >> 0]
    prob = cp.Problem(cp.Minimize((t0 + t1) / 2), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    return prob.value


def tensor(k1, k2):
    return [np.kron(a, b) for a in k1 for b in k2]


th = np.pi / 10
R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)
psi2 = np.ones((2, 2), dtype=complex) / 2
# constant channel to Psi2: Kraus |v><i| with v = (|0>+|1>)/sqrt2
v = np.array([[1], [1]], dtype=complex) / np.sqrt(2)
gstar = [v @ np.array([[1, 0]]), v @ np.array([[0, 1]])]

print("c_max gstar", c_max(choi(gstar, 2), 2, 2))
print("c_max hadamard", c_max(choi([H], 2), 2, 2))
print("c_max rot pi/10", c_max(choi([R], 2), 2, 2))
print("c_max rot pi/10 x2 per copy", c_max(choi(tensor([R], [R]), 4), 4, 4) / 2)
print("diamond id-X", diamond(choi([I2], 2) - choi([X], 2), 2, 2))
print("diamond id-deph", diamond(choi([I2], 2) - choi([P0, P1], 2), 2, 2))
print("diamond id-H", diamond(choi([I2], 2) - choi([H], 2), 2, 2))
print("diamond id-rot", diamond(choi([I2], 2) - choi([R], 2), 2, 2))
