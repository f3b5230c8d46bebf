"""Independent dense reference implementations used by the tests."""
import numpy as np
import scipy.linalg as la

X = np.array([[0.0, 1.0], [1.0, 0.0]])
Z = np.diag([1.0, -1.0])
I2 = np.eye(2)


def site_op(op, i, n):
    # little-endian: site i is bit i, so it sits at kron position n-1-i
    out = np.ones((1, 1))
    for k in range(n - 1, -1, -1):
        out = np.kron(out, op if k == i else I2)
    return out


def dense_ha(J):
    n = J.shape[0]
    H = np.zeros((2 ** n, 2 ** n))
    for i in range(n):
        for j in range(i + 1, n):
            H += J[i, j] * site_op(Z, i, n) @ site_op(Z, j, n)
    return H


def dense_hb(n):
    return sum(site_op(X, i, n) for i in range(n))


def dense_h(J, B):
    return dense_ha(J) + B * dense_hb(J.shape[0])


def brute_diagonal(J):
    n = J.shape[0]
    out = np.zeros(2 ** n)
    for z in range(2 ** n):
        s = [1 - 2 * ((z >> i) & 1) for i in range(n)]
        out[z] = sum(J[i, j] * s[i] * s[j] for i in range(n) for j in range(i + 1, n))
    return out


def mte_oracle(J, psi, lambdas, fields):
    for lam, B in zip(lambdas, fields):
        psi = la.expm(-1j * lam * dense_h(J, B)) @ psi
    return psi


def qaoa_oracle(J, psi, gammas, betas):
    HA, HB = dense_ha(J), dense_hb(J.shape[0])
    for g, b in zip(gammas, betas):
        psi = la.expm(-1j * b * HB) @ (la.expm(-1j * g * HA) @ psi)
    return psi


def central_difference(f, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = h
        out[k] = (f(x + e) - f(x - e)) / (2 * h)
    return out


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)
