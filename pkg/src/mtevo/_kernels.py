"""Numba kernels for the Krylov exponential.

The generator is K = diag(ha) + B * hb with hb a real symmetric CSR matrix.
``lanczos_expmv`` returns exp(-i tau K) u and, on request, its derivative
with respect to B obtained by differentiating the Lanczos recurrence
(tangent mode) together with the small tridiagonal exponential.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def csr_matvec(indptr, indices, data, v, out):
    for r in range(indptr.shape[0] - 1):
        ar = 0.0
        ai = 0.0
        for k in range(indptr[r], indptr[r + 1]):
            x = v[indices[k]]
            ar += data[k] * x.real
            ai += data[k] * x.imag
        out[r] = complex(ar, ai)


@njit(cache=True, fastmath=True)
def _apply_k(ha, indptr, indices, data, B, v, hv, kv):
    """hv = hb v, kv = ha v + B hv; returns Re <v|kv> and Re <v|hv>."""
    # complex vectors are read and written as interleaved float pairs
    x = v.view(np.float64)
    h = hv.view(np.float64)
    kk = kv.view(np.float64)
    vkv = 0.0
    vhv = 0.0
    for r in range(indptr.shape[0] - 1):
        ar = 0.0
        ai = 0.0
        for k in range(indptr[r], indptr[r + 1]):
            c = 2 * indices[k]
            ar += data[k] * x[c]
            ai += data[k] * x[c + 1]
        xr = x[2 * r]
        xi = x[2 * r + 1]
        kr = ha[r] * xr + B * ar
        ki = ha[r] * xi + B * ai
        h[2 * r] = ar
        h[2 * r + 1] = ai
        kk[2 * r] = kr
        kk[2 * r + 1] = ki
        vkv += xr * kr + xi * ki
        vhv += xr * ar + xi * ai
    return vkv, vhv


@njit(cache=True, fastmath=True)
def _apply_k2(ha, indptr, indices, data, B, v, dv, hv, kv, hdv, kdv):
    """_apply_k on v and dv in one sweep over the matrix."""
    x = v.view(np.float64)
    y = dv.view(np.float64)
    h = hv.view(np.float64)
    kk = kv.view(np.float64)
    hd = hdv.view(np.float64)
    kd = kdv.view(np.float64)
    vkv = 0.0
    vhv = 0.0
    for r in range(indptr.shape[0] - 1):
        ar = 0.0
        ai = 0.0
        br = 0.0
        bi = 0.0
        for k in range(indptr[r], indptr[r + 1]):
            c = 2 * indices[k]
            d = data[k]
            ar += d * x[c]
            ai += d * x[c + 1]
            br += d * y[c]
            bi += d * y[c + 1]
        xr = x[2 * r]
        xi = x[2 * r + 1]
        kr = ha[r] * xr + B * ar
        ki = ha[r] * xi + B * ai
        h[2 * r] = ar
        h[2 * r + 1] = ai
        kk[2 * r] = kr
        kk[2 * r + 1] = ki
        vkv += xr * kr + xi * ki
        vhv += xr * ar + xi * ai
        hd[2 * r] = br
        hd[2 * r + 1] = bi
        kd[2 * r] = ha[r] * y[2 * r] + B * br
        kd[2 * r + 1] = ha[r] * y[2 * r + 1] + B * bi
    return vkv, vhv


@njit(cache=True)
def _re_dot(a, b):
    acc = 0.0
    for k in range(a.shape[0]):
        acc += a[k].real * b[k].real + a[k].imag * b[k].imag
    return acc


@njit(cache=True)
def _small_exp(alpha, beta, m, tau):
    """Eigendecomposition of the m x m tridiagonal T and f = exp(-i tau T) e1."""
    T = np.zeros((m, m))
    for k in range(m):
        T[k, k] = alpha[k]
        if k + 1 < m:
            T[k, k + 1] = beta[k]
            T[k + 1, k] = beta[k]
    theta, Q = np.linalg.eigh(T)
    f = np.zeros(m, dtype=np.complex128)
    for a in range(m):
        c = np.exp(-1j * tau * theta[a]) * Q[0, a]
        for k in range(m):
            f[k] += Q[k, a] * c
    return theta, Q, f


@njit(cache=True)
def lanczos_expmv(ha, indptr, indices, data, B, tau, u, tol, m_max, want_tangent, m_check=4):
    """exp(-i tau K) u by Lanczos with adaptive subspace size.

    Returns (y, dy_dB, m, err_estimate, converged).  dy_dB is all zeros when
    ``want_tangent`` is False.  The a posteriori error estimate is evaluated
    from subspace size ``m_check`` on, every second iteration.
    """
    d = u.shape[0]
    y = np.zeros(d, dtype=np.complex128)
    dy = np.zeros(d, dtype=np.complex128)
    beta0 = np.sqrt(_re_dot(u, u))
    if beta0 == 0.0 or tau == 0.0:
        y[:] = u
        return y, dy, 0, 0.0, True

    V = np.empty((m_max + 1, d), dtype=np.complex128)
    alpha = np.zeros(m_max)
    beta = np.zeros(m_max)
    nt = m_max + 1 if want_tangent else 1
    dV = np.zeros((nt, d), dtype=np.complex128)
    dalpha = np.zeros(m_max)
    dbeta = np.zeros(m_max)
    hv = np.empty(d, dtype=np.complex128)
    w = np.empty(d, dtype=np.complex128)
    hdv = np.empty(d, dtype=np.complex128)
    kdv = np.empty(d, dtype=np.complex128)
    dw = np.empty(d, dtype=np.complex128)

    inv = 1.0 / beta0
    for k in range(d):
        V[0, k] = u[k] * inv

    check_from = max(2, min(m_check, m_max))
    m = 0
    err = np.inf
    converged = False
    theta = np.zeros(1)
    Q = np.zeros((1, 1))
    f = np.zeros(1, dtype=np.complex128)
    da = 0.0
    for j in range(m_max):
        vj = V[j]
        if want_tangent:
            dvj = dV[j]
            a, vhv = _apply_k2(ha, indptr, indices, data, B, vj, dvj, hv, w, hdv, kdv)
            da = 2.0 * _re_dot(dvj, w) + vhv
            dalpha[j] = da
        else:
            a, vhv = _apply_k(ha, indptr, indices, data, B, vj, hv, w)
        alpha[j] = a
        bb = 0.0
        if j > 0:
            bp = beta[j - 1]
            vp = V[j - 1]
            for k in range(d):
                x = w[k] - a * vj[k] - bp * vp[k]
                w[k] = x
                bb += x.real * x.real + x.imag * x.imag
        else:
            for k in range(d):
                x = w[k] - a * vj[k]
                w[k] = x
                bb += x.real * x.real + x.imag * x.imag
        b = np.sqrt(bb)
        m = j + 1
        breakdown = b < 1e-14 * (abs(a) + 1.0)
        if breakdown or (m >= check_from and (m - check_from) % 2 == 0) or m == m_max:
            theta, Q, f = _small_exp(alpha, beta, m, tau)
            err = beta0 * b * abs(f[m - 1])
            if breakdown or err < tol:
                converged = True
                break
        if m == m_max:
            break
        beta[j] = b
        inv = 1.0 / b
        vn = V[j + 1]
        for k in range(d):
            vn[k] = w[k] * inv
        if want_tangent:
            dvj = dV[j]
            wd = 0.0
            if j > 0:
                dbp = dbeta[j - 1]
                bp = beta[j - 1]
                vp = V[j - 1]
                dvp = dV[j - 1]
                for k in range(d):
                    x = hv[k] + kdv[k] - da * vj[k] - a * dvj[k] - dbp * vp[k] - bp * dvp[k]
                    dw[k] = x
                    wd += w[k].real * x.real + w[k].imag * x.imag
            else:
                for k in range(d):
                    x = hv[k] + kdv[k] - da * vj[k] - a * dvj[k]
                    dw[k] = x
                    wd += w[k].real * x.real + w[k].imag * x.imag
            db = wd * inv
            dbeta[j] = db
            dvn = dV[j + 1]
            for k in range(d):
                dvn[k] = (dw[k] - vn[k] * db) * inv

    for i in range(m):
        c = f[i] * beta0
        vi = V[i]
        for k in range(d):
            y[k] += c * vi[k]

    if want_tangent:
        # Frechet derivative of exp(-i tau T) e1 in direction dT, in the
        # eigenbasis of T (Daleckii-Krein divided differences)
        dT = np.zeros((m, m))
        for k in range(m):
            dT[k, k] = dalpha[k]
            if k + 1 < m:
                dT[k, k + 1] = dbeta[k]
                dT[k + 1, k] = dbeta[k]
        Qt = np.ascontiguousarray(Q.T)
        G = Qt @ dT @ np.ascontiguousarray(Q)
        coef = np.zeros(m, dtype=np.complex128)
        for a in range(m):
            acc = 0j
            for c in range(m):
                x = 0.5 * tau * (theta[a] - theta[c])
                sinc = 1.0 - x * x / 6.0 if abs(x) < 1e-4 else np.sin(x) / x
                acc += G[a, c] * np.exp(-0.5j * tau * (theta[a] + theta[c])) * sinc * Q[0, c]
            coef[a] = -1j * tau * acc
        for i in range(m):
            dfi = 0j
            for a in range(m):
                dfi += Q[i, a] * coef[a]
            cf = f[i] * beta0
            cd = dfi * beta0
            vi = V[i]
            dvi = dV[i]
            for k in range(d):
                dy[k] += cf * dvi[k] + cd * vi[k]
    return y, dy, m, err, converged
