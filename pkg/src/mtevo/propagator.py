"""State propagation for modulated time evolution and QAOA.

An MTE step is exp(-i lam [H_A + B H_B]); a QAOA layer is
exp(-i beta H_B) exp(-i gamma H_A).  Steps are applied in schedule order,
step 1 first.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .spinmodel import IsingModel, ModelSpace

log = logging.getLogger(__name__)

KRYLOV_TOL = 1e-10
KRYLOV_MAX_DIM = 64
# spectral phase range covered by one Krylov substep
SUBSTEP_PHASE = 36.0
NORM_DRIFT = 1e-12


class KrylovConvergenceError(ArithmeticError):
    def __init__(self, residual: float, tau: float):
        super().__init__(f"Krylov exponential did not converge (residual {residual:.3e}, tau {tau:.3e})")
        self.residual = residual
        self.tau = tau


@dataclass
class Schedule:
    lambdas: np.ndarray
    fields: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lambdas = np.atleast_1d(np.asarray(self.lambdas, dtype=float))
        self.fields = np.atleast_1d(np.asarray(self.fields, dtype=float))
        if self.lambdas.shape != self.fields.shape or self.lambdas.ndim != 1:
            raise ValueError("lambdas and fields must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(self.lambdas)) and np.all(np.isfinite(self.fields))):
            raise ValueError("schedule entries must be finite")

    def __len__(self):
        return len(self.lambdas)

    @property
    def params(self) -> np.ndarray:
        """Flat parameter vector [lambdas..., fields...]."""
        return np.concatenate([self.lambdas, self.fields])

    @classmethod
    def from_params(cls, x, meta=None) -> "Schedule":
        x = np.asarray(x, dtype=float)
        N = len(x) // 2
        return cls(x[:N], x[N:], dict(meta or {}))


@dataclass
class Trajectory:
    states: list

    def __len__(self):
        return len(self.states)

    def __getitem__(self, k):
        return self.states[k]


def initial_state(n: int) -> np.ndarray:
    """Product of |-x> states, the ground state of +sum_i X_i."""
    parity = _popcount_parity(np.arange(1 << n), n)
    return ((1 - 2 * parity) * 2.0 ** (-n / 2)).astype(complex)


def _popcount_parity(z, n):
    p = np.zeros_like(z)
    for i in range(n):
        p ^= (z >> i) & 1
    return p


def _nsites(state: np.ndarray) -> int:
    n = int(state.shape[0]).bit_length() - 1
    if state.ndim != 1 or (1 << n) != state.shape[0]:
        raise ValueError(f"state length {state.shape} is not a power of two")
    return n


def apply_diagonal_phase(state: np.ndarray, gamma: float, model: IsingModel | ModelSpace) -> np.ndarray:
    ha = model.ha if isinstance(model, ModelSpace) else model.diagonal
    state = np.asarray(state)
    if state.shape != ha.shape:
        raise ValueError("state dimension mismatch")
    return state * np.exp(-1j * gamma * ha)


def apply_transverse_rotation(state: np.ndarray, beta: float) -> np.ndarray:
    """prod_i exp(-i beta X_i) on a full-space state."""
    state = np.asarray(state, dtype=complex)
    n = _nsites(state)
    c, s = math.cos(beta), -1j * math.sin(beta)
    out = state.copy()
    for i in range(n):
        v = out.reshape(1 << (n - 1 - i), 2, 1 << i)
        a0 = v[:, 0, :].copy()
        a1 = v[:, 1, :]
        v[:, 0, :] = c * a0 + s * a1
        v[:, 1, :] = c * a1 + s * a0
    return out


def spectral_halfwidth(space: ModelSpace, B: float) -> float:
    """Upper bound on the half-width of the spectrum of H_A + B H_B."""
    return 0.5 * float(np.ptp(space.ha)) + abs(B) * space.hb_norm


def n_substeps(space: ModelSpace, lam: float, B: float) -> int:
    spread = spectral_halfwidth(space, B)
    return max(1, math.ceil(abs(lam) * spread / SUBSTEP_PHASE))


def first_check(space: ModelSpace, tau: float, B: float) -> int:
    """Subspace size at which the Krylov error estimate is first evaluated."""
    return max(4, int(abs(tau) * spectral_halfwidth(space, B)) + 12)


def _krylov(space: ModelSpace, u, tau, B, tol, m_max, tangent, depth=0):
    """List of (tau, state, tangent) pieces; splits tau on non-convergence."""
    hb = space.hb
    m_check = first_check(space, tau, B)
    y, dy, m, err, ok = _kernels.lanczos_expmv(
        space.ha, hb.indptr, hb.indices, hb.data, float(B), float(tau),
        np.ascontiguousarray(u, dtype=np.complex128), tol, m_max, tangent, m_check)
    if ok:
        return [(tau, y, dy if tangent else None)]
    if depth >= 8:
        raise KrylovConvergenceError(err, tau)
    first = _krylov(space, u, tau / 2, B, tol / 2, m_max, tangent, depth + 1)
    return first + _krylov(space, first[-1][1], tau / 2, B, tol / 2, m_max, tangent, depth + 1)


def mte_step(space: ModelSpace, u: np.ndarray, lam: float, B: float, *, tol=KRYLOV_TOL,
             m_max=KRYLOV_MAX_DIM, tangent=False):
    """exp(-i lam (H_A + B H_B)) u in ``space`` coordinates.

    Returns (state, pieces) where pieces lists the Krylov substeps as
    (tau, state_after, d state_after / dB); the last entry of the tangent
    chain is only meaningful combined with the adjoint of later substeps.
    """
    u = np.asarray(u, dtype=np.complex128)
    if lam == 0.0:
        return u.copy(), []
    s = n_substeps(space, lam, B)
    tau = lam / s
    pieces = []
    y = u
    for _ in range(s):
        got = _krylov(space, y, tau, B, tol / s, m_max, tangent)
        pieces.extend(got)
        y = got[-1][1]
    n0 = np.linalg.norm(u)
    drift = abs(np.linalg.norm(y) - n0)
    if drift > NORM_DRIFT:
        log.warning("Krylov norm drift %.2e renormalized (lam=%g, B=%g)", drift, lam, B)
        y = y * (n0 / np.linalg.norm(y))
    return y, pieces


def expmv_step(state, lam: float, B: float, model: IsingModel, tol: float = KRYLOV_TOL,
               m_max: int = KRYLOV_MAX_DIM) -> np.ndarray:
    if tol <= 0:
        raise ValueError("tol must be positive")
    state = np.asarray(state)
    if state.shape != (model.dim,):
        raise ValueError("state dimension mismatch")
    y, _ = mte_step(model.space, state, lam, B, tol=tol, m_max=m_max)
    return y


def evolve_mte_in(space: ModelSpace, state0, schedule: Schedule, record=False, tol=KRYLOV_TOL):
    psi = np.asarray(state0, dtype=np.complex128).copy()
    states = [psi.copy()] if record else None
    for lam, B in zip(schedule.lambdas, schedule.fields):
        psi, _ = mte_step(space, psi, lam, B, tol=tol)
        if record:
            states.append(psi.copy())
    return psi, (Trajectory(states) if record else None)


def evolve_mte(state0, schedule: Schedule, model: IsingModel, record: bool = False, tol: float = KRYLOV_TOL):
    return evolve_mte_in(model.space, state0, schedule, record, tol)


def evolve_qaoa(state0, qaoa, model: IsingModel, record: bool = False):
    """Layers exp(-i beta_j H_B) exp(-i gamma_j H_A), j = 1..p; H_A acts first."""
    psi = np.asarray(state0, dtype=np.complex128).copy()
    states = [psi.copy()] if record else None
    for g, b in zip(qaoa.gammas, qaoa.betas):
        psi = apply_transverse_rotation(apply_diagonal_phase(psi, g, model), b)
        if record:
            states.append(psi.copy())
    return psi, (Trajectory(states) if record else None)
