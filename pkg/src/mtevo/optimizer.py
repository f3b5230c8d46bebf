"""Variational minimisation of the final unscaled energy.

The cost is <psi_f| H(B_target) |psi_f> where psi_f is produced either by
modulated time evolution (parameters [lambda_1..N, B_1..N]) or by QAOA
(parameters [gamma_1..p, beta_1..p]).  Gradients are exact reverse-mode
derivatives; the MTE field derivative comes from the tangent Lanczos kernel.
"""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from . import propagator as prop
from .spinmodel import (IsingModel, ModelSpace, build_sector_basis, ground_state,
                        sector_space)

log = logging.getLogger(__name__)

MODES = ("mte", "qaoa")


def fidelity(state, reference) -> float:
    state = np.asarray(state)
    reference = np.asarray(reference)
    if state.shape != reference.shape:
        raise ValueError("dimension mismatch")
    return float(abs(np.vdot(reference, state)) ** 2)


@dataclass(eq=False)
class Objective:
    """Final-energy cost for one model and one parametrisation.

    ``space`` is where states live during propagation: for MTE the symmetry
    sector of the initial state (dynamics never leave it), for QAOA the full
    2**n space.  ``target`` is the ground state of H(B_target) in the same
    coordinates; ``ground_energy`` its energy.
    """

    space: ModelSpace
    mode: str
    target_field: float
    psi0: np.ndarray
    target: np.ndarray
    ground_energy: float
    tol: float = prop.KRYLOV_TOL
    model: IsingModel | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode == "qaoa" and self.space.basis is not None:
            raise ValueError("QAOA propagation needs the full space")
        self._cache = None

    @classmethod
    def for_model(cls, model: IsingModel, mode: str = "mte", use_sector: bool = True,
                  tol: float = prop.KRYLOV_TOL) -> "Objective":
        e0, gs = ground_state(model)
        psi0 = prop.initial_state(model.n_sites)
        if mode == "mte" and use_sector:
            n = model.n_sites
            sec = build_sector_basis(model, (-1) ** n, 1)
            space = sector_space(model, sec)
        else:
            space = model.space
        return cls(space, mode, model.target_field, space.to_local(psi0),
                   space.to_local(gs), e0, tol, model)

    # -- evaluation ----------------------------------------------------------

    def _split(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or len(x) % 2:
            raise ValueError("parameter vector must have even length")
        N = len(x) // 2
        return x[:N], x[N:]

    def _target_apply(self, psi):
        return self.space.apply(psi, self.target_field)

    def forward(self, x, keep=False):
        """Final state (local coordinates) and, with ``keep``, the tape for the backward pass."""
        a, b = self._split(x)
        psi = self.psi0.copy()
        tape = []
        if self.mode == "mte":
            for lam, B in zip(a, b):
                start = psi
                psi, pieces = prop.mte_step(self.space, psi, lam, B, tol=self.tol)
                if keep:
                    tape.append((start, psi, pieces))
        else:
            for g, beta in zip(a, b):
                phi = prop.apply_diagonal_phase(psi, g, self.space)
                psi = prop.apply_transverse_rotation(phi, beta)
                if keep:
                    tape.append((phi, psi))
        return psi, tape

    def final_state(self, x) -> np.ndarray:
        """Final state in full 2**n coordinates."""
        return self.space.to_full(self.forward(x)[0])

    def energy(self, x) -> float:
        psi, _ = self.forward(x)
        return float(np.vdot(psi, self._target_apply(psi)).real)

    def fidelity(self, x) -> float:
        psi, _ = self.forward(x)
        return fidelity(psi, self.target)

    def evaluate(self, x) -> "Evaluation":
        psi, tape = self.forward(x, keep=True)
        return Evaluation(self, np.asarray(x, float), psi, tape)

    def backward(self, x, psi, tape) -> np.ndarray:
        """Reverse sweep: costate chi = H_T psi_f pulled back through every step."""
        a, b = self._split(x)
        chi = self._target_apply(psi)
        ga = np.zeros_like(a)
        gb = np.zeros_like(b)
        sp = self.space
        hb = sp.hb
        if self.mode == "mte":
            for j in range(len(a) - 1, -1, -1):
                start, psi_j, pieces = tape[j]
                ga[j] = 2.0 * np.vdot(chi, sp.apply(psi_j, b[j])).imag
                # <chi|dS psi> = <d(S^dagger) chi|psi>: tangent of the adjoint substep
                tol = self.tol / max(1, len(pieces))
                for k in range(len(pieces) - 1, -1, -1):
                    before = pieces[k - 1][1] if k > 0 else start
                    chi, g = _adjoint_substep(sp, chi, before, pieces[k][0], float(b[j]), tol)
                    gb[j] += g
        else:
            for j in range(len(a) - 1, -1, -1):
                phi, psi_j = tape[j]
                gb[j] = 2.0 * np.vdot(chi, hb @ psi_j).imag
                chi = prop.apply_transverse_rotation(chi, -b[j])
                ga[j] = 2.0 * np.vdot(chi, sp.ha * phi).imag
                chi = chi * np.exp(1j * a[j] * sp.ha)
        return np.concatenate([ga, gb])

    def energy_and_gradient(self, x):
        ev = self.evaluate(x)
        return ev.energy, ev.gradient


def _adjoint_substep(sp: ModelSpace, chi, before, tau, B, tol, depth=0):
    """(S^dagger chi, 2 Re <d(S^dagger) chi | before>) for S = exp(-i tau K(B)).

    Splits tau in halves if the Krylov pass does not converge; the forward
    state at the midpoint is recomputed for the chain rule.
    """
    hb = sp.hb
    out, dchi, _, err, ok = _kernels.lanczos_expmv(
        sp.ha, hb.indptr, hb.indices, hb.data, B, -tau, chi, tol, prop.KRYLOV_MAX_DIM, True,
        prop.first_check(sp, tau, B))
    if ok:
        return out, 2.0 * np.vdot(dchi, before).real
    if depth >= 8:
        raise prop.KrylovConvergenceError(err, -tau)
    mid = prop._krylov(sp, before, tau / 2, B, tol / 2, prop.KRYLOV_MAX_DIM, False)[-1][1]
    chi, g2 = _adjoint_substep(sp, chi, mid, tau / 2, B, tol / 2, depth + 1)
    chi, g1 = _adjoint_substep(sp, chi, before, tau / 2, B, tol / 2, depth + 1)
    return chi, g1 + g2


class Evaluation:
    """Energy at a point, with the gradient computed on first access."""

    def __init__(self, objective: Objective, x, psi, tape):
        self.objective = objective
        self.x = x
        self.psi = psi
        self._tape = tape
        self.energy = float(np.vdot(psi, objective._target_apply(psi)).real)
        self._grad = None

    @property
    def gradient(self) -> np.ndarray:
        if self._grad is None:
            self._grad = self.objective.backward(self.x, self.psi, self._tape)
            self._tape = None
        return self._grad


def energy(params, objective: Objective) -> float:
    return objective.energy(params)


def gradient(params, objective: Objective) -> np.ndarray:
    return objective.evaluate(params).gradient


# -- reports ----------------------------------------------------------------

@dataclass
class OptReport:
    final_parameters: np.ndarray
    final_energy: float
    final_fidelity: float
    iterations: int
    function_evaluations: int
    gradient_evaluations: int
    gradient_norm: float
    converged: bool
    trace: list = field(default_factory=list)
    seed: int | None = None
    driver: str = ""
    mode: str = ""
    message: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["final_parameters"] = np.asarray(self.final_parameters).tolist()
        d["trace"] = [list(map(float, t)) for t in self.trace]
        return d

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def from_json(cls, path) -> "OptReport":
        with open(path) as fh:
            d = json.load(fh)
        d["final_parameters"] = np.asarray(d["final_parameters"])
        d["trace"] = [tuple(t) for t in d["trace"]]
        return cls(**d)

    def trace_to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("iteration,energy,gradient_norm\n")
            for k, (e, g) in enumerate(self.trace):
                fh.write(f"{k},{e!r},{g!r}\n")


class _PlainEvaluation:
    def __init__(self, fg, x):
        self.energy, g = fg(x)
        self.energy = float(self.energy)
        self.gradient = np.asarray(g, dtype=float)


class _Counter:
    """x -> evaluation object; counts energy and gradient evaluations."""

    def __init__(self, objective):
        self.objective = objective
        self.nfev = 0
        self.ngev = 0

    def __call__(self, x):
        self.nfev += 1
        if isinstance(self.objective, Objective):
            return self.objective.evaluate(x)
        return _PlainEvaluation(self.objective, x)

    def grad(self, ev):
        if isinstance(ev, Evaluation) and ev._grad is None:
            self.ngev += 1
        elif isinstance(ev, _PlainEvaluation) and not getattr(ev, "_counted", False):
            ev._counted = True
            self.ngev += 1
        return ev.gradient


def _finish(objective, x, f, g, it, counter, converged, trace, seed, driver, msg) -> OptReport:
    if isinstance(objective, Objective):
        fid = objective.fidelity(x)
        mode = objective.mode
    else:
        fid, mode = float("nan"), ""
    return OptReport(np.asarray(x, float), float(f), fid, it, counter.nfev, counter.ngev,
                     float(np.linalg.norm(g)), converged, trace, seed, driver, mode, msg)


# -- BFGS -------------------------------------------------------------------

def _interpolate(a_lo, f_lo, d_lo, a_hi, f_hi, d_hi):
    """Minimiser of the cubic (or quadratic when d_hi is unknown) through the bracket ends."""
    da = a_hi - a_lo
    if d_hi is not None:
        d1 = d_lo + d_hi - 3.0 * (f_lo - f_hi) / (a_lo - a_hi)
        rad = d1 * d1 - d_lo * d_hi
        if rad >= 0:
            d2 = math.copysign(math.sqrt(rad), da)
            den = d_hi - d_lo + 2.0 * d2
            if den != 0:
                return a_hi - da * (d_hi + d2 - d1) / den
    den = 2.0 * (f_hi - f_lo - d_lo * da)
    if den > 0:
        return a_lo - d_lo * da * da / den
    return a_lo + 0.5 * da


def wolfe_line_search(evaluate, x, p, f0, g0, c1=1e-4, c2=0.9, alpha=1.0, max_probes=30):
    """Step length satisfying the strong Wolfe conditions (bracket, then zoom).

    ``evaluate`` is a _Counter; a probe's gradient is only formed once it
    passes the sufficient-decrease test.  Returns (alpha, evaluation) or
    None when no acceptable step is found within ``max_probes``.
    """
    d0 = float(g0 @ p)
    if not d0 < 0:
        return None
    a_lo, f_lo, d_lo, ev_lo = 0.0, f0, d0, None
    a_hi = f_hi = d_hi = None
    probes = 0
    # bracketing phase
    while probes < max_probes:
        ev = evaluate(x + alpha * p)
        probes += 1
        f = ev.energy
        if not np.isfinite(f) or f > f0 + c1 * alpha * d0 or f >= f_lo:
            a_hi, f_hi, d_hi = alpha, f, None
            break
        d = float(evaluate.grad(ev) @ p)
        if abs(d) <= -c2 * d0:
            return alpha, ev
        if d >= 0:
            a_hi, f_hi, d_hi = a_lo, f_lo, d_lo
            a_lo, f_lo, d_lo, ev_lo = alpha, f, d, ev
            break
        a_lo, f_lo, d_lo, ev_lo = alpha, f, d, ev
        alpha *= 2.0
    else:
        return (a_lo, ev_lo) if ev_lo is not None else None
    # zoom phase: a_lo always satisfies Armijo with the lowest f seen
    while probes < max_probes:
        width = a_hi - a_lo
        if abs(width) < 1e-14 * max(1.0, abs(a_hi)):
            break
        if np.isfinite(f_hi):
            trial = _interpolate(a_lo, f_lo, d_lo, a_hi, f_hi, d_hi)
        else:
            trial = a_lo + 0.5 * width
        lo_edge, hi_edge = sorted((a_lo + 0.1 * width, a_hi - 0.1 * width))
        alpha = min(max(trial, lo_edge), hi_edge)
        ev = evaluate(x + alpha * p)
        probes += 1
        f = ev.energy
        if not np.isfinite(f) or f > f0 + c1 * alpha * d0 or f >= f_lo:
            a_hi, f_hi, d_hi = alpha, f, None
            continue
        d = float(evaluate.grad(ev) @ p)
        if abs(d) <= -c2 * d0:
            return alpha, ev
        if d * (a_hi - a_lo) >= 0:
            a_hi, f_hi, d_hi = a_lo, f_lo, d_lo
        a_lo, f_lo, d_lo, ev_lo = alpha, f, d, ev
    # no curvature-satisfying step; accept the best sufficient decrease, if any
    if ev_lo is not None:
        return a_lo, ev_lo
    return None


@dataclass
class BFGSConfig:
    grad_tol: float = 1e-5
    max_iter: int = 5000
    c1: float = 1e-4
    c2: float = 0.9


def optimize_bfgs(initial_params, objective, config: BFGSConfig | None = None,
                  seed: int | None = None, callback: Callable | None = None) -> OptReport:
    """Quasi-Newton minimisation with a dense inverse-Hessian BFGS update.

    ``objective`` is an Objective or a callable x -> (f, grad).  A run that
    cannot find an acceptable step, even along steepest descent, stops and
    is reported as not converged.
    """
    cfg = config or BFGSConfig()
    evaluate = _Counter(objective)
    x = np.asarray(initial_params, dtype=float).copy()
    ev = evaluate(x)
    f, g = ev.energy, evaluate.grad(ev)
    n = len(x)
    H = np.eye(n)
    trace = [(f, float(np.linalg.norm(g)))]
    converged = False
    msg = "max_iter reached"
    it = 0
    fresh = True
    while True:
        if np.linalg.norm(g) < cfg.grad_tol:
            converged, msg = True, "gradient norm below tolerance"
            break
        if it >= cfg.max_iter:
            break
        p = -H @ g
        if g @ p >= 0:
            H = np.eye(n)
            p = -g
            fresh = True
        # unscaled first direction: cap the trial step at unit length
        alpha0 = min(1.0, 1.0 / np.linalg.norm(p)) if fresh else 1.0
        res = wolfe_line_search(evaluate, x, p, f, g, cfg.c1, cfg.c2, alpha0)
        if res is None and not fresh:
            H = np.eye(n)
            p = -g
            fresh = True
            res = wolfe_line_search(evaluate, x, p, f, g, cfg.c1, cfg.c2, min(1.0, 1.0 / np.linalg.norm(p)))
        if res is None:
            msg = "line search failed"
            break
        alpha, ev = res
        f_new, g_new = ev.energy, evaluate.grad(ev)
        s = alpha * p
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            rho = 1.0 / sy
            Hy = H @ y
            H = H - rho * (np.outer(s, Hy) + np.outer(Hy, s)) + (rho * rho * float(y @ Hy) + rho) * np.outer(s, s)
            fresh = False
        x = x + s
        f, g = f_new, g_new
        it += 1
        trace.append((f, float(np.linalg.norm(g))))
        if callback is not None and callback(it, x, f, g):
            msg = "stopped by callback"
            break
    return _finish(objective, x, f, g, it, evaluate, converged, trace, seed, "bfgs", msg)


# -- Adam -------------------------------------------------------------------

@dataclass
class AdamConfig:
    lr: float = 0.01
    max_iter: int = 20000
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def optimize_adam(initial_params, objective, config: AdamConfig | None = None,
                  seed: int | None = None, callback: Callable | None = None) -> OptReport:
    """Fixed-length Adam run returning the best iterate seen (iterate 0 included)."""
    cfg = config or AdamConfig()
    evaluate = _Counter(objective)
    x = np.asarray(initial_params, dtype=float).copy()
    m = np.zeros_like(x)
    v = np.zeros_like(x)
    ev = evaluate(x)
    f, g = ev.energy, evaluate.grad(ev)
    best = (f, x.copy(), g)
    trace = [(f, float(np.linalg.norm(g)))]
    for t in range(1, cfg.max_iter + 1):
        m = cfg.beta1 * m + (1 - cfg.beta1) * g
        v = cfg.beta2 * v + (1 - cfg.beta2) * g * g
        mhat = m / (1 - cfg.beta1 ** t)
        vhat = v / (1 - cfg.beta2 ** t)
        x = x - cfg.lr * mhat / (np.sqrt(vhat) + cfg.eps)
        ev = evaluate(x)
        f, g = ev.energy, evaluate.grad(ev)
        if f < best[0]:
            best = (f, x.copy(), g)
        trace.append((best[0], float(np.linalg.norm(g))))
        if callback is not None and callback(t, x, f, g):
            break
    fb, xb, gb = best
    return _finish(objective, xb, fb, gb, len(trace) - 1, evaluate, True, trace, seed, "adam",
                   "best iterate of fixed-length run")


# -- restarts ---------------------------------------------------------------

@dataclass
class BoxplotStats:
    median: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: list
    count: int

    @classmethod
    def from_samples(cls, samples) -> "BoxplotStats":
        x = np.sort(np.asarray(samples, dtype=float))
        if x.size == 0:
            raise ValueError("no samples")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples must be finite")
        q1, med, q3 = np.percentile(x, [25, 50, 75])
        iqr = q3 - q1
        lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
        inside = x[(x >= lo_fence) & (x <= hi_fence)]
        out = x[(x < lo_fence) | (x > hi_fence)]
        return cls(float(med), float(q1), float(q3), float(inside.min()), float(inside.max()),
                   out.tolist(), int(x.size))


class AllRunsFailed(RuntimeError):
    def __init__(self, message, reports=()):
        super().__init__(message)
        self.reports = list(reports)


def _one_restart(args):
    objective, guess_generator, driver, seed = args
    return driver(guess_generator(seed), objective, seed=seed)


def multi_restart(objective, guess_generator: Callable[[int], np.ndarray], K: int,
                  driver: Callable = optimize_bfgs, seeds=None, workers: int = 1,
                  stop_when: Callable[[OptReport], bool] | None = None):
    """K independent optimisations; statistics over converged runs' fidelities.

    ``stop_when`` (sequential runs only) ends the sweep early once a report
    satisfies it; the remaining seeds are not run.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    seeds = list(range(K)) if seeds is None else list(seeds)[:K]
    jobs = [(objective, guess_generator, driver, s) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            reports = list(ex.map(_one_restart, jobs))
    else:
        reports = []
        for job in jobs:
            rep = _one_restart(job)
            log.info("restart seed=%s fidelity=%.6f converged=%s iters=%d",
                     rep.seed, rep.final_fidelity, rep.converged, rep.iterations)
            reports.append(rep)
            if stop_when is not None and stop_when(rep):
                break
    reports.sort(key=lambda r: (r.seed is None, r.seed))
    ok = [r.final_fidelity for r in reports if r.converged]
    if not ok:
        raise AllRunsFailed(f"all {len(reports)} runs failed to converge", reports)
    return reports, BoxplotStats.from_samples(ok)
