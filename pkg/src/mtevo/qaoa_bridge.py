"""MTE schedule -> QAOA angles by second-order Trotter splitting.

A step exp(-i lam (H_A + B H_B)) is approximated by
    exp(-i lam/2m H_A) [exp(-i lam B/m H_B) exp(-i lam/m H_A)]^(m-1) exp(-i lam B/m H_B) exp(-i lam/2m H_A)
which, read as QAOA layers exp(-i beta H_B) exp(-i gamma H_A), becomes
(lam/2m, lam B/m), (lam/m, lam B/m) x (m-1), and a trailing H_A half step
that merges into the first layer of the next step.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import propagator as prop
from .propagator import Schedule
from .spinmodel import IsingModel, ground_state

M_MAX = 64
ENERGY_BUDGET = 0.30
TOTAL_TIME_CONVENTIONS = ("sum-abs-both", "sum-abs-gamma")


class TrotterBudgetError(RuntimeError):
    pass


@dataclass
class QAOASchedule:
    gammas: np.ndarray
    betas: np.ndarray
    source_step: np.ndarray = None
    m: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.gammas = np.atleast_1d(np.asarray(self.gammas, dtype=float))
        self.betas = np.atleast_1d(np.asarray(self.betas, dtype=float))
        if self.gammas.shape != self.betas.shape or self.gammas.ndim != 1:
            raise ValueError("gammas and betas must be 1-d arrays of equal length")
        p = len(self.gammas)
        self.source_step = (np.full(p, -1, dtype=int) if self.source_step is None
                            else np.asarray(self.source_step, dtype=int))
        self.m = np.zeros(p, dtype=int) if self.m is None else np.asarray(self.m, dtype=int)
        if self.source_step.shape != (p,) or self.m.shape != (p,):
            raise ValueError("provenance arrays must match the layer count")

    def __len__(self):
        return len(self.gammas)

    @property
    def params(self) -> np.ndarray:
        return np.concatenate([self.gammas, self.betas])

    def with_params(self, x) -> "QAOASchedule":
        x = np.asarray(x, dtype=float)
        p = len(x) // 2
        return QAOASchedule(x[:p], x[p:], self.source_step.copy(), self.m.copy(), dict(self.meta))


def trotterize_step(lam: float, B: float, m: int):
    """Unmerged layers for one step: [(gamma, beta), ...] plus the trailing H_A angle."""
    if int(m) != m or m <= 0:
        raise ValueError("m must be a positive integer")
    m = int(m)
    beta = lam * B / m
    layers = [(lam / (2 * m), beta)] + [(lam / m, beta)] * (m - 1)
    return layers, lam / (2 * m)


def assemble(schedule: Schedule, ms) -> QAOASchedule:
    """Concatenate Trotterized steps, merging each trailing H_A half step forward."""
    ms = np.asarray(ms, dtype=int)
    if ms.shape != (len(schedule),):
        raise ValueError("one m per step required")
    gam, bet, src, mm = [], [], [], []
    carry = 0.0
    for j, (lam, B, m) in enumerate(zip(schedule.lambdas, schedule.fields, ms)):
        layers, tail = trotterize_step(lam, B, m)
        for k, (g, b) in enumerate(layers):
            gam.append(g + (carry if k == 0 else 0.0))
            bet.append(b)
            src.append(j)
            mm.append(m)
        carry = tail
    gam.append(carry)
    bet.append(0.0)
    src.append(len(schedule) - 1)
    mm.append(int(ms[-1]))
    return QAOASchedule(gam, bet, src, mm)


def error_ratio(gamma: float, beta: float, m: int) -> float:
    if m <= 0:
        raise ValueError("m must be positive")
    den = abs(gamma) + abs(beta)
    if den == 0:
        raise ZeroDivisionError("error ratio undefined for gamma = beta = 0")
    m2 = m * m
    return max(abs(gamma * gamma * beta / (24 * m2)), abs(gamma * beta * beta / (12 * m2))) / den


def _step_zeta(lam, B, m):
    gamma, beta = lam, lam * B
    if gamma == 0 and beta == 0:
        return 0.0
    return error_ratio(gamma, beta, m)


def _energy(state, model, B_target):
    return float(np.vdot(state, model.space.apply(state, B_target)).real)


def select_m(schedule: Schedule, model: IsingModel, energy_budget: float = ENERGY_BUDGET,
             m_max: int = M_MAX, reference=None, strategy: str = "zeta"):
    """Per-step Trotter counts meeting |E_trot - E_mte| <= budget |E_mte - E0|.

    With ``strategy="zeta"`` it starts from m_j = 1 and repeatedly gives one
    more layer to the step with the largest error ratio, re-checking the
    energy after each increment.  ``strategy="uniform"`` raises a single
    common m instead.  ``reference`` may pass precomputed (E_mte, E0).
    Returns (ms, info).
    """
    if energy_budget <= 0:
        raise ValueError("energy budget must be positive")
    if strategy not in ("zeta", "uniform"):
        raise ValueError("strategy must be 'zeta' or 'uniform'")
    N = len(schedule)
    if N == 0:
        raise ValueError("empty schedule")
    psi0 = prop.initial_state(model.n_sites)
    B_t = model.target_field
    if reference is None:
        e_mte = _energy(prop.evolve_mte(psi0, schedule, model)[0], model, B_t)
        e0 = ground_state(model)[0]
    else:
        e_mte, e0 = reference
    allowed = energy_budget * abs(e_mte - e0)
    ms = np.ones(N, dtype=int)
    zeta = np.array([_step_zeta(l, b, 1) for l, b in zip(schedule.lambdas, schedule.fields)])
    while True:
        q = assemble(schedule, ms)
        e_trot = _energy(prop.evolve_qaoa(psi0, q, model)[0], model, B_t)
        dev = abs(e_trot - e_mte)
        if dev <= allowed:
            break
        open_steps = ms < m_max
        if strategy == "uniform":
            if not open_steps.all():
                raise TrotterBudgetError(
                    f"energy budget unreachable with m <= {m_max} (deviation {dev:.3e}, allowed {allowed:.3e})")
            ms += 1
            continue
        if not open_steps.any() or zeta[open_steps].max() == 0:
            raise TrotterBudgetError(
                f"energy budget unreachable with m <= {m_max} (deviation {dev:.3e}, allowed {allowed:.3e})")
        j = int(np.argmax(np.where(open_steps, zeta, -1.0)))
        ms[j] += 1
        zeta[j] = _step_zeta(schedule.lambdas[j], schedule.fields[j], ms[j])
    return ms, {"E_mte": e_mte, "E_trotter": e_trot, "E0": e0,
                "ratio": dev / abs(e_mte - e0) if e_mte != e0 else 0.0}


def translate_schedule(schedule: Schedule, model: IsingModel, ms=None,
                       energy_budget: float = ENERGY_BUDGET, m_max: int = M_MAX,
                       strategy: str = "zeta") -> QAOASchedule:
    if len(schedule) == 0:
        raise ValueError("empty schedule")
    if ms is None:
        ms, info = select_m(schedule, model, energy_budget, m_max, strategy=strategy)
    else:
        info = {}
    q = assemble(schedule, ms)
    q.meta.update({k: float(v) for k, v in info.items()})
    q.meta["steps"] = len(schedule)
    return q


def bch_effective_field(q: QAOASchedule):
    """(normalized time, beta/gamma, gamma) over all layers but the last.

    Layers with |gamma| < 1e-12 are dropped; their indices are returned as
    the fourth element.
    """
    p = len(q)
    idx = np.arange(p - 1)
    skipped = idx[np.abs(q.gammas[idx]) < 1e-12]
    keep = idx[np.abs(q.gammas[idx]) >= 1e-12]
    t = (keep + 1) / p
    return t, q.betas[keep] / q.gammas[keep], q.gammas[keep].copy(), skipped


def qaoa_total_time(q: QAOASchedule, convention: str = "sum-abs-both") -> float:
    if convention == "sum-abs-both":
        return float(np.sum(np.abs(q.gammas)) + np.sum(np.abs(q.betas)))
    if convention == "sum-abs-gamma":
        return float(np.sum(np.abs(q.gammas)))
    raise ValueError(f"convention must be one of {TOTAL_TIME_CONVENTIONS}")


# -- IO ---------------------------------------------------------------------

def save_qaoa_csv(q: QAOASchedule, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["layer", "gamma", "beta", "source_step", "m"])
        for k in range(len(q)):
            w.writerow([k + 1, repr(float(q.gammas[k])), repr(float(q.betas[k])),
                        int(q.source_step[k]) + 1, int(q.m[k])])


def load_qaoa_csv(path) -> QAOASchedule:
    with open(path, newline="") as fh:
        rows = sorted(csv.DictReader(fh), key=lambda r: int(r["layer"]))
    return QAOASchedule([float(r["gamma"]) for r in rows], [float(r["beta"]) for r in rows],
                        [int(r["source_step"]) - 1 for r in rows], [int(r["m"]) for r in rows])


def save_qaoa_json(q: QAOASchedule, path) -> None:
    d = {"gammas": q.gammas.tolist(), "betas": q.betas.tolist(),
         "source_step": q.source_step.tolist(), "m": q.m.tolist(), "meta": q.meta,
         "total_time": {c: qaoa_total_time(q, c) for c in TOTAL_TIME_CONVENTIONS}}
    with open(path, "w") as fh:
        json.dump(d, fh, indent=2)


def load_qaoa_json(path) -> QAOASchedule:
    with open(path) as fh:
        d = json.load(fh)
    return QAOASchedule(d["gammas"], d["betas"], d["source_step"], d["m"], d.get("meta", {}))
