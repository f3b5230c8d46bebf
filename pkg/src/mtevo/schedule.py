"""Field ramps, initial guesses and schedule utilities.

The local-adiabatic ramp keeps rho = Delta(B)**2 / |dB/dt| fixed, so that
t(B) = rho * int_B^{B_max} dB' / Delta(B')**2.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .propagator import Schedule
from .spinmodel import GapProfile


class RampIntegrityError(ArithmeticError):
    pass


class EmptyScheduleError(ValueError):
    pass


@dataclass
class LocalAdiabaticRamp:
    rho: float
    B_max: float
    B_min: float
    dt: float
    times: np.ndarray
    B_of_t: np.ndarray
    t_f: float

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    def field_at(self, t) -> np.ndarray:
        return np.interp(t, self.times, self.B_of_t)

    def to_schedule(self, lam: float | None = None) -> Schedule:
        """lam_j = dt (or ``lam``), B_j = B(j dt), j = 1..N."""
        N = self.n_steps
        lam = self.dt if lam is None else lam
        return Schedule(np.full(N, lam), self.B_of_t[1:].copy(),
                        {"kind": "local_adiabatic", "rho": self.rho, "B_max": self.B_max,
                         "B_min": self.B_min, "dt": self.dt, "t_f": self.t_f})


def ramp_time_of_field(profile: GapProfile, rho: float, B_max: float, B_min: float):
    """Cumulative t on the profile grid restricted to [B_min, B_max] (B decreasing)."""
    B = np.asarray(profile.fields, dtype=float)
    gap = np.asarray(profile.gaps, dtype=float)
    order = np.argsort(-B)
    B, gap = B[order], gap[order]
    tol = 1e-9 * max(1.0, B_max)
    if B[0] < B_max - tol or B[-1] > B_min + tol:
        raise ValueError("gap profile does not cover [B_min, B_max]")
    inner = (B < B_max) & (B > B_min)
    g_at = lambda b: float(np.interp(b, B[::-1], gap[::-1]))
    Bs = np.concatenate([[B_max], B[inner], [B_min]])
    gs = np.concatenate([[g_at(B_max)], gap[inner], [g_at(B_min)]])
    w = 1.0 / gs ** 2
    t = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * (Bs[:-1] - Bs[1:]))]) * rho
    return Bs, t


def build_local_adiabatic_ramp(profile: GapProfile, rho: float, B_max: float, B_min: float,
                               dt: float) -> LocalAdiabaticRamp:
    if rho <= 0 or dt <= 0:
        raise ValueError("rho and dt must be positive")
    if not B_max > B_min > 0:
        raise ValueError("need B_max > B_min > 0")
    Bs, t = ramp_time_of_field(profile, rho, B_max, B_min)
    if not (np.all(np.isfinite(t)) and np.all(np.diff(t) > 0)):
        raise RampIntegrityError("accumulated ramp time is not strictly increasing")
    t_f = float(t[-1])
    N = int(round(t_f / dt))
    times = dt * np.arange(N + 1)
    B_of_t = np.interp(times, t, Bs)
    return LocalAdiabaticRamp(rho, B_max, B_min, dt, times, B_of_t, t_f)


def linear_field_ramp(N: int, B_max: float, B_min: float) -> np.ndarray:
    """B_j = B_max - (B_max - B_min) j / N, j = 1..N."""
    j = np.arange(1, N + 1)
    return B_max - (B_max - B_min) * j / N


def exponential_field_guess(N: int, B_max: float, B_min: float) -> np.ndarray:
    if N < 2:
        raise ValueError("N must be >= 2")
    if not B_max > B_min > 0:
        raise ValueError("need B_max > B_min > 0")
    out = B_max * (B_min / B_max) ** (np.arange(N) / (N - 1))
    out[0], out[-1] = B_max, B_min
    return out


def random_lambda_guess(N: int, seed: int) -> np.ndarray:
    if N < 1:
        raise ValueError("N must be >= 1")
    return np.random.default_rng(seed).uniform(1.0, 2.0, N)


def initial_guess(N: int, seed: int, B_max: float = 20.0, B_min: float = 0.1) -> np.ndarray:
    """Flat [lambda..., B...] vector: random lambdas, geometric fields."""
    if N == 1:
        fields = np.array([B_min])
    else:
        fields = exponential_field_guess(N, B_max, B_min)
    return np.concatenate([random_lambda_guess(N, seed), fields])


def prune_schedule(s: Schedule, threshold: float = 1e-2) -> Schedule:
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    keep = np.abs(s.lambdas) >= threshold
    if not keep.any():
        raise EmptyScheduleError("every step was pruned")
    meta = dict(s.meta)
    meta["pruned_from"] = len(s)
    return Schedule(s.lambdas[keep], s.fields[keep], meta)


def normalized_time(N: int) -> np.ndarray:
    if N < 1:
        raise ValueError("N must be >= 1")
    return np.arange(1, N + 1) / N


# -- IO ---------------------------------------------------------------------

def save_schedule_csv(s: Schedule, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "lambda", "B"])
        for j, (lam, B) in enumerate(zip(s.lambdas, s.fields), start=1):
            w.writerow([j, repr(float(lam)), repr(float(B))])


def load_schedule_csv(path) -> Schedule:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    rows.sort(key=lambda r: int(r["step"]))
    return Schedule([float(r["lambda"]) for r in rows], [float(r["B"]) for r in rows])


def save_schedule_json(s: Schedule, path, **meta) -> None:
    d = {"lambdas": s.lambdas.tolist(), "fields": s.fields.tolist(), "meta": {**s.meta, **meta}}
    with open(path, "w") as fh:
        json.dump(d, fh, indent=2)


def load_schedule_json(path) -> Schedule:
    with open(path) as fh:
        d = json.load(fh)
    return Schedule(d["lambdas"], d["fields"], d.get("meta", {}))


def save_ramp_csv(ramp: LocalAdiabaticRamp, path) -> None:
    save_schedule_csv(ramp.to_schedule(), path)
