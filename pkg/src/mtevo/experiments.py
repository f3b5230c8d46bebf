"""Experiment drivers: optimisation runs, baselines, translations, scans.

Every driver takes an ExperimentConfig, writes CSV/JSON artifacts (and SVG
plots unless disabled) into ``config.out_dir`` and returns a plain dict
summary.  CSV files are the data contract; plots are conveniences.
"""
from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields

import numpy as np
import scipy.linalg as la
from scipy.stats import spearmanr

from . import propagator as prop
from . import qaoa_bridge as qb
from . import schedule as sch
from .optimizer import (AdamConfig, AllRunsFailed, BFGSConfig, BoxplotStats, Objective,
                        OptReport, fidelity, multi_restart, optimize_adam, optimize_bfgs)
from .propagator import Schedule, Trajectory
from .spinmodel import (IsingModel, ModelSpace, build_model, build_sector_basis,
                        default_field_grid, gap_profile, ground_sector, sector_space)

log = logging.getLogger(__name__)

KINDS = ("mte", "la-baseline", "qaoa-translate", "qaoa-optimize", "const-lambda", "sweep", "decompose")


@dataclass
class ExperimentConfig:
    kind: str = "mte"
    n_sites: int = 8
    alpha: float = 1.0
    B_target: float = 0.1
    couplings_csv: str | None = None
    # schedule / guesses
    n_steps: int = 20
    B_max: float = 20.0
    B_min: float = 0.1
    prune_threshold: float = 1e-2
    # optimiser
    driver: str = "bfgs"
    grad_tol: float = 1e-5
    max_iter: int = 5000
    adam_lr: float = 0.01
    adam_iter: int = 20000
    restarts: int = 10
    seed: int = 0
    stop_at_fidelity: float | None = None
    # local-adiabatic ramp
    rho: float = 10.0
    dt: float = 0.01
    gap_points: int = 400
    trace_stride: int = 0
    # QAOA
    schedule_file: str | None = None
    qaoa_file: str | None = None
    energy_budget: float = 0.30
    m_max: int = 64
    reoptimize: bool = True
    # scans
    lambda0_grid: list = field(default_factory=lambda: np.round(np.arange(0.2, 2.01, 0.1), 3).tolist())
    steps_grid: list = field(default_factory=lambda: list(range(20, 121, 20)))
    sweep_steps: list = field(default_factory=lambda: [5, 10, 15, 20])
    n_eigenstates: int = 11
    # output
    out_dir: str = "out"
    plots: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.driver not in ("bfgs", "adam"):
            raise ValueError("driver must be 'bfgs' or 'adam'")

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            d = json.load(fh)
        base = os.path.dirname(os.path.abspath(path))
        for key in ("couplings_csv", "schedule_file", "qaoa_file"):
            if d.get(key) and not os.path.isabs(d[key]):
                d[key] = os.path.join(base, d[key])
        return cls.from_dict(d)

    def model(self) -> IsingModel:
        if self.couplings_csv:
            J = np.loadtxt(self.couplings_csv, delimiter=",", ndmin=2)
            return IsingModel(self.n_sites, J, self.alpha, self.B_target)
        return build_model(self.n_sites, self.alpha, self.B_target)

    def driver_fn(self):
        if self.driver == "adam":
            cfg = AdamConfig(lr=self.adam_lr, max_iter=self.adam_iter)
            return lambda x0, obj, seed=None: optimize_adam(x0, obj, cfg, seed=seed)
        cfg = BFGSConfig(grad_tol=self.grad_tol, max_iter=self.max_iter)
        return lambda x0, obj, seed=None: optimize_bfgs(x0, obj, cfg, seed=seed)


# -- artifact helpers ---------------------------------------------------------

def _out(cfg: ExperimentConfig, name: str) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, default=_jsonable)


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(type(o))


def _plot(cfg, name, draw) -> None:
    if not cfg.plots:
        return
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(6, 4))
    draw(ax)
    fig.tight_layout()
    fig.savefig(_out(cfg, name), format="svg", metadata={"Date": None})
    plt.close(fig)


# -- analysis -----------------------------------------------------------------

def ground_space(model: IsingModel) -> ModelSpace:
    """Sector holding the initial state and the target ground state."""
    return sector_space(model, build_sector_basis(model, (-1) ** model.n_sites, 1))


def instantaneous_ground_fidelity(states, fields_, space: ModelSpace) -> np.ndarray:
    """|<g(B_j)|psi_j>|**2 with g the sector ground state of H(B_j); states in full coordinates."""
    out = np.empty(len(states))
    for j, (psi, B) in enumerate(zip(states, fields_)):
        w, U = la.eigh(space.dense(B), subset_by_index=[0, 0])
        out[j] = abs(np.vdot(U[:, 0], space.to_local(psi))) ** 2
    return out


@dataclass
class DecompositionHeatmap:
    probabilities: np.ndarray   # (K, N+1)
    residual: np.ndarray        # weight outside the K lowest sector states
    out_of_sector: np.ndarray
    fields: np.ndarray

    @property
    def ground(self) -> np.ndarray:
        return self.probabilities[0]

    def to_csv(self, path) -> None:
        K, M = self.probabilities.shape
        rows = [[j, self.fields[j], *self.probabilities[:, j], self.residual[j], self.out_of_sector[j]]
                for j in range(M)]
        write_csv(path, ["step", "B"] + [f"p{k}" for k in range(K)] + ["residual", "out_of_sector"], rows)


def snapshot_fields(schedule: Schedule) -> np.ndarray:
    """Field attached to each of the N+1 snapshots; the initial state uses B_1."""
    return np.concatenate([schedule.fields[:1], schedule.fields])


def instantaneous_decomposition(trajectory: Trajectory, schedule: Schedule, model: IsingModel,
                                K: int = 11, space: ModelSpace | None = None) -> DecompositionHeatmap:
    if K < 1:
        raise ValueError("K must be >= 1")
    if len(trajectory) != len(schedule) + 1:
        raise ValueError("trajectory must hold N+1 snapshots")
    space = ground_space(model) if space is None else space
    K = min(K, space.dim)
    Bs = snapshot_fields(schedule)
    P = np.empty((K, len(Bs)))
    outside = np.empty(len(Bs))
    for j, (psi, B) in enumerate(zip(trajectory.states, Bs)):
        local = space.to_local(psi)
        outside[j] = max(0.0, float(np.vdot(psi, psi).real - np.vdot(local, local).real))
        _, U = la.eigh(space.dense(B), subset_by_index=[0, K - 1])
        P[:, j] = np.abs(U.conj().T @ local) ** 2
    residual = 1.0 - P.sum(axis=0)
    return DecompositionHeatmap(P, residual, outside, Bs)


def constant_lambda_scan(lambda0_grid, steps_grid, model: IsingModel, B_max: float = 20.0,
                         B_min: float = 0.1):
    """Target fidelity for lam_j = lam0 and geometric fields; returns (F[lam0, N], argmax)."""
    lambda0_grid = np.asarray(lambda0_grid, dtype=float)
    steps_grid = np.asarray(steps_grid, dtype=int)
    if lambda0_grid.size == 0 or steps_grid.size == 0:
        raise ValueError("grids must be non-empty")
    obj = Objective.for_model(model)
    F = np.empty((lambda0_grid.size, steps_grid.size))
    for b, N in enumerate(steps_grid):
        fields_ = sch.exponential_field_guess(int(N), B_max, B_min) if N > 1 else np.array([B_min])
        for a, lam0 in enumerate(lambda0_grid):
            F[a, b] = obj.fidelity(np.concatenate([np.full(N, lam0), fields_]))
    a, b = np.unravel_index(np.argmax(F), F.shape)
    return F, (float(lambda0_grid[a]), int(steps_grid[b]), float(F[a, b]))


def ratio_alignment(q: qb.QAOASchedule, ramp: sch.LocalAdiabaticRamp):
    """Spearman correlation of beta/gamma with B_LA over the second half of normalized time."""
    t, ratio, _, _ = qb.bch_effective_field(q)
    b_la = ramp.field_at(t * ramp.t_f)
    half = t >= 0.5
    if half.sum() < 3:
        return float("nan"), t, ratio, b_la
    rho = spearmanr(ratio[half], b_la[half]).statistic
    return float(rho), t, ratio, b_la


def local_adiabatic_ramp(model: IsingModel, cfg: ExperimentConfig) -> tuple[sch.LocalAdiabaticRamp, object]:
    grid = default_field_grid(cfg.B_max, cfg.B_min, cfg.gap_points)
    prof = gap_profile(model, grid, ground_sector(model, cfg.B_min))
    return sch.build_local_adiabatic_ramp(prof, cfg.rho, cfg.B_max, cfg.B_min, cfg.dt), prof


# -- drivers ------------------------------------------------------------------

def _guess_generator(cfg: ExperimentConfig, N: int):
    return lambda seed: sch.initial_guess(N, seed, cfg.B_max, cfg.B_min)


def optimize_mte(model: IsingModel, cfg: ExperimentConfig, N: int, objective: Objective | None = None):
    obj = objective or Objective.for_model(model)
    stop = None
    if cfg.stop_at_fidelity is not None:
        stop = lambda r: pruned_fidelity(obj, r, cfg.prune_threshold) >= cfg.stop_at_fidelity
    seeds = [cfg.seed + k for k in range(cfg.restarts)]
    try:
        reports, stats = multi_restart(obj, _guess_generator(cfg, N), cfg.restarts,
                                       cfg.driver_fn(), seeds=seeds, stop_when=stop)
    except AllRunsFailed as err:
        log.warning("%s", err)
        reports, stats = err.reports, None
    return obj, reports, stats


def pruned_fidelity(obj: Objective, report: OptReport, threshold: float = 1e-2) -> float:
    """Target fidelity of a report's schedule after pruning (0 if nothing survives)."""
    try:
        s = sch.prune_schedule(Schedule.from_params(report.final_parameters), threshold)
    except sch.EmptyScheduleError:
        return 0.0
    return obj.fidelity(s.params)


def _best(reports):
    # convergence only decides boxplot membership; the best schedule is the best schedule
    return max(reports, key=lambda r: r.final_fidelity)


def mte_traces(obj: Objective, s: Schedule):
    """Normalized time, target fidelity and instantaneous fidelity after each step."""
    space = obj.space
    psi = obj.psi0.copy()
    tgt, inst = [], []
    for lam, B in zip(s.lambdas, s.fields):
        psi, _ = prop.mte_step(space, psi, lam, B, tol=obj.tol)
        tgt.append(fidelity(psi, obj.target))
        _, U = la.eigh(space.dense(B), subset_by_index=[0, 0])
        inst.append(abs(np.vdot(U[:, 0], psi)) ** 2)
    return sch.normalized_time(len(s)), np.array(tgt), np.array(inst)


def _emit_mte(cfg, obj, s: Schedule, prefix: str):
    t, tgt, inst = mte_traces(obj, s)
    write_csv(_out(cfg, f"{prefix}_traces.csv"), ["t_norm", "lambda", "B", "target_fidelity", "inst_fidelity"],
              zip(t, s.lambdas, s.fields, tgt, inst))
    sch.save_schedule_csv(s, _out(cfg, f"{prefix}_schedule.csv"))

    def draw_fields(ax):
        ax.plot(t, s.lambdas, "o-", ms=3, label="lambda")
        ax.plot(t, s.fields, "s-", ms=3, label="B")
        ax.set_yscale("symlog", linthresh=0.1)
        ax.set_xlabel("normalized time")
        ax.legend()

    def draw_fid(ax):
        ax.plot(t, tgt, label="target")
        ax.plot(t, inst, "--", label="instantaneous")
        ax.set_xlabel("normalized time")
        ax.set_ylabel("fidelity")
        ax.legend()

    _plot(cfg, f"{prefix}_schedule.svg", draw_fields)
    _plot(cfg, f"{prefix}_fidelity.svg", draw_fid)
    return tgt, inst


def run_mte_experiment(cfg: ExperimentConfig) -> dict:
    model = cfg.model()
    N = cfg.n_steps
    obj, reports, stats = optimize_mte(model, cfg, N)
    for r in reports:
        r.to_json(_out(cfg, f"report_seed{r.seed}.json"))
        r.trace_to_csv(_out(cfg, f"trace_seed{r.seed}.csv"))
    best = max(reports, key=lambda r: pruned_fidelity(obj, r, cfg.prune_threshold))
    raw = Schedule.from_params(best.final_parameters, {"seed": best.seed})
    pruned = sch.prune_schedule(raw, cfg.prune_threshold)
    fid_raw = obj.fidelity(raw.params)
    fid = obj.fidelity(pruned.params)
    energy = obj.energy(pruned.params)
    sch.save_schedule_json(pruned, _out(cfg, "schedule_pruned.json"), seed=best.seed,
                           B_max=cfg.B_max, B_min=cfg.B_min)
    sch.save_schedule_json(raw, _out(cfg, "schedule_raw.json"), seed=best.seed)
    _emit_mte(cfg, obj, pruned, "pruned")
    summary = {
        "n_sites": model.n_sites, "initial_steps": N, "pruned_steps": len(pruned),
        "best_seed": best.seed, "best_converged": best.converged,
        "fidelity_raw": fid_raw, "fidelity_pruned": fid, "energy_pruned": energy,
        "ground_energy": obj.ground_energy,
        "restart_fidelities": [r.final_fidelity for r in reports],
        "restart_converged": [r.converged for r in reports],
        "stats": asdict(stats) if stats else None,
    }
    write_json(_out(cfg, "summary.json"), summary)
    return summary


def run_local_adiabatic_baseline(cfg: ExperimentConfig) -> dict:
    model = cfg.model()
    ramp, prof = local_adiabatic_ramp(model, cfg)
    prof.to_csv(_out(cfg, "gap_profile.csv"))
    obj = Objective.for_model(model)
    space = obj.space
    N = ramp.n_steps
    la_sched = ramp.to_schedule()
    lin = Schedule(np.full(N, cfg.dt), sch.linear_field_ramp(N, cfg.B_max, cfg.B_min), {"kind": "linear"})
    stride = cfg.trace_stride or max(1, N // 100)
    out = {"t_f": ramp.t_f, "n_steps": N, "rho": cfg.rho, "dt": cfg.dt}
    traces = {}
    for name, s in (("local_adiabatic", la_sched), ("linear", lin)):
        psi = obj.psi0.copy()
        rows = []
        for j, (lam, B) in enumerate(zip(s.lambdas, s.fields), start=1):
            psi, _ = prop.mte_step(space, psi, lam, B, tol=obj.tol)
            if j % stride == 0 or j == N:
                _, U = la.eigh(space.dense(B), subset_by_index=[0, 0])
                rows.append((j / N, B, fidelity(psi, obj.target), abs(np.vdot(U[:, 0], psi)) ** 2))
        write_csv(_out(cfg, f"{name}_traces.csv"), ["t_norm", "B", "target_fidelity", "inst_fidelity"], rows)
        traces[name] = np.array(rows)
        out[f"fidelity_{name}"] = fidelity(psi, obj.target)
    sch.save_schedule_csv(la_sched, _out(cfg, "local_adiabatic_schedule.csv"))

    def draw(ax):
        for name, r in traces.items():
            ax.plot(r[:, 0], r[:, 2], label=f"{name} target")
            ax.plot(r[:, 0], r[:, 3], "--", label=f"{name} instantaneous")
        ax.set_xlabel("normalized time")
        ax.set_ylabel("fidelity")
        ax.legend()

    def draw_gap(ax):
        ax.plot(prof.fields, prof.gaps)
        ax.set_xscale("log")
        ax.set_xlabel("B")
        ax.set_ylabel("gap")

    _plot(cfg, "baseline_fidelity.svg", draw)
    _plot(cfg, "gap_profile.svg", draw_gap)
    write_json(_out(cfg, "summary.json"), out)
    return out


def _source_schedule(cfg: ExperimentConfig, model: IsingModel) -> Schedule:
    if cfg.schedule_file:
        if cfg.schedule_file.endswith(".csv"):
            return sch.load_schedule_csv(cfg.schedule_file)
        return sch.load_schedule_json(cfg.schedule_file)
    obj, reports, _ = optimize_mte(model, cfg, cfg.n_steps)
    best = _best(reports)
    return sch.prune_schedule(Schedule.from_params(best.final_parameters), cfg.prune_threshold)


def reoptimize_qaoa(model: IsingModel, q: qb.QAOASchedule, cfg: ExperimentConfig):
    obj = Objective.for_model(model, mode="qaoa")
    rep = cfg.driver_fn()(q.params, obj, seed=cfg.seed)
    return obj, rep, q.with_params(rep.final_parameters)


def run_qaoa_experiment(cfg: ExperimentConfig, reoptimize: bool | None = None) -> dict:
    model = cfg.model()
    reoptimize = cfg.reoptimize if reoptimize is None else reoptimize
    s = _source_schedule(cfg, model)
    sch.save_schedule_json(s, _out(cfg, "mte_schedule.json"))
    q = qb.translate_schedule(s, model, energy_budget=cfg.energy_budget, m_max=cfg.m_max)
    qobj = Objective.for_model(model, mode="qaoa")
    out = {"mte_steps": len(s), "layers": len(q), "E_mte": q.meta["E_mte"], "E_trotter": q.meta["E_trotter"],
           "E0": q.meta["E0"], "energy_ratio": q.meta["ratio"], "fidelity_translated": qobj.fidelity(q.params),
           "total_time": {c: qb.qaoa_total_time(q, c) for c in qb.TOTAL_TIME_CONVENTIONS}}
    qb.save_qaoa_csv(q, _out(cfg, "qaoa_translated.csv"))
    qb.save_qaoa_json(q, _out(cfg, "qaoa_translated.json"))
    final = q
    if reoptimize:
        _, rep, final = reoptimize_qaoa(model, q, cfg)
        rep.to_json(_out(cfg, "qaoa_report.json"))
        qb.save_qaoa_csv(final, _out(cfg, "qaoa_optimized.csv"))
        qb.save_qaoa_json(final, _out(cfg, "qaoa_optimized.json"))
        out.update(fidelity_optimized=rep.final_fidelity, energy_optimized=rep.final_energy,
                   converged=rep.converged)
    ramp, _ = local_adiabatic_ramp(model, cfg)
    rho, t, ratio, b_la = ratio_alignment(final, ramp)
    out["spearman_second_half"] = rho
    write_csv(_out(cfg, "qaoa_ratio.csv"), ["t_norm", "beta_over_gamma", "B_LA"], zip(t, ratio, b_la))
    p = len(final)
    tl = np.arange(1, p + 1) / p

    def draw_angles(ax):
        ax.plot(tl, final.gammas, "o-", ms=3, label="gamma")
        ax.plot(tl, final.betas, "s-", ms=3, label="beta")
        ax.set_xlabel("normalized time")
        ax.legend()

    def draw_ratio(ax):
        ax.plot(t, ratio, "o", ms=3, label="beta/gamma")
        ax.plot(t, b_la, "-", label="local adiabatic B")
        ax.set_yscale("log")
        ax.set_xlabel("normalized time")
        ax.legend()

    _plot(cfg, "qaoa_angles.svg", draw_angles)
    _plot(cfg, "qaoa_ratio.svg", draw_ratio)
    write_json(_out(cfg, "summary.json"), out)
    return out


def run_constant_lambda(cfg: ExperimentConfig) -> dict:
    model = cfg.model()
    F, (lam0, N, fbest) = constant_lambda_scan(cfg.lambda0_grid, cfg.steps_grid, model, cfg.B_max, cfg.B_min)
    rows = [(l, int(n), F[a, b]) for a, l in enumerate(cfg.lambda0_grid) for b, n in enumerate(cfg.steps_grid)]
    write_csv(_out(cfg, "const_lambda.csv"), ["lambda0", "steps", "fidelity"], rows)

    def draw(ax):
        im = ax.imshow(F, origin="lower", aspect="auto", vmin=0, vmax=1,
                       extent=[cfg.steps_grid[0], cfg.steps_grid[-1], cfg.lambda0_grid[0], cfg.lambda0_grid[-1]])
        ax.figure.colorbar(im, ax=ax, label="fidelity")
        ax.set_xlabel("steps")
        ax.set_ylabel("lambda0")

    _plot(cfg, "const_lambda.svg", draw)
    out = {"best_lambda0": lam0, "best_steps": N, "best_fidelity": fbest}
    write_json(_out(cfg, "summary.json"), out)
    return out


def infidelity_vs_steps(cfg: ExperimentConfig) -> list[dict]:
    model = cfg.model()
    obj = Objective.for_model(model)
    table = []
    for N in cfg.sweep_steps:
        _, reports, _ = optimize_mte(model, cfg, int(N), obj)
        best = _best(reports)
        table.append({"N": int(N), "best_fidelity": best.final_fidelity, "restarts": len(reports), "mode": "mte"})
        s = Schedule.from_params(best.final_parameters)
        try:
            q = qb.translate_schedule(s, model, energy_budget=cfg.energy_budget, m_max=cfg.m_max)
        except qb.TrotterBudgetError as err:
            log.warning("translation failed at N=%d: %s", N, err)
            continue
        _, rep, _ = reoptimize_qaoa(model, q, cfg)
        table.append({"N": len(q), "best_fidelity": rep.final_fidelity, "restarts": 1, "mode": "qaoa"})
    write_csv(_out(cfg, "infidelity_vs_steps.csv"), ["N", "best_fidelity", "infidelity", "restarts", "mode"],
              [(r["N"], r["best_fidelity"], 1 - r["best_fidelity"], r["restarts"], r["mode"]) for r in table])

    def draw(ax):
        for mode in ("mte", "qaoa"):
            rs = [r for r in table if r["mode"] == mode]
            if rs:
                ax.semilogy([r["N"] for r in rs], [max(1 - r["best_fidelity"], 1e-16) for r in rs], "o-", label=mode)
        ax.set_xlabel("steps / layers")
        ax.set_ylabel("infidelity")
        ax.legend()

    _plot(cfg, "infidelity_vs_steps.svg", draw)
    return table


def run_decomposition(cfg: ExperimentConfig) -> dict:
    model = cfg.model()
    s = _source_schedule(cfg, model)
    obj = Objective.for_model(model)
    psi0 = prop.initial_state(model.n_sites)
    _, traj = prop.evolve_mte(psi0, s, model, record=True)
    hm = instantaneous_decomposition(traj, s, model, cfg.n_eigenstates, obj.space)
    hm.to_csv(_out(cfg, "decomposition.csv"))
    tgt = np.array([fidelity(obj.space.to_local(p), obj.target) for p in traj.states])
    t = np.arange(len(s) + 1) / len(s)
    write_csv(_out(cfg, "decomposition_fidelity.csv"), ["t_norm", "target_fidelity", "inst_fidelity"],
              zip(t, tgt, hm.ground))

    def draw(ax):
        im = ax.imshow(hm.probabilities, origin="lower", aspect="auto", extent=[0, 1, -0.5, hm.probabilities.shape[0] - 0.5])
        ax.figure.colorbar(im, ax=ax, label="probability")
        ax.set_xlabel("normalized time")
        ax.set_ylabel("instantaneous eigenstate")

    _plot(cfg, "decomposition.svg", draw)
    out = {"steps": len(s), "final_target_fidelity": float(tgt[-1]),
           "min_inst_ground": float(hm.ground.min()), "final_inst_ground": float(hm.ground[-1])}
    write_json(_out(cfg, "summary.json"), out)
    return out


RUNNERS = {
    "mte": run_mte_experiment,
    "la-baseline": run_local_adiabatic_baseline,
    "qaoa-translate": lambda cfg: run_qaoa_experiment(cfg, reoptimize=False),
    "qaoa-optimize": lambda cfg: run_qaoa_experiment(cfg, reoptimize=True),
    "const-lambda": run_constant_lambda,
    "sweep": infidelity_vs_steps,
    "decompose": run_decomposition,
}
