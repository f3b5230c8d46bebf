import csv
import hashlib
import json

import numpy as np
import pytest

from mtevo import cli
from mtevo.experiments import (ExperimentConfig, constant_lambda_scan, instantaneous_decomposition,
                               run_constant_lambda, run_decomposition, run_local_adiabatic_baseline,
                               run_mte_experiment, run_qaoa_experiment, snapshot_fields)
from mtevo.optimizer import Objective, fidelity
from mtevo.propagator import Schedule, evolve_mte, initial_state
from mtevo.schedule import exponential_field_guess, save_schedule_csv
from mtevo.spinmodel import build_model


def small(tmp_path, **kw):
    base = dict(n_sites=4, n_steps=4, restarts=2, max_iter=200, plots=False, out_dir=str(tmp_path),
                gap_points=60, dt=0.05)
    base.update(kw)
    return ExperimentConfig(**base)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_config_rejects_bad_values(tmp_path):
    with pytest.raises(ValueError):
        ExperimentConfig(kind="nope")
    with pytest.raises(ValueError):
        ExperimentConfig(driver="sgd")
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"n_sites": 4, "colour": "red"})


def test_config_json_roundtrip_resolves_paths(tmp_path):
    cfg = small(tmp_path / "o", schedule_file="s.csv")
    cfg.to_json(tmp_path / "c.json")
    back = ExperimentConfig.from_json(tmp_path / "c.json")
    assert back.schedule_file == str(tmp_path / "s.csv")
    assert back.n_sites == 4 and back.lambda0_grid == cfg.lambda0_grid


def test_mte_experiment_artifacts(tmp_path):
    out = run_mte_experiment(small(tmp_path, plots=True))
    assert 0 <= out["fidelity_pruned"] <= 1
    assert out["energy_pruned"] >= out["ground_energy"] - 1e-9
    assert len(out["restart_fidelities"]) == 2
    for name in ("summary.json", "schedule_pruned.json", "pruned_traces.csv", "pruned_fidelity.svg",
                 "report_seed0.json", "trace_seed1.csv"):
        assert (tmp_path / name).exists(), name
    rows = read_csv(tmp_path / "pruned_traces.csv")
    t = np.array([float(r["t_norm"]) for r in rows])
    assert t[-1] == 1.0 and np.allclose(np.diff(t), 1 / len(t))
    fids = np.array([float(r["target_fidelity"]) for r in rows])
    assert np.all((fids >= 0) & (fids <= 1 + 1e-12))
    assert fids[-1] == pytest.approx(out["fidelity_pruned"], abs=1e-12)


def test_mte_single_step_smoke(tmp_path):
    cfg = small(tmp_path, n_steps=1, restarts=1)
    out = run_mte_experiment(cfg)
    raw = json.loads((tmp_path / "schedule_raw.json").read_text())
    obj = Objective.for_model(build_model(4))
    s = Schedule(raw["lambdas"], raw["fields"])
    psi, _ = evolve_mte(initial_state(4), s, build_model(4))
    assert out["fidelity_raw"] == pytest.approx(fidelity(obj.space.to_local(psi), obj.target), abs=1e-12)


def test_mte_artifacts_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_mte_experiment(small(a))
    run_mte_experiment(small(b))
    for name in ("pruned_traces.csv", "pruned_schedule.csv", "trace_seed0.csv"):
        assert digest(a / name) == digest(b / name)


def test_stop_at_fidelity_cuts_restarts(tmp_path):
    out = run_mte_experiment(small(tmp_path, restarts=5, stop_at_fidelity=0.0))
    assert len(out["restart_fidelities"]) == 1


def test_local_adiabatic_baseline_small(tmp_path):
    out = run_local_adiabatic_baseline(small(tmp_path, rho=5.0))
    assert out["n_steps"] == round(out["t_f"] / 0.05)
    assert 0 <= out["fidelity_linear"] <= 1 and 0 <= out["fidelity_local_adiabatic"] <= 1
    rows = read_csv(tmp_path / "local_adiabatic_traces.csv")
    assert float(rows[-1]["t_norm"]) == 1.0
    assert float(rows[-1]["target_fidelity"]) == pytest.approx(out["fidelity_local_adiabatic"])
    assert (tmp_path / "gap_profile.csv").exists()


def test_slower_ramp_is_more_adiabatic(tmp_path):
    fast = run_local_adiabatic_baseline(small(tmp_path / "f", n_sites=6, rho=1.0))
    slow = run_local_adiabatic_baseline(small(tmp_path / "s", n_sites=6, rho=10.0))
    assert 1 - slow["fidelity_local_adiabatic"] < 1 - fast["fidelity_local_adiabatic"]


def test_qaoa_from_schedule_file(tmp_path):
    s = Schedule([1.2, 1.0, 1.1, 1.3], exponential_field_guess(4, 20, 0.1))
    save_schedule_csv(s, tmp_path / "s.csv")
    cfg = small(tmp_path / "o", schedule_file=str(tmp_path / "s.csv"), max_iter=50)
    out = run_qaoa_experiment(cfg, reoptimize=False)
    assert out["mte_steps"] == 4 and out["energy_ratio"] <= 0.30
    assert 0 <= out["fidelity_translated"] <= 1
    assert "fidelity_optimized" not in out
    out = run_qaoa_experiment(cfg, reoptimize=True)
    assert out["fidelity_optimized"] >= out["fidelity_translated"] - 1e-12 or not out["converged"]
    assert (tmp_path / "o" / "qaoa_ratio.csv").exists()


def test_constant_lambda_zero_is_identity():
    m = build_model(6)
    F, _ = constant_lambda_scan([0.0, 1.0], [5, 10], m)
    obj = Objective.for_model(m)
    f0 = fidelity(obj.psi0, obj.target)
    assert np.allclose(F[0], f0, atol=1e-14)
    with pytest.raises(ValueError):
        constant_lambda_scan([], [5], m)


def test_constant_lambda_runner(tmp_path):
    cfg = small(tmp_path, lambda0_grid=[0.5, 1.0], steps_grid=[5, 10])
    out = run_constant_lambda(cfg)
    rows = read_csv(tmp_path / "const_lambda.csv")
    assert len(rows) == 4
    assert max(float(r["fidelity"]) for r in rows) == pytest.approx(out["best_fidelity"])


def test_decomposition_columns_sum_to_one():
    m = build_model(6)
    s = Schedule(np.full(6, 1.1), exponential_field_guess(6, 20, 0.1))
    _, traj = evolve_mte(initial_state(6), s, m, record=True)
    hm = instantaneous_decomposition(traj, s, m, K=5)
    total = hm.probabilities.sum(axis=0) + hm.residual
    assert np.allclose(total, 1.0, atol=1e-9)
    assert np.all(hm.probabilities.sum(axis=0) <= 1 + 1e-9)
    assert np.allclose(hm.out_of_sector, 0.0, atol=1e-12)
    # at large field the initial state is essentially the instantaneous ground state
    assert hm.ground[0] > 0.99
    assert np.array_equal(hm.fields, snapshot_fields(s))
    full = instantaneous_decomposition(traj, s, m, K=10**6)
    assert np.allclose(full.residual, 0.0, atol=1e-9)
    with pytest.raises(ValueError):
        instantaneous_decomposition(traj, s, m, K=0)


def test_decomposition_runner(tmp_path):
    s = Schedule(np.full(5, 1.0), exponential_field_guess(5, 20, 0.1))
    save_schedule_csv(s, tmp_path / "s.csv")
    out = run_decomposition(small(tmp_path / "o", schedule_file=str(tmp_path / "s.csv"), n_eigenstates=3))
    rows = read_csv(tmp_path / "o" / "decomposition.csv")
    assert len(rows) == 6 and {"p0", "p2", "residual"} <= set(rows[0])
    assert 0 <= out["final_target_fidelity"] <= 1


def test_cli_success_and_outputs(tmp_path, capsys):
    code = cli.main(["const-lambda", "--n-sites", "4", "--out", str(tmp_path), "--no-plots"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["best_fidelity"] <= 1
    saved = json.loads((tmp_path / "config.json").read_text())
    assert saved["kind"] == "const-lambda" and saved["plots"] is False


def test_cli_config_file_and_overrides(tmp_path):
    small(tmp_path / "o", lambda0_grid=[1.0], steps_grid=[4]).to_json(tmp_path / "c.json")
    assert cli.main(["const-lambda", "--config", str(tmp_path / "c.json"), "--seed", "3"]) == 0
    saved = json.loads((tmp_path / "o" / "config.json").read_text())
    assert saved["seed"] == 3 and saved["lambda0_grid"] == [1.0]


def test_cli_errors_exit_nonzero(tmp_path):
    assert cli.main(["decompose", "--schedule", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) != 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n_sites": 4, "typo_key": 1}))
    assert cli.main(["mte", "--config", str(bad)]) != 0
    with pytest.raises(SystemExit):
        cli.main(["unknown-kind"])
