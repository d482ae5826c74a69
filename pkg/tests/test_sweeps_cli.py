import csv
import json
from pathlib import Path

import pytest

from jcpm.cli import main
from jcpm.errors import JcpmError
from jcpm.sweeps import (EXPERIMENTS, FIGURE_MAP, ExperimentOptions,
                         run_experiment)


def _read_csv(path: Path):
    lines = path.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    data = [l for l in lines if not l.startswith("#")]
    rows = list(csv.reader(data))
    return comments, rows[0], rows[1:]


def test_registry_and_figure_map_complete():
    assert len(FIGURE_MAP) == 9
    for fig, experiment in FIGURE_MAP.items():
        assert experiment in EXPERIMENTS, fig


def test_sweep_charge_schema_and_determinism(tmp_path, device):
    opts = ExperimentOptions(points=5, workers=1)
    paths, ok = run_experiment(device, "sweep-charge", tmp_path / "a", opts)
    assert ok
    csv_path = next(p for p in paths if p.suffix == ".csv")
    comments, header, rows = _read_csv(csv_path)
    assert header == ["q_G1_e", "q_G2_e", "Phix_rad", "omega_r_GHz",
                      "delta_omega_r_MHz", "status"]
    assert any("config_hash" in c for c in comments)
    assert len(rows) == 10  # two island-2 curves
    assert all(r[-1] == "ok" for r in rows)

    paths2, _ = run_experiment(device, "sweep-charge", tmp_path / "b", opts)
    csv2 = next(p for p in paths2 if p.suffix == ".csv")
    assert csv_path.read_bytes() == csv2.read_bytes()


def test_sweep_independent_of_worker_count(tmp_path, device):
    a, _ = run_experiment(device, "qubit-spectrum", tmp_path / "w1",
                          ExperimentOptions(points=4, workers=1))
    b, _ = run_experiment(device, "qubit-spectrum", tmp_path / "w4",
                          ExperimentOptions(points=4, workers=4))
    csv_a = next(p for p in a if p.suffix == ".csv")
    csv_b = next(p for p in b if p.suffix == ".csv")
    assert csv_a.read_bytes() == csv_b.read_bytes()


def test_manifest_contents(tmp_path, device):
    paths, _ = run_experiment(device, "snr", tmp_path,
                              ExperimentOptions(points=2))
    manifest = json.loads((tmp_path / "snr_manifest.json").read_text())
    assert manifest["experiment"] == "snr"
    assert manifest["config"]["junctions"]["EJ1"] == 200.0
    assert "config_hash" in manifest and "timestamp" in manifest
    assert manifest["outputs"] == ["snr.csv"]


def test_failed_points_recorded_not_raised(tmp_path, device, monkeypatch):
    import jcpm.sweeps as sweeps

    real = sweeps.cached_load
    calls = {"n": 0}

    def flaky(dev, bias, ncut=None):
        calls["n"] += 1
        if calls["n"] == 3:
            raise JcpmError("synthetic point failure")
        return real(dev, bias, ncut)

    monkeypatch.setattr(sweeps, "cached_load", flaky)
    paths, ok = run_experiment(device, "sweep-charge", tmp_path,
                               ExperimentOptions(points=4, workers=1))
    assert not ok
    _, header, rows = _read_csv(next(p for p in paths if p.suffix == ".csv"))
    statuses = [r[-1] for r in rows]
    assert any(s.startswith("error:") for s in statuses)
    assert sum(s == "ok" for s in statuses) == len(rows) - 1


def test_unknown_experiment_rejected(tmp_path, device):
    with pytest.raises(JcpmError, match="unknown experiment"):
        run_experiment(device, "not-an-experiment", tmp_path)


def test_potential_grid_and_minima_files(tmp_path, device):
    paths, ok = run_experiment(device, "potential-grid", tmp_path,
                               ExperimentOptions(points=41))
    names = {p.name for p in paths}
    assert {"potential-grid.csv", "potential-grid_minima.csv",
            "potential-grid_manifest.json"} <= names
    assert ok


def test_yield_experiment_small(tmp_path, device):
    paths, ok = run_experiment(device, "yield", tmp_path,
                               ExperimentOptions(sigma=0.0, n_samples=4,
                                                 seed=7))
    assert ok
    _, header, rows = _read_csv(tmp_path / "yield_summary.csv")
    frac = float(rows[0][header.index("yield_fraction")])
    assert frac == 1.0
    _, _, samples = _read_csv(tmp_path / "yield_samples.csv")
    assert len(samples) == 4


# --- CLI ---------------------------------------------------------------

def test_cli_default_config_and_run(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    assert main(["default-config", "--out", str(cfg)]) == 0
    out = tmp_path / "run"
    code = main(["snr", "--config", str(cfg), "--out", str(out),
                 "--workers", "1"])
    assert code == 0
    assert (out / "snr.csv").exists()


def test_cli_rejects_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{\"mystery\": {}}")
    code = main(["snr", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_cli_consistency_check(tmp_path):
    code = main(["consistency-check", "--out", str(tmp_path), "--workers", "1"])
    assert code == 0
    _, header, rows = _read_csv(tmp_path / "consistency-check.csv")
    assert all(r[-1] == "ok" for r in rows)


def test_cli_consistency_check_fails_for_detuned_device(tmp_path):
    # a detuned line misses the 7.5 GHz target -> nonzero exit
    cfg = tmp_path / "detuned.json"
    cfg.write_text(json.dumps({
        "line": {"C0": 1.11e-10, "L0": 2.78e-7, "length": 7e-3}}))
    code = main(["consistency-check", "--config", str(cfg),
                 "--out", str(tmp_path / "o"), "--workers", "1"])
    assert code == 1
