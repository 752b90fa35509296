import json
import math

import pytest

from condenser_widths.cli import main

E_RADIUS = math.e

BASE = {
    "condenser": {"e": {"kind": "disk", "center": [0, 0], "radius": 1.0},
                  "gamma": {"kind": "circle", "center": [0, 0], "radius": E_RADIUS}},
}


def write_cfg(tmp_path, name="cfg.json", **extra):
    cfg = dict(BASE)
    cfg.update(extra)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_sweep_task_csv_and_json(tmp_path):
    cfg = write_cfg(tmp_path, n_points=128, grid_n=2048, formats=["json", "csv"])
    out = tmp_path / "run"
    assert main(["sweep", "--config", cfg, "--seed", "1", "--out", str(out)]) == 0
    rows = (out / "sweep.csv").read_text().strip().splitlines()
    assert rows[0] == "theta,m_energy,m_field,m_hat,cap_S_tau,residuals"
    assert len(rows) == 22  # header + 21 theta values
    for row in rows[1:]:
        theta, m_energy, m_field = (float(x) for x in row.split(",")[:3])
        assert abs(m_field + theta) <= 0.02
    result = json.loads((out / "result.json").read_text())
    assert result["schema_version"] == 1
    assert result["payload"]["monotone_m"] and result["payload"]["monotone_m_hat"]
    manifest = json.loads((out / "manifest.json").read_text())
    assert "wall_time_s" in manifest and "wall_time_s" not in json.dumps(result)


def test_chi_task_k0(tmp_path):
    cfg = write_cfg(tmp_path, n=4, k=0, grid_n=1024, n_points=4)
    out = tmp_path / "chi"
    assert main(["chi", "--config", cfg, "--seed", "3", "--out", str(out)]) == 0
    result = json.loads((out / "result.json").read_text())
    assert result["payload"]["chi"]["chi_upper"] == 1.0


def test_chi_task_requires_seed(tmp_path):
    cfg = write_cfg(tmp_path, n=4, k=0, grid_n=1024, n_points=4)
    assert main(["chi", "--config", cfg, "--out", str(tmp_path / "x")]) == 2


def test_chi_fixture_mode(tmp_path):
    cfg = write_cfg(tmp_path, n=3, k=3, grid_n=1024, n_points=4)
    out = tmp_path / "fix"
    assert main(["chi", "--config", cfg, "--seed", "5", "--out", str(out),
                 "--fixtures"]) == 0
    fixture = json.loads((out / "fixtures" / "chi_n3_k3_seed5.json").read_text())
    assert fixture["seed"] == 5
    assert fixture["chi_upper"] >= fixture["chi_lower"]


def test_theta_ratio_shorthand(tmp_path):
    # k omitted: derived from theta * n
    cfg = write_cfg(tmp_path, n=4, theta=0.5, grid_n=1024, n_points=4)
    out = tmp_path / "ratio"
    assert main(["chi", "--config", cfg, "--seed", "2", "--out", str(out)]) == 0
    result = json.loads((out / "result.json").read_text())
    assert result["payload"]["chi"]["k"] == 2


def test_equilibrium_task(tmp_path):
    cfg = write_cfg(tmp_path, theta=0.5, n_points=64, grid_n=1024)
    out = tmp_path / "eq"
    assert main(["equilibrium", "--config", cfg, "--seed", "2", "--out", str(out)]) == 0
    payload = json.loads((out / "result.json").read_text())["payload"]
    assert abs(payload["m_theta_field"] + 0.5) <= 0.05
    # measures round-trip through the documented schema
    from condenser_widths import DiscreteMeasure
    lam = DiscreteMeasure.from_json_dict(payload["lambda_n"])
    assert abs(lam.total_mass - 0.5) <= 1e-12


def test_nwidth_task_with_field_csv(tmp_path):
    cfg = write_cfg(tmp_path, theta=0.5, n_points=64, grid_n=1024,
                    formats=["json", "csv"])
    out = tmp_path / "nw"
    assert main(["nwidth", "--config", cfg, "--seed", "2", "--out", str(out)]) == 0
    rows = (out / "field.csv").read_text().strip().splitlines()
    assert rows[0] == "x,y,value"
    assert len(rows) > 100


def test_balayage_demo_task(tmp_path):
    cfg = write_cfg(tmp_path, n=4, k=2, grid_n=1024)
    out = tmp_path / "bal"
    assert main(["balayage-demo", "--config", cfg, "--out", str(out)]) == 0
    payload = json.loads((out / "result.json").read_text())["payload"]
    assert payload["to_plate"]["mass"] == pytest.approx(1.0, abs=1e-12)
    assert payload["to_plate"]["identity_residual"] <= 1e-6


def test_validate_task_passes(tmp_path):
    cfg = write_cfg(tmp_path, grid_n=1024, n_points=32)
    assert main(["validate", "--config", cfg, "--out", str(tmp_path / "v")]) == 0


def test_validate_task_offset_m1_pin(tmp_path, capsys):
    cfg = {"condenser": {"e": {"kind": "disk", "center": [0, 0], "radius": 1.0},
                         "gamma": {"kind": "circle", "center": [1, 0], "radius": 3.0}},
           "grid_n": 1024, "n_points": 32}
    path = tmp_path / "off.json"
    path.write_text(json.dumps(cfg))
    assert main(["validate", "--config", str(path), "--out", str(tmp_path / "vo")]) == 0
    out = capsys.readouterr().out
    assert "m_1 = -1.386294" in out  # -log 4 via the grid maximum


def test_validate_task_surfaces_coarse_grid(tmp_path, capsys):
    cfg = write_cfg(tmp_path, grid_n=8)
    assert main(["validate", "--config", cfg, "--out", str(tmp_path / "v8")]) == 2
    out = capsys.readouterr().out
    assert "GridTooCoarse" in out and "[FAIL]" in out


def test_malformed_curve_exits_2(tmp_path, capsys):
    bad = {"condenser": {"e": {"kind": "disk", "center": [0, 0], "radius": 2.0},
                         "gamma": {"kind": "circle", "center": [0, 0], "radius": 1.0}}}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    assert main(["equilibrium", "--config", str(path), "--out", str(tmp_path / "b")]) == 2
    assert "winding" in capsys.readouterr().err


def test_byte_identical_reruns_across_thread_counts(tmp_path):
    cfg = write_cfg(tmp_path, theta=0.5, n_points=64, grid_n=1024)
    outs = []
    for threads, name in ((1, "t1"), (4, "t4"), (1, "t1b")):
        out = tmp_path / name
        assert main(["equilibrium", "--config", cfg, "--seed", "7",
                     "--threads", str(threads), "--out", str(out)]) == 0
        outs.append((out / "result.json").read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_unknown_task_rejected(tmp_path):
    cfg = write_cfg(tmp_path)
    with pytest.raises(SystemExit):
        main(["frobnicate", "--config", cfg])
