"""Batch driver: JSON config in, result/manifest files out.

    condenser-widths <task> --config cfg.json [--seed S] [--threads T] [--out DIR]

Tasks: equilibrium, sweep, chi, nwidth, balayage-demo, validate.  Exit codes:
0 success, 2 validation failure (config, geometry, or grid knobs), 3 numeric
budget failure.  result.json is byte-identical across reruns with the same
config and seed; wall time lives only in manifest.json.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, field as dc_field, replace as dc_replace
from pathlib import Path

import numpy as np

from . import __version__, parallel
from .balayage import balayage_to_E, balayage_to_gamma, counting_alpha_beta
from .equilibrium import (equilibrium_result, fekete_green, m_hat_theta, m_theta,
                          theta_sweep)
from .errors import (BudgetExceeded, CondenserWidthsError, ConfigError,
                     GeometryValidationError, GridTooCoarse)
from .extremal import chi_asymptotic_pair, chi_bruteforce
from .geometry import Condenser, boundary_samples, green_kernel, log_capacity
from .measure import DiscreteMeasure, log_potential
from .nwidth import g_theta_field, width_lower_bound, width_rate_predict

SCHEMA_VERSION = 1
TASKS = ("equilibrium", "sweep", "chi", "nwidth", "balayage-demo", "validate")


@dataclass
class RunConfig:
    condenser: Condenser
    task: str
    theta: float = 0.5
    thetas: list = dc_field(default_factory=lambda: [round(0.05 * i, 10) for i in range(21)])
    n: int = 4
    k: int = 2
    n_points: int = 256
    grid_n: int = 4096
    restarts: int = 2
    seed: int | None = None
    threads: int = 1
    out: str = "."
    formats: list = dc_field(default_factory=lambda: ["json"])
    fixtures: bool = False
    method: str = "auto"  # chi task: auto | bruteforce | asymptotic_pair

    def echo(self):
        return {"condenser": self.condenser.to_json_dict(), "task": self.task,
                "theta": self.theta, "thetas": self.thetas, "n": self.n, "k": self.k,
                "n_points": self.n_points, "grid_n": self.grid_n,
                "restarts": self.restarts, "seed": self.seed, "threads": self.threads,
                "formats": self.formats, "method": self.method}


def load_config(path: str, overrides: dict) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if "condenser" not in raw:
        raise ConfigError("config is missing the 'condenser' section")
    try:
        cond = Condenser.from_json_dict(raw["condenser"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed condenser section: {exc}") from exc

    cfg = RunConfig(condenser=cond, task=raw.get("task", overrides.get("task", "")))
    for name in ("theta", "thetas", "n", "k", "n_points", "grid_n", "restarts",
                 "seed", "threads", "out", "formats", "fixtures", "method"):
        if name in raw:
            setattr(cfg, name, raw[name])
    if "k" not in raw and "n" in raw and "theta" in raw:
        cfg.k = int(round(cfg.theta * cfg.n))  # theta-ratio shorthand
    for name, val in overrides.items():
        if val is not None:
            setattr(cfg, name, val)
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: RunConfig):
    if cfg.task not in TASKS:
        raise ConfigError(f"unknown task {cfg.task!r}; choose one of {TASKS}")
    if not 0.0 <= cfg.theta <= 1.0:
        raise ConfigError("theta must lie in [0, 1]")
    if cfg.task == "sweep":
        if len(cfg.thetas) < 2 or any(b <= a for a, b in zip(cfg.thetas, cfg.thetas[1:])):
            raise ConfigError("thetas must be strictly increasing")
        if cfg.thetas[0] < 0 or cfg.thetas[-1] > 1:
            raise ConfigError("thetas must lie in [0, 1]")
    if cfg.n_points < 2:
        raise ConfigError("n_points must be >= 2")
    if cfg.grid_n < 4:
        raise ConfigError("grid_n must be >= 4")
    if cfg.task != "validate":
        # the validate task runs with any grid so coarse-grid failures are
        # surfaced as suite items rather than rejected up front
        if cfg.grid_n < 64:
            raise ConfigError("grid_n must be >= 64")
        if cfg.task in ("equilibrium", "sweep", "nwidth") and cfg.grid_n < 16 * cfg.n_points:
            raise ConfigError(f"grid_n = {cfg.grid_n} too coarse for n_points = "
                              f"{cfg.n_points} (need grid_n >= 16 * n_points)")
    if not 0 <= cfg.k <= cfg.n:
        raise ConfigError("need 0 <= k <= n")
    if cfg.task == "chi" and cfg.seed is None:
        raise ConfigError("chi task requires an explicit seed")
    if not set(cfg.formats) <= {"json", "csv"}:
        raise ConfigError("formats must be a subset of {json, csv}")


# ---------------------------------------------------------------------------
# tasks


def _task_equilibrium(cfg: RunConfig):
    res = equilibrium_result(cfg.condenser, cfg.theta, cfg.n_points, cfg.grid_n,
                             seed=cfg.seed or 0)
    return res.to_json_dict(), []


def _task_sweep(cfg: RunConfig):
    rep = theta_sweep(cfg.condenser, cfg.thetas, n_points=min(cfg.n_points, 160),
                      grid_n=cfg.grid_n, seed=cfg.seed or 0)
    csv_files = []
    if "csv" in cfg.formats:
        csv_files.append(("sweep.csv", rep.csv_rows()))
    return rep.to_json_dict(), csv_files


def _task_chi(cfg: RunConfig):
    method = cfg.method
    if method == "auto":
        method = "bruteforce" if cfg.n <= 6 else "asymptotic_pair"
    if method == "bruteforce":
        est = chi_bruteforce(cfg.condenser, cfg.n, cfg.k, grid_n=cfg.grid_n,
                             restarts=cfg.restarts, seed=cfg.seed)
    elif method == "asymptotic_pair":
        est = chi_asymptotic_pair(cfg.condenser, cfg.n, cfg.k, grid_n=min(cfg.grid_n, 2048),
                                  seed=cfg.seed)
    else:
        raise ConfigError(f"unknown chi method {method!r}")
    return {"chi": est.to_json_dict()}, []


def _task_nwidth(cfg: RunConfig):
    rep = width_rate_predict(cfg.condenser, cfg.theta, cfg.n_points, cfg.grid_n,
                             seed=cfg.seed or 0)
    bound = width_lower_bound(cfg.condenser, cfg.n, cfg.k,
                              grid_n=min(cfg.grid_n, 2048), seed=cfg.seed or 0)
    rate = float(np.log(max(bound, 5e-324)) / cfg.n)
    rep = dc_replace(rep, chi_lower_bounds=[(cfg.n, cfg.k, rate)])
    csv_files = []
    if "csv" in cfg.formats:
        lam = (DiscreteMeasure.zero() if cfg.theta >= 1 - 1e-12 else
               fekete_green(cfg.condenser, cfg.theta, cfg.n_points, cfg.grid_n,
                            seed=cfg.seed or 0))
        xs = np.linspace(-4.0, 4.0, 41)
        grid = np.array([complex(x, y) for y in xs for x in xs])
        if not lam.is_zero:
            d = np.min(np.abs(grid[:, None] - lam.points[None, :]), axis=1)
            grid = grid[d >= 1e-2]
        fg = g_theta_field(cfg.condenser, lam, grid)
        rows = [("x", "y", "value")]
        rows += [(repr(z.real), repr(z.imag), repr(v))
                 for z, v in zip(fg.grid_points.tolist(), fg.values.tolist())]
        csv_files.append(("field.csv", rows))
    return rep.to_json_dict(), csv_files


def _task_balayage_demo(cfg: RunConfig):
    c = cfg.condenser
    e = c.e_domain
    payload = {}
    if e.kind == "disk":
        src = DiscreteMeasure.atom(e.center + 2.0 * e.radius, 1.0)
        res = balayage_to_E(src, e, cfg.grid_n)
        zs = boundary_samples(e, 7)[::2] * 0.5 + e.center * 0.5
        resid = max(abs(log_potential(res.swept, z)
                        - log_potential(src, z) - res.shift_constant) for z in zs)
        payload["to_plate"] = {"result": res.to_json_dict(),
                               "mass": res.swept.total_mass,
                               "identity_residual": resid}
    if c.gamma.kind == "circle":
        src_g = DiscreteMeasure.atom(c.gamma.center + 2.0 * c.gamma.radius, 1.0)
        res_g = balayage_to_gamma(src_g, c.gamma, cfg.grid_n)
        z0 = c.gamma.center
        resid_g = abs(log_potential(res_g.swept, z0)
                      - log_potential(src_g, z0) - res_g.shift_constant)
        payload["to_curve"] = {"result": res_g.to_json_dict(),
                               "mass": res_g.swept.total_mass,
                               "identity_residual": resid_g}
    alpha, beta = counting_alpha_beta([e.center] * cfg.k if e.kind == "disk" else [],
                                      [], c, cfg.n, cfg.k, cfg.grid_n)
    payload["alpha_mass"] = alpha.total_mass
    payload["beta_mass"] = beta.total_mass
    return payload, []


def _task_validate(cfg: RunConfig):
    """Fast invariant suite; every item prints a pass/fail line."""
    c = cfg.condenser
    items = []

    def check(name, fn):
        try:
            ok, detail = fn()
        except CondenserWidthsError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        items.append({"name": name, "pass": bool(ok), "detail": detail})

    def kernel_symmetry():
        rng = np.random.default_rng(0)
        e = c.e_domain
        scale = 3.0 * (e.radius if e.kind == "disk" else (e.b - e.a))
        worst = 0.0
        for _ in range(200):
            z, t = (complex(*rng.uniform(-scale, scale, 2)) for _ in range(2))
            if abs(z - t) < 1e-6:
                continue
            worst = max(worst, abs(green_kernel(e, z, t) - green_kernel(e, t, z)))
        return worst <= 1e-12, f"max asymmetry {worst:.2e}"

    def balayage_identity():
        if c.e_domain.kind != "disk":
            return True, "skipped for segment plate"
        e = c.e_domain
        src = DiscreteMeasure.atom(e.center + 2.0 * e.radius, 1.0)
        res = balayage_to_E(src, e, max(cfg.grid_n, 1024))
        z = e.center
        resid = abs(log_potential(res.swept, z) - log_potential(src, z) - res.shift_constant)
        mass = abs(res.swept.total_mass - 1.0)
        return resid <= 1e-6 and mass <= 1e-12, f"residual {resid:.2e}, mass error {mass:.2e}"

    def m0_pin():
        m_e, m_f = m_theta(c, 0.0, cfg.n_points, cfg.grid_n)
        return abs(m_e) <= 1e-3 and abs(m_f) <= 1e-3, f"m_0 = ({m_e:.2e}, {m_f:.2e})"

    def theta1_pins():
        m_e, m_f = m_theta(c, 1.0, cfg.n_points, cfg.grid_n)
        mhat = m_hat_theta(c, DiscreteMeasure.zero())
        want = -np.log(log_capacity(c.e_domain))
        return (abs(m_e - m_f) <= 1e-15 and abs(mhat - want) <= 1e-15,
                f"m_1 = {m_f:.6f}, mhat_1 = {mhat:.6f}")

    def fekete_smoke():
        lam = fekete_green(c, 0.5, min(cfg.n_points, 32), cfg.grid_n, seed=cfg.seed or 0)
        return abs(lam.total_mass - 0.5) <= 1e-9, f"mass {lam.total_mass!r}"

    check("green kernel symmetry", kernel_symmetry)
    check("balayage potential identity", balayage_identity)
    check("m_0 = 0 pin", m0_pin)
    check("theta = 1 pins", theta1_pins)
    check("fekete stage runs", fekete_smoke)

    for item in items:
        status = "PASS" if item["pass"] else "FAIL"
        print(f"[{status}] {item['name']}: {item['detail']}")
    return {"items": items, "all_pass": all(i["pass"] for i in items)}, []


# ---------------------------------------------------------------------------
# runner


def _stable_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def run(cfg: RunConfig) -> int:
    parallel.set_threads(cfg.threads)
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        cfg.condenser = cfg.condenser.validate(samples=max(512, min(cfg.grid_n, 4096)))
        task_fn = {"equilibrium": _task_equilibrium, "sweep": _task_sweep,
                   "chi": _task_chi, "nwidth": _task_nwidth,
                   "balayage-demo": _task_balayage_demo,
                   "validate": _task_validate}[cfg.task]
        payload, csv_files = task_fn(cfg)
    except (ConfigError, GeometryValidationError, GridTooCoarse) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"numeric budget failure: {exc}", file=sys.stderr)
        return 3

    result = {"schema_version": SCHEMA_VERSION, "task": cfg.task, "payload": payload}
    if "json" in cfg.formats:
        (outdir / "result.json").write_text(_stable_dumps(result) + "\n")
    for name, rows in csv_files:
        with open(outdir / name, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)
    if cfg.fixtures and cfg.task == "chi":
        fixdir = outdir / "fixtures"
        fixdir.mkdir(exist_ok=True)
        fixture = {"inputs": cfg.echo(), "seed": cfg.seed,
                   "chi_upper": payload["chi"]["chi_upper"],
                   "chi_lower": payload["chi"]["chi_lower"]}
        (fixdir / f"chi_n{cfg.n}_k{cfg.k}_seed{cfg.seed}.json").write_text(
            _stable_dumps(fixture) + "\n")
    manifest = {"schema_version": SCHEMA_VERSION, "config": cfg.echo(),
                "package_version": __version__, "numpy_version": np.__version__,
                "python_version": sys.version.split()[0], "seed": cfg.seed,
                "wall_time_s": time.perf_counter() - t0}
    (outdir / "manifest.json").write_text(_stable_dumps(manifest) + "\n")

    if cfg.task == "validate" and not payload["all_pass"]:
        return 2
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="condenser-widths", description=__doc__)
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--fixtures", action="store_true",
                        help="chi task: also record a regression fixture block")
    args = parser.parse_args(argv)
    overrides = {"task": args.task, "seed": args.seed, "threads": args.threads,
                 "out": args.out}
    if args.fixtures:
        overrides["fixtures"] = True
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
