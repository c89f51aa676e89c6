"""Named experiment sweeps producing CSV plot data plus a JSON sidecar.

Each scenario moves one quantity (a node position or the state variance)
along a range and solves the rate maximization at every sweep point, once
per configured state variance Q.  The Q = 0 column doubles as the
state-free baseline curve.  Sweep points are independent jobs dispatched to
a thread pool sized by the SECRATE_THREADS environment variable; results
are keyed by index, so parallelism never changes the output.

Default geometry: transmitter (0,0), receiver (1,0), eavesdropper (0,1),
relay (0.5,0), attenuation 3, powers p1=1 and p2=8.  Link distances are
clamped from below (d_min, default 0.01) so sweeps may drive two nodes
through the same position without blowing up the gains.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .errors import DomainError, SecrateError
from .optimizer import OptConfig, OptResult, optimize, optimize_expected
from .rate_core import CodingParams, SystemParams
from .topology import FadingSampler, Network, gains_real

log = logging.getLogger(__name__)

SWEEP_VARIABLES = ("relay_x", "eve_y", "q", "line_t")
SCENARIO_NAMES = (
    "relay-sweep", "eve-y-sweep", "q-sweep", "line-sweep", "fading-relay-sweep", "custom",
)

DEFAULT_D_MIN = 0.01


@dataclass
class SweepSpec:
    variable: str
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise DomainError(f"unknown sweep variable {self.variable!r}; pick from {SWEEP_VARIABLES}")
        if not self.step > 0:
            raise DomainError(f"sweep step must be positive, got {self.step}")
        if self.stop < self.start:
            raise DomainError(f"empty sweep range [{self.start}, {self.stop}]")

    def points(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + i * self.step, 9) for i in range(n)]


@dataclass
class ScenarioSpec:
    name: str
    sweep: SweepSpec
    p1: float = 1.0
    p2: float = 8.0
    q_values: list[float] = field(default_factory=lambda: [0.0, 0.5])
    network: Network = field(default_factory=Network)
    opt: OptConfig = field(default_factory=OptConfig)
    fading: bool = False
    mc_draws: int = 2000
    seed: int = 0
    d_min: float = DEFAULT_D_MIN

    def __post_init__(self):
        if self.name not in SCENARIO_NAMES:
            raise DomainError(f"unknown scenario {self.name!r}; pick from {SCENARIO_NAMES}")
        if self.sweep.variable != "q" and not self.q_values:
            raise DomainError("q_values must be nonempty unless sweeping q itself")
        if self.fading and self.mc_draws < 2:
            raise DomainError("fading scenarios need mc_draws >= 2")


@dataclass
class CellResult:
    r_s: float
    objective_se: float
    status: str
    params: CodingParams


@dataclass
class SweepRow:
    value: float
    cells: list[CellResult | None]


@dataclass
class ScenarioResult:
    spec: ScenarioSpec
    columns: list[str]
    rows: list[SweepRow]


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def preset(name: str) -> ScenarioSpec:
    """The built-in sweep definitions; see SCENARIO_NAMES ('custom' excluded)."""
    if name == "relay-sweep":
        return ScenarioSpec(
            name=name,
            sweep=SweepSpec("relay_x", 0.0, 1.5, 0.05),
            q_values=[0.0, 0.1, 0.5, 1.0, 2.0],
        )
    if name == "eve-y-sweep":
        return ScenarioSpec(
            name=name,
            sweep=SweepSpec("eve_y", 0.0, 1.0, 0.05),
            q_values=[0.0, 0.5],
        )
    if name == "q-sweep":
        return ScenarioSpec(
            name=name,
            sweep=SweepSpec("q", 0.0, 2.0, 0.05),
            q_values=[],
            network=Network(eve=(0.0, 0.4)),
        )
    if name == "line-sweep":
        return ScenarioSpec(
            name=name,
            sweep=SweepSpec("line_t", 0.0, 1.0, 0.05),
            q_values=[0.0, 0.5],
        )
    if name == "fading-relay-sweep":
        return ScenarioSpec(
            name=name,
            sweep=SweepSpec("relay_x", 0.0, 1.5, 0.05),
            q_values=[0.0, 0.5],
            fading=True,
            mc_draws=2000,
            seed=7,
            opt=OptConfig(grid_steps=(7, 7, 7, 7), multistarts=10, refine_iters=400,
                          complex_c=True),
        )
    raise DomainError(f"no preset named {name!r}; pick from {SCENARIO_NAMES[:-1]}")


# ---------------------------------------------------------------------------
# config-file loading
# ---------------------------------------------------------------------------

def spec_from_dict(data: dict, base: ScenarioSpec | None = None) -> ScenarioSpec:
    """Build a ScenarioSpec from a parsed config mapping, optionally over a preset.

    Layout: top-level `name`, a `[sweep]` table (variable/start/stop/step) and
    a `[fixed]` table (p1, p2, q_values, seed, mc_draws, fading, d_min, gamma)
    with nested `[fixed.network]` (tx/relay/rx/eve, each [x, y]) and
    `[fixed.opt]` (grid_steps, refine_iters, multistarts, tol, p_floor,
    complex_c).  Omitted fields keep the base (or built-in) defaults.
    """
    known_top = {"name", "sweep", "fixed"}
    unknown = set(data) - known_top
    if unknown:
        raise DomainError(f"unknown config keys: {sorted(unknown)}")

    if base is None:
        sweep_data = data.get("sweep")
        if sweep_data is None:
            raise DomainError("custom scenarios need a [sweep] table")
        spec = ScenarioSpec(name=data.get("name", "custom"), sweep=_sweep_from_dict(sweep_data))
    else:
        spec = replace(base)
        if "name" in data:
            spec = replace(spec, name=data["name"])
        if "sweep" in data:
            merged = {**asdict(base.sweep), **data["sweep"]}
            spec = replace(spec, sweep=_sweep_from_dict(merged))

    fixed = dict(data.get("fixed", {}))
    known_fixed = {"p1", "p2", "q_values", "seed", "mc_draws", "fading", "d_min",
                   "gamma", "network", "opt"}
    unknown = set(fixed) - known_fixed
    if unknown:
        raise DomainError(f"unknown [fixed] keys: {sorted(unknown)}")

    net = spec.network
    net_data = fixed.pop("network", None)
    if net_data is not None:
        merged = {"tx": net.tx, "relay": net.relay, "rx": net.rx, "eve": net.eve,
                  "gamma": net.gamma}
        for key, value in net_data.items():
            if key not in merged:
                raise DomainError(f"unknown [fixed.network] key {key!r}")
            merged[key] = tuple(value) if key != "gamma" else value
        net = Network(**merged)
    if "gamma" in fixed:
        net = replace(net, gamma=fixed.pop("gamma"))

    opt = spec.opt
    opt_data = fixed.pop("opt", None)
    if opt_data is not None:
        merged = asdict(opt)
        for key, value in opt_data.items():
            if key not in merged:
                raise DomainError(f"unknown [fixed.opt] key {key!r}")
            merged[key] = tuple(value) if key == "grid_steps" and isinstance(value, list) else value
        opt = OptConfig(**merged)

    updates = {"network": net, "opt": opt}
    for key in ("p1", "p2", "seed", "mc_draws", "fading", "d_min"):
        if key in fixed:
            updates[key] = fixed[key]
    if "q_values" in fixed:
        updates["q_values"] = [float(q) for q in fixed["q_values"]]
    return replace(spec, **updates)


def _sweep_from_dict(data: dict) -> SweepSpec:
    required = {"variable", "start", "stop", "step"}
    missing = required - set(data)
    if missing:
        raise DomainError(f"[sweep] is missing keys: {sorted(missing)}")
    unknown = set(data) - required
    if unknown:
        raise DomainError(f"unknown [sweep] keys: {sorted(unknown)}")
    return SweepSpec(
        variable=data["variable"], start=float(data["start"]),
        stop=float(data["stop"]), step=float(data["step"]),
    )


def load_spec(path: str, base_name: str | None = None) -> ScenarioSpec:
    """Parse a TOML scenario config, optionally layered over a named preset."""
    try:
        import tomllib
    except ModuleNotFoundError:  # python < 3.11
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise SecrateError(f"cannot read config {path!r}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise DomainError(f"bad TOML in {path!r}: {exc}") from exc
    base = preset(base_name) if base_name and base_name != "custom" else None
    return spec_from_dict(data, base=base)


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

def _worker_count() -> int:
    raw = os.environ.get("SECRATE_THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError as exc:
            raise DomainError(f"SECRATE_THREADS must be an integer, got {raw!r}") from exc
        if n < 1:
            raise DomainError(f"SECRATE_THREADS must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


def _place(spec: ScenarioSpec, value: float) -> tuple[Network, float | None]:
    """Apply one sweep value; returns the network and an override for q (or None)."""
    net = spec.network
    var = spec.sweep.variable
    if var == "relay_x":
        return replace(net, relay=(value, 0.0)), None
    if var == "eve_y":
        return replace(net, eve=(0.0, value)), None
    if var == "line_t":
        ex, ey = net.eve
        rxx, rxy = net.rx
        pos = ((1.0 - value) * ex + value * rxx, (1.0 - value) * ey + value * rxy)
        return replace(net, relay=pos), None
    if var == "q":
        return net, value
    raise DomainError(f"unknown sweep variable {var!r}")


def _solve_cell(spec: ScenarioSpec, point_index: int, value: float, q: float) -> OptResult:
    net, q_override = _place(spec, value)
    sys = SystemParams(p1=spec.p1, p2=spec.p2, q=q_override if q_override is not None else q)
    if spec.fading:
        sampler = FadingSampler(net, d_min=spec.d_min)
        # one seed per sweep point: all Q columns share the same phase draws
        return optimize_expected(sampler, sys, spec.opt, mc_draws=spec.mc_draws,
                                 seed=[spec.seed, point_index])
    gains = gains_real(net, d_min=spec.d_min)
    return optimize(gains, sys, spec.opt)


def run_scenario(spec: ScenarioSpec) -> ScenarioResult:
    """Solve every (sweep point, configuration) cell; failures leave empty cells."""
    points = spec.sweep.points()
    if spec.sweep.variable == "q":
        columns = ["r_s"]
        q_list = [None]
    else:
        columns = [f"q={q:g}" for q in spec.q_values]
        q_list = list(spec.q_values)

    def job(args) -> tuple[int, int, CellResult | None]:
        i, j = args
        q = q_list[j] if q_list[j] is not None else points[i]
        try:
            res = _solve_cell(spec, i, points[i], q)
        except Exception:
            log.warning("cell (%s=%g, col %s) failed", spec.sweep.variable, points[i],
                        columns[j], exc_info=True)
            return i, j, None
        if res.best is None:
            log.warning("cell (%s=%g, col %s) infeasible", spec.sweep.variable, points[i],
                        columns[j])
            return i, j, None
        return i, j, CellResult(
            r_s=float(res.objective), objective_se=float(res.objective_se),
            status=res.status, params=res.best,
        )

    jobs = [(i, j) for i in range(len(points)) for j in range(len(q_list))]
    rows = [SweepRow(value=v, cells=[None] * len(q_list)) for v in points]
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        for i, j, cell in pool.map(job, jobs):
            rows[i].cells[j] = cell
    return ScenarioResult(spec=spec, columns=columns, rows=rows)


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _params_to_jsonable(params: CodingParams) -> dict:
    c = complex(params.c)
    return {"c": [c.real, c.imag], "alpha1": params.alpha1, "alpha2": params.alpha2,
            "p": params.p}


def emit_csv(result: ScenarioResult, path: str) -> None:
    """Write the sweep table as CSV (6 significant digits) plus a JSON sidecar.

    The sidecar at `<path>.json` records the full configuration, seed,
    package version, and per-cell operating points, so a CSV can always be
    regenerated byte-identically.
    """
    if not result.rows:
        raise DomainError("refusing to write an empty table")
    spec = result.spec
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([spec.sweep.variable] + result.columns)
            for row in result.rows:
                cells = ["" if c is None else f"{c.r_s:.6g}" for c in row.cells]
                writer.writerow([f"{row.value:.6g}"] + cells)
    except OSError as exc:
        raise SecrateError(f"cannot write CSV {path!r}: {exc}") from exc

    sidecar = {
        "version": __version__,
        "scenario": {
            "name": spec.name,
            "sweep": asdict(spec.sweep),
            "p1": spec.p1,
            "p2": spec.p2,
            "q_values": spec.q_values,
            "network": {
                "tx": list(spec.network.tx), "relay": list(spec.network.relay),
                "rx": list(spec.network.rx), "eve": list(spec.network.eve),
                "gamma": spec.network.gamma,
            },
            "opt": asdict(spec.opt),
            "fading": spec.fading,
            "mc_draws": spec.mc_draws,
            "seed": spec.seed,
            "d_min": spec.d_min,
        },
        "columns": result.columns,
        "rows": [
            {
                "value": row.value,
                "cells": [
                    None if c is None else {
                        "r_s": c.r_s, "objective_se": c.objective_se,
                        "status": c.status, "params": _params_to_jsonable(c.params),
                    }
                    for c in row.cells
                ],
            }
            for row in result.rows
        ],
    }
    side_path = path + ".json"
    try:
        with open(side_path, "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise SecrateError(f"cannot write sidecar {side_path!r}: {exc}") from exc
