"""Parameter sweeps, single-run traces, and their serialisation.

Outputs are deterministic: fixed row order, 17-significant-digit floats and
a header that echoes the physics settings but nothing execution-specific
(worker count, output path).
"""

from __future__ import annotations

import enum
import io
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from tcbattery.dynamics import charging_trace, entanglement_entropy, evolve, populations
from tcbattery.errors import ConfigError
from tcbattery.model import BatteryConfig, Regime, build_hamiltonian
from tcbattery.optimizer import DEFAULT_GRID, DEFAULT_TOLERANCE, auto_t_max, average_metrics, find_charging_time
from tcbattery.tridiag import decompose

VERSION = "0.1.0"

FIG2_PHOTONS = tuple(range(2, 31))
FIG3_POINTS = ((5, 10), (10, 5), (5, 20), (5, 40), (5, 80))
FIG4_SIZES = (2, 5, 10, 20, 50, 100, 150, 200)

SWEEP_COLUMNS = (
    "n_cells", "n_photons", "d", "tau", "capacity", "entropy_at_tau",
    "avg_capacity", "avg_entropy", "optimality_gap", "optimal",
)
LIMIT_COLUMNS = ("limit_regime", "limit_max_deviation")


class Mode(enum.Enum):
    TRACE = "trace"
    FIG2 = "fig2"
    FIG3 = "fig3"
    FIG4 = "fig4"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SweepSpec:
    mode: Mode
    points: tuple[tuple[int, int], ...]
    omega: float = 1.0
    coupling: float = 1.0
    t_max: float | None = None
    steps: int = 1001
    grid: int = DEFAULT_GRID
    tolerance: float = DEFAULT_TOLERANCE
    fmt: str = "csv"

    def __post_init__(self):
        if not self.points:
            raise ConfigError("sweep has no parameter points")
        for nb, n0 in self.points:
            BatteryConfig(nb, n0, self.omega, self.coupling)
        if self.t_max is not None and not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise ConfigError(f"t_max must be positive, got {self.t_max!r}")
        if self.steps < 2:
            raise ConfigError(f"steps must be >= 2, got {self.steps}")
        if self.grid < 2:
            raise ConfigError(f"grid must be >= 2, got {self.grid}")
        if not self.tolerance >= 0:
            raise ConfigError(f"tolerance must be >= 0, got {self.tolerance!r}")
        if self.fmt not in ("csv", "jsonl"):
            raise ConfigError(f"format must be csv or jsonl, got {self.fmt!r}")

    def config(self, nb: int, n0: int) -> BatteryConfig:
        return BatteryConfig(nb, n0, self.omega, self.coupling)

    def header(self) -> dict:
        return {
            "mode": self.mode.value,
            "points": [list(p) for p in self.points],
            "omega": self.omega,
            "coupling": self.coupling,
            "t_max": "auto" if self.t_max is None else self.t_max,
            "steps": self.steps,
            "grid": self.grid,
            "tolerance": self.tolerance,
            "format": self.fmt,
        }


def parse_int_range(text: str) -> tuple[int, ...]:
    """``"2,5,10"``, ``"2:30"`` or ``"2:30:2"`` (inclusive stop), or a mix."""
    values: list[int] = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        try:
            parts = [int(p) for p in item.split(":")]
        except ValueError:
            raise ConfigError(f"cannot parse integer range {item!r}") from None
        if len(parts) == 1:
            values.append(parts[0])
        elif len(parts) in (2, 3):
            step = parts[2] if len(parts) == 3 else 1
            if step <= 0:
                raise ConfigError(f"range step must be positive in {item!r}")
            values.extend(range(parts[0], parts[1] + 1, step))
        else:
            raise ConfigError(f"cannot parse integer range {item!r}")
    return tuple(dict.fromkeys(values))


def build_spec(mode: Mode, n_cells=None, n_photons=None, diagonal=False, **kwargs) -> SweepSpec:
    """Resolve a mode plus optional ranges into explicit ``(N_b, n_0)`` points."""
    if mode is Mode.FIG2:
        points = tuple((2, n) for n in FIG2_PHOTONS)
    elif mode is Mode.FIG3:
        points = FIG3_POINTS
    elif mode is Mode.FIG4:
        points = tuple((n, n) for n in FIG4_SIZES)
    else:
        if n_cells is None or n_photons is None:
            raise ConfigError(f"mode {mode.value} needs both --n-cells and --n-photons")
        cells = parse_int_range(n_cells) if isinstance(n_cells, str) else tuple(n_cells)
        photons = parse_int_range(n_photons) if isinstance(n_photons, str) else tuple(n_photons)
        if diagonal:
            shared = sorted(set(cells) & set(photons))
            points = tuple((n, n) for n in shared)
            if not points:
                raise ConfigError("--diagonal: the N_b and n_0 ranges do not intersect")
        else:
            points = tuple(itertools.product(cells, photons))
        if mode is Mode.TRACE and len(points) != 1:
            raise ConfigError(f"trace needs a single (N_b, n_0) point, got {len(points)}")
    return SweepSpec(mode=mode, points=points, **kwargs)


def _limit_regime(nb: int, n0: int):
    if n0 > nb:
        return Regime.CHARGER_DOMINANT
    if nb > n0:
        return Regime.BATTERY_DOMINANT
    return None


def sweep_point(spec: SweepSpec, nb: int, n0: int) -> dict:
    """One summary row. Failures are caught and reported in the row."""
    row = {"n_cells": nb, "n_photons": n0, "d": min(nb, n0)}
    try:
        cfg = spec.config(nb, n0)
        decomp = decompose(build_hamiltonian(cfg))
        res = find_charging_time(cfg, spec.t_max, spec.grid, spec.tolerance, decomp=decomp)
        s_tau = entanglement_entropy(populations(evolve(decomp, res.tau)))
        avg_e, avg_s = average_metrics(cfg, res, s_tau)
        row.update(tau=res.tau, capacity=res.capacity, entropy_at_tau=s_tau, avg_capacity=avg_e,
                   avg_entropy=avg_s, optimality_gap=res.optimality_gap, optimal=res.optimal)
        if spec.mode is Mode.FIG3:
            from tcbattery.validate import max_limit_deviation

            regime = _limit_regime(nb, n0)
            row["limit_regime"] = regime.value if regime else None
            row["limit_max_deviation"] = max_limit_deviation(cfg, regime, decomp=decomp) if regime else None
        row["status"] = "ok"
    except Exception as exc:  # noqa: BLE001 - recorded in-row, sweep continues
        row["status"] = f"error: {type(exc).__name__}: {exc}"
    return row


def _point_task(args):
    spec, nb, n0 = args
    return sweep_point(spec, nb, n0)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[dict]:
    tasks = [(spec, nb, n0) for nb, n0 in spec.points]
    if workers <= 1 or len(tasks) <= 1:
        return [_point_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_point_task, tasks))


def sweep_columns(spec: SweepSpec):
    cols = SWEEP_COLUMNS + (LIMIT_COLUMNS if spec.mode is Mode.FIG3 else ())
    return cols + ("status",)


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "nan" if math.isnan(value) else format(float(value), ".17g")
    return str(value)


def _json_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g") if math.isfinite(value) else "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return json.dumps(value, sort_keys=True)


def _json_line(columns, row) -> str:
    return "{" + ", ".join(f"{json.dumps(c)}: {_json_value(row.get(c))}" for c in columns) + "}"


def render(kind: str, header: dict, columns, rows, fmt: str) -> str:
    """CSV with a ``#`` comment header, or JSON lines with a leading meta object."""
    buf = io.StringIO()
    meta = {"artifact": "tcbattery", "version": VERSION, "kind": kind, **header}
    if fmt == "csv":
        buf.write(f"# tcbattery {VERSION} {kind}\n")
        for key in sorted(meta):
            buf.write(f"# {key} = {json.dumps(meta[key], sort_keys=True)}\n")
        buf.write(",".join(columns) + "\n")
        for row in rows:
            cells = [format_value(row.get(c)) for c in columns]
            buf.write(",".join(_csv_escape(c) for c in cells) + "\n")
    else:
        buf.write(json.dumps({"meta": meta}, sort_keys=True) + "\n")
        for row in rows:
            buf.write(_json_line(columns, row) + "\n")
    return buf.getvalue()


def _csv_escape(cell: str) -> str:
    if any(ch in cell for ch in ',"\n'):
        return '"' + cell.replace('"', '""') + '"'
    return cell


def render_sweep(spec: SweepSpec, rows) -> str:
    return render("sweep", spec.header(), sweep_columns(spec), rows, spec.fmt)


def trace_rows(spec: SweepSpec):
    """Columns, rows and summary for a single-point trace."""
    if len(spec.points) != 1:
        raise ConfigError(f"trace needs a single (N_b, n_0) point, got {len(spec.points)}")
    nb, n0 = spec.points[0]
    cfg = spec.config(nb, n0)
    t_max = spec.t_max if spec.t_max is not None else auto_t_max(cfg)
    report = charging_trace(cfg, t_max, spec.steps, tolerance=spec.tolerance, grid=spec.grid)
    columns = ("time", "energy", "entropy") + tuple(f"population_{m}" for m in range(cfg.d + 1))
    rows = []
    for k, t in enumerate(report.times):
        row = {"time": t, "energy": report.energy[k], "entropy": report.entropy[k]}
        row.update({f"population_{m}": p for m, p in enumerate(report.populations[k])})
        rows.append(row)
    summary = {
        "t_max_resolved": t_max,
        "charging_time": report.charging_time,
        "capacity": report.capacity,
        "entropy_at_tau": report.entropy_at_tau,
        "optimality_gap": report.optimality_gap,
        "optimal": report.optimal,
    }
    return columns, rows, summary, report


def render_trace(spec: SweepSpec) -> str:
    columns, rows, summary, _ = trace_rows(spec)
    header = dict(spec.header())
    header["summary"] = {k: (format_value(v) if isinstance(v, float) else v) for k, v in summary.items()}
    return render("trace", header, columns, rows, spec.fmt)
