"""Command-line entry point.

Exit codes: 0 success, 1 usage or I/O error, 2 numerical failure,
3 validation failure. Settings resolve as flag > ``--config`` JSON file >
built-in default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from tcbattery import validate as validation
from tcbattery.errors import NumericalError
from tcbattery.optimizer import DEFAULT_GRID, DEFAULT_TOLERANCE, average_metrics, find_charging_time
from tcbattery.sweep import Mode, build_spec, render_sweep, render_trace, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VALIDATION = 0, 1, 2, 3

DEFAULTS = {
    "n_cells": None,
    "n_photons": None,
    "omega": 1.0,
    "coupling": 1.0,
    "t_max": "auto",
    "steps": 1001,
    "grid": DEFAULT_GRID,
    "mode": "custom",
    "diagonal": False,
    "out": "-",
    "format": None,
    "workers": None,
    "tolerance": DEFAULT_TOLERANCE,
    "level": "quick",
    "perturb_coupling": 0.0,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _t_max(value: str):
    if value == "auto":
        return value
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of default settings (flags take precedence)")
    common.add_argument("--omega", type=float, default=None, help="resonance frequency (default 1)")
    common.add_argument("--coupling", type=float, default=None, help="flip-flop coupling g (default 1)")
    common.add_argument("--t-max", type=_t_max, default=None, help="time window end, or 'auto'")
    common.add_argument("--grid", type=int, default=None, help=f"coarse search grid (default {DEFAULT_GRID})")
    common.add_argument("--tolerance", type=float, default=None,
                        help=f"relative optimality tolerance (default {DEFAULT_TOLERANCE})")
    common.add_argument("--out", default=None, help="output path, '-' for stdout")
    common.add_argument("--format", choices=("csv", "jsonl"), default=None)

    point = argparse.ArgumentParser(add_help=False)
    point.add_argument("--n-cells", default=None, help="N_b: integer, list '2,5' or range '2:30[:step]'")
    point.add_argument("--n-photons", default=None, help="n_0: integer, list or range")

    parser = _Parser(prog="tcbattery", description="Tavis-Cummings quantum battery simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("trace", parents=[common, point], help="time trace for one (N_b, n_0)")
    p.add_argument("--steps", type=int, default=None, help="number of time points (default 1001)")

    p = sub.add_parser("sweep", parents=[common, point], help="charging summary over many (N_b, n_0)")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=None)
    p.add_argument("--diagonal", action="store_true", default=None,
                   help="custom mode: only N_b = n_0 points from the intersection of both ranges")
    p.add_argument("--workers", type=int, default=None, help="parallel processes (default: all cores)")
    p.add_argument("--steps", type=int, default=None, help=argparse.SUPPRESS)

    sub.add_parser("optimize", parents=[common, point], help="charging time and capacity for one point")

    p = sub.add_parser("validate", parents=[common], help="oracle and closed-form self-checks")
    p.add_argument("--level", choices=("quick", "full"), default=None)
    p.add_argument("--perturb-coupling", type=float, default=None, help=argparse.SUPPRESS)
    return parser


def resolve(args: argparse.Namespace) -> dict:
    settings = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                from_file = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from None
        if not isinstance(from_file, dict):
            raise UsageError(f"config {args.config} must hold a JSON object")
        unknown = set(from_file) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys in {args.config}: {', '.join(sorted(unknown))}")
        settings.update(from_file)
    for key, value in vars(args).items():
        if key in settings and value is not None:
            settings[key] = value
    if settings["t_max"] == "auto":
        settings["t_max"] = None
    return settings


def _spec_kwargs(s: dict) -> dict:
    return dict(omega=float(s["omega"]), coupling=float(s["coupling"]), t_max=s["t_max"],
                steps=int(s["steps"]), grid=int(s["grid"]), tolerance=float(s["tolerance"]),
                fmt=s["format"] or "csv")


def _emit(text: str, out: str):
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def _single_point(s: dict):
    for key in ("n_cells", "n_photons"):
        if s[key] is None:
            raise UsageError(f"--{key.replace('_', '-')} is required")
    return build_spec(Mode.TRACE, str(s["n_cells"]), str(s["n_photons"]), **_spec_kwargs(s))


def cmd_trace(s: dict) -> int:
    _emit(render_trace(_single_point(s)), s["out"])
    return EXIT_OK


def cmd_sweep(s: dict) -> int:
    mode = Mode(s["mode"])
    if mode is Mode.TRACE:
        return cmd_trace(s)
    cells = None if s["n_cells"] is None else str(s["n_cells"])
    photons = None if s["n_photons"] is None else str(s["n_photons"])
    spec = build_spec(mode, cells, photons, diagonal=bool(s["diagonal"]), **_spec_kwargs(s))
    workers = s["workers"] if s["workers"] is not None else (os.cpu_count() or 1)
    if workers < 1:
        raise UsageError(f"--workers must be >= 1, got {workers}")
    rows = run_sweep(spec, workers=int(workers))
    _emit(render_sweep(spec, rows), s["out"])
    return EXIT_OK


def cmd_optimize(s: dict) -> int:
    from tcbattery.dynamics import entanglement_entropy, evolve, populations
    from tcbattery.model import build_hamiltonian
    from tcbattery.sweep import format_value, render
    from tcbattery.tridiag import decompose

    spec = _single_point(s)
    cfg = spec.config(*spec.points[0])
    decomp = decompose(build_hamiltonian(cfg))
    res = find_charging_time(cfg, spec.t_max, spec.grid, spec.tolerance, decomp=decomp)
    s_tau = entanglement_entropy(populations(evolve(decomp, res.tau)))
    avg_e, avg_s = average_metrics(cfg, res, s_tau)
    row = {"n_cells": cfg.n_cells, "n_photons": cfg.n_photons, "d": cfg.d, "tau": res.tau,
           "capacity": res.capacity, "entropy_at_tau": s_tau, "avg_capacity": avg_e, "avg_entropy": avg_s,
           "optimality_gap": res.optimality_gap, "optimal": res.optimal,
           "t_max": res.search_window[1] if spec.t_max is None else spec.t_max}
    if s["out"] in (None, "-") and s["format"] is None:
        human = [f"N_b={cfg.n_cells} n_0={cfg.n_photons} d={cfg.d}"]
        for key in ("tau", "capacity", "entropy_at_tau", "avg_capacity", "avg_entropy", "optimality_gap", "t_max"):
            human.append(f"  {key:<15} {row[key]:.6g}")
        human.append(f"  {'optimal':<15} {format_value(res.optimal)} (tolerance {spec.tolerance:g})")
        sys.stdout.write("\n".join(human) + "\n")
    else:
        _emit(render("optimize", spec.header(), tuple(row), [row], spec.fmt), s["out"])
    return EXIT_OK


def cmd_validate(s: dict) -> int:
    results = validation.run_checks(s["level"], perturbation=float(s["perturb_coupling"]))
    print(validation.format_report(results))
    if s["out"] not in (None, "-"):
        payload = {"level": s["level"], "passed": all(r.passed for r in results),
                   "checks": [r.as_dict() for r in results]}
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", s["out"])
    failed = [r for r in results if not r.passed]
    if failed:
        for r in failed:
            print(f"failed: {r.name} ({r.detail})", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


COMMANDS = {"trace": cmd_trace, "sweep": cmd_sweep, "optimize": cmd_optimize, "validate": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](resolve(args))
    except (UsageError, ValueError) as exc:
        print(f"tcbattery: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"tcbattery: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
