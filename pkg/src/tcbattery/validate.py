"""Self-checks run by ``tcbattery validate``.

Each check compares the subspace pipeline with an independent route (the
brute-force oracle or a closed form) and records the worst deviation seen.
``perturbation`` scales ``u_1`` on the pipeline side only; a nonzero value
must make the checks fail, which is how the harness canary works.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from tcbattery import closed_forms as cf
from tcbattery.dynamics import energy_curve, entanglement_entropy, evolve, populations, stored_energy
from tcbattery.model import BatteryConfig, Regime, TridiagonalHamiltonian, build_hamiltonian
from tcbattery.optimizer import find_charging_time
from tcbattery.oracle import (
    oracle_battery_populations,
    oracle_energy,
    oracle_entropy,
    oracle_evolve,
    shell_leakage,
)
from tcbattery.tridiag import decompose

SEED = 20240229


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    detail: str = ""

    def as_dict(self):
        return asdict(self)


def _pipeline(cfg: BatteryConfig, perturbation: float = 0.0):
    h = build_hamiltonian(cfg)
    if perturbation:
        off = np.array(h.off_diagonal)
        off[0] *= 1 + perturbation
        h = TridiagonalHamiltonian(h.diagonal, off)
    return decompose(h)


def _result(name, deviation, tolerance, detail="", passed=None):
    if passed is None:
        passed = bool(deviation <= tolerance)
    return CheckResult(name, passed, float(deviation), tolerance, detail)


def check_oracle(max_cells, max_photons, n_times, perturbation=0.0):
    rng = np.random.default_rng(SEED)
    worst = leak = shell = 0.0
    worst_case = ""
    for nb, n0 in itertools.product(range(1, max_cells + 1), range(1, max_photons + 1)):
        cfg = BatteryConfig(nb, n0)
        decomp = _pipeline(cfg, perturbation)
        for t in rng.uniform(0.0, 2 * math.pi, n_times):
            full = oracle_evolve(cfg, t)
            ref, leaked = oracle_battery_populations(full)
            pops = populations(evolve(decomp, t))
            dev = max(
                np.max(np.abs(pops.populations - ref.populations)),
                abs(stored_energy(cfg, pops) - oracle_energy(cfg, full)),
                abs(entanglement_entropy(pops) - oracle_entropy(full)),
            )
            if dev > worst:
                worst, worst_case = dev, f"N_b={nb} n_0={n0} t={t:.6g}"
            leak = max(leak, abs(leaked))
            shell = max(shell, shell_leakage(cfg, full))
    span = f"N_b<={max_cells} n_0<={max_photons}"
    return [
        _result("oracle_equivalence", worst, 1e-8, f"{span}; worst at {worst_case}"),
        _result("symmetric_sector_leakage", leak, 1e-10, span),
        _result("excitation_shell_confinement", shell, 1e-12, span),
    ]


def check_jc(perturbation=0.0):
    worst = tau_dev = 0.0
    for n0 in (1, 4, 9, 25):
        cfg = BatteryConfig(1, n0)
        decomp = _pipeline(cfg, perturbation)
        times = np.linspace(0.0, 4 * cf.jc_charging_time(cfg), 100)
        energy, _, _ = energy_curve(cfg, decomp, times)
        worst = max(worst, np.max(np.abs(energy - cf.jc_energy(cfg, times))))
        tau = find_charging_time(cfg, decomp=decomp).tau
        tau_dev = max(tau_dev, abs(tau / cf.jc_charging_time(cfg) - 1))
    return [
        _result("jc_energy_exactness", worst, 1e-12, "n_0 in {1,4,9,25}"),
        _result("jc_charging_time", tau_dev, 1e-10, "relative"),
    ]


def check_two_cell(perturbation=0.0):
    rng = np.random.default_rng(SEED + 1)
    pop_dev = cap_dev = ent_dev = 0.0
    for n0 in range(2, 51):
        cfg = BatteryConfig(2, n0)
        decomp = _pipeline(cfg, perturbation)
        for t in rng.uniform(0.0, 10.0, 5):
            ref, _ = cf.two_cell_solution(cfg, t)
            pop_dev = max(pop_dev, np.max(np.abs(populations(evolve(decomp, t)).populations - ref)))
        res = find_charging_time(cfg, decomp=decomp)
        cap_dev = max(cap_dev, abs(res.capacity - cf.capacity_two_cell(cfg)))
        s_tau = entanglement_entropy(populations(evolve(decomp, res.tau)))
        ent_dev = max(ent_dev, abs(s_tau - cf.entropy_two_cell(cfg)))
    return [
        _result("two_cell_populations", pop_dev, 1e-10, "n_0 in [2, 50]"),
        _result("two_cell_capacity", cap_dev, 1e-10, "n_0 in [2, 50]"),
        _result("two_cell_entropy", ent_dev, 1e-10, "n_0 in [2, 50]"),
    ]


def check_spin_algebra(max_two_spin=10):
    comm = cas = bch = 0.0
    rng = np.random.default_rng(SEED + 2)
    for two_s in range(1, max_two_spin + 1):
        s = cf.spin_generators(two_s)
        x, y, z = s.sx, s.sy, s.sz
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            comm = max(comm, np.max(np.abs(a @ b - b @ a - 1j * c)))
        j = s.spin
        cas = max(cas, np.max(np.abs(x @ x + y @ y + z @ z - j * (j + 1) * np.eye(s.dimension))))
        vals, vecs = np.linalg.eigh(x)
        for angle in rng.uniform(-math.pi, math.pi, 5):
            rot = (vecs * np.exp(1j * angle * vals)) @ vecs.conj().T
            bch = max(bch, np.max(np.abs(rot @ z @ rot.conj().T - cf.bch_rotated_jz(s, angle))))
    return [
        _result("su2_commutators", comm, 1e-12, f"2s <= {max_two_spin}"),
        _result("su2_casimir", cas, 1e-12, f"2s <= {max_two_spin}"),
        _result("bch_rotation", bch, 1e-10, f"2s <= {max_two_spin}"),
    ]


def check_conservation(perturbation=0.0):
    norm = energy = 0.0
    for nb, n0 in ((3, 7), (6, 4), (10, 10), (25, 40)):
        cfg = BatteryConfig(nb, n0)
        decomp = _pipeline(cfg, perturbation)
        _, _, pops = energy_curve(cfg, decomp, np.linspace(0.0, 20.0, 101))
        m = np.arange(cfg.d + 1)
        norm = max(norm, np.max(np.abs(pops.sum(axis=1) - 1)))
        total = cfg.omega * (pops @ m) + cfg.omega * (pops @ (n0 - m))
        energy = max(energy, np.max(np.abs(total - n0 * cfg.omega)))
    return [
        _result("normalization", norm, 1e-12),
        _result("total_energy_conservation", energy, 1e-10),
    ]


def max_limit_deviation(cfg: BatteryConfig, regime: Regime, samples: int = 4001, decomp=None) -> float:
    """Largest gap between the pipeline and the SU(2) limit over one limit period."""
    period = 2 * cf.su2_charging_time(cfg, regime)
    times = np.linspace(0.0, period, samples)
    energy, _, _ = energy_curve(cfg, decomp or decompose(build_hamiltonian(cfg)), times)
    return float(np.max(np.abs(energy - cf.su2_limit_energy(cfg, regime, times))))


def check_limit_convergence():
    out = []
    for label, configs, regime in (
        ("charger", [BatteryConfig(5, n) for n in (20, 40, 80)], Regime.CHARGER_DOMINANT),
        ("battery", [BatteryConfig(n, 5) for n in (20, 40, 80)], Regime.BATTERY_DOMINANT),
    ):
        devs = [max_limit_deviation(c, regime) for c in configs]
        ok = all(b < a for a, b in zip(devs, devs[1:]))
        out.append(_result(f"su2_limit_convergence_{label}", devs[-1], 0.0,
                           "deviations " + ", ".join(f"{v:.6g}" for v in devs), passed=ok))
    return out


def run_checks(level: str = "quick", perturbation: float = 0.0) -> list[CheckResult]:
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    results = []
    if level == "quick":
        results += check_oracle(3, 4, 5, perturbation)
    else:
        results += check_oracle(4, 6, 20, perturbation)
    results += check_jc(perturbation)
    results += check_two_cell(perturbation)
    results += check_spin_algebra()
    results += check_conservation(perturbation)
    if level == "full":
        results += check_limit_convergence()
    return results


def format_report(results) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.name:<30} max_dev={r.max_deviation:.6g}  tol={r.tolerance:.6g}  {r.detail}".rstrip())
    return "\n".join(lines)
