"""Charging time and optimal-storage classification.

The stored energy is quasi-periodic with many local maxima, so the search
is two-stage: a uniform grid over ``(0, t_max]`` finds the global basin,
golden-section search refines it, and a root of the analytic time
derivative pins ``tau`` to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from tcbattery.dynamics import amplitudes_at
from tcbattery.errors import NumericalError
from tcbattery.model import BatteryConfig, build_hamiltonian
from tcbattery.tridiag import EigenDecomposition, decompose

DEFAULT_GRID = 4096
DEFAULT_TOLERANCE = 1e-3
# grid maxima this far (relative to omega*d) below the best are still refined
CANDIDATE_SLACK = 1e-2
# refined maxima this close (relative to omega*d) count as ties, earliest wins
TIE_TOLERANCE = 1e-9
GOLDEN_TOL = 1e-8


@dataclass(frozen=True)
class OptimizationResult:
    tau: float
    capacity: float
    optimal: bool
    optimality_gap: float
    search_window: tuple[float, float]
    grid_points: int
    tolerance: float


class _EnergyCurve:
    def __init__(self, cfg: BatteryConfig, decomp: EigenDecomposition):
        self.omega = cfg.omega
        self.values = decomp.eigenvalues
        self.vectors = decomp.eigenvectors
        self.overlaps = decomp.initial_overlaps
        self.levels = np.arange(decomp.dim, dtype=float)

    def __call__(self, t: float) -> float:
        psi = self.vectors @ (np.exp(-1j * self.values * t) * self.overlaps)
        return float(self.omega * np.dot(self.levels, np.abs(psi) ** 2))

    def slope(self, t: float) -> float:
        c = np.exp(-1j * self.values * t) * self.overlaps
        psi = self.vectors @ c
        dpsi = self.vectors @ (-1j * self.values * c)
        return float(2 * self.omega * np.real(np.dot(self.levels, np.conj(psi) * dpsi)))


def auto_t_max(cfg: BatteryConfig) -> float:
    """Four periods of a Rabi-frequency estimate that stays finite for any ``N_b, n_0``."""
    omega_est = 2 * cfg.coupling * math.sqrt(abs(cfg.n_photons - (cfg.n_cells - 1) / 2) + 1)
    return 4 * math.pi / omega_est


def _polish(curve: _EnergyCurve, x: float, lo: float, hi: float) -> float:
    half = max(1e-4 * (hi - lo), 1e-6 * abs(x))
    a, b = max(lo, x - half), min(hi, x + half)
    if b <= a:
        return x
    sa, sb = curve.slope(a), curve.slope(b)
    if not (sa > 0 > sb):
        return x
    return optimize.brentq(curve.slope, a, b, xtol=1e-15 * max(abs(x), 1e-300), rtol=4 * np.finfo(float).eps)


def _refine(curve: _EnergyCurve, t: np.ndarray, k: int) -> float:
    lo = t[k - 1]
    if k + 1 < t.size:
        hi = t[k + 1]
        x = optimize.golden(lambda s: -curve(s), brack=(lo, t[k], hi), tol=GOLDEN_TOL)
    else:
        # right edge of the window: the maximiser may sit on the boundary
        hi = t[k]
        if curve.slope(hi) >= 0:
            return float(hi)
        res = optimize.minimize_scalar(lambda s: -curve(s), bounds=(lo, hi), method="bounded",
                                       options={"xatol": GOLDEN_TOL * hi})
        x = res.x
    x = min(max(x, lo), hi)
    return float(_polish(curve, x, lo, hi))


def find_charging_time(
    cfg: BatteryConfig,
    t_max: float | None = None,
    grid: int = DEFAULT_GRID,
    tolerance: float = DEFAULT_TOLERANCE,
    decomp: EigenDecomposition | None = None,
) -> OptimizationResult:
    """Locate ``tau = argmax_t dE(t)`` on ``(0, t_max]``.

    ``t_max=None`` selects :func:`auto_t_max`. The battery counts as
    optimally charged when ``omega*d - dE(tau) <= tolerance * omega*d``.
    """
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    if tolerance < 0:
        raise ValueError(f"tolerance must be >= 0, got {tolerance}")
    if t_max is None:
        t_max = auto_t_max(cfg)
    if not (t_max > 0 and math.isfinite(t_max)):
        raise ValueError(f"t_max must be positive and finite, got {t_max!r}")
    if decomp is None:
        decomp = decompose(build_hamiltonian(cfg))
    curve = _EnergyCurve(cfg, decomp)
    scale = cfg.max_energy

    # t = 0 (energy exactly 0) is prepended as a left neighbour only
    t = np.linspace(0.0, t_max, grid + 1)
    energy = np.empty(grid + 1)
    energy[0] = 0.0
    pops = np.abs(amplitudes_at(decomp, t[1:])) ** 2
    energy[1:] = cfg.omega * (pops @ curve.levels)
    if not np.all(np.isfinite(energy)):
        raise NumericalError(f"non-finite stored energy on the search grid for {cfg}")

    best = energy[1:].max()
    interior = (energy[1:-1] >= energy[:-2]) & (energy[1:-1] >= energy[2:])
    candidates = list(np.flatnonzero(interior) + 1)
    if energy[-1] >= energy[-2]:
        candidates.append(grid)
    candidates = [k for k in candidates if energy[k] >= best - CANDIDATE_SLACK * scale]

    refined = []
    for k in candidates:
        tau_k = _refine(curve, t, k)
        refined.append((tau_k, curve(tau_k)))
    if not refined:
        raise NumericalError(f"no maximum located for {cfg}")
    top = max(v for _, v in refined)
    tau, capacity = min(
        ((tk, v) for tk, v in refined if v >= top - TIE_TOLERANCE * scale), key=lambda item: item[0]
    )
    if not math.isfinite(capacity):
        raise NumericalError(f"non-finite capacity at tau={tau} for {cfg}")
    gap = max(scale - capacity, 0.0)
    return OptimizationResult(
        tau=tau,
        capacity=capacity,
        optimal=gap <= tolerance * scale,
        optimality_gap=gap,
        search_window=(0.0, float(t_max)),
        grid_points=grid,
        tolerance=tolerance,
    )


def average_metrics(cfg: BatteryConfig, result: OptimizationResult, entropy_at_tau: float):
    """Per-cell capacity and per-cell entanglement at the charging time."""
    return result.capacity / cfg.n_cells, entropy_at_tau / cfg.n_cells
