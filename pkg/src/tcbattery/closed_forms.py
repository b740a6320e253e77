"""Analytic results for the solvable regimes.

* ``N_b = 1`` (Jaynes-Cummings, parallel charging): exact Rabi oscillation.
* ``N_b = 2``: exact three-level solution with frequency ``g sqrt(4 n_0 - 2)``.
* ``n_0 >> N_b`` or ``N_b >> n_0``: the subspace Hamiltonian approaches
  ``Omega J^x`` and the stored energy a single cosine.

The SU(2) formulas are approximations; callers pick the regime explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from tcbattery.errors import ConfigError
from tcbattery.model import BatteryConfig, Regime, rabi_frequency, spin_ladder


@dataclass(frozen=True)
class SpinMatrices:
    two_spin: int
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray

    @property
    def spin(self) -> float:
        return self.two_spin / 2

    @property
    def dimension(self) -> int:
        return self.two_spin + 1


def spin_generators(two_spin: int) -> SpinMatrices:
    """su(2) generators for spin ``two_spin / 2``.

    Basis ordered by ascending ``S^z`` eigenvalue ``-s, ..., s``; with that
    ordering ``S^+`` has its entries below the diagonal.
    """
    if two_spin < 1:
        raise ValueError(f"two_spin must be >= 1, got {two_spin}")
    f = spin_ladder(two_spin)
    lower = np.diag(f, -1).astype(complex)
    sx = (lower + lower.T) / 2
    sy = (lower - lower.T) / 2j
    sz = np.diag(np.arange(two_spin + 1) - two_spin / 2).astype(complex)
    return SpinMatrices(two_spin, sx, sy, sz)


def binary_entropy(x: float) -> float:
    """``h(x) = -x log2 x - (1 - x) log2 (1 - x)``, with ``h(0) = h(1) = 0``."""
    if not 0 <= x <= 1:
        raise ValueError(f"binary entropy needs 0 <= x <= 1, got {x}")
    return -sum(p * math.log2(p) for p in (x, 1 - x) if p > 0)


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def _require_cells(cfg: BatteryConfig, n: int):
    if cfg.n_cells != n:
        raise ConfigError(f"closed form applies to N_b={n} only, got N_b={cfg.n_cells}")


def jc_energy(cfg: BatteryConfig, t: float) -> float:
    """``omega sin^2(g sqrt(n_0) t)``; accepts scalar or array ``t``."""
    _require_cells(cfg, 1)
    return _scalar_or_array(cfg.omega * np.sin(cfg.coupling * math.sqrt(cfg.n_photons) * np.asarray(t)) ** 2)


def jc_charging_time(cfg: BatteryConfig) -> float:
    _require_cells(cfg, 1)
    return math.pi / (2 * cfg.coupling * math.sqrt(cfg.n_photons))


def _two_cell_frequency(cfg: BatteryConfig) -> float:
    _require_cells(cfg, 2)
    if cfg.n_photons < 2:
        raise ConfigError(f"two-cell solution needs n_0 >= 2, got n_0={cfg.n_photons}")
    return cfg.coupling * math.sqrt(4 * cfg.n_photons - 2)


def two_cell_solution(cfg: BatteryConfig, t: float):
    """Dicke populations ``(p_0, p_1, p_2)`` and stored energy for ``N_b = 2``."""
    delta = _two_cell_frequency(cfg)
    n = cfg.n_photons
    c = math.cos(delta * t)
    k = 2 * n - 1
    p0 = (n - 1 + n * c) ** 2 / k**2
    p1 = n / k * (1 - c**2)
    p2 = n * (n - 1) / k**2 * (1 - c) ** 2
    energy = cfg.omega / k**2 * (-n * c**2 + 4 * n * (1 - n) * c + n * (4 * n - 3))
    return (p0, p1, p2), energy


def two_cell_charging_time(cfg: BatteryConfig) -> float:
    return math.pi / _two_cell_frequency(cfg)


def capacity_two_cell(cfg: BatteryConfig) -> float:
    _two_cell_frequency(cfg)
    return cfg.omega * (2 - 2 / (2 * cfg.n_photons - 1) ** 2)


def entropy_two_cell(cfg: BatteryConfig) -> float:
    """Entanglement (bits) at the charging time for ``N_b = 2``."""
    _two_cell_frequency(cfg)
    return binary_entropy(1 / (2 * cfg.n_photons - 1) ** 2)


def _limit_amplitude(cfg: BatteryConfig, regime: Regime) -> int:
    return cfg.n_cells if regime is Regime.CHARGER_DOMINANT else cfg.n_photons


def su2_limit_energy(cfg: BatteryConfig, regime: Regime, t: float) -> float:
    """``(A omega / 2)(1 - cos(Omega t))`` with ``A = N_b`` or ``n_0`` by regime."""
    freq = rabi_frequency(cfg, regime)
    amplitude = _limit_amplitude(cfg, regime) * cfg.omega / 2
    return _scalar_or_array(amplitude * (1 - np.cos(freq * np.asarray(t))))


def su2_charging_time(cfg: BatteryConfig, regime: Regime) -> float:
    return math.pi / rabi_frequency(cfg, regime)


def bch_rotated_jz(spin: SpinMatrices, angle: float) -> np.ndarray:
    """``exp(i a S^x) S^z exp(-i a S^x)`` in closed form: ``sin(a) S^y + cos(a) S^z``."""
    return math.sin(angle) * spin.sy + math.cos(angle) * spin.sz
