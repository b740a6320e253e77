"""Battery parameters and the invariant-subspace Hamiltonian.

Basis state ``m`` (``0 <= m <= d``) is ``|m>_b |n_0 - m>_c`` where ``|m>_b`` is
the symmetric Dicke state with ``m`` excitations. In this basis the
interaction is tridiagonal with zero diagonal; ``H_b + H_c`` only adds the
constant ``omega * (n_0 - N_b / 2)`` on resonance and is dropped.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from tcbattery.errors import ConfigError


class Regime(enum.Enum):
    CHARGER_DOMINANT = "charger"  # n_0 >> N_b, spin N_b/2
    BATTERY_DOMINANT = "battery"  # N_b >> n_0, spin n_0/2


@dataclass(frozen=True)
class BatteryConfig:
    n_cells: int
    n_photons: int
    omega: float = 1.0
    coupling: float = 1.0

    def __post_init__(self):
        for name in ("n_cells", "n_photons"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ConfigError(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise ConfigError(f"{name} must be >= 1, got {value}")
        for name in ("omega", "coupling"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be positive and finite, got {value!r}")

    @property
    def d(self) -> int:
        """Number of excitations that can move into the battery."""
        return min(self.n_cells, self.n_photons)

    def subspace_dim(self) -> int:
        return self.d + 1

    @property
    def max_energy(self) -> float:
        """``omega * d``, the storage target for optimal charging."""
        return self.omega * self.d


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diagonal, dtype=float)
        off = np.asarray(self.off_diagonal, dtype=float)
        if diag.ndim != 1 or off.ndim != 1 or diag.size < 1 or off.size != diag.size - 1:
            raise ConfigError(
                f"need diagonal of length n >= 1 and off-diagonal of length n - 1, "
                f"got {diag.shape} and {off.shape}"
            )
        diag.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "diagonal", diag)
        object.__setattr__(self, "off_diagonal", off)

    @property
    def dim(self) -> int:
        return self.diagonal.size

    def to_dense(self) -> np.ndarray:
        """Dense copy, for tests and small-matrix diagnostics only."""
        return np.diag(self.diagonal) + np.diag(self.off_diagonal, 1) + np.diag(self.off_diagonal, -1)


def coupling_element(cfg: BatteryConfig, j: int) -> float:
    """Matrix element ``u_j`` linking basis states ``j - 1`` and ``j`` (one-based ``j``)."""
    if not 1 <= j <= cfg.d:
        raise ValueError(f"coupling index j must lie in [1, {cfg.d}], got {j}")
    return cfg.coupling * math.sqrt(j * (cfg.n_cells - j + 1) * (cfg.n_photons - j + 1))


def _couplings(cfg: BatteryConfig) -> np.ndarray:
    j = np.arange(1, cfg.d + 1, dtype=float)
    return cfg.coupling * np.sqrt(j * (cfg.n_cells - j + 1) * (cfg.n_photons - j + 1))


def build_hamiltonian(cfg: BatteryConfig) -> TridiagonalHamiltonian:
    dim = cfg.subspace_dim()
    return TridiagonalHamiltonian(np.zeros(dim), _couplings(cfg))


def spin_ladder(two_spin: int) -> np.ndarray:
    """``f_j = sqrt(j (2s - j + 1))`` for ``j = 1 .. 2s``."""
    j = np.arange(1, two_spin + 1, dtype=float)
    return np.sqrt(j * (two_spin - j + 1))


def rabi_frequency(cfg: BatteryConfig, regime: Regime) -> float:
    """Generalized Rabi frequency of the SU(2) limit for ``regime``."""
    if regime is Regime.CHARGER_DOMINANT:
        radicand = cfg.n_photons - (cfg.n_cells - 1) / 2
    else:
        radicand = cfg.n_cells - (cfg.n_photons - 1) / 2
    if radicand <= 0:
        raise ConfigError(
            f"Rabi frequency radicand is {radicand} <= 0 for N_b={cfg.n_cells}, "
            f"n_0={cfg.n_photons} in the {regime.value}-dominant regime"
        )
    return 2 * cfg.coupling * math.sqrt(radicand)


def su2_limit_hamiltonian(cfg: BatteryConfig, regime: Regime) -> TridiagonalHamiltonian:
    """``Omega * J^x`` in the spin representation the regime selects.

    The spin is ``N_b / 2`` when the charger dominates and ``n_0 / 2`` when the
    battery does, so the dimension is ``N_b + 1`` or ``n_0 + 1`` independent of
    whether the regime actually applies.
    """
    omega_r = rabi_frequency(cfg, regime)
    two_spin = cfg.n_cells if regime is Regime.CHARGER_DOMINANT else cfg.n_photons
    return TridiagonalHamiltonian(np.zeros(two_spin + 1), omega_r * spin_ladder(two_spin) / 2)
