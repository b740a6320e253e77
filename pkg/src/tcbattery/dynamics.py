"""Time evolution inside the invariant subspace.

Entropies are in bits (log base 2). Energies are in the same units as
``omega`` and measured relative to the initial all-down battery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tcbattery.model import BatteryConfig, build_hamiltonian
from tcbattery.tridiag import EigenDecomposition, decompose

# populations below this carry no entropy
POPULATION_FLOOR = 1e-15
_CHUNK = 512


@dataclass(frozen=True)
class SubspaceState:
    amplitudes: np.ndarray
    time: float

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class BatteryPopulations:
    """Diagonal of the battery's reduced density matrix in the Dicke basis."""

    populations: np.ndarray

    @property
    def dim(self) -> int:
        return self.populations.size


@dataclass(frozen=True)
class ChargingReport:
    config: BatteryConfig
    times: np.ndarray
    energy: np.ndarray
    entropy: np.ndarray
    populations: np.ndarray  # shape (len(times), d + 1)
    charging_time: float
    capacity: float
    entropy_at_tau: float
    optimal: bool
    optimality_gap: float
    tolerance: float


def evolve(decomp: EigenDecomposition, t: float) -> SubspaceState:
    """``psi(t) = U exp(-i E t) U^T e_1``."""
    phases = np.exp(-1j * decomp.eigenvalues * t)
    amps = decomp.eigenvectors @ (phases * decomp.initial_overlaps)
    return SubspaceState(amps, float(t))


def amplitudes_at(decomp: EigenDecomposition, times) -> np.ndarray:
    """Amplitudes for many times at once, shape ``(len(times), dim)``."""
    times = np.asarray(times, dtype=float).ravel()
    out = np.empty((times.size, decomp.dim), dtype=complex)
    ut = decomp.eigenvectors.T
    for start in range(0, times.size, _CHUNK):
        block = times[start : start + _CHUNK]
        coeffs = np.exp(-1j * np.outer(block, decomp.eigenvalues)) * decomp.initial_overlaps
        out[start : start + block.size] = coeffs @ ut
    return out


def populations(state: SubspaceState) -> BatteryPopulations:
    return BatteryPopulations(np.abs(state.amplitudes) ** 2)


def stored_energy(cfg: BatteryConfig, pops: BatteryPopulations) -> float:
    """``omega * <m>``, the mean number of excitations moved into the battery."""
    p = pops.populations
    return float(cfg.omega * np.dot(np.arange(p.size), p))


def entropy_bits(p: np.ndarray) -> np.ndarray:
    """Shannon entropy in bits along the last axis."""
    p = np.asarray(p, dtype=float)
    keep = p >= POPULATION_FLOOR
    logs = np.log2(np.where(keep, p, 1.0))
    return -np.sum(np.where(keep, p * logs, 0.0), axis=-1)


def entanglement_entropy(pops: BatteryPopulations) -> float:
    """Battery-charger von Neumann entropy in bits.

    The reduced battery state is diagonal in the Dicke basis, so this is the
    Shannon entropy of the populations.
    """
    return float(entropy_bits(pops.populations))


def energy_curve(cfg: BatteryConfig, decomp: EigenDecomposition, times):
    """Stored energy, entropy and populations along ``times``."""
    pops = np.abs(amplitudes_at(decomp, times)) ** 2
    energy = cfg.omega * (pops @ np.arange(decomp.dim, dtype=float))
    return energy, entropy_bits(pops), pops


def charging_trace(
    cfg: BatteryConfig,
    t_max: float,
    n_steps: int,
    *,
    tolerance: float = 1e-3,
    grid: int | None = None,
    decomp: EigenDecomposition | None = None,
) -> ChargingReport:
    """Energy and entropy on ``linspace(0, t_max, n_steps)`` plus the charging time.

    The charging time is searched over the same window ``(0, t_max]``.
    """
    from tcbattery.optimizer import DEFAULT_GRID, find_charging_time

    if not (t_max > 0 and np.isfinite(t_max)):
        raise ValueError(f"t_max must be positive and finite, got {t_max!r}")
    if n_steps < 2:
        raise ValueError(f"n_steps must be >= 2, got {n_steps}")
    if decomp is None:
        decomp = decompose(build_hamiltonian(cfg))
    times = np.linspace(0.0, t_max, n_steps)
    energy, entropy, pops = energy_curve(cfg, decomp, times)
    result = find_charging_time(
        cfg, t_max=t_max, grid=grid or DEFAULT_GRID, tolerance=tolerance, decomp=decomp
    )
    s_tau = entanglement_entropy(populations(evolve(decomp, result.tau)))
    return ChargingReport(
        config=cfg,
        times=times,
        energy=energy,
        entropy=entropy,
        populations=pops,
        charging_time=result.tau,
        capacity=result.capacity,
        entropy_at_tau=s_tau,
        optimal=result.optimal,
        optimality_gap=result.optimality_gap,
        tolerance=tolerance,
    )
