"""Brute-force reference dynamics in the full spins-times-Fock space.

Every atom is an explicit qubit (bit ``j`` of the basis index set means atom
``j`` is excited) and the photon mode is truncated at ``n_max = n_0``. The
full Hamiltonian, including ``H_b + H_c``, is diagonalised densely with
LAPACK (``numpy.linalg.eigh``) on the block of states with ``popcount(b) + n
= n_0``, which contains the initial state and is closed under the dynamics.
None of this shares code with the Dicke-basis pipeline, so the two can be
compared.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from tcbattery.dynamics import BatteryPopulations, entropy_bits
from tcbattery.errors import OracleSizeError
from tcbattery.model import BatteryConfig

MAX_CELLS = 12


@dataclass(frozen=True)
class FullStateVector:
    """Amplitudes indexed by ``b * (n_max + 1) + n`` for spin bitstring ``b``."""

    amplitudes: np.ndarray
    n_cells: int
    n_max: int
    time: float = 0.0

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``(2**n_cells, n_max + 1)``: spins by photons."""
        return self.amplitudes.reshape(2**self.n_cells, self.n_max + 1)


def _popcounts(n_cells: int) -> np.ndarray:
    b = np.arange(2**n_cells)
    return np.array([bin(x).count("1") for x in b])


def _check_size(cfg: BatteryConfig):
    if cfg.n_cells > MAX_CELLS:
        raise OracleSizeError(f"oracle supports at most {MAX_CELLS} cells, got {cfg.n_cells}")


def hamiltonian_on(cfg: BatteryConfig, states) -> np.ndarray:
    """Dense TC Hamiltonian restricted to the given ``(bitstring, photons)`` states.

    Transitions leaving the set are dropped, which is exact when the set is
    invariant and amounts to Fock truncation for the full product space.
    """
    index = {s: k for k, s in enumerate(states)}
    h = np.zeros((len(states), len(states)))
    for k, (b, n) in enumerate(states):
        h[k, k] = cfg.omega * (bin(b).count("1") - cfg.n_cells / 2 + n)
        if n == 0:
            continue
        for j in range(cfg.n_cells):
            if b >> j & 1:
                continue
            # sigma_j^+ a |b, n> = sqrt(n) |b + 2^j, n - 1>
            target = index.get((b | 1 << j, n - 1))
            if target is not None:
                amp = cfg.coupling * math.sqrt(n)
                h[target, k] += amp
                h[k, target] += amp
    return h


def full_space_states(cfg: BatteryConfig, n_max: int | None = None):
    n_max = cfg.n_photons if n_max is None else n_max
    return [(b, n) for b in range(2**cfg.n_cells) for n in range(n_max + 1)]


def shell_states(cfg: BatteryConfig):
    return [(b, cfg.n_photons - bin(b).count("1"))
            for b in range(2**cfg.n_cells) if bin(b).count("1") <= cfg.n_photons]


@functools.lru_cache(maxsize=64)
def _shell_spectrum(cfg: BatteryConfig):
    states = shell_states(cfg)
    values, vectors = np.linalg.eigh(hamiltonian_on(cfg, states))
    width = cfg.n_photons + 1
    flat = np.array([b * width + n for b, n in states])
    start = states.index((0, cfg.n_photons))
    return values, vectors, flat, start


def initial_state(cfg: BatteryConfig) -> FullStateVector:
    _check_size(cfg)
    amps = np.zeros(2**cfg.n_cells * (cfg.n_photons + 1), dtype=complex)
    amps[cfg.n_photons] = 1.0  # all spins down, n_0 photons
    return FullStateVector(amps, cfg.n_cells, cfg.n_photons, 0.0)


def oracle_evolve(cfg: BatteryConfig, t: float) -> FullStateVector:
    """``exp(-i H t) |down...down>|n_0>`` by dense diagonalisation of the shell block."""
    _check_size(cfg)
    values, vectors, flat, start = _shell_spectrum(cfg)
    shell_amps = vectors @ (np.exp(-1j * values * t) * vectors[start])
    amps = np.zeros(2**cfg.n_cells * (cfg.n_photons + 1), dtype=complex)
    amps[flat] = shell_amps
    return FullStateVector(amps, cfg.n_cells, cfg.n_photons, float(t))


def oracle_battery_populations(state: FullStateVector):
    """Dicke-state populations ``m = 0 .. min(N_b, n_max)`` and the leaked weight.

    The Dicke state with ``m`` excitations is the equal superposition of all
    bitstrings with popcount ``m``, normalised by ``1 / sqrt(C(N_b, m))``.
    The leaked weight is the probability outside the fully symmetric sector.
    """
    psi = state.as_matrix()
    counts = _popcounts(state.n_cells)
    d = min(state.n_cells, state.n_max)
    pops = np.zeros(d + 1)
    for m in range(state.n_cells + 1):
        proj = psi[counts == m].sum(axis=0) / math.sqrt(math.comb(state.n_cells, m))
        weight = float(np.sum(np.abs(proj) ** 2))
        if m <= d:
            pops[m] = weight
    leakage = float(np.sum(np.abs(psi) ** 2)) - float(pops.sum())
    return BatteryPopulations(pops), leakage


def oracle_energy(cfg: BatteryConfig, state: FullStateVector) -> float:
    """``Tr(H_b rho_b(t)) - Tr(H_b rho_b(0))`` from the full state."""
    weights = np.sum(np.abs(state.as_matrix()) ** 2, axis=1)
    return float(cfg.omega * np.dot(_popcounts(state.n_cells), weights))


def oracle_entropy(state: FullStateVector) -> float:
    """Von Neumann entropy (bits) of the battery's full ``2^N_b``-dimensional reduced state."""
    psi = state.as_matrix()
    rho = psi @ psi.conj().T
    return float(entropy_bits(np.clip(np.linalg.eigvalsh(rho), 0.0, None)))


def shell_leakage(cfg: BatteryConfig, state: FullStateVector) -> float:
    """Largest amplitude outside ``popcount(b) + n = n_0``."""
    psi = state.as_matrix()
    excitations = _popcounts(state.n_cells)[:, None] + np.arange(state.n_max + 1)[None, :]
    outside = np.abs(psi[excitations != cfg.n_photons])
    return float(outside.max()) if outside.size else 0.0
