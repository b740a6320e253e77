"""Energy storage in the Tavis-Cummings quantum battery.

The battery is ``N_b`` two-level atoms sharing one cavity mode that starts in
the Fock state ``|n_0>``. Starting from the all-down battery state, the
dynamics never leave a ``(d + 1)``-dimensional subspace (``d = min(N_b, n_0)``)
in which the Hamiltonian is a zero-diagonal tridiagonal matrix. Everything
in this package is built on that reduction.
"""

from tcbattery.errors import ConfigError, ConvergenceError, NumericalError, OracleSizeError
from tcbattery.model import (
    BatteryConfig,
    Regime,
    TridiagonalHamiltonian,
    build_hamiltonian,
    coupling_element,
    su2_limit_hamiltonian,
)
from tcbattery.tridiag import EigenDecomposition, decompose
from tcbattery.dynamics import (
    BatteryPopulations,
    ChargingReport,
    SubspaceState,
    charging_trace,
    entanglement_entropy,
    evolve,
    populations,
    stored_energy,
)
from tcbattery.optimizer import OptimizationResult, average_metrics, find_charging_time

__version__ = "0.1.0"

__all__ = [
    "BatteryConfig",
    "BatteryPopulations",
    "ChargingReport",
    "ConfigError",
    "ConvergenceError",
    "EigenDecomposition",
    "NumericalError",
    "OptimizationResult",
    "OracleSizeError",
    "Regime",
    "SubspaceState",
    "TridiagonalHamiltonian",
    "average_metrics",
    "build_hamiltonian",
    "charging_trace",
    "coupling_element",
    "decompose",
    "entanglement_entropy",
    "evolve",
    "find_charging_time",
    "populations",
    "stored_energy",
    "su2_limit_hamiltonian",
]
