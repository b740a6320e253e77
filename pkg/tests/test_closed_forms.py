import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import expm_taylor
from tcbattery import closed_forms as cf
from tcbattery.dynamics import energy_curve, entanglement_entropy, evolve, populations
from tcbattery.errors import ConfigError
from tcbattery.model import BatteryConfig, Regime, build_hamiltonian, rabi_frequency
from tcbattery.tridiag import decompose

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]])
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


def test_spin_half_matches_pauli():
    s = cf.spin_generators(1)
    np.testing.assert_allclose(s.sx, PAULI_X / 2)
    np.testing.assert_allclose(s.sy, -PAULI_Y / 2)
    np.testing.assert_allclose(s.sz, -PAULI_Z / 2)
    assert s.spin == 0.5 and s.dimension == 2


def test_spin_one():
    s = cf.spin_generators(2)
    r = 1 / math.sqrt(2)
    np.testing.assert_allclose(s.sx, [[0, r, 0], [r, 0, r], [0, r, 0]])
    np.testing.assert_allclose(np.diag(s.sz).real, [-1, 0, 1])


def test_spin_three_halves_ladder():
    s = cf.spin_generators(3)
    np.testing.assert_allclose(np.diag(2 * s.sx, -1).real, [math.sqrt(3), 2, math.sqrt(3)])


def test_spin_generators_reject_zero():
    with pytest.raises(ValueError):
        cf.spin_generators(0)


@given(st.integers(min_value=1, max_value=40))
def test_su2_algebra(two_s):
    s = cf.spin_generators(two_s)
    x, y, z = s.sx, s.sy, s.sz
    for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
        np.testing.assert_allclose(a @ b - b @ a, 1j * c, atol=1e-12)
    j = s.spin
    np.testing.assert_allclose(x @ x + y @ y + z @ z, j * (j + 1) * np.eye(s.dimension), atol=1e-12)
    for m in (x, y, z):
        np.testing.assert_allclose(m, m.conj().T, atol=0)


@settings(deadline=None)
@given(st.integers(min_value=1, max_value=10), st.floats(min_value=-6.3, max_value=6.3))
def test_bch_matches_matrix_exponential(two_s, angle):
    s = cf.spin_generators(two_s)
    u = expm_taylor(1j * angle * s.sx)
    np.testing.assert_allclose(u @ s.sz @ u.conj().T, cf.bch_rotated_jz(s, angle), atol=1e-10)


def test_bch_spin_one_third_turn():
    s = cf.spin_generators(2)
    u = expm_taylor(1j * math.pi / 3 * s.sx)
    np.testing.assert_allclose(u @ s.sz @ u.conj().T, cf.bch_rotated_jz(s, math.pi / 3), atol=1e-12)


def test_bch_special_angles():
    s = cf.spin_generators(4)
    np.testing.assert_allclose(cf.bch_rotated_jz(s, 0.0), s.sz)
    np.testing.assert_allclose(cf.bch_rotated_jz(s, math.pi), -s.sz, atol=1e-15)


@pytest.mark.parametrize("nb", [1, 3, 6])
def test_lowest_weight_expectation(nb):
    s = cf.spin_generators(nb)
    for t in (0.3, 1.1):
        assert cf.bch_rotated_jz(s, t)[0, 0].real == pytest.approx(-nb / 2 * math.cos(t), abs=1e-14)


def test_binary_entropy():
    assert cf.binary_entropy(0.0) == 0.0
    assert cf.binary_entropy(1.0) == 0.0
    assert cf.binary_entropy(0.5) == pytest.approx(1.0)
    assert cf.binary_entropy(1 / 81) == pytest.approx(0.0959704, abs=1e-7)
    with pytest.raises(ValueError):
        cf.binary_entropy(1.2)


def test_jc_formulas():
    cfg = BatteryConfig(1, 9)
    assert cf.jc_charging_time(cfg) == pytest.approx(math.pi / 6)
    assert cf.jc_energy(cfg, math.pi / 6) == pytest.approx(1.0)
    ts = np.linspace(0, 1, 5)
    assert cf.jc_energy(cfg, ts).shape == (5,)
    with pytest.raises(ConfigError):
        cf.jc_energy(BatteryConfig(2, 9), 0.1)


@pytest.mark.parametrize("n0", [1, 4, 9, 25])
def test_jc_matches_pipeline(n0):
    cfg = BatteryConfig(1, n0, coupling=0.6)
    ts = np.linspace(0, 10, 100)
    energy, _, _ = energy_curve(cfg, decompose(build_hamiltonian(cfg)), ts)
    np.testing.assert_allclose(energy, cf.jc_energy(cfg, ts), atol=1e-12)


def test_two_cell_example():
    cfg = BatteryConfig(2, 5)
    tau = cf.two_cell_charging_time(cfg)
    assert tau == pytest.approx(math.pi / math.sqrt(18))
    pops, energy = cf.two_cell_solution(cfg, tau)
    np.testing.assert_allclose(pops, [1 / 81, 0, 80 / 81], atol=1e-15)
    assert energy == pytest.approx(160 / 81)
    assert cf.capacity_two_cell(cfg) == pytest.approx(160 / 81)
    assert cf.entropy_two_cell(cfg) == pytest.approx(cf.binary_entropy(1 / 81))


def test_two_cell_rejects_other_sizes():
    with pytest.raises(ConfigError):
        cf.two_cell_solution(BatteryConfig(3, 5), 0.0)
    with pytest.raises(ConfigError):
        cf.capacity_two_cell(BatteryConfig(2, 1))


@given(st.integers(min_value=2, max_value=60), st.floats(min_value=0, max_value=20))
def test_two_cell_energy_is_population_weighted(n0, t):
    cfg = BatteryConfig(2, n0, omega=1.7)
    pops, energy = cf.two_cell_solution(cfg, t)
    assert sum(pops) == pytest.approx(1, abs=1e-12)
    assert energy == pytest.approx(cfg.omega * (pops[1] + 2 * pops[2]), abs=1e-11)


@pytest.mark.parametrize("n0", [2, 3, 10, 50])
def test_two_cell_matches_pipeline(n0):
    cfg = BatteryConfig(2, n0)
    dec = decompose(build_hamiltonian(cfg))
    for t in (0.2, 1.3, 7.9):
        np.testing.assert_allclose(populations(evolve(dec, t)).populations, cf.two_cell_solution(cfg, t)[0],
                                   atol=1e-12)
    pops = populations(evolve(dec, cf.two_cell_charging_time(cfg)))
    assert entanglement_entropy(pops) == pytest.approx(cf.entropy_two_cell(cfg), abs=1e-11)


def test_su2_charger_example():
    cfg = BatteryConfig(5, 10)
    omega_r = rabi_frequency(cfg, Regime.CHARGER_DOMINANT)
    assert omega_r == pytest.approx(2 * math.sqrt(8))
    assert cf.su2_charging_time(cfg, Regime.CHARGER_DOMINANT) == pytest.approx(math.pi / omega_r)
    assert cf.su2_limit_energy(cfg, Regime.CHARGER_DOMINANT, math.pi / omega_r) == pytest.approx(5.0)
    assert cf.su2_limit_energy(cfg, Regime.CHARGER_DOMINANT, 0.0) == 0.0


def test_su2_battery_example():
    cfg = BatteryConfig(10, 5)
    omega_r = rabi_frequency(cfg, Regime.BATTERY_DOMINANT)
    assert omega_r == pytest.approx(2 * math.sqrt(8))
    assert cf.su2_limit_energy(cfg, Regime.BATTERY_DOMINANT, math.pi / omega_r) == pytest.approx(5.0)


def test_su2_limit_approaches_pipeline():
    cfg = BatteryConfig(3, 2000)
    regime = Regime.CHARGER_DOMINANT
    ts = np.linspace(0, 2 * cf.su2_charging_time(cfg, regime), 101)
    energy, _, _ = energy_curve(cfg, decompose(build_hamiltonian(cfg)), ts)
    np.testing.assert_allclose(energy, cf.su2_limit_energy(cfg, regime, ts), atol=1e-2)
