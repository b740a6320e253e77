"""Acceptance criteria, one test per criterion at the stated tolerance.

Each test records what it measured; ``conftest.py`` prints a PASS/FAIL line
per criterion at the end of the run.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from oracles import expm_taylor
from tcbattery import closed_forms as cf
from tcbattery.dynamics import energy_curve, entanglement_entropy, evolve, populations
from tcbattery.model import BatteryConfig, Regime, TridiagonalHamiltonian, build_hamiltonian
from tcbattery.optimizer import average_metrics, find_charging_time
from tcbattery.tridiag import decompose
from tcbattery.validate import check_oracle, max_limit_deviation


@pytest.fixture
def record(record_property):
    def _record(text):
        record_property("measured", text)
        print(text)
    return _record


def solve(cfg):
    dec = decompose(build_hamiltonian(cfg))
    res = find_charging_time(cfg, decomp=dec)
    return dec, res, entanglement_entropy(populations(evolve(dec, res.tau)))


def test_criterion_1_jc_exactness(record):
    start = time.perf_counter()
    e_dev = tau_dev = 0.0
    for n0 in (1, 4, 9, 25):
        cfg = BatteryConfig(1, n0)
        dec = decompose(build_hamiltonian(cfg))
        ts = np.linspace(0, 4 * cf.jc_charging_time(cfg), 100)
        energy, _, _ = energy_curve(cfg, dec, ts)
        e_dev = max(e_dev, np.max(np.abs(energy - cfg.omega * np.sin(cfg.coupling * math.sqrt(n0) * ts) ** 2)))
        tau = find_charging_time(cfg, decomp=dec).tau
        tau_dev = max(tau_dev, abs(tau / (math.pi / (2 * cfg.coupling * math.sqrt(n0))) - 1))
    elapsed = time.perf_counter() - start
    record(f"energy dev {e_dev:.2e}, tau rel dev {tau_dev:.2e}, {elapsed:.2f}s")
    assert e_dev <= 1e-12
    assert tau_dev <= 1e-10
    assert elapsed < 1.0


def test_criterion_2_two_cell_closed_form(record):
    start = time.perf_counter()
    pop_dev = cap_dev = ent_dev = 0.0
    rng = np.random.default_rng(2)
    for n0 in range(2, 51):
        cfg = BatteryConfig(2, n0)
        dec, res, s_tau = solve(cfg)
        for t in rng.uniform(0, 20, 20):
            ref, _ = cf.two_cell_solution(cfg, t)
            pop_dev = max(pop_dev, np.max(np.abs(populations(evolve(dec, t)).populations - ref)))
        k = 2 * n0 - 1
        cap_dev = max(cap_dev, abs(res.capacity - cfg.omega * (2 - 2 / k**2)))
        x = 1 / k**2
        ent_dev = max(ent_dev, abs(s_tau - (-x * math.log2(x) - (1 - x) * math.log2(1 - x))))
    elapsed = time.perf_counter() - start
    record(f"pop {pop_dev:.2e}, capacity {cap_dev:.2e}, entropy {ent_dev:.2e}, {elapsed:.2f}s")
    assert pop_dev <= 1e-10
    assert cap_dev <= 1e-10
    assert ent_dev <= 1e-10
    assert elapsed < 5.0


def test_criterion_3_fig2_negative_relation(record):
    start = time.perf_counter()
    caps, ents = [], []
    for n0 in range(2, 31):
        _, res, s_tau = solve(BatteryConfig(2, n0))
        caps.append(res.capacity)
        ents.append(s_tau)
    elapsed = time.perf_counter() - start
    dc, ds = np.diff(caps), np.diff(ents)
    record(f"min dE step {dc.min():.2e}, max dS step {ds.max():.2e}, {elapsed:.2f}s")
    assert np.all(dc > 0)
    assert np.all(ds < 0)
    assert elapsed < 5.0


def test_criterion_4_fig3_limit_agreement(record):
    start = time.perf_counter()
    near = {
        (5, 10): max_limit_deviation(BatteryConfig(5, 10), Regime.CHARGER_DOMINANT),
        (10, 5): max_limit_deviation(BatteryConfig(10, 5), Regime.BATTERY_DOMINANT),
    }
    trend = [max_limit_deviation(BatteryConfig(5, n0), Regime.CHARGER_DOMINANT) for n0 in (20, 40, 80)]
    elapsed = time.perf_counter() - start
    # d = 5 for both near points, so the bound is 0.25 omega
    bound = {p: 0.05 * min(p) * 1.0 for p in near}
    record("dev/bound " + ", ".join(f"{p}: {near[p]:.4f}/{bound[p]:.2f}" for p in near)
           + "; n0=20,40,80: " + ", ".join(f"{v:.4f}" for v in trend) + f"; {elapsed:.2f}s")
    assert all(b < a for a, b in zip(trend, trend[1:]))
    assert elapsed < 10.0
    for p, dev in near.items():
        assert dev < bound[p], f"limit deviation at {p} is {dev:.4f}, bound {bound[p]:.2f}"


def test_criterion_5_fig4_asymptotics(record):
    start = time.perf_counter()
    sizes = (2, 5, 10, 20, 50, 100, 150, 200)
    eps, ss = [], []
    for n in sizes:
        cfg = BatteryConfig(n, n)
        _, res, s_tau = solve(cfg)
        e_avg, s_avg = average_metrics(cfg, res, s_tau)
        eps.append(e_avg)
        ss.append(s_avg)
    elapsed = time.perf_counter() - start
    eps, ss = np.array(eps), np.array(ss)
    de, dsv = np.diff(eps), np.diff(ss)
    record("eps " + " ".join(f"{v:.4f}" for v in eps) + f"; {elapsed:.1f}s")
    dip = int(np.argmin(eps))
    assert 0 < dip < len(sizes) - 1
    assert np.all(de[:dip] < 0) and np.all(de[dip:] > 0)
    assert all(e > 0.95 for n, e in zip(sizes, eps) if n > 100)
    assert np.all(de * dsv < 0)
    assert elapsed < 120.0


def test_criterion_6_oracle_equivalence(record):
    start = time.perf_counter()
    results = {r.name: r for r in check_oracle(4, 6, 20)}
    elapsed = time.perf_counter() - start
    eq = results["oracle_equivalence"].max_deviation
    leak = results["symmetric_sector_leakage"].max_deviation
    shell = results["excitation_shell_confinement"].max_deviation
    record(f"equivalence {eq:.2e}, leakage {leak:.2e}, shell {shell:.2e}, {elapsed:.2f}s")
    assert eq <= 1e-8
    assert leak < 1e-10
    assert shell < 1e-12
    assert elapsed < 30.0


def test_criterion_7_property_suites(record):
    rng = np.random.default_rng(7)
    norm = cons = orth = recon = pair = comm = cas = bch = 0.0
    for _ in range(40):
        nb, n0 = (int(v) for v in rng.integers(1, 60, 2))
        cfg = BatteryConfig(nb, n0, omega=float(rng.uniform(0.5, 2)), coupling=float(rng.uniform(0.1, 3)))
        h = build_hamiltonian(cfg)
        dec = decompose(h)
        u = dec.eigenvectors
        orth = max(orth, np.max(np.abs(u.T @ u - np.eye(dec.dim))))
        recon = max(recon, np.max(np.abs(dec.reconstruct() - h.to_dense())) / max(1.0, np.max(h.off_diagonal)))
        pair = max(pair, np.max(np.abs(dec.eigenvalues + dec.eigenvalues[::-1])) / max(1.0, dec.eigenvalues[-1]))
        _, _, pops = energy_curve(cfg, dec, rng.uniform(0, 30, 25))
        m = np.arange(cfg.d + 1)
        norm = max(norm, np.max(np.abs(pops.sum(axis=1) - 1)))
        total = cfg.omega * (pops @ m) + cfg.omega * (pops @ (n0 - m))
        cons = max(cons, np.max(np.abs(total - n0 * cfg.omega)))
    for _ in range(10):
        off = rng.normal(size=int(rng.integers(2, 40)))
        h = TridiagonalHamiltonian(rng.normal(size=off.size + 1), off)
        dec = decompose(h)
        orth = max(orth, np.max(np.abs(dec.eigenvectors.T @ dec.eigenvectors - np.eye(dec.dim))))
        recon = max(recon, np.max(np.abs(dec.reconstruct() - h.to_dense())))
    for two_s in range(1, 21):
        s = cf.spin_generators(two_s)
        x, y, z = s.sx, s.sy, s.sz
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            comm = max(comm, np.max(np.abs(a @ b - b @ a - 1j * c)))
        cas = max(cas, np.max(np.abs(x @ x + y @ y + z @ z - s.spin * (s.spin + 1) * np.eye(s.dimension))))
        if two_s <= 10:
            for angle in rng.uniform(-2 * math.pi, 2 * math.pi, 10):
                rot = expm_taylor(1j * angle * x)
                bch = max(bch, np.max(np.abs(rot @ z @ rot.conj().T - cf.bch_rotated_jz(s, angle))))
    record(f"norm {norm:.1e} energy {cons:.1e} orth {orth:.1e} recon {recon:.1e} pair {pair:.1e} "
           f"comm {comm:.1e} casimir {cas:.1e} bch {bch:.1e}")
    assert norm <= 1e-12
    assert cons <= 1e-10
    assert orth <= 1e-10 and recon <= 1e-10
    assert pair <= 1e-10
    assert comm <= 1e-12 and cas <= 1e-12
    assert bch <= 1e-10


def _sweep(workers, *extra):
    cmd = [sys.executable, "-m", "tcbattery.cli", "sweep", "--workers", str(workers), *extra]
    return subprocess.run(cmd, capture_output=True, check=True).stdout


def test_criterion_8_determinism(record):
    specs = (
        ("--mode", "fig2"),
        ("--n-cells", "1:6", "--n-photons", "3,7,12", "--format", "jsonl"),
        ("--mode", "fig3"),
    )
    sizes = []
    for spec in specs:
        outputs = {_sweep(w, *spec) for w in (1, 2, 1, 2)}
        sizes.append(len(outputs))
    record(f"distinct outputs per sweep (4 runs, workers 1/2): {sizes}")
    assert sizes == [1] * len(specs)
