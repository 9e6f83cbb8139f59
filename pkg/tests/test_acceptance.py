"""Acceptance criteria, each at its stated tolerance.

A summary line per criterion is printed at the end of the pytest run.
"""
import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

import socialdyn
from socialdyn.analytic import dominant_frequency, evaluate_solution, zero_crossing_period
from socialdyn.assessment_space import PollRecord, aggregate_assessment, leaves, radius
from socialdyn.cli import main
from socialdyn.core import AssessmentVector, ComplexBody, ForceParams, SimulationState, SocialBody
from socialdyn.dynamics import accelerations, simulate, total_energy
from socialdyn.forces import attraction_force
from socialdyn.scenarios import (
    build_attraction_pendulum,
    build_celebrity_pair,
    build_elastic_pair,
    build_fashion_oscillator,
    build_stability_probe,
    load_shipped,
    shipped_scenario_names,
)


def criterion(number, label):
    return pytest.mark.criterion(number, label)


def fashion_max_deviation(steps_per_period=1000):
    s = build_fashion_oscillator(k_e=1.0, m=1.0, A0=1.0, periods=10, steps_per_period=steps_per_period)
    tr = simulate(s.state, s.integrator)[0]
    x_ref, _ = evaluate_solution(s.expected.solution, tr.times)
    return s, tr, np.abs(tr.positions[:, 0] - x_ref)


@criterion(1, "harmonic oracle: RK4, dt=T/1000, 10 periods, max deviation < 1e-6*A0, runtime < 1 s")
def test_harmonic_oracle():
    start = time.perf_counter()
    s, _, dev = fashion_max_deviation()
    elapsed = time.perf_counter() - start
    assert s.integrator.dt == pytest.approx(2 * math.pi / 1000)
    assert dev.max() < 1e-6 * 1.0
    assert elapsed < 1.0


@criterion(2, "pendulum period within 0.5% of 2*pi*sqrt(R/g), runtime < 1 s")
def test_pendulum_frequency():
    gamma, m_c, R = 1.0, 1e4, 100.0
    start = time.perf_counter()
    s = build_attraction_pendulum(gamma=gamma, m_c=m_c, R=R, beta0=math.atan(0.01), periods=3)
    tr = simulate(s.state, s.integrator)[0]
    period = zero_crossing_period(tr.times, s.expected.displacement(tr.positions))
    elapsed = time.perf_counter() - start
    g = gamma * m_c / R**2
    expected = 2 * math.pi * math.sqrt(R / g)
    assert abs(period - expected) / expected < 0.005
    assert elapsed < 1.0


@criterion(3, "celebrity pair first-step acceleration ratio 0.01 within 1e-12")
def test_acceleration_ratio():
    s = build_celebrity_pair(m_c=100.0, m=1.0)
    acc = accelerations(s.state)
    ratio = np.linalg.norm(acc["celebrity"]) / np.linalg.norm(acc["ordinary"])
    assert abs(ratio - 0.01) <= 1e-12 * 0.01


@criterion(4, "third law on 100 random attraction pairs, residual < 1e-12*|F|")
def test_third_law():
    rng = np.random.default_rng(2024)
    for k in range(100):
        n = int(rng.integers(1, 6))
        a = SocialBody("a", AssessmentVector(tuple(rng.uniform(-100, 100, n))), AssessmentVector.zeros(n),
                       mass=float(rng.uniform(0.1, 100)))
        b = SocialBody("b", AssessmentVector(tuple(rng.uniform(-100, 100, n))), AssessmentVector.zeros(n),
                       mass=float(rng.uniform(0.1, 100)))
        p = ForceParams(AssessmentVector.zeros(n), gamma=float(rng.uniform(0.1, 10)), softening=0.0)
        f_ab, f_ba = attraction_force(a, b, p), attraction_force(b, a, p)
        assert (f_ab + f_ba).norm() < 1e-12 * f_ab.norm()


@criterion(5, "leapfrog energy drift < 1e-3 over 100 periods on the two-body elastic configuration")
def test_energy_conservation():
    s = build_elastic_pair(periods=100)
    trs = simulate(s.state, s.integrator)
    e0 = total_energy(s.state)
    drift = 0.0
    for k in range(len(trs[0])):
        bodies = [
            b.moved(AssessmentVector(tuple(tr.positions[k])), AssessmentVector(tuple(tr.velocities[k])))
            for b, tr in zip(s.state.bodies, trs)
        ]
        e = total_energy(SimulationState(s.state.dimension, bodies, s.state.forces))
        drift = max(drift, abs(e - e0) / abs(e0))
    assert drift < 1e-3


@criterion(6, "stability: bounded, cosh growth within 1%, neutral static")
def test_stability_classification():
    x0 = 1.0
    s = build_stability_probe(k_e=2.0, k_c=1.0, x0=x0, periods=50)
    tr = simulate(s.state, s.integrator)[0]
    assert tr.times[-1] == pytest.approx(50 * s.expected.solution.period)
    assert np.max(np.abs(tr.positions[:, 0])) <= x0 * (1 + 1e-6)

    k_e, k_c, m = 1.0, 2.0, 1.0
    s = build_stability_probe(k_e=k_e, k_c=k_c, m=m, x0=x0)
    lam = math.sqrt((k_c - k_e) / m)
    t_check = 3 / lam
    tr = simulate(s.state, s.integrator)[0]
    k = int(np.argmin(np.abs(tr.times - t_check)))
    assert tr.times[k] == pytest.approx(t_check, abs=1e-9)
    assert tr.positions[k, 0] == pytest.approx(x0 * math.cosh(lam * t_check), rel=0.01)

    s = build_stability_probe(k_e=1.0, k_c=1.0, x0=x0)
    tr = simulate(s.state, s.integrator)[0]
    assert np.all(tr.positions[:, 0] == x0) and np.all(tr.velocities[:, 0] == 0.0)


@criterion(7, "inverse-square law F(2r)/F(r) = 0.25 within 1e-12 at zero softening")
def test_inverse_square():
    p = ForceParams(AssessmentVector.zeros(3), gamma=1.0, softening=0.0)
    rng = np.random.default_rng(7)
    for _ in range(20):
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        r = float(rng.uniform(0.01, 100))
        origin = SocialBody("o", AssessmentVector.zeros(3), AssessmentVector.zeros(3), mass=3.0)
        near = SocialBody("n", AssessmentVector(tuple(r * direction)), AssessmentVector.zeros(3), mass=5.0)
        far = SocialBody("f", AssessmentVector(tuple(2 * r * direction)), AssessmentVector.zeros(3), mass=5.0)
        ratio = attraction_force(origin, far, p).norm() / attraction_force(origin, near, p).norm()
        assert abs(ratio - 0.25) <= 1e-12


def _hierarchy(rng, max_leaves=1000):
    registry, groups, count = {}, [], 0
    zero = AssessmentVector((0.0, 0.0))
    for g in range(int(rng.integers(1, 8))):
        subs = []
        for s in range(int(rng.integers(1, 8))):
            k = min(int(rng.integers(1, 40)), max_leaves - count)
            if k <= 0:
                break
            registry[f"s{g}_{s}"] = ComplexBody(f"s{g}_{s}", tuple(f"e{count + i}" for i in range(k)), zero, 1.0, 0.1)
            subs.append(f"s{g}_{s}")
            count += k
        if subs:
            registry[f"g{g}"] = ComplexBody(f"g{g}", tuple(subs), zero, 1.0, 0.1)
            groups.append(f"g{g}")
    root = ComplexBody("root", tuple(groups), zero, 1.0, 0.1)
    registry["root"] = root
    return root, registry


@criterion(8, "aggregation equals flat brute-force sum exactly; N minimal evaluators give N = R")
def test_aggregation_oracle():
    rng = np.random.default_rng(8)
    for _ in range(25):
        root, reg = _hierarchy(rng)
        ids = leaves(root, reg)
        assert len(ids) <= 1000
        records = [
            PollRecord(e, "s", d, float(rng.uniform(-100, 100)))
            for e in ids for d in range(2) if rng.random() < 0.9
        ]
        exact = [Fraction(0), Fraction(0)]
        for r in records:
            exact[r.dimension_index] += Fraction(r.value)
        assert aggregate_assessment(records, "s", root, reg).coords == tuple(float(x) for x in exact)

    for n in (1, 3, 17, 1000):
        ids = tuple(f"e{i}" for i in range(n))
        c = ComplexBody("O", ids, AssessmentVector((0.0,)), 1.0, 0.1)
        total = aggregate_assessment([PollRecord(e, "s", 0, 1.0) for e in ids], "s", c)
        assert total.coords == (float(n),) == (radius(c),)


@criterion(9, "dominant frequency of the simulated fashion oscillator within 1% of omega/2pi")
def test_fourier_recovery():
    s, tr, _ = fashion_max_deviation()
    nu = dominant_frequency(tr.times, tr.positions[:, 0])
    expected = s.expected.solution.omega / (2 * math.pi)
    assert abs(nu - expected) / expected < 0.01


@criterion(10, "two runs of every shipped scenario give byte-identical trajectory CSVs")
def test_determinism(tmp_path):
    data = Path(socialdyn.__file__).parent / "data"
    names = shipped_scenario_names()
    assert len(names) >= 10
    for name in names:
        load_shipped(name)
        outputs = []
        for run in ("a", "b"):
            out = tmp_path / run / name
            assert main(["simulate", "--scenario", str(data / f"{name}.json"), "--out", str(out)]) == 0
            outputs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
        assert outputs[0] and outputs[0] == outputs[1]


@criterion(11, "RK4 endpoint error falls by a factor in [12, 20] when dt is halved")
def test_rk4_order():
    _, _, coarse = fashion_max_deviation(1000)
    _, _, fine = fashion_max_deviation(2000)
    ratio = coarse[-1] / fine[-1]
    assert 12 <= ratio <= 20
