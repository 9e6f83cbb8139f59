import math

import numpy as np
import pytest

from socialdyn.analytic import evaluate_solution, zero_crossing_period
from socialdyn.core import (
    AssessmentVector,
    ComplexBody,
    FloorConstraint,
    ForceParams,
    OscillatorSolution,
    SimulationState,
    SingularityError,
    SocialBody,
    ValidationError,
)
from socialdyn.dynamics import (
    IntegratorConfig,
    IntegratorMethod,
    acceleration,
    accelerations,
    final_state,
    linear_omega,
    simulate,
    step,
    total_energy,
    validate_state,
)
from socialdyn.forces import ForceModel
from socialdyn.scenarios import (
    build_attraction_pendulum,
    build_celebrity_pair,
    build_elastic_pair,
    build_fashion_oscillator,
)

METHODS = list(IntegratorMethod)


def V(*xs):
    return AssessmentVector(xs)


def free_body(pos=(0.0, 0.0), vel=(1.0, 0.0), mass=1.0, bid="a"):
    return SocialBody(bid, V(*pos), V(*vel), mass=mass)


def test_acceleration_examples():
    b = free_body(mass=2.0)
    assert acceleration(b, V(0.0, 0.0)).coords == (0.0, 0.0)
    assert acceleration(b, V(2.0, 0.0)).coords == (1.0, 0.0)
    with pytest.raises(ValidationError):
        acceleration(b, V(1.0))


def test_acceleration_ratio_celebrity():
    s = build_celebrity_pair(m_c=100.0, m=1.0)
    acc = accelerations(s.state)
    ratio = np.linalg.norm(acc["celebrity"]) / np.linalg.norm(acc["ordinary"])
    assert ratio == pytest.approx(1 / 100, rel=1e-12)


def test_inertial_step_exact():
    state = SimulationState(2, [free_body()])
    nxt = step(state, IntegratorConfig(1.0, 1.0, IntegratorMethod.SEMI_IMPLICIT_EULER))
    assert nxt.bodies[0].position.coords == (1.0, 0.0)
    assert nxt.bodies[0].velocity.coords == (1.0, 0.0)
    assert nxt.t == 1.0


@pytest.mark.parametrize("method", METHODS)
def test_inertia_without_forces(method):
    state = SimulationState(3, [free_body((1.0, 2.0, 3.0), (0.25, -0.5, 1e-3))])
    tr = simulate(state, IntegratorConfig(0.1, 50.0, method))[0]
    assert np.all(tr.velocities == np.array([0.25, -0.5, 1e-3]))
    np.testing.assert_allclose(tr.positions, np.array([1.0, 2.0, 3.0]) + tr.times[:, None] * [0.25, -0.5, 1e-3],
                               rtol=1e-12, atol=1e-12)


def test_one_rk4_step_matches_closed_form():
    s = build_fashion_oscillator(k_e=1.0, m=1.0, A0=1.0)
    sol = s.expected.solution
    # start from the turning point x = A, v = 0
    state = SimulationState(1, [SocialBody("others", V(1.0), V(0.0), mass=1.0)], s.state.forces)
    dt = sol.period / 1000
    nxt = step(state, IntegratorConfig(dt, dt, IntegratorMethod.RK4))
    x, v = evaluate_solution(OscillatorSolution(0.0, 1.0, sol.omega), dt)
    assert nxt.bodies[0].position.coords[0] == pytest.approx(x, rel=1e-10)


def test_leapfrog_conserves_momentum_per_step():
    a = SocialBody("a", V(0.0, 0.0), V(0.1, 0.2), mass=3.0)
    b = SocialBody("b", V(1.0, 0.5), V(-0.3, 0.0), mass=0.5)
    forces = [ForceModel("attraction", ForceParams(V(0, 0), gamma=1.0, softening=0.0), ("a", "b"))]
    state = SimulationState(2, [a, b], forces)

    def momentum(st):
        return sum(b.mass * b.velocity.to_array() for b in st.bodies)

    cfg = IntegratorConfig(1e-3, 1e-3, IntegratorMethod.LEAPFROG)
    for _ in range(200):
        nxt = step(state, cfg)
        assert np.linalg.norm(momentum(nxt) - momentum(state)) < 1e-9
        state = nxt


def test_simulate_fencepost():
    state = SimulationState(1, [free_body((0.0,), (1.0,))])
    tr = simulate(state, IntegratorConfig(0.1, 1.0, IntegratorMethod.SEMI_IMPLICIT_EULER))[0]
    assert len(tr) == 11
    assert tr.times[0] == 0.0 and tr.times[-1] == pytest.approx(1.0)
    assert np.all(np.diff(tr.times) > 0)


def test_simulate_record_every():
    state = SimulationState(1, [free_body((0.0,), (1.0,))])
    tr = simulate(state, IntegratorConfig(0.1, 1.0, IntegratorMethod.LEAPFROG, record_every=5))[0]
    assert len(tr) == 3
    assert list(tr.times) == [0.0, 0.5, 1.0]


def test_simulate_matches_repeated_steps():
    s = build_elastic_pair()
    cfg = IntegratorConfig(s.integrator.dt, 20 * s.integrator.dt, s.integrator.method)
    trs = simulate(s.state, cfg)
    state = s.state
    for _ in range(20):
        state = step(state, cfg)
    assert final_state(s.state, trs).bodies == state.bodies


def test_harmonic_ten_periods_rk4():
    s = build_fashion_oscillator(k_e=1.0, m=1.0, A0=1.0)
    tr = simulate(s.state, s.integrator)[0]
    x, v = evaluate_solution(s.expected.solution, tr.times)
    assert np.max(np.abs(tr.positions[:, 0] - x)) < 1e-6
    assert np.max(np.abs(tr.velocities[:, 0] - v)) < 1e-6


def test_pendulum_period_small_angle():
    s = build_attraction_pendulum(gamma=1.0, m_c=1e4, R=100.0, m=1.0, beta0=math.atan(0.01), periods=4)
    tr = simulate(s.state, s.integrator)[0]
    period = zero_crossing_period(tr.times, tr.positions[:, 0])
    expected = 2 * math.pi * math.sqrt(100.0 / 1.0)
    assert abs(period - expected) / expected < 0.005


def test_pendulum_floor_holds():
    s = build_attraction_pendulum(periods=2)
    tr = simulate(s.state, s.integrator)[0]
    assert np.all(tr.positions[:, 1] == 100.0)
    assert np.all(tr.velocities[:, 1] == 0.0)


@pytest.mark.parametrize("method", METHODS)
def test_floor_stops_normal_motion(method):
    # body falls onto a per-dimension floor at y = 0 and then slides along it
    b = SocialBody("a", V(0.0, 1.0), V(1.0, -2.0), mass=1.0)
    state = SimulationState(2, [b], constraints=[FloorConstraint("a", V(0.0, 1.0), 0.0)])
    tr = simulate(state, IntegratorConfig(0.01, 2.0, method))[0]
    assert np.all(tr.positions[:, 1] >= 0.0)
    assert tr.positions[-1, 1] == 0.0
    assert tr.velocities[-1, 1] == 0.0
    assert np.all(tr.velocities[:, 0] == 1.0)


def test_leapfrog_energy_drift():
    s = build_elastic_pair(periods=100)
    trs = simulate(s.state, s.integrator)
    e0 = total_energy(s.state)
    energies = []
    for k in range(0, len(trs[0]), 50):
        bodies = [b.moved(V(*tr.positions[k]), V(*tr.velocities[k])) for b, tr in zip(s.state.bodies, trs)]
        energies.append(total_energy(SimulationState(2, bodies, s.state.forces)))
    assert np.max(np.abs(np.array(energies) - e0)) / abs(e0) < 1e-3


def test_rk4_fourth_order():
    def endpoint_error(spp):
        s = build_fashion_oscillator(steps_per_period=spp)
        tr = simulate(s.state, s.integrator)[0]
        x, _ = evaluate_solution(s.expected.solution, tr.times[-1])
        return abs(tr.positions[-1, 0] - x)

    ratio = endpoint_error(1000) / endpoint_error(2000)
    assert 12 <= ratio <= 20


def test_semi_implicit_euler_first_order():
    def endpoint_error(spp):
        # a whole period cancels the leading error term, so stop part way
        s = build_fashion_oscillator(periods=0.3, steps_per_period=spp)
        cfg = IntegratorConfig(s.integrator.dt, s.integrator.t_end, IntegratorMethod.SEMI_IMPLICIT_EULER)
        tr = simulate(s.state, cfg)[0]
        x, v = evaluate_solution(s.expected.solution, tr.times[-1])
        return math.hypot(tr.positions[-1, 0] - x, tr.velocities[-1, 0] - v)

    assert 1.5 < endpoint_error(200) / endpoint_error(400) < 2.5


def test_leapfrog_second_order():
    def endpoint_error(spp):
        s = build_fashion_oscillator(periods=1, steps_per_period=spp)
        cfg = IntegratorConfig(s.integrator.dt, s.integrator.t_end, IntegratorMethod.LEAPFROG)
        tr = simulate(s.state, cfg)[0]
        x, v = evaluate_solution(s.expected.solution, tr.times[-1])
        return math.hypot(tr.positions[-1, 0] - x, tr.velocities[-1, 0] - v)

    assert 3.5 < endpoint_error(200) / endpoint_error(400) < 4.5


def test_deterministic():
    s = build_elastic_pair(periods=2)
    a = simulate(s.state, s.integrator)
    b = simulate(s.state, s.integrator)
    for ta, tb in zip(a, b):
        assert ta.positions.tobytes() == tb.positions.tobytes()
        assert ta.velocities.tobytes() == tb.velocities.tobytes()


def test_singularity_carries_body_and_time():
    a = SocialBody("a", V(1.0), V(0.0), mass=1.0)
    b = SocialBody("b", V(1.0), V(0.0), mass=1.0)
    p = ForceParams(V(0.0), gamma=1.0, softening=0.0)
    state = SimulationState(1, [a, b], [ForceModel("attraction", p, ("a", "b"))], t=3.0)
    with pytest.raises(SingularityError) as info:
        simulate(state, IntegratorConfig(0.25, 2.0))
    assert info.value.body_id == "a"
    assert info.value.t == 3.0


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_overflow_reported_as_singularity():
    b = SocialBody("a", V(1e200), V(0.0), mass=1.0)
    state = SimulationState(1, [b], [ForceModel("change", ForceParams(V(0.0), k_c=1e200), ("a",))])
    with pytest.raises(SingularityError, match="non-finite") as info:
        simulate(state, IntegratorConfig(1.0, 10.0, IntegratorMethod.SEMI_IMPLICIT_EULER))
    assert info.value.body_id == "a" and info.value.t == 0.0


def test_softened_coincident_bodies_feel_no_force():
    a = SocialBody("a", V(1.0, 1.0), V(0.0, 0.0), mass=1.0)
    b = SocialBody("b", V(1.0, 1.0), V(0.0, 0.0), mass=2.0)
    p = ForceParams(V(0.0, 0.0), gamma=1.0, softening=1e-3)
    acc = accelerations(SimulationState(2, [a, b], [ForceModel("attraction", p, ("a", "b"))]))
    assert not acc["a"].any() and not acc["b"].any()


def test_center_singularity():
    planet = ComplexBody("O", (), V(0.0, 0.0), 1.0, 0.1, fixed_radius=1.0)
    state = SimulationState(
        2, [SocialBody("c", V(0.0, 0.0), V(0.0, 0.0), mass=1.0)],
        [ForceModel("surface_gravity", ForceParams(V(0, 0), softening=0.0), ("c", "O"), check_layer=False)],
        [planet],
    )
    with pytest.raises(SingularityError, match="center"):
        step(state, IntegratorConfig(0.1, 0.1))


def test_validate_state_errors():
    a = free_body(bid="a")
    with pytest.raises(ValidationError, match="duplicate"):
        validate_state(SimulationState(2, [a, a]))
    with pytest.raises(ValidationError, match="dimension"):
        validate_state(SimulationState(3, [a]))
    with pytest.raises(ValidationError, match="unknown body"):
        validate_state(SimulationState(2, [a], [ForceModel("elasticity", ForceParams(V(0, 0)), ("zz",))]))
    with pytest.raises(ValidationError, match="equilibrium"):
        validate_state(SimulationState(2, [a], [ForceModel("elasticity", ForceParams(V(0.0)), ("a",))]))
    with pytest.raises(ValidationError, match="unknown complex"):
        validate_state(SimulationState(2, [a], [ForceModel("surface_gravity", ForceParams(V(0, 0)), ("a", "O"))]))
    with pytest.raises(ValidationError, match="floor"):
        validate_state(SimulationState(2, [a], constraints=[FloorConstraint("zz", V(0.0, 1.0), 0.0)]))


def test_surface_gravity_layer_precondition():
    planet = ComplexBody("O", (), V(0.0, 0.0), 1e4, 1.0, fixed_radius=100.0)
    gravity = ForceModel("surface_gravity", ForceParams(V(0, 0)), ("c", "O"))
    inside = SimulationState(2, [free_body((0.0, 50.0), (0.0, 0.0), bid="c")], [gravity], [planet])
    with pytest.raises(ValidationError, match="ordinary"):
        validate_state(inside)
    validate_state(inside, check_layers=False)
    waived = ForceModel("surface_gravity", ForceParams(V(0, 0)), ("c", "O"), check_layer=False)
    validate_state(SimulationState(2, inside.bodies, [waived], [planet]))
    public = SimulationState(2, [free_body((0.0, 100.5), (0.0, 0.0), bid="c")], [gravity], [planet])
    validate_state(public)


def test_integrator_config_validation():
    with pytest.raises(ValidationError):
        IntegratorConfig(0.0, 1.0)
    with pytest.raises(ValidationError):
        IntegratorConfig(1.0, 0.5)
    with pytest.raises(ValidationError):
        IntegratorConfig(0.1, 1.0, record_every=0)
    with pytest.raises(ValueError):
        IntegratorConfig(0.1, 1.0, "euler")
    assert IntegratorConfig(0.1, 1.0).n_steps == 10
    assert IntegratorConfig(2 * math.pi / 1000, 20 * math.pi).n_steps == 10_000


def test_linear_omega():
    s = build_fashion_oscillator(k_e=4.0, m=1.0)
    assert linear_omega(s.state, "others") == 2.0
    assert linear_omega(build_celebrity_pair().state, "ordinary") is None


def test_trajectory_samples():
    state = SimulationState(1, [free_body((0.0,), (1.0,))])
    tr = simulate(state, IntegratorConfig(0.5, 1.0))[0]
    t, x, v = tr.samples[-1]
    assert t == 1.0 and x == V(1.0) and v == V(1.0)
