"""Ready-made scenarios: fashion oscillator, attraction pendulum, celebrity pair,
stability probe, and a few illustrative demos.

Builders return a :class:`~socialdyn.config.Scenario` holding the initial state,
an integrator setup and, where one exists, the closed-form expected motion.
"""
from __future__ import annotations

import math
import warnings
from importlib import resources
from typing import Callable

from .analytic import HarmonicSpec, OmegaSource, solve_harmonic
from .config import ExpectedMotion, Scenario, loads
from .core import (
    AssessmentVector,
    ComplexBody,
    DrivingForceSpec,
    FloorConstraint,
    ForceParams,
    SimulationState,
    SocialBody,
    ValidationError,
)
from .dynamics import IntegratorConfig, IntegratorMethod
from .forces import ForceKind, ForceModel, stability_class

MAX_TAN_BETA = 0.05
ILLUSTRATIVE = "illustrative demo; parameters are invented, not calibrated to any data"


def _positive(**params: float) -> None:
    for name, value in params.items():
        if not (math.isfinite(value) and value > 0):
            raise ValidationError(f"{name} must be positive, got {value}")


def _periodic_integrator(period: float, periods: float, steps_per_period: int,
                         method=IntegratorMethod.RK4, record_every: int = 1) -> IntegratorConfig:
    return IntegratorConfig(period / steps_per_period, periods * period, method, record_every)


def build_fashion_oscillator(k_e: float = 1.0, m: float = 1.0, A0: float = 1.0,
                             periods: float = 10, steps_per_period: int = 1000) -> Scenario:
    """One body kicked out of equilibrium with speed A0 * omega, restored by elasticity.

    The expected motion is the pure sine x = A0 sin(omega t), peaking at T/4.
    """
    _positive(k_e=k_e, m=m)
    if not (math.isfinite(A0) and A0 >= 0):
        raise ValidationError(f"A0 must be >= 0, got {A0}")
    omega = math.sqrt(k_e / m)
    sol = solve_harmonic(HarmonicSpec(OmegaSource.ELASTIC, x0=0.0, v0=A0 * omega, k_e=k_e, m=m))
    zero = AssessmentVector((0.0,))
    state = SimulationState(
        1,
        (SocialBody("others", zero, AssessmentVector((A0 * omega,)), mass=m),),
        (ForceModel(ForceKind.ELASTICITY, ForceParams(zero, k_e=k_e), ("others",)),),
    )
    return Scenario(
        "fashion",
        state,
        _periodic_integrator(sol.period, periods, steps_per_period),
        ExpectedMotion("others", sol, zero, AssessmentVector((1.0,))),
        metadata={"k_e": k_e, "m": m, "A0": A0},
    )


def build_attraction_pendulum(gamma: float = 1.0, m_c: float = 1e4, R: float = 100.0, m: float = 1.0,
                              beta0: float = math.atan(0.01), alpha: float = 0.0,
                              layer_ratio: float = 0.01, strict: bool = True,
                              periods: float = 10, steps_per_period: int = 1000) -> Scenario:
    """A public body sliding on a constraint line tangent to a large complex body.

    The complex ``O`` sits at the origin of a 2-D space with radius ``R``. The
    constraint line touches the surface at ``R * (-sin(alpha), cos(alpha))``;
    the body starts on it at tangential displacement ``R * tan(beta0)`` at rest
    and feels the constant surface pull ``g * m`` toward the center.
    """
    _positive(gamma=gamma, m_c=m_c, R=R, m=m, beta0=beta0, layer_ratio=layer_ratio)
    tan_beta = math.tan(beta0)
    if tan_beta > MAX_TAN_BETA:
        msg = f"tan(beta0) = {tan_beta:.4g} exceeds the small-angle limit {MAX_TAN_BETA}"
        if strict:
            raise ValidationError(msg)
        warnings.warn(msg, stacklevel=2)
    g = gamma * m_c / (R * R)
    x0 = R * tan_beta
    normal = AssessmentVector((-math.sin(alpha), math.cos(alpha)))
    tangent = AssessmentVector((math.cos(alpha), math.sin(alpha)))
    touch = normal * R
    sol = solve_harmonic(HarmonicSpec(OmegaSource.PENDULUM, x0=x0, v0=0.0, g=g, R=R))
    complex_o = ComplexBody("O", (), AssessmentVector((0.0, 0.0)), m_c, layer_ratio * R, fixed_radius=R)
    state = SimulationState(
        2,
        (SocialBody("C", touch + tangent * x0, AssessmentVector((0.0, 0.0)), mass=m),),
        (ForceModel(ForceKind.SURFACE_GRAVITY, ForceParams(AssessmentVector((0.0, 0.0)), gamma=gamma, softening=0.0), ("C", "O")),),
        (complex_o,),
        (FloorConstraint("C", normal, R),),
    )
    return Scenario(
        "attraction_pendulum",
        state,
        _periodic_integrator(sol.period, periods, steps_per_period),
        ExpectedMotion("C", sol, touch, tangent),
        metadata={"gamma": gamma, "m_c": m_c, "R": R, "m": m, "beta0": beta0, "alpha": alpha, "g": g},
    )


def build_celebrity_pair(m_c: float = 100.0, m: float = 1.0, r0: float = 1.0, gamma: float = 1.0,
                         steps: int = 1000) -> Scenario:
    """A celebrity and an ordinary body released at rest, attracting each other.

    The run covers half the free-fall time, well before the two meet. The
    expected acceleration ratio |a_c| / |a| = m / m_c is stored in metadata.
    """
    _positive(m_c=m_c, m=m, r0=r0, gamma=gamma)
    if m_c < m:
        raise ValidationError(f"the celebrity mass m_c={m_c} must be at least m={m}")
    t_ff = math.pi / 2 * math.sqrt(r0 ** 3 / (2 * gamma * (m_c + m)))
    zero = AssessmentVector((0.0, 0.0))
    state = SimulationState(
        2,
        (
            SocialBody("celebrity", zero, zero, mass=m_c),
            SocialBody("ordinary", AssessmentVector((r0, 0.0)), zero, mass=m),
        ),
        (ForceModel(ForceKind.ATTRACTION, ForceParams(zero, gamma=gamma, softening=0.0), ("celebrity", "ordinary")),),
    )
    t_end = 0.5 * t_ff
    return Scenario(
        "celebrity_pair",
        state,
        IntegratorConfig(t_end / steps, t_end, IntegratorMethod.LEAPFROG),
        metadata={"m_c": m_c, "m": m, "r0": r0, "gamma": gamma, "expected_acceleration_ratio": m / m_c},
    )


def build_stability_probe(k_e: float, k_c: float, m: float = 1.0, x0: float = 1.0,
                          periods: float = 50, steps_per_period: int = 1000,
                          t_end: float = 10.0, dt: float = 1e-3) -> Scenario:
    """One body displaced by x0 at rest, bound by elasticity and change to the origin.

    Sustainable probes run ``periods`` oscillation periods and carry their
    expected cosine; the others run for ``t_end`` time units.
    """
    _positive(m=m, x0=x0)
    for name, value in (("k_e", k_e), ("k_c", k_c)):
        if not (math.isfinite(value) and value >= 0):
            raise ValidationError(f"{name} must be >= 0, got {value}")
    zero = AssessmentVector((0.0,))
    params = ForceParams(zero, k_e=k_e, k_c=k_c)
    state = SimulationState(
        1,
        (SocialBody("probe", AssessmentVector((x0,)), zero, mass=m),),
        (
            ForceModel(ForceKind.ELASTICITY, params, ("probe",)),
            ForceModel(ForceKind.CHANGE, params, ("probe",)),
        ),
    )
    cls = stability_class(k_e, k_c)
    meta = {"k_e": k_e, "k_c": k_c, "m": m, "x0": x0, "stability": cls.value}
    expected = None
    if k_c < k_e:
        sol = solve_harmonic(HarmonicSpec(OmegaSource.ELASTIC, x0=x0, v0=0.0, k_e=k_e - k_c, m=m))
        cfg = _periodic_integrator(sol.period, periods, steps_per_period)
        expected = ExpectedMotion("probe", sol, zero, AssessmentVector((1.0,)))
    else:
        cfg = IntegratorConfig(dt, t_end, IntegratorMethod.RK4)
        if k_c > k_e:
            meta["growth_rate"] = math.sqrt((k_c - k_e) / m)
    return Scenario(f"stability_{cls.value}", state, cfg, expected, metadata=meta)


def build_elastic_pair(k_e: float = 1.0, gamma: float = 0.1, periods: float = 100,
                       steps_per_period: int = 200) -> Scenario:
    """Two mutually attracting bodies, each tied elastically to its own sustainable state.

    Every force is conservative, so the total energy is a constant of motion.
    Periods are counted for the heavier (slower) body.
    """
    _positive(k_e=k_e, gamma=gamma)
    zero = AssessmentVector((0.0, 0.0))
    state = SimulationState(
        2,
        (
            SocialBody("a", AssessmentVector((-1.0, 0.2)), AssessmentVector((0.0, 0.3)), mass=1.0),
            SocialBody("b", AssessmentVector((1.2, -0.1)), AssessmentVector((0.1, 0.0)), mass=2.0),
        ),
        (
            ForceModel(ForceKind.ELASTICITY, ForceParams(AssessmentVector((-2.0, 0.0)), k_e=k_e), ("a",)),
            ForceModel(ForceKind.ELASTICITY, ForceParams(AssessmentVector((2.0, 0.0)), k_e=k_e), ("b",)),
            ForceModel(ForceKind.ATTRACTION, ForceParams(zero, gamma=gamma, softening=0.0), ("a", "b")),
        ),
    )
    fast = 2 * math.pi / math.sqrt(k_e / 1.0)
    slow = 2 * math.pi / math.sqrt(k_e / 2.0)
    return Scenario(
        "elastic_pair",
        state,
        IntegratorConfig(fast / steps_per_period, periods * slow, IntegratorMethod.LEAPFROG, record_every=10),
        metadata={"k_e": k_e, "gamma": gamma},
    )


def build_two_party_antiphase(k_e: float = 1.0, m: float = 1.0, x0: float = 1.0,
                              periods: float = 10, steps_per_period: int = 1000) -> Scenario:
    """Two parties displaced in opposite directions from a shared sustainable state."""
    _positive(k_e=k_e, m=m, x0=x0)
    zero = AssessmentVector((0.0,))
    params = ForceParams(zero, k_e=k_e)
    state = SimulationState(
        1,
        (
            SocialBody("party_a", AssessmentVector((x0,)), zero, mass=m),
            SocialBody("party_b", AssessmentVector((-x0,)), zero, mass=m),
        ),
        (
            ForceModel(ForceKind.ELASTICITY, params, ("party_a",)),
            ForceModel(ForceKind.ELASTICITY, params, ("party_b",)),
        ),
    )
    period = 2 * math.pi / math.sqrt(k_e / m)
    return Scenario(
        "us_congress",
        state,
        _periodic_integrator(period, periods, steps_per_period, IntegratorMethod.LEAPFROG, record_every=10),
        metadata={"note": ILLUSTRATIVE, "k_e": k_e, "m": m, "x0": x0},
    )


def build_civil_war() -> Scenario:
    """Change outweighs elasticity, with an attractive program pushing the same way."""
    base = build_stability_probe(k_e=1.0, k_c=1.5, m=1.0, x0=0.1, t_end=5.0, dt=1e-3)
    state = base.state
    push = ForceModel(
        ForceKind.DRIVING,
        DrivingForceSpec(perceived_benefits=90.0, perceived_costs=45.0, direction=AssessmentVector((1.0,)), scale=0.1),
        ("probe",),
    )
    state = SimulationState(state.dimension, state.bodies, state.forces + (push,))
    return Scenario("civil_war", state, IntegratorConfig(1e-3, 5.0, IntegratorMethod.RK4, 10),
                    metadata={"note": ILLUSTRATIVE, "stability": base.metadata["stability"]})


def build_belarus_2020() -> Scenario:
    """Strong elasticity returns a protest displacement toward the sustainable state."""
    base = build_stability_probe(k_e=2.0, k_c=0.5, m=1.0, x0=1.0, periods=5, steps_per_period=1000)
    return Scenario("belarus_2020", base.state, base.integrator,
                    metadata={"note": ILLUSTRATIVE, "stability": base.metadata["stability"]})


TEMPLATES: dict[str, Callable[[], Scenario]] = {
    "fashion": build_fashion_oscillator,
    "attraction_pendulum": build_attraction_pendulum,
    "celebrity_pair": build_celebrity_pair,
    "stability_sustainable": lambda: build_stability_probe(k_e=2.0, k_c=1.0),
    "stability_neutral": lambda: build_stability_probe(k_e=1.0, k_c=1.0),
    "stability_unsustainable": lambda: build_stability_probe(k_e=1.0, k_c=2.0),
    "elastic_pair": build_elastic_pair,
    "civil_war": build_civil_war,
    "belarus_2020": build_belarus_2020,
    "us_congress": build_two_party_antiphase,
}


def shipped_scenario_names() -> list[str]:
    data = resources.files("socialdyn") / "data"
    return sorted(p.name[:-5] for p in data.iterdir() if p.name.endswith(".json"))


def load_shipped(name: str) -> Scenario:
    """Load one of the scenario files packaged with the library."""
    path = resources.files("socialdyn") / "data" / f"{name}.json"
    if not path.is_file():
        raise ValidationError(f"no shipped scenario named {name!r}")
    return loads(path.read_text(encoding="utf-8"))
