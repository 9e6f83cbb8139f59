"""Domain types shared across the engine.

Positions and displacements live in the n-dimensional space of assessments and
are measured in leos (summed individual ratings). The unit is a label only.
Social mass is treated as a dimensionless positive number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np


class SocialDynamicsError(Exception):
    """Base class for all engine errors."""


class ValidationError(SocialDynamicsError, ValueError):
    """Raised when an input violates a domain invariant."""


class SingularityError(SocialDynamicsError, ArithmeticError):
    """Raised when a force law is evaluated at a singular configuration.

    ``body_id`` and ``t`` are filled in by the integrator when available.
    """

    def __init__(self, message: str, body_id: Optional[str] = None, t: Optional[float] = None):
        self.message = message
        self.body_id = body_id
        self.t = t
        where = []
        if body_id is not None:
            where.append(f"body={body_id}")
        if t is not None:
            where.append(f"t={t!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


def _as_coords(values: Iterable[float]) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class AssessmentVector:
    """A point or displacement in the space of assessments (leos)."""

    coords: tuple[float, ...]

    def __post_init__(self):
        coords = _as_coords(self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) < 1:
            raise ValidationError("assessment vector needs at least one dimension")
        if not all(math.isfinite(c) for c in coords):
            raise ValidationError(f"assessment coordinates must be finite, got {coords}")

    @classmethod
    def zeros(cls, n: int) -> "AssessmentVector":
        return cls((0.0,) * n)

    @classmethod
    def of(cls, *coords: float) -> "AssessmentVector":
        return cls(coords)

    @property
    def n(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def _check(self, other: "AssessmentVector") -> None:
        if other.n != self.n:
            raise ValidationError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "AssessmentVector") -> "AssessmentVector":
        self._check(other)
        return AssessmentVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "AssessmentVector") -> "AssessmentVector":
        self._check(other)
        return AssessmentVector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "AssessmentVector":
        return AssessmentVector(tuple(-a for a in self.coords))

    def __mul__(self, k: float) -> "AssessmentVector":
        return AssessmentVector(tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def __truediv__(self, k: float) -> "AssessmentVector":
        return AssessmentVector(tuple(a / k for a in self.coords))

    def dot(self, other: "AssessmentVector") -> float:
        self._check(other)
        return math.fsum(a * b for a, b in zip(self.coords, other.coords))

    def norm(self) -> float:
        return math.sqrt(math.fsum(a * a for a in self.coords))

    def to_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)


@dataclass(frozen=True)
class MassComponents:
    """Intellectual, physical (military) and economic contributions to social mass."""

    intellectual: float = 0.0
    physical: float = 0.0
    economic: float = 0.0

    def __post_init__(self):
        for name in ("intellectual", "physical", "economic"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise ValidationError(f"mass component {name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, value)


def _additive(c: MassComponents) -> float:
    return c.intellectual + c.physical + c.economic


# Every combiner must be zero only at (0, 0, 0) and strictly increasing in each component.
MASS_COMBINERS: dict[str, Callable[[MassComponents], float]] = {"additive": _additive}


def combine_mass(c: MassComponents, combiner: str = "additive") -> float:
    """Social mass from its three components using the named combiner."""
    try:
        fn = MASS_COMBINERS[combiner]
    except KeyError:
        raise ValidationError(f"unknown mass combiner {combiner!r}") from None
    return fn(c)


def distance(a: AssessmentVector, b: AssessmentVector) -> float:
    """Euclidean distance between two assessment points, in leos."""
    if a.n != b.n:
        raise ValidationError(f"dimension mismatch: {a.n} vs {b.n}")
    return math.sqrt(math.fsum((x - y) ** 2 for x, y in zip(a.coords, b.coords)))


@dataclass(frozen=True)
class SocialBody:
    """A simulated social body.

    Either ``mass_components`` is given (and the mass is derived from it with
    ``combiner``) or ``mass`` is given directly.
    """

    id: str
    position: AssessmentVector
    velocity: AssessmentVector
    mass_components: Optional[MassComponents] = None
    mass: Optional[float] = None
    combiner: str = "additive"

    def __post_init__(self):
        if not isinstance(self.position, AssessmentVector):
            object.__setattr__(self, "position", AssessmentVector(self.position))
        if not isinstance(self.velocity, AssessmentVector):
            object.__setattr__(self, "velocity", AssessmentVector(self.velocity))
        if self.mass_components is None and self.mass is None:
            raise ValidationError(f"body {self.id!r}: either mass or mass_components is required")
        if self.mass_components is not None:
            derived = combine_mass(self.mass_components, self.combiner)
            if self.mass is not None and float(self.mass) != derived:
                raise ValidationError(
                    f"body {self.id!r}: mass {self.mass} disagrees with combined components {derived}"
                )
            object.__setattr__(self, "mass", derived)
        mass = float(self.mass)
        object.__setattr__(self, "mass", mass)
        if not math.isfinite(mass) or mass <= 0:
            raise ValidationError(f"body {self.id!r}: mass must be positive and finite, got {mass}")
        if self.position.n != self.velocity.n:
            raise ValidationError(
                f"body {self.id!r}: position has {self.position.n} dims, velocity {self.velocity.n}"
            )

    @property
    def n(self) -> int:
        return self.position.n

    def moved(self, position: AssessmentVector, velocity: AssessmentVector) -> "SocialBody":
        return SocialBody(
            self.id, position, velocity, self.mass_components,
            None if self.mass_components is not None else self.mass, self.combiner,
        )


@dataclass(frozen=True)
class ComplexBody:
    """A nested collection of social bodies.

    ``members`` holds ids of leaf bodies (individual evaluators) or of other
    complex bodies. The radius is the transitive leaf count unless
    ``fixed_radius`` overrides it.
    """

    id: str
    members: tuple[str, ...]
    center: AssessmentVector
    mass: float
    layer_thickness: float
    fixed_radius: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not isinstance(self.center, AssessmentVector):
            object.__setattr__(self, "center", AssessmentVector(self.center))
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise ValidationError(f"complex {self.id!r}: mass must be positive, got {self.mass}")
        if not (math.isfinite(self.layer_thickness) and self.layer_thickness > 0):
            raise ValidationError(
                f"complex {self.id!r}: layer_thickness must be positive, got {self.layer_thickness}"
            )
        if self.fixed_radius is not None and not (
            math.isfinite(self.fixed_radius) and self.fixed_radius > 0
        ):
            raise ValidationError(f"complex {self.id!r}: radius must be positive, got {self.fixed_radius}")
        if self.fixed_radius is None and not self.members:
            raise ValidationError(f"complex {self.id!r} is empty")


@dataclass(frozen=True)
class ForceParams:
    """Coefficients of the position-dependent force laws."""

    equilibrium: AssessmentVector
    gamma: float = 1.0
    k_e: float = 0.0
    k_c: float = 0.0
    softening: float = 1e-6

    def __post_init__(self):
        if not isinstance(self.equilibrium, AssessmentVector):
            object.__setattr__(self, "equilibrium", AssessmentVector(self.equilibrium))
        for name in ("gamma", "k_e", "k_c", "softening"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise ValidationError(f"{name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class DrivingForceSpec:
    """Perceived benefits over perceived costs, acting along a fixed unit direction."""

    perceived_benefits: float
    perceived_costs: float
    direction: AssessmentVector
    scale: float = 1.0

    def __post_init__(self):
        if not isinstance(self.direction, AssessmentVector):
            object.__setattr__(self, "direction", AssessmentVector(self.direction))
        if not self.perceived_benefits > 0:
            raise ValidationError(f"perceived benefits must be > 0, got {self.perceived_benefits}")
        if not self.perceived_costs > 0:
            raise ValidationError(f"perceived costs must be > 0, got {self.perceived_costs}")
        if not self.scale > 0:
            raise ValidationError(f"driving scale must be > 0, got {self.scale}")
        if abs(self.direction.norm() - 1.0) > 1e-12:
            raise ValidationError(f"driving direction must be a unit vector, |d| = {self.direction.norm()}")


@dataclass(frozen=True)
class OscillatorSolution:
    """x(t) = A sin(omega t) + B cos(omega t)."""

    A: float
    B: float
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ValidationError(f"omega must be positive, got {self.omega}")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    @property
    def frequency(self) -> float:
        return 1.0 / self.period

    @property
    def amplitude(self) -> float:
        return math.hypot(self.A, self.B)


@dataclass(frozen=True)
class FloorConstraint:
    """Half-space ``normal . position >= offset`` acting like a rigid slippery plane.

    A per-dimension floor is the special case where ``normal`` is a unit axis.
    """

    body_id: str
    normal: AssessmentVector
    offset: float

    def __post_init__(self):
        if not isinstance(self.normal, AssessmentVector):
            object.__setattr__(self, "normal", AssessmentVector(self.normal))
        if abs(self.normal.norm() - 1.0) > 1e-12:
            raise ValidationError(f"floor normal must be a unit vector, |n| = {self.normal.norm()}")
        object.__setattr__(self, "offset", float(self.offset))


@dataclass(frozen=True)
class SimulationState:
    """Time, bodies, complexes, force bindings and constraints of one simulation.

    ``forces`` holds :class:`socialdyn.forces.ForceModel` bindings.
    """

    dimension: int
    bodies: tuple[SocialBody, ...]
    forces: tuple = ()
    complexes: tuple[ComplexBody, ...] = ()
    constraints: tuple[FloorConstraint, ...] = ()
    t: float = 0.0

    def __post_init__(self):
        for name in ("bodies", "forces", "complexes", "constraints"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.dimension < 1:
            raise ValidationError(f"dimension must be >= 1, got {self.dimension}")
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ValidationError(f"time must be finite and >= 0, got {self.t}")

    def body(self, body_id: str) -> SocialBody:
        for b in self.bodies:
            if b.id == body_id:
                return b
        raise ValidationError(f"unknown body id {body_id!r}")

    def complex(self, complex_id: str) -> ComplexBody:
        for c in self.complexes:
            if c.id == complex_id:
                return c
        raise ValidationError(f"unknown complex id {complex_id!r}")

    @property
    def complex_map(self) -> dict[str, ComplexBody]:
        return {c.id: c for c in self.complexes}


def unit(values: Sequence[float]) -> AssessmentVector:
    """Normalize a direction to unit length."""
    v = AssessmentVector(values)
    length = v.norm()
    if length == 0:
        raise ValidationError("cannot normalize a zero vector")
    return v / length
