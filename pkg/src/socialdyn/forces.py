"""Force laws acting on social bodies and their composition."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .assessment_space import radius
from .core import (
    AssessmentVector,
    ComplexBody,
    DrivingForceSpec,
    ForceParams,
    SimulationState,
    SingularityError,
    SocialBody,
    ValidationError,
)


class ForceKind(enum.Enum):
    ATTRACTION = "attraction"
    ELASTICITY = "elasticity"
    CHANGE = "change"
    DRIVING = "driving"
    SURFACE_GRAVITY = "surface_gravity"


class StabilityClass(enum.Enum):
    SUSTAINABLE = "sustainable"
    NEUTRAL = "neutral"
    UNSUSTAINABLE = "unsustainable"


@dataclass(frozen=True)
class ForceModel:
    """One force law bound to the bodies it acts on.

    ``coupling`` is ``(body, other)`` for attraction, ``(body, complex)`` for
    surface gravity and ``(body,)`` for the rest. ``check_layer`` asks
    validation to confirm that a surface-gravity body starts in the public
    layer of its complex.
    """

    kind: ForceKind
    params: Union[ForceParams, DrivingForceSpec]
    coupling: tuple[str, ...]
    check_layer: bool = True

    def __post_init__(self):
        kind = ForceKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "coupling", tuple(self.coupling))
        arity = 2 if kind in (ForceKind.ATTRACTION, ForceKind.SURFACE_GRAVITY) else 1
        if len(self.coupling) != arity:
            raise ValidationError(f"{kind.value} couples {arity} ids, got {self.coupling}")
        if kind is ForceKind.DRIVING:
            if not isinstance(self.params, DrivingForceSpec):
                raise ValidationError("driving force needs a DrivingForceSpec")
        elif not isinstance(self.params, ForceParams):
            raise ValidationError(f"{kind.value} force needs ForceParams")
        if kind is ForceKind.ATTRACTION and self.coupling[0] == self.coupling[1]:
            raise ValidationError(f"attraction of body {self.coupling[0]!r} to itself")
        if kind in (ForceKind.ATTRACTION, ForceKind.SURFACE_GRAVITY) and not self.params.gamma > 0:
            raise ValidationError(f"{kind.value} needs gamma > 0")

    @property
    def body_ids(self) -> tuple[str, ...]:
        if self.kind is ForceKind.SURFACE_GRAVITY:
            return self.coupling[:1]
        return self.coupling


def attraction_force(body: SocialBody, other: SocialBody, params: ForceParams) -> AssessmentVector:
    """Force on ``body`` pulling it toward ``other``.

    Magnitude is gamma * m1 * m2 / (r**2 + softening**2).
    """
    sep = other.position - body.position
    r2 = math.fsum(c * c for c in sep.coords)
    eps2 = params.softening ** 2
    if r2 == 0.0:
        if eps2 == 0.0:
            raise SingularityError(f"bodies {body.id!r} and {other.id!r} coincide", body_id=body.id)
        return AssessmentVector.zeros(sep.n)
    magnitude = params.gamma * body.mass * other.mass / (r2 + eps2)
    return sep * (magnitude / math.sqrt(r2))


def attraction_potential(m1: float, m2: float, r: float, params: ForceParams) -> float:
    """Potential energy whose gradient gives :func:`attraction_force`."""
    eps = params.softening
    gmm = params.gamma * m1 * m2
    if eps == 0.0:
        if r == 0.0:
            raise SingularityError("attraction potential at zero separation")
        return -gmm / r
    return -gmm / eps * (math.pi / 2 - math.atan(r / eps))


def elasticity_force(body: SocialBody, params: ForceParams) -> AssessmentVector:
    """Restoring force -k_e * displacement from the sustainable state."""
    return (body.position - params.equilibrium) * (-params.k_e)


def change_force(body: SocialBody, params: ForceParams) -> AssessmentVector:
    """Destabilizing force +k_c * displacement from the sustainable state."""
    return (body.position - params.equilibrium) * params.k_c


def driving_ratio(spec: DrivingForceSpec) -> float:
    return spec.perceived_benefits / spec.perceived_costs


def transaction_may_happen(spec: DrivingForceSpec) -> bool:
    """True when perceived benefits strictly exceed perceived costs."""
    return driving_ratio(spec) > 1.0


def driving_force(spec: DrivingForceSpec) -> AssessmentVector:
    return spec.direction * (spec.scale * driving_ratio(spec))


def surface_gravity(complex: ComplexBody, params: ForceParams,
                    complexes: Optional[Mapping[str, ComplexBody]] = None) -> float:
    """Free-fall acceleration g = gamma * m_c / R**2 at the surface of ``complex``."""
    r = radius(complex, complexes)
    return params.gamma * complex.mass / (r * r)


def surface_gravity_force(
    body: SocialBody,
    complex: ComplexBody,
    params: ForceParams,
    complexes: Optional[Mapping[str, ComplexBody]] = None,
) -> AssessmentVector:
    """Constant-magnitude pull g * m toward the center of ``complex``.

    The public-layer precondition is checked by ``dynamics.validate_state``, not
    here, so a body passing through the bottom of its swing is not rejected.
    """
    sep = complex.center - body.position
    r = sep.norm()
    if r == 0.0:
        if params.softening == 0.0:
            raise SingularityError(f"body {body.id!r} sits at the center of {complex.id!r}", body_id=body.id)
        return AssessmentVector.zeros(sep.n)
    return sep * (surface_gravity(complex, params, complexes) * body.mass / r)


def stability_class(k_e: float, k_c: float) -> StabilityClass:
    """Classify the equilibrium of combined elasticity and change forces."""
    if k_c < k_e:
        return StabilityClass.SUSTAINABLE
    if k_c > k_e:
        return StabilityClass.UNSUSTAINABLE
    return StabilityClass.NEUTRAL


def force_from(binding: ForceModel, body: SocialBody, state: SimulationState) -> AssessmentVector:
    """Evaluate one binding's force on ``body``."""
    kind = binding.kind
    if body.id not in binding.body_ids:
        raise ValidationError(f"{kind.value} binding {binding.coupling} does not act on {body.id!r}")
    if kind is ForceKind.ATTRACTION:
        a, b = binding.coupling
        other = state.body(b if body.id == a else a)
        return attraction_force(body, other, binding.params)
    if kind is ForceKind.ELASTICITY:
        return elasticity_force(body, binding.params)
    if kind is ForceKind.CHANGE:
        return change_force(body, binding.params)
    if kind is ForceKind.DRIVING:
        return driving_force(binding.params)
    return surface_gravity_force(body, state.complex(binding.coupling[1]), binding.params, state.complex_map)


def net_force(body: SocialBody, bindings: Iterable[ForceModel], state: SimulationState) -> AssessmentVector:
    """Vector sum of every binding's force on ``body``, in binding order."""
    total = AssessmentVector.zeros(body.n)
    for binding in bindings:
        total = total + force_from(binding, body, state)
    return total


def bindings_for(body_id: str, bindings: Iterable[ForceModel]) -> list[ForceModel]:
    return [b for b in bindings if body_id in b.body_ids]
