"""Scenario files: JSON documents describing a complete simulation setup.

Layout (all sections except ``bodies`` and ``integrator`` are optional)::

    {
      "name": "fashion",
      "dimension": 1,
      "bodies": [{"id": "others", "mass": 1.0, "position": [0.0], "velocity": [1.0]}],
      "complexes": [{"id": "O", "members": ["a", "b"], "center": [0.0], "mass": 10.0,
                     "layer_thickness": 0.1}],
      "forces": [{"kind": "elasticity", "coupling": ["others"], "k_e": 1.0,
                  "equilibrium": [0.0]}],
      "constraints": [{"type": "floor", "body": "c", "normal": [0.0, 1.0], "offset": 100.0}],
      "integrator": {"method": "rk4", "dt": 0.001, "t_end": 10.0, "record_every": 1},
      "polls": [{"evaluator": "a", "subject": "c", "dimension": 0, "value": 1.0}],
      "poll_files": ["polls.csv"],
      "expected": {"body": "others", "A": 1.0, "B": 0.0, "omega": 1.0,
                   "origin": [0.0], "axis": [1.0]},
      "outputs": ["trajectories"],
      "metadata": {}
    }

A body gives either ``mass`` or ``mass_components`` (with an optional
``combiner``). A floor may be written as ``{"body", "dimension", "level"}``,
which is stored as the equivalent unit-normal form.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .assessment_space import DEFAULT_MAX_LAYER_RATIO, PollRecord, parse_poll_records
from .core import (
    AssessmentVector,
    ComplexBody,
    DrivingForceSpec,
    FloorConstraint,
    ForceParams,
    MassComponents,
    OscillatorSolution,
    SimulationState,
    SocialBody,
    ValidationError,
)
from .dynamics import IntegratorConfig, IntegratorMethod
from .forces import ForceKind, ForceModel


@dataclass(frozen=True)
class ExpectedMotion:
    """Closed-form motion of one body along ``axis`` measured from ``origin``."""

    body_id: str
    solution: OscillatorSolution
    origin: AssessmentVector
    axis: AssessmentVector

    def displacement(self, positions: np.ndarray) -> np.ndarray:
        return (np.asarray(positions) - self.origin.to_array()) @ self.axis.to_array()


@dataclass(frozen=True)
class Scenario:
    name: str
    state: SimulationState
    integrator: IntegratorConfig
    expected: Optional[ExpectedMotion] = None
    polls: tuple[PollRecord, ...] = ()
    poll_files: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ("trajectories",)
    max_layer_ratio: float = DEFAULT_MAX_LAYER_RATIO
    metadata: dict = field(default_factory=dict)

    def all_polls(self, base_dir: Union[str, Path, None] = None) -> list[PollRecord]:
        """Inline poll records followed by those read from ``poll_files``."""
        records = list(self.polls)
        for name in self.poll_files:
            path = Path(name)
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            records.extend(parse_poll_records(path))
        return records


def _vec(value, n: int, what: str) -> AssessmentVector:
    if not isinstance(value, (list, tuple)):
        raise ValidationError(f"{what} must be a list of {n} numbers")
    v = AssessmentVector(tuple(_num(x, what) for x in value))
    if v.n != n:
        raise ValidationError(f"{what} has {v.n} coordinates, scenario dimension is {n}")
    return v


def _num(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{what} must be a number, got {value!r}")
    return float(value)


def _require(d: dict, key: str, what: str):
    if key not in d:
        raise ValidationError(f"{what} is missing {key!r}")
    return d[key]


def _body_from(d: dict, n: int) -> SocialBody:
    body_id = str(_require(d, "id", "body"))
    what = f"body {body_id!r}"
    comps = None
    if "mass_components" in d:
        mc = d["mass_components"]
        comps = MassComponents(**{k: _num(mc.get(k, 0.0), what) for k in ("intellectual", "physical", "economic")})
    mass = _num(d["mass"], what) if "mass" in d else None
    return SocialBody(
        body_id,
        _vec(_require(d, "position", what), n, f"{what} position"),
        _vec(d.get("velocity", [0.0] * n), n, f"{what} velocity"),
        comps,
        mass,
        d.get("combiner", "additive"),
    )


def _body_to(b: SocialBody) -> dict:
    out: dict[str, Any] = {"id": b.id}
    if b.mass_components is not None:
        c = b.mass_components
        out["mass_components"] = {"intellectual": c.intellectual, "physical": c.physical, "economic": c.economic}
        if b.combiner != "additive":
            out["combiner"] = b.combiner
    else:
        out["mass"] = b.mass
    out["position"] = list(b.position.coords)
    out["velocity"] = list(b.velocity.coords)
    return out


def _complex_from(d: dict, n: int) -> ComplexBody:
    cid = str(_require(d, "id", "complex"))
    what = f"complex {cid!r}"
    radius = d.get("radius")
    return ComplexBody(
        cid,
        tuple(str(m) for m in d.get("members", [])),
        _vec(d.get("center", [0.0] * n), n, f"{what} center"),
        _num(_require(d, "mass", what), what),
        _num(_require(d, "layer_thickness", what), what),
        None if radius is None else _num(radius, what),
    )


def _complex_to(c: ComplexBody) -> dict:
    out: dict[str, Any] = {"id": c.id, "members": list(c.members)}
    if c.fixed_radius is not None:
        out["radius"] = c.fixed_radius
    out.update(center=list(c.center.coords), mass=c.mass, layer_thickness=c.layer_thickness)
    return out


def _force_from(d: dict, n: int) -> ForceModel:
    try:
        kind = ForceKind(_require(d, "kind", "force"))
    except ValueError:
        raise ValidationError(f"unknown force kind {d.get('kind')!r}") from None
    what = f"{kind.value} force"
    coupling = tuple(str(x) for x in _require(d, "coupling", what))
    if kind is ForceKind.DRIVING:
        params = DrivingForceSpec(
            _num(_require(d, "perceived_benefits", what), what),
            _num(_require(d, "perceived_costs", what), what),
            _vec(_require(d, "direction", what), n, f"{what} direction"),
            _num(d.get("scale", 1.0), what),
        )
    else:
        params = ForceParams(
            _vec(d.get("equilibrium", [0.0] * n), n, f"{what} equilibrium"),
            gamma=_num(d.get("gamma", 1.0), what),
            k_e=_num(d.get("k_e", 0.0), what),
            k_c=_num(d.get("k_c", 0.0), what),
            softening=_num(d.get("softening", 1e-6), what),
        )
    return ForceModel(kind, params, coupling, bool(d.get("check_layer", True)))


def _force_to(f: ForceModel) -> dict:
    out: dict[str, Any] = {"kind": f.kind.value, "coupling": list(f.coupling)}
    p = f.params
    if isinstance(p, DrivingForceSpec):
        out.update(
            perceived_benefits=p.perceived_benefits,
            perceived_costs=p.perceived_costs,
            direction=list(p.direction.coords),
            scale=p.scale,
        )
    else:
        out.update(gamma=p.gamma, k_e=p.k_e, k_c=p.k_c, softening=p.softening, equilibrium=list(p.equilibrium.coords))
    if f.kind is ForceKind.SURFACE_GRAVITY:
        out["check_layer"] = f.check_layer
    return out


def _floor_from(d: dict, n: int) -> FloorConstraint:
    if d.get("type", "floor") != "floor":
        raise ValidationError(f"unknown constraint type {d.get('type')!r}")
    body = str(_require(d, "body", "floor"))
    if "dimension" in d:
        k = d["dimension"]
        if not isinstance(k, int) or not 0 <= k < n:
            raise ValidationError(f"floor dimension {k!r} out of range for n={n}")
        normal = [0.0] * n
        normal[k] = 1.0
        return FloorConstraint(body, AssessmentVector(tuple(normal)), _num(_require(d, "level", "floor"), "floor"))
    return FloorConstraint(
        body, _vec(_require(d, "normal", "floor"), n, "floor normal"), _num(_require(d, "offset", "floor"), "floor")
    )


def _poll_from(d: dict) -> PollRecord:
    return PollRecord(
        str(_require(d, "evaluator", "poll")),
        str(_require(d, "subject", "poll")),
        _require(d, "dimension", "poll"),
        _num(_require(d, "value", "poll"), "poll value"),
    )


def scenario_from_dict(d: dict) -> Scenario:
    if not isinstance(d, dict):
        raise ValidationError("scenario must be a JSON object")
    n = _require(d, "dimension", "scenario")
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"dimension must be a positive integer, got {n!r}")
    state = SimulationState(
        n,
        tuple(_body_from(b, n) for b in _require(d, "bodies", "scenario")),
        tuple(_force_from(f, n) for f in d.get("forces", [])),
        tuple(_complex_from(c, n) for c in d.get("complexes", [])),
        tuple(_floor_from(c, n) for c in d.get("constraints", [])),
        _num(d.get("t0", 0.0), "t0"),
    )
    integ = _require(d, "integrator", "scenario")
    try:
        method = IntegratorMethod(integ.get("method", "leapfrog"))
    except ValueError:
        raise ValidationError(f"unknown integrator {integ.get('method')!r}") from None
    cfg = IntegratorConfig(
        _num(_require(integ, "dt", "integrator"), "dt"),
        _num(_require(integ, "t_end", "integrator"), "t_end"),
        method,
        integ.get("record_every", 1),
    )
    expected = None
    if d.get("expected") is not None:
        e = d["expected"]
        expected = ExpectedMotion(
            str(_require(e, "body", "expected")),
            OscillatorSolution(_num(e.get("A", 0.0), "A"), _num(e.get("B", 0.0), "B"), _num(_require(e, "omega", "expected"), "omega")),
            _vec(e.get("origin", [0.0] * n), n, "expected origin"),
            _vec(_require(e, "axis", "expected"), n, "expected axis"),
        )
    return Scenario(
        name=str(d.get("name", "scenario")),
        state=state,
        integrator=cfg,
        expected=expected,
        polls=tuple(_poll_from(p) for p in d.get("polls", [])),
        poll_files=tuple(str(p) for p in d.get("poll_files", [])),
        outputs=tuple(str(o) for o in d.get("outputs", ["trajectories"])),
        max_layer_ratio=_num(d.get("max_layer_ratio", DEFAULT_MAX_LAYER_RATIO), "max_layer_ratio"),
        metadata=dict(d.get("metadata", {})),
    )


def scenario_to_dict(s: Scenario) -> dict:
    st, cfg = s.state, s.integrator
    out: dict[str, Any] = {"name": s.name, "dimension": st.dimension}
    if st.t != 0.0:
        out["t0"] = st.t
    out["bodies"] = [_body_to(b) for b in st.bodies]
    out["complexes"] = [_complex_to(c) for c in st.complexes]
    out["forces"] = [_force_to(f) for f in st.forces]
    out["constraints"] = [
        {"type": "floor", "body": c.body_id, "normal": list(c.normal.coords), "offset": c.offset}
        for c in st.constraints
    ]
    out["integrator"] = {"method": cfg.method.value, "dt": cfg.dt, "t_end": cfg.t_end, "record_every": cfg.record_every}
    if s.expected is not None:
        e = s.expected
        out["expected"] = {
            "body": e.body_id, "A": e.solution.A, "B": e.solution.B, "omega": e.solution.omega,
            "origin": list(e.origin.coords), "axis": list(e.axis.coords),
        }
    if s.polls:
        out["polls"] = [
            {"evaluator": p.evaluator_id, "subject": p.subject_id, "dimension": p.dimension_index, "value": p.value}
            for p in s.polls
        ]
    if s.poll_files:
        out["poll_files"] = list(s.poll_files)
    out["outputs"] = list(s.outputs)
    if s.max_layer_ratio != DEFAULT_MAX_LAYER_RATIO:
        out["max_layer_ratio"] = s.max_layer_ratio
    out["metadata"] = s.metadata
    return out


def dumps(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2, allow_nan=False) + "\n"


def loads(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid scenario JSON: {exc}") from None
    return scenario_from_dict(data)


def load(path: Union[str, Path]) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(s: Scenario, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(s))
