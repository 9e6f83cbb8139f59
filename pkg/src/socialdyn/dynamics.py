"""Time integration of a = F / m for every body in a simulation state."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .assessment_space import (
    DEFAULT_MAX_LAYER_RATIO,
    LayerClass,
    classify_layer,
    validate_complex,
)
from .core import (
    AssessmentVector,
    DrivingForceSpec,
    SimulationState,
    SingularityError,
    SocialBody,
    ValidationError,
    distance,
)
from .forces import ForceKind, attraction_potential, driving_force, surface_gravity


class IntegratorMethod(enum.Enum):
    RK4 = "rk4"
    SEMI_IMPLICIT_EULER = "semi_implicit_euler"
    LEAPFROG = "leapfrog"


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    t_end: float
    method: IntegratorMethod = IntegratorMethod.LEAPFROG
    record_every: int = 1

    def __post_init__(self):
        object.__setattr__(self, "method", IntegratorMethod(self.method))
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValidationError(f"dt must be positive, got {self.dt}")
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ValidationError(f"t_end must be positive, got {self.t_end}")
        if self.t_end < self.dt:
            raise ValidationError(f"t_end {self.t_end} is shorter than dt {self.dt}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValidationError(f"record_every must be an integer >= 1, got {self.record_every}")

    @property
    def n_steps(self) -> int:
        # tolerate t_end = k * dt up to rounding
        return int(math.ceil(self.t_end / self.dt - 1e-9))


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of one body. Arrays have shapes (K,), (K, n), (K, n)."""

    body_id: str
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    @property
    def samples(self) -> list[tuple[float, AssessmentVector, AssessmentVector]]:
        return [
            (float(t), AssessmentVector(tuple(x)), AssessmentVector(tuple(v)))
            for t, x, v in zip(self.times, self.positions, self.velocities)
        ]


def validate_state(
    state: SimulationState,
    max_layer_ratio: float = DEFAULT_MAX_LAYER_RATIO,
    check_layers: bool = True,
) -> None:
    """Check ids, dimensions and binding preconditions; raise ValidationError.

    ``check_layers`` enables the public-layer test of surface-gravity bodies,
    which is a start-of-run condition: a pendulum legitimately swings through
    the surface itself.
    """
    n = state.dimension
    ids = [b.id for b in state.bodies]
    if len(set(ids)) != len(ids):
        raise ValidationError(f"duplicate body ids in {ids}")
    complexes = state.complex_map
    if len(complexes) != len(state.complexes):
        raise ValidationError("duplicate complex ids")
    overlap = set(ids) & set(complexes)
    if overlap:
        raise ValidationError(f"ids used for both a body and a complex: {sorted(overlap)}")
    for b in state.bodies:
        if b.n != n:
            raise ValidationError(f"body {b.id!r} has dimension {b.n}, scenario declares {n}")
    for c in state.complexes:
        if c.center.n != n:
            raise ValidationError(f"complex {c.id!r} has dimension {c.center.n}, scenario declares {n}")
        validate_complex(c, complexes, max_layer_ratio)
    for f in state.forces:
        for body_id in f.body_ids:
            if body_id not in ids:
                raise ValidationError(f"{f.kind.value} binding references unknown body {body_id!r}")
        if isinstance(f.params, DrivingForceSpec):
            if f.params.direction.n != n:
                raise ValidationError(f"driving direction has dimension {f.params.direction.n}, expected {n}")
        elif f.params.equilibrium.n != n:
            raise ValidationError(f"{f.kind.value} equilibrium has dimension {f.params.equilibrium.n}, expected {n}")
        if f.kind is ForceKind.SURFACE_GRAVITY:
            cid = f.coupling[1]
            if cid not in complexes:
                raise ValidationError(f"surface gravity references unknown complex {cid!r}")
            if check_layers and f.check_layer:
                body = state.body(f.coupling[0])
                layer = classify_layer(distance(body.position, complexes[cid].center), complexes[cid], complexes)
                if layer is not LayerClass.ORDINARY_PUBLIC:
                    raise ValidationError(
                        f"body {body.id!r} is {layer.value}, surface gravity of {cid!r} "
                        "applies to ordinary public bodies only"
                    )
    for con in state.constraints:
        if con.body_id not in ids:
            raise ValidationError(f"floor references unknown body {con.body_id!r}")
        if con.normal.n != n:
            raise ValidationError(f"floor normal has dimension {con.normal.n}, expected {n}")


def acceleration(body: SocialBody, f: AssessmentVector) -> AssessmentVector:
    """Acceleration F / m of ``body`` under the net force ``f``."""
    if not body.mass > 0:
        raise ValidationError(f"body {body.id!r} has nonpositive mass {body.mass}")
    if f.n != body.n:
        raise ValidationError(f"force has dimension {f.n}, body {body.id!r} has {body.n}")
    return f / body.mass


class _CompiledSystem:
    """Force bindings of a state flattened into arrays for fast evaluation."""

    def __init__(self, state: SimulationState, check_layers: bool = True):
        validate_state(state, check_layers=check_layers)
        self.ids = [b.id for b in state.bodies]
        index = {body_id: i for i, body_id in enumerate(self.ids)}
        N, n = len(self.ids), state.dimension
        self.N, self.n = N, n
        self.masses = np.array([b.mass for b in state.bodies], dtype=float)
        self.inv_m = (1.0 / self.masses)[:, None]

        # elasticity and change collapse to F = coef * x - offset per body
        coef = np.zeros((N, 1))
        offset = np.zeros((N, n))
        drive = np.zeros((N, n))
        pairs, gravity = [], []
        complexes = state.complex_map
        for f in state.forces:
            k = f.kind
            if k is ForceKind.ELASTICITY or k is ForceKind.CHANGE:
                i = index[f.coupling[0]]
                s = -f.params.k_e if k is ForceKind.ELASTICITY else f.params.k_c
                coef[i, 0] += s
                offset[i] += s * f.params.equilibrium.to_array()
            elif k is ForceKind.DRIVING:
                drive[index[f.coupling[0]]] += driving_force(f.params).to_array()
            elif k is ForceKind.ATTRACTION:
                i, j = index[f.coupling[0]], index[f.coupling[1]]
                pairs.append((i, j, f.params.gamma * self.masses[i] * self.masses[j], f.params.softening ** 2))
            else:
                i = index[f.coupling[0]]
                c = complexes[f.coupling[1]]
                g = surface_gravity(c, f.params, complexes)
                gravity.append((i, c.center.to_array(), g * self.masses[i], f.params.softening))
        self.has_linear = bool(np.any(coef != 0) or np.any(offset != 0))
        self.coef, self.offset = coef, offset
        self.drive = drive if np.any(drive != 0) else None
        if pairs:
            self.pi = np.array([p[0] for p in pairs])
            self.pj = np.array([p[1] for p in pairs])
            self.p_gmm = np.array([p[2] for p in pairs])
            self.p_eps2 = np.array([p[3] for p in pairs])
        self.has_pairs = bool(pairs)
        self.gravity = gravity
        self.floors = [
            (index[c.body_id], c.normal.to_array(), c.offset, 1e-12 * max(1.0, abs(c.offset)))
            for c in state.constraints
        ]

    def force(self, X: np.ndarray) -> np.ndarray:
        if self.has_linear:
            F = self.coef * X - self.offset
        else:
            F = np.zeros_like(X)
        if self.drive is not None:
            F = F + self.drive
        if self.has_pairs:
            d = X[self.pj] - X[self.pi]
            r2 = np.einsum("ij,ij->i", d, d)
            if np.any(r2 == 0.0):
                k = int(np.flatnonzero(r2 == 0.0)[0])
                if self.p_eps2[k] == 0.0:
                    raise SingularityError("coincident attracting bodies", body_id=self.ids[self.pi[k]])
                r = np.sqrt(r2)
                scale = np.divide(self.p_gmm, (r2 + self.p_eps2) * r, out=np.zeros_like(r), where=r > 0)
            else:
                scale = self.p_gmm / ((r2 + self.p_eps2) * np.sqrt(r2))
            f = d * scale[:, None]
            np.add.at(F, self.pi, f)
            np.subtract.at(F, self.pj, f)
        for i, center, gm, eps in self.gravity:
            sep = center - X[i]
            r = math.sqrt(float(sep @ sep))
            if r == 0.0:
                if eps == 0.0:
                    raise SingularityError("body at the center of its complex", body_id=self.ids[i])
                continue
            F[i] += sep * (gm / r)
        for i, normal, level, tol in self.floors:
            # a slippery plane cancels the inward normal force while in contact
            if float(X[i] @ normal) - level <= tol:
                fn = float(F[i] @ normal)
                if fn < 0.0:
                    F[i] -= fn * normal
        return F

    def accel(self, X: np.ndarray) -> np.ndarray:
        return self.force(X) * self.inv_m

    def project(self, X: np.ndarray, V: np.ndarray) -> None:
        for i, normal, level, tol in self.floors:
            gap = float(X[i] @ normal) - level
            if gap < 0.0:
                X[i] -= gap * normal
            if gap <= tol:
                vn = float(V[i] @ normal)
                if vn < 0.0:
                    V[i] -= vn * normal

    def advance(self, X: np.ndarray, V: np.ndarray, dt: float, method: IntegratorMethod):
        if method is IntegratorMethod.RK4:
            h2 = 0.5 * dt
            a1 = self.accel(X)
            X2, V2 = X + h2 * V, V + h2 * a1
            a2 = self.accel(X2)
            X3, V3 = X + h2 * V2, V + h2 * a2
            a3 = self.accel(X3)
            X4, V4 = X + dt * V3, V + dt * a3
            a4 = self.accel(X4)
            h6 = dt / 6.0
            X = X + h6 * (V + 2.0 * (V2 + V3) + V4)
            V = V + h6 * (a1 + 2.0 * (a2 + a3) + a4)
        elif method is IntegratorMethod.LEAPFROG:
            V = V + (0.5 * dt) * self.accel(X)
            X = X + dt * V
            V = V + (0.5 * dt) * self.accel(X)
        else:
            V = V + dt * self.accel(X)
            X = X + dt * V
        if self.floors:
            self.project(X, V)
        return X, V


def _arrays(state: SimulationState) -> tuple[np.ndarray, np.ndarray]:
    X = np.array([b.position.coords for b in state.bodies], dtype=float).reshape(len(state.bodies), state.dimension)
    V = np.array([b.velocity.coords for b in state.bodies], dtype=float).reshape(len(state.bodies), state.dimension)
    return X, V


def _advance_checked(system, X, V, dt, method, t):
    try:
        X, V = system.advance(X, V, dt, method)
    except SingularityError as exc:
        raise SingularityError(exc.message, body_id=exc.body_id, t=t) from None
    if not (np.isfinite(X).all() and np.isfinite(V).all()):
        bad = int(np.flatnonzero(~(np.isfinite(X).all(axis=1) & np.isfinite(V).all(axis=1)))[0])
        raise SingularityError("state became non-finite", body_id=system.ids[bad], t=t)
    return X, V


def _with_arrays(state: SimulationState, X: np.ndarray, V: np.ndarray, t: float) -> SimulationState:
    bodies = tuple(
        b.moved(AssessmentVector(tuple(X[i])), AssessmentVector(tuple(V[i])))
        for i, b in enumerate(state.bodies)
    )
    return SimulationState(state.dimension, bodies, state.forces, state.complexes, state.constraints, t)


def step(state: SimulationState, cfg: IntegratorConfig) -> SimulationState:
    """Advance every body by one ``cfg.dt`` with the configured method."""
    system = _CompiledSystem(state, check_layers=False)
    X, V = _arrays(state)
    X, V = _advance_checked(system, X, V, cfg.dt, cfg.method, state.t)
    return _with_arrays(state, X, V, state.t + cfg.dt)


def simulate(state: SimulationState, cfg: IntegratorConfig, check_layers: bool = True) -> list[Trajectory]:
    """Integrate from ``state.t`` for ``cfg.t_end`` time units.

    The initial state is the first sample; afterwards every ``record_every``-th
    step is recorded. Any error aborts the run without partial output.
    """
    system = _CompiledSystem(state, check_layers)
    X, V = _arrays(state)
    n_steps, every = cfg.n_steps, cfg.record_every
    n_rec = n_steps // every + 1
    times = np.empty(n_rec)
    pos = np.empty((n_rec, system.N, system.n))
    vel = np.empty((n_rec, system.N, system.n))
    times[0], pos[0], vel[0] = state.t, X, V
    dt, method, t0 = cfg.dt, cfg.method, state.t
    rec = 1
    for k in range(1, n_steps + 1):
        X, V = _advance_checked(system, X, V, dt, method, t0 + (k - 1) * dt)
        if k % every == 0:
            times[rec], pos[rec], vel[rec] = t0 + k * dt, X, V
            rec += 1
    return [
        Trajectory(body_id, times.copy(), pos[:, i, :].copy(), vel[:, i, :].copy())
        for i, body_id in enumerate(system.ids)
    ]


def final_state(state: SimulationState, trajectories: list[Trajectory]) -> SimulationState:
    """State at the last recorded sample of ``trajectories``."""
    by_id = {tr.body_id: tr for tr in trajectories}
    X = np.array([by_id[b.id].positions[-1] for b in state.bodies])
    V = np.array([by_id[b.id].velocities[-1] for b in state.bodies])
    return _with_arrays(state, X, V, float(trajectories[0].times[-1]))


def accelerations(state: SimulationState) -> dict[str, np.ndarray]:
    """Current acceleration of every body, including floor reactions."""
    system = _CompiledSystem(state, check_layers=False)
    X, _ = _arrays(state)
    A = system.accel(X)
    return {body_id: A[i] for i, body_id in enumerate(system.ids)}


def total_energy(state: SimulationState) -> float:
    """Kinetic plus potential energy of every conservative binding.

    Floors do no work; the inelastic stop on contact is not accounted for.
    """
    terms = [0.5 * b.mass * b.velocity.dot(b.velocity) for b in state.bodies]
    complexes = state.complex_map
    for f in state.forces:
        body = state.body(f.coupling[0])
        k = f.kind
        if k is ForceKind.ELASTICITY or k is ForceKind.CHANGE:
            d = body.position - f.params.equilibrium
            s = f.params.k_e if k is ForceKind.ELASTICITY else -f.params.k_c
            terms.append(0.5 * s * d.dot(d))
        elif k is ForceKind.DRIVING:
            terms.append(-driving_force(f.params).dot(body.position))
        elif k is ForceKind.ATTRACTION:
            other = state.body(f.coupling[1])
            terms.append(attraction_potential(body.mass, other.mass, distance(body.position, other.position), f.params))
        else:
            c = complexes[f.coupling[1]]
            terms.append(surface_gravity(c, f.params, complexes) * body.mass * distance(body.position, c.center))
    return math.fsum(terms)


def linear_omega(state: SimulationState, body_id: str) -> Optional[float]:
    """Angular frequency of a body bound only by elasticity and change, if it oscillates."""
    body = state.body(body_id)
    stiffness = 0.0
    for f in state.forces:
        if body_id not in f.body_ids:
            continue
        if f.kind is ForceKind.ELASTICITY:
            stiffness += f.params.k_e
        elif f.kind is ForceKind.CHANGE:
            stiffness -= f.params.k_c
        else:
            return None
    if stiffness <= 0:
        return None
    return math.sqrt(stiffness / body.mass)
