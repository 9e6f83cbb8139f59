"""Deterministic social-dynamics simulation in a space of assessments."""
from .core import (
    AssessmentVector,
    ComplexBody,
    DrivingForceSpec,
    FloorConstraint,
    ForceParams,
    MassComponents,
    OscillatorSolution,
    SimulationState,
    SingularityError,
    SocialBody,
    SocialDynamicsError,
    ValidationError,
    combine_mass,
    distance,
)
from .forces import ForceKind, ForceModel, net_force
from .dynamics import IntegratorConfig, IntegratorMethod, Trajectory, simulate, step

__version__ = "0.1.0"
