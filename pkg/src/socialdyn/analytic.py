"""Closed-form linear oscillators and frequency recovery from sampled motion."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import least_squares

from .core import OscillatorSolution, ValidationError


class OmegaSource(enum.Enum):
    ELASTIC = "elastic"    # omega = sqrt(k_e / m)
    PENDULUM = "pendulum"  # omega = sqrt(g / R)


@dataclass(frozen=True)
class HarmonicSpec:
    source: OmegaSource
    x0: float = 0.0
    v0: float = 0.0
    k_e: Optional[float] = None
    m: Optional[float] = None
    g: Optional[float] = None
    R: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "source", OmegaSource(self.source))
        needed = ("k_e", "m") if self.source is OmegaSource.ELASTIC else ("g", "R")
        for name in needed:
            value = getattr(self, name)
            if value is None or not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{self.source.value} oscillator needs {name} > 0, got {value}")
        if not (math.isfinite(self.x0) and math.isfinite(self.v0)):
            raise ValidationError("initial conditions must be finite")

    @property
    def omega(self) -> float:
        if self.source is OmegaSource.ELASTIC:
            return math.sqrt(self.k_e / self.m)
        return math.sqrt(self.g / self.R)


def solve_harmonic(spec: HarmonicSpec) -> OscillatorSolution:
    """Coefficients of x(t) = A sin(wt) + B cos(wt) from x(0) and v(0)."""
    omega = spec.omega
    return OscillatorSolution(A=spec.v0 / omega, B=spec.x0, omega=omega)


def evaluate_solution(sol: OscillatorSolution, t):
    """Position and velocity of the closed-form oscillator at time(s) ``t``."""
    wt = np.multiply(sol.omega, t)
    s, c = np.sin(wt), np.cos(wt)
    x = sol.A * s + sol.B * c
    v = sol.omega * (sol.A * c - sol.B * s)
    if np.ndim(t) == 0:
        return float(x), float(v)
    return x, v


def _uniform_step(times: np.ndarray) -> float:
    if times.ndim != 1 or len(times) < 2:
        raise ValidationError("need a 1-D array of sample times")
    steps = np.diff(times)
    dt = (times[-1] - times[0]) / (len(times) - 1)
    if not dt > 0 or np.max(np.abs(steps - dt)) > 1e-9 * dt:
        raise ValidationError("samples are not uniformly spaced")
    return float(dt)


def dominant_frequency(times, values, min_samples: int = 64) -> float:
    """Frequency of the strongest nonzero DFT bin, refined by a parabola through its neighbors.

    No window is applied; the mean is removed first.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(times) != len(values):
        raise ValidationError("times and values differ in length")
    if len(times) < min_samples:
        raise ValidationError(f"need at least {min_samples} samples, got {len(times)}")
    dt = _uniform_step(times)
    centered = values - values.mean()
    if np.max(np.abs(centered)) <= 1e-12 * max(1.0, float(np.max(np.abs(values)))):
        raise ValidationError("no oscillation: signal is constant")
    spectrum = np.abs(np.fft.rfft(centered))
    k = 1 + int(np.argmax(spectrum[1:]))
    offset = 0.0
    if 1 < k < len(spectrum) - 1:
        a, b, c = spectrum[k - 1], spectrum[k], spectrum[k + 1]
        denom = a - 2.0 * b + c
        if denom != 0.0:
            offset = 0.5 * (a - c) / denom
    return (k + offset) / (len(values) * dt)


def zero_crossing_period(times, values, level: float = 0.0) -> float:
    """Mean spacing of successive upward crossings of ``level``.

    Crossing instants are located by linear interpolation between samples.
    """
    t = np.asarray(times, dtype=float)
    x = np.asarray(values, dtype=float) - level
    idx = np.flatnonzero((x[:-1] < 0.0) & (x[1:] >= 0.0))
    if len(idx) < 2:
        raise ValidationError("fewer than two upward crossings; cannot measure a period")
    frac = -x[idx] / (x[idx + 1] - x[idx])
    crossings = t[idx] + frac * (t[idx + 1] - t[idx])
    return float((crossings[-1] - crossings[0]) / (len(crossings) - 1))


@dataclass(frozen=True)
class OscillationFit:
    solution: OscillatorSolution
    offset: float
    frequency_estimate: float
    rms_residual: float


def fit_oscillation(times, values) -> OscillationFit:
    """Least-squares fit of ``c + A sin(w t') + B cos(w t')`` with t' = t - times[0].

    The DFT estimate seeds the frequency.
    """
    t = np.asarray(times, dtype=float)
    x = np.asarray(values, dtype=float)
    nu = dominant_frequency(t, x)
    tr = t - t[0]

    def design(w):
        return np.column_stack([np.ones_like(tr), np.sin(w * tr), np.cos(w * tr)])

    def linear(w):
        coef, *_ = np.linalg.lstsq(design(w), x, rcond=None)
        return coef

    def residual(p):
        return design(p[0]) @ linear(p[0]) - x

    res = least_squares(residual, x0=[2.0 * math.pi * nu], x_scale="jac", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    w = abs(float(res.x[0]))
    c, a, b = linear(w)
    rms = float(np.sqrt(np.mean(residual([w]) ** 2)))
    return OscillationFit(OscillatorSolution(float(a), float(b), w), float(c), nu, rms)
