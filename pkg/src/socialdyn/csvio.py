"""Trajectory CSV files.

Header ``t,<id>.x0,...,<id>.x{n-1},<id>.v0,...,<id>.v{n-1}``; values written
with 17 significant digits so they read back bit-for-bit. LF line endings.
"""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Union

import numpy as np

from .core import ValidationError
from .dynamics import Trajectory


def header(tr: Trajectory) -> list[str]:
    n = tr.positions.shape[1]
    return ["t"] + [f"{tr.body_id}.x{i}" for i in range(n)] + [f"{tr.body_id}.v{i}" for i in range(n)]


def format_trajectory(tr: Trajectory) -> str:
    lines = [",".join(header(tr))]
    rows = np.column_stack([tr.times, tr.positions, tr.velocities])
    for row in rows:
        lines.append(",".join(format(float(v), ".17g") for v in row))
    return "\n".join(lines) + "\n"


def write_trajectory(tr: Trajectory, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_trajectory(tr))


def read_table(path: Union[str, Path]) -> tuple[list[str], np.ndarray]:
    """Column names and an (rows, columns) float array of a trajectory CSV."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError(f"{path}: empty file")
    names = rows[0]
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from None
    if data.size and data.shape[1] != len(names):
        raise ValidationError(f"{path}: rows do not match the header")
    return names, data.reshape(-1, len(names))


def read_trajectory(path: Union[str, Path]) -> Trajectory:
    names, data = read_table(path)
    if not names or names[0] != "t" or len(names) % 2 != 1:
        raise ValidationError(f"{path}: not a trajectory file")
    n = (len(names) - 1) // 2
    body_id = names[1].rsplit(".", 1)[0]
    return Trajectory(body_id, data[:, 0], data[:, 1:1 + n], data[:, 1 + n:])
