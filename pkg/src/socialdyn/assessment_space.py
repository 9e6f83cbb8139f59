"""Positions built from poll records, complex-body radii and layer classes."""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

from .core import AssessmentVector, ComplexBody, ValidationError

RATING_MIN = -100.0
RATING_MAX = 100.0
DEFAULT_MAX_LAYER_RATIO = 0.1


@dataclass(frozen=True)
class PollRecord:
    """One evaluator's rating of one subject along one dimension.

    A value of 0 means the subject is unknown to the evaluator.
    """

    evaluator_id: str
    subject_id: str
    dimension_index: int
    value: float

    def __post_init__(self):
        value = float(self.value)
        if not math.isfinite(value) or not RATING_MIN <= value <= RATING_MAX:
            raise ValidationError(
                f"rating {self.value} by {self.evaluator_id!r} of {self.subject_id!r} "
                f"is outside the allowed range [-100, 100]"
            )
        object.__setattr__(self, "value", value)
        index = int(self.dimension_index)
        if index != self.dimension_index or index < 0:
            raise ValidationError(f"dimension index must be a nonnegative integer, got {self.dimension_index}")
        object.__setattr__(self, "dimension_index", index)


class LayerClass(enum.Enum):
    ORDINARY = "ordinary"
    ORDINARY_PUBLIC = "ordinary_public"
    OUTSTANDING_PUBLIC = "outstanding_public"


def parse_poll_records(source: Union[str, Path, io.TextIOBase]) -> list[PollRecord]:
    """Parse ``evaluator_id,subject_id,dimension_index,value`` lines.

    ``source`` is a path or an open text stream. Blank lines and lines starting
    with ``#`` are skipped.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as fh:
            return parse_poll_records(fh)
    records = []
    for lineno, row in enumerate(csv.reader(source), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if len(row) != 4:
            raise ValidationError(f"poll line {lineno}: expected 4 fields, got {len(row)}")
        evaluator, subject, dim, value = (f.strip() for f in row)
        try:
            dim_index = int(dim)
            rating = float(value)
        except ValueError:
            raise ValidationError(f"poll line {lineno}: cannot parse {row!r}") from None
        try:
            records.append(PollRecord(evaluator, subject, dim_index, rating))
        except ValidationError as exc:
            raise ValidationError(f"poll line {lineno}: {exc}") from None
    return records


def format_poll_records(records: Iterable[PollRecord]) -> str:
    return "".join(
        f"{r.evaluator_id},{r.subject_id},{r.dimension_index},{r.value!r}\n" for r in records
    )


def leaves(complex: ComplexBody, complexes: Optional[Mapping[str, ComplexBody]] = None) -> tuple[str, ...]:
    """Sorted ids of the leaf bodies transitively contained in ``complex``.

    Member ids that name another complex in ``complexes`` are expanded; any
    other id is a leaf.
    """
    complexes = complexes or {}
    found: set[str] = set()

    def visit(node: ComplexBody, path: tuple[str, ...]) -> None:
        if node.id in path:
            raise ValidationError(f"membership cycle: {' -> '.join(path + (node.id,))}")
        for member in node.members:
            child = complexes.get(member)
            if child is None:
                found.add(member)
            else:
                visit(child, path + (node.id,))

    visit(complex, ())
    return tuple(sorted(found))


def radius(complex: ComplexBody, complexes: Optional[Mapping[str, ComplexBody]] = None) -> float:
    """Radius R of a complex body: its leaf count, or the fixed override."""
    if complex.fixed_radius is not None:
        return float(complex.fixed_radius)
    count = len(leaves(complex, complexes))
    if count == 0:
        raise ValidationError(f"complex {complex.id!r} contains no leaf bodies")
    return float(count)


def validate_complex(
    complex: ComplexBody,
    complexes: Optional[Mapping[str, ComplexBody]] = None,
    max_layer_ratio: float = DEFAULT_MAX_LAYER_RATIO,
) -> None:
    r = radius(complex, complexes)
    if complex.layer_thickness > max_layer_ratio * r:
        raise ValidationError(
            f"complex {complex.id!r}: layer thickness {complex.layer_thickness} exceeds "
            f"{max_layer_ratio} x radius {r}"
        )


def aggregate_assessment(
    records: Iterable[PollRecord],
    subject_id: str,
    complex: ComplexBody,
    complexes: Optional[Mapping[str, ComplexBody]] = None,
) -> AssessmentVector:
    """Sum every leaf evaluator's rating of ``subject_id``, dimension by dimension.

    Missing ratings count as zero. The dimension count is taken from the
    complex's center.
    """
    members = set(leaves(complex, complexes))
    n = complex.center.n
    per_dim: list[list[tuple[str, float]]] = [[] for _ in range(n)]
    seen = set()
    for rec in records:
        if rec.subject_id != subject_id:
            continue
        key = (rec.evaluator_id, rec.dimension_index)
        if key in seen:
            raise ValidationError(
                f"duplicate rating of {subject_id!r} by {rec.evaluator_id!r} on dimension {rec.dimension_index}"
            )
        seen.add(key)
        if rec.evaluator_id not in members:
            raise ValidationError(f"evaluator {rec.evaluator_id!r} is not a member of complex {complex.id!r}")
        if rec.dimension_index >= n:
            raise ValidationError(f"dimension index {rec.dimension_index} out of range for n={n}")
        per_dim[rec.dimension_index].append((rec.evaluator_id, rec.value))
    # fsum is correctly rounded, so the result does not depend on evaluation order
    return AssessmentVector(tuple(math.fsum(v for _, v in sorted(vals)) for vals in per_dim))


def classify_layer(
    magnitude: float,
    complex: ComplexBody,
    complexes: Optional[Mapping[str, ComplexBody]] = None,
) -> LayerClass:
    """Layer of a body whose assessment relative to ``complex`` has the given magnitude.

    Boundaries go to the lower class: ``magnitude == R`` is ordinary and
    ``magnitude == R + dR`` is ordinary public.
    """
    if not magnitude >= 0:
        raise ValidationError(f"assessment magnitude must be >= 0, got {magnitude}")
    r = radius(complex, complexes)
    if magnitude <= r:
        return LayerClass.ORDINARY
    if magnitude <= r + complex.layer_thickness:
        return LayerClass.ORDINARY_PUBLIC
    return LayerClass.OUTSTANDING_PUBLIC


def apply_floor(vector: AssessmentVector, floors: Mapping[int, float]) -> AssessmentVector:
    """Clamp selected dimensions of an aggregated assessment from below."""
    coords = list(vector.coords)
    for index, level in floors.items():
        if not 0 <= index < len(coords):
            raise ValidationError(f"floor dimension {index} out of range for n={len(coords)}")
        coords[index] = max(coords[index], float(level))
    return AssessmentVector(tuple(coords))
