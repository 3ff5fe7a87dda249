"""Discretized (semi-)metric fields over a weighted sample grid.

The base manifold enters only through quadrature atoms: sample ids with
positive weights summing to one.  Every field-level quantity is a weighted
combination of the fiberwise closed forms, which is exactly what makes the
global problem tractable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .fiber import (
    CaseTag,
    FiberPoint,
    GeodesicCase,
    classify,
    fiber_distance,
    fiber_geodesic,
)
from .spd import InvalidInput

#: Tolerance on |sum(weights) - 1| accepted without normalization.
WEIGHT_SUM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class SampleGrid:
    """Sample ids plus quadrature weights representing a unit-volume measure."""

    ids: tuple
    weights: np.ndarray
    dim: int

    def __init__(self, samples: Iterable[tuple[str, float]], dim: int,
                 normalize: bool = False):
        pairs = list(samples)
        ids = tuple(str(i) for i, _ in pairs)
        w = np.array([float(x) for _, x in pairs], dtype=float)
        if len(ids) != len(set(ids)):
            raise InvalidInput("sample ids must be unique")
        if len(ids) == 0:
            raise InvalidInput("grid needs at least one sample")
        if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
            raise InvalidInput("weights must be strictly positive and finite")
        total = w.sum()
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            if not normalize:
                raise InvalidInput(
                    f"weights sum to {total!r}, not 1; the unit-volume "
                    "convention is load-bearing -- pass normalize=True "
                    "(CLI: --normalize-weights) to rescale"
                )
            w = w / total
        if int(dim) < 1:
            raise InvalidInput("dim must be a positive integer")
        w.flags.writeable = False
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "dim", int(dim))

    def __len__(self) -> int:
        return len(self.ids)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SampleGrid)
            and self.dim == other.dim
            and self.ids == other.ids
            and np.array_equal(self.weights, other.weights)
        )


@dataclass(frozen=True, eq=False)
class MetricField:
    """One fiber point per grid sample: a discretized measurable semimetric."""

    grid: SampleGrid
    values: tuple

    def __init__(self, grid: SampleGrid, values):
        if isinstance(values, Mapping):
            missing = [i for i in grid.ids if i not in values]
            extra = [i for i in values if i not in grid.ids]
            if missing or extra:
                raise InvalidInput(
                    f"field ids do not match grid (missing {missing}, extra {extra})"
                )
            vals = tuple(values[i] for i in grid.ids)
        else:
            vals = tuple(values)
            if len(vals) != len(grid):
                raise InvalidInput(
                    f"expected {len(grid)} values, got {len(vals)}"
                )
        coerced = []
        for i, v in zip(grid.ids, vals):
            p = v if isinstance(v, FiberPoint) else FiberPoint.from_matrix(v)
            if p.dim != grid.dim:
                raise InvalidInput(
                    f"sample {i!r} has dim {p.dim}, grid has dim {grid.dim}"
                )
            coerced.append(p)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", tuple(coerced))

    def value(self, sample_id: str) -> FiberPoint:
        return self.values[self.grid.ids.index(sample_id)]

    def cone_ids(self) -> frozenset:
        return frozenset(
            i for i, p in zip(self.grid.ids, self.values) if p.is_cone
        )


@dataclass(frozen=True, eq=False)
class FieldClassification:
    """Per-sample geodesic cases plus the N and P masks."""

    cases: dict
    mask_n: frozenset
    mask_p: frozenset


def _check_grids(f0: MetricField, f1: MetricField) -> SampleGrid:
    if f0.grid != f1.grid:
        raise InvalidInput("fields live on different grids")
    return f0.grid


def field_distance(f0: MetricField, f1: MetricField) -> float:
    """The L2-type distance: weighted quadrature of squared fiber distances."""
    grid = _check_grids(f0, f1)
    acc = 0.0
    for w, p0, p1 in zip(grid.weights, f0.values, f1.values):
        d = fiber_distance(p0, p1)
        acc += w * d * d
    return float(np.sqrt(acc))


def per_sample_distances(f0: MetricField, f1: MetricField) -> dict:
    """Fiberwise distance for every sample id."""
    grid = _check_grids(f0, f1)
    return {
        i: fiber_distance(p0, p1)
        for i, p0, p1 in zip(grid.ids, f0.values, f1.values)
    }


def field_geodesic(f0: MetricField, f1: MetricField, t: float) -> MetricField:
    """The minimal path between two fields, evaluated samplewise."""
    grid = _check_grids(f0, f1)
    if t == 0.0:
        return f0
    if t == 1.0:
        return f1
    return MetricField(
        grid,
        [fiber_geodesic(p0, p1, t) for p0, p1 in zip(f0.values, f1.values)],
    )


def classify_fields(f0: MetricField, f1: MetricField) -> FieldClassification:
    """Samplewise classification plus the masks N (both SPD) and P (Riemannian)."""
    grid = _check_grids(f0, f1)
    cases: dict[str, GeodesicCase] = {}
    mask_n = set()
    mask_p = set()
    for i, p0, p1 in zip(grid.ids, f0.values, f1.values):
        case = classify(p0, p1)
        cases[i] = case
        if not (p0.is_cone or p1.is_cone):
            mask_n.add(i)
            if case.tag is CaseTag.RIEMANNIAN:
                mask_p.add(i)
    return FieldClassification(
        cases=cases, mask_n=frozenset(mask_n), mask_p=frozenset(mask_p)
    )


def fields_equivalent(f0: MetricField, f1: MetricField) -> bool:
    """Whether two fields represent the same completion point.

    True exactly when every per-sample distance vanishes: cone points must
    coincide and SPD values must agree.  This realizes the equivalence
    relation on semimetrics with matching degeneracy sets.
    """
    grid = _check_grids(f0, f1)
    for p0, p1 in zip(f0.values, f1.values):
        if p0.is_cone != p1.is_cone:
            return False
        if not p0.is_cone and fiber_distance(p0, p1) != 0.0:
            return False
    return True


def field_path_length(path: Sequence[tuple[float, MetricField]]) -> float:
    """Length of a sampled field path from field-level speed quadrature.

    The speed on each segment is the metric difference quotient
    distance(g_j, g_{j+1}) / dt, whose integral is the sum of consecutive
    field distances.  Exact (to rounding) on sampled field geodesics, and
    never larger than the length of any interpolating path.
    """
    steps = list(path)
    if len(steps) < 2:
        raise InvalidInput("need at least two time samples")
    times = np.array([float(t) for t, _ in steps])
    if np.any(np.diff(times) <= 0.0):
        raise InvalidInput("times must be strictly increasing")
    fields = [f for _, f in steps]
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise InvalidInput("fields live on different grids")
    return float(
        sum(
            field_distance(fields[j], fields[j + 1])
            for j in range(len(fields) - 1)
        )
    )


def sample_field_geodesic(
    f0: MetricField, f1: MetricField, times
) -> list[tuple[float, MetricField]]:
    """Evaluate the field geodesic at the given times."""
    return [(float(t), field_geodesic(f0, f1, float(t))) for t in times]
