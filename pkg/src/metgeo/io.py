"""The field file format: JSON carrier for grids and named fields.

Layout::

    {
      "dim": 2,
      "grid": [{"id": "x0", "weight": 0.5}, {"id": "x1", "weight": 0.5}],
      "fields": {
        "g0": {"x0": {"spd": [[1.0, 0.0], [0.0, 1.0]]}, "x1": {"cone": true}}
      },
      "reference": {"x0": [[...]]}          # optional, triggers whitening
    }

Matrices must be symmetric to 1e-12 relative (beyond that they are
symmetrized with a warning).  Weights must sum to one unless normalization
is requested.  Saving is canonical: sorted keys, shortest round-trip
decimal floats (at most 17 significant digits), so load-save is
value-identical.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .field import MetricField, SampleGrid
from .fiber import FiberPoint
from .spd import SPD_TOLERANCE, InvalidInput, whiten

_SYM_WARN_TOL = 1e-12


@dataclass
class FieldFile:
    """A grid plus named fields, as read from or written to disk."""

    grid: SampleGrid
    fields: dict

    def field(self, name: str) -> MetricField:
        if name not in self.fields:
            raise InvalidInput(
                f"no field named {name!r}; available: {sorted(self.fields)}"
            )
        return self.fields[name]


def _load_matrix(raw, dim: int, where: str) -> np.ndarray:
    m = np.asarray(raw, dtype=float)
    if m.shape != (dim, dim):
        raise InvalidInput(f"{where}: expected a {dim}x{dim} matrix, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInput(f"{where}: non-finite entries")
    scale = max(np.abs(m).max(), 1.0)
    asym = np.abs(m - m.T).max()
    if asym > _SYM_WARN_TOL * scale:
        warnings.warn(
            f"{where}: matrix asymmetric by {asym:.3e}; symmetrizing",
            stacklevel=3,
        )
    return 0.5 * (m + m.T)


def load_field_file(
    path, normalize_weights: bool = False, tolerance: float = SPD_TOLERANCE
) -> FieldFile:
    """Read a field file, whitening against per-sample references if given."""
    with open(path) as fh:
        doc = json.load(fh)
    try:
        dim = int(doc["dim"])
        grid_rows = doc["grid"]
        raw_fields = doc["fields"]
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"{path}: missing required key {exc}") from exc
    grid = SampleGrid(
        [(row["id"], row["weight"]) for row in grid_rows],
        dim=dim,
        normalize=normalize_weights,
    )
    reference = {
        i: _load_matrix(m, dim, f"reference[{i}]")
        for i, m in doc.get("reference", {}).items()
    }
    for i in reference:
        if i not in grid.ids:
            raise InvalidInput(f"reference for unknown sample id {i!r}")
    fields = {}
    for name, entries in raw_fields.items():
        values = {}
        for i in grid.ids:
            if i not in entries:
                raise InvalidInput(f"field {name!r} is missing sample {i!r}")
            entry = entries[i]
            if "cone" in entry:
                if entry["cone"] is not True:
                    raise InvalidInput(
                        f"field {name!r}, sample {i!r}: cone must be true"
                    )
                values[i] = FiberPoint.cone(dim)
                continue
            if "spd" not in entry:
                raise InvalidInput(
                    f"field {name!r}, sample {i!r}: need 'spd' or 'cone'"
                )
            m = _load_matrix(entry["spd"], dim, f"{name}[{i}]")
            if i in reference:
                m = whiten(m, reference[i])
            values[i] = FiberPoint.from_matrix(m, tol=tolerance)
        extra = set(entries) - set(grid.ids)
        if extra:
            raise InvalidInput(f"field {name!r} has unknown sample ids {sorted(extra)}")
        fields[name] = MetricField(grid, values)
    return FieldFile(grid=grid, fields=fields)


def field_file_document(ff: FieldFile) -> dict:
    """Plain-dict form of a field file, ready for canonical JSON dumping."""
    doc = {
        "dim": ff.grid.dim,
        "grid": [
            {"id": i, "weight": float(w)}
            for i, w in zip(ff.grid.ids, ff.grid.weights)
        ],
        "fields": {},
    }
    for name in sorted(ff.fields):
        field = ff.fields[name]
        entries = {}
        for i, p in zip(field.grid.ids, field.values):
            if p.is_cone:
                entries[i] = {"cone": True}
            else:
                entries[i] = {"spd": [[float(x) for x in row] for row in p.mat]}
        doc["fields"][name] = entries
    return doc


def dumps_canonical(doc) -> str:
    """Canonical JSON text: sorted keys, newline-terminated."""
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def save_field_file(ff: FieldFile, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_canonical(field_file_document(ff)))
