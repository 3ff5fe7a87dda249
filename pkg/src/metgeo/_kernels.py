"""Hot numeric kernels for piecewise-linear path lengths and local search.

The brute-force path oracle spends essentially all of its time evaluating
quadrature lengths of piecewise-linear matrix paths.  The loop kernels
below are compiled with numba when available; setting ``METGEO_NO_NUMBA=1``
(or running without numba installed) selects a vectorized pure-numpy
implementation of the same arithmetic.  ``benchmarks/bench_kernels.py``
compares the two paths.
"""

from __future__ import annotations

import os

import numpy as np

# Determinant floor inside the quadrature integrand: nodes are convex
# combinations of PSD waypoints, so determinants are nonnegative up to
# rounding; the floor only guards divisions.
_DET_FLOOR = 1e-60

# Adaptive quadrature defaults: double the substep count until the trapezoid
# value moves by less than rtol, or the refinement cap is hit.
_SEARCH_RTOL = 1e-3
_SEARCH_REFINE = 4


def _env_disabled() -> bool:
    return os.environ.get("METGEO_NO_NUMBA", "").strip().lower() in {
        "1",
        "true",
        "yes",
        "on",
    }


try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    _HAVE_NUMBA = False

_USE_NUMBA = _HAVE_NUMBA and not _env_disabled()


def using_numba() -> bool:
    """Whether the compiled kernels are active in this process."""
    return _USE_NUMBA


def _speed_at(node, da):
    """Integrand sqrt(tr((node^-1 da)^2) sqrt(det node)) via adjugates.

    Dimensions 2 and 3 (the hot cases) avoid any factorization; larger
    dimensions fall back to LAPACK.  Determinants are floored so nodes that
    rounding pushed past the PSD boundary price as near-infinite rather
    than dividing by zero.
    """
    n = node.shape[0]
    if n == 2:
        det = node[0, 0] * node[1, 1] - node[0, 1] * node[1, 0]
        x00 = node[1, 1] * da[0, 0] - node[0, 1] * da[1, 0]
        x01 = node[1, 1] * da[0, 1] - node[0, 1] * da[1, 1]
        x10 = -node[1, 0] * da[0, 0] + node[0, 0] * da[1, 0]
        x11 = -node[1, 0] * da[0, 1] + node[0, 0] * da[1, 1]
        trxx = x00 * x00 + 2.0 * x01 * x10 + x11 * x11
    elif n == 3:
        c00 = node[1, 1] * node[2, 2] - node[1, 2] * node[2, 1]
        c01 = node[1, 2] * node[2, 0] - node[1, 0] * node[2, 2]
        c02 = node[1, 0] * node[2, 1] - node[1, 1] * node[2, 0]
        c10 = node[0, 2] * node[2, 1] - node[0, 1] * node[2, 2]
        c11 = node[0, 0] * node[2, 2] - node[0, 2] * node[2, 0]
        c12 = node[0, 1] * node[2, 0] - node[0, 0] * node[2, 1]
        c20 = node[0, 1] * node[1, 2] - node[0, 2] * node[1, 1]
        c21 = node[0, 2] * node[1, 0] - node[0, 0] * node[1, 2]
        c22 = node[0, 0] * node[1, 1] - node[0, 1] * node[1, 0]
        det = node[0, 0] * c00 + node[0, 1] * c01 + node[0, 2] * c02
        x00 = c00 * da[0, 0] + c10 * da[1, 0] + c20 * da[2, 0]
        x01 = c00 * da[0, 1] + c10 * da[1, 1] + c20 * da[2, 1]
        x02 = c00 * da[0, 2] + c10 * da[1, 2] + c20 * da[2, 2]
        x10 = c01 * da[0, 0] + c11 * da[1, 0] + c21 * da[2, 0]
        x11 = c01 * da[0, 1] + c11 * da[1, 1] + c21 * da[2, 1]
        x12 = c01 * da[0, 2] + c11 * da[1, 2] + c21 * da[2, 2]
        x20 = c02 * da[0, 0] + c12 * da[1, 0] + c22 * da[2, 0]
        x21 = c02 * da[0, 1] + c12 * da[1, 1] + c22 * da[2, 1]
        x22 = c02 * da[0, 2] + c12 * da[1, 2] + c22 * da[2, 2]
        trxx = (
            x00 * x00 + x11 * x11 + x22 * x22
            + 2.0 * (x01 * x10 + x02 * x20 + x12 * x21)
        )
    else:
        det = np.linalg.det(node)
        adj = np.linalg.inv(node + 1e-30 * np.eye(n)) * det
        x = adj @ da
        trxx = np.trace(x @ x)
    if det < _DET_FLOOR:
        det = _DET_FLOOR
    if trxx < 0.0:
        trxx = 0.0
    return np.sqrt(trxx / (det * det) * np.sqrt(det))


def _trapezoid_loop(a, da, substeps):
    h = 1.0 / substeps
    total = 0.5 * (_speed_at(a, da) + _speed_at(a + da, da))
    for step in range(1, substeps):
        total += _speed_at(a + (step * h) * da, da)
    return total * h


def _segment_length_loop(a, b, substeps, rtol, max_refine):
    """Quadrature length of the entrywise-linear segment from a to b.

    Segments anchored at an exact zero matrix (the cone point) are straight
    scalings and integrate in closed form; elsewhere the trapezoid count is
    doubled until the value settles, so sharp near-singular dips are not
    overpriced.  Trapezoid sums majorize the convex dips, keeping the
    estimate on the safe (never-undercutting) side.
    """
    n = a.shape[0]
    a_zero = True
    b_zero = True
    diff = False
    for i in range(n):
        for j in range(n):
            if a[i, j] != 0.0:
                a_zero = False
            if b[i, j] != 0.0:
                b_zero = False
            if a[i, j] != b[i, j]:
                diff = True
    if not diff:
        return 0.0
    if a_zero or b_zero:
        other = a if b_zero else b
        w = np.linalg.eigvalsh(other)
        det = 1.0
        for i in range(n):
            det *= max(w[i], 0.0)
        return (4.0 / np.sqrt(n)) * det ** 0.25
    da = b - a
    steps = substeps
    prev = _trapezoid_loop(a, da, steps)
    for _ in range(max_refine):
        steps *= 2
        cur = _trapezoid_loop(a, da, steps)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-30):
            return cur
        prev = cur
    return prev


def _path_segment_lengths_loop(way, substeps, rtol, max_refine):
    m = way.shape[0]
    seg = np.empty(m - 1)
    for j in range(m - 1):
        seg[j] = _segment_length_loop(way[j], way[j + 1], substeps, rtol, max_refine)
    return seg


def _local_search_loop(way, seg, kinds, idxs, rows, cols, deltas, substeps,
                       rtol, max_refine, floor):
    """Greedy coordinate descent over interior waypoints, in place.

    Proposals of kind 0 perturb one symmetric entry of one waypoint by a
    step proportional to the entry's natural scale sqrt(a_ii a_kk);
    proposals of kind 1 rescale the whole waypoint by exp(delta), the
    radial move that descends toward the cone point.  Waypoints are clamped
    back to eigenvalues >= floor, and a move is kept only if the two
    affected segment lengths shrink.
    """
    for p in range(idxs.shape[0]):
        j = idxs[p]
        old = way[j].copy()
        if kinds[p] == 0:
            i = rows[p]
            k = cols[p]
            scale = np.sqrt(way[j, i, i] * way[j, k, k]) + 1e-30
            way[j, i, k] += deltas[p] * scale
            if i != k:
                way[j, k, i] += deltas[p] * scale
        else:
            factor = np.exp(deltas[p])
            way[j] = way[j] * factor
        w, v = np.linalg.eigh(way[j])
        if w[0] < floor:
            for q in range(w.shape[0]):
                if w[q] < floor:
                    w[q] = floor
            clamped = (v * w) @ v.T
            way[j] = 0.5 * (clamped + clamped.T)
        new_left = _segment_length_loop(way[j - 1], way[j], substeps, rtol, max_refine)
        new_right = _segment_length_loop(way[j], way[j + 1], substeps, rtol, max_refine)
        if new_left + new_right < seg[j - 1] + seg[j]:
            seg[j - 1] = new_left
            seg[j] = new_right
        else:
            way[j] = old


def _trapezoid_numpy(a, da, substeps):
    sigma = np.linspace(0.0, 1.0, substeps + 1)
    nodes = a[None, :, :] + sigma[:, None, None] * da[None, :, :]
    n = a.shape[0]
    det = np.linalg.det(nodes)
    if n == 2:
        adj = np.empty_like(nodes)
        adj[:, 0, 0] = nodes[:, 1, 1]
        adj[:, 0, 1] = -nodes[:, 0, 1]
        adj[:, 1, 0] = -nodes[:, 1, 0]
        adj[:, 1, 1] = nodes[:, 0, 0]
    else:
        # adjugate via SVD-free cofactor route: inv(node) * det, guarded
        safe = nodes + 1e-30 * np.eye(n)[None]
        adj = np.linalg.inv(safe) * det[:, None, None]
    x = adj @ da[None, :, :]
    trxx = np.maximum(np.einsum("kij,kji->k", x, x), 0.0)
    det = np.maximum(det, _DET_FLOOR)
    vals = np.sqrt(trxx / (det * det) * np.sqrt(det))
    return float(np.trapezoid(vals, dx=1.0 / substeps))


def _segment_length_numpy(a, b, substeps, rtol, max_refine):
    """Vectorized twin of :func:`_segment_length_loop`."""
    n = a.shape[0]
    if np.array_equal(a, b):
        return 0.0
    a_zero = not np.any(a)
    b_zero = not np.any(b)
    if a_zero or b_zero:
        other = a if b_zero else b
        w = np.maximum(np.linalg.eigvalsh(other), 0.0)
        return (4.0 / np.sqrt(n)) * np.prod(w) ** 0.25
    da = b - a
    steps = substeps
    prev = _trapezoid_numpy(a, da, steps)
    for _ in range(max_refine):
        steps *= 2
        cur = _trapezoid_numpy(a, da, steps)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-30):
            return cur
        prev = cur
    return prev


def _path_segment_lengths_numpy(way, substeps, rtol, max_refine):
    return np.array(
        [
            _segment_length_numpy(way[j], way[j + 1], substeps, rtol, max_refine)
            for j in range(way.shape[0] - 1)
        ]
    )


def _local_search_numpy(way, seg, kinds, idxs, rows, cols, deltas, substeps,
                        rtol, max_refine, floor):
    for p in range(idxs.shape[0]):
        j = int(idxs[p])
        old = way[j].copy()
        if kinds[p] == 0:
            i = int(rows[p])
            k = int(cols[p])
            scale = np.sqrt(way[j, i, i] * way[j, k, k]) + 1e-30
            way[j, i, k] += deltas[p] * scale
            if i != k:
                way[j, k, i] += deltas[p] * scale
        else:
            way[j] = way[j] * np.exp(deltas[p])
        w, v = np.linalg.eigh(way[j])
        if w[0] < floor:
            clamped = (v * np.maximum(w, floor)) @ v.T
            way[j] = 0.5 * (clamped + clamped.T)
        new_left = _segment_length_numpy(way[j - 1], way[j], substeps, rtol, max_refine)
        new_right = _segment_length_numpy(way[j], way[j + 1], substeps, rtol, max_refine)
        if new_left + new_right < seg[j - 1] + seg[j]:
            seg[j - 1] = new_left
            seg[j] = new_right
        else:
            way[j] = old


if _USE_NUMBA:
    _speed_at = njit(cache=True)(_speed_at)
    _trapezoid_loop = njit(cache=True)(_trapezoid_loop)
    _segment_length_loop = njit(cache=True)(_segment_length_loop)
    _path_segment_lengths_loop = njit(cache=True)(_path_segment_lengths_loop)
    _local_search_loop = njit(cache=True)(_local_search_loop)
    _segment_length_impl = _segment_length_loop
    _path_segment_lengths_impl = _path_segment_lengths_loop
    _local_search_impl = _local_search_loop
else:
    _segment_length_impl = _segment_length_numpy
    _path_segment_lengths_impl = _path_segment_lengths_numpy
    _local_search_impl = _local_search_numpy


def pl_segment_lengths(
    way: np.ndarray,
    substeps: int,
    rtol: float = _SEARCH_RTOL,
    max_refine: int = _SEARCH_REFINE,
) -> np.ndarray:
    """Per-segment quadrature lengths of a piecewise-linear matrix path."""
    way = np.ascontiguousarray(way, dtype=float)
    return _path_segment_lengths_impl(way, int(substeps), float(rtol), int(max_refine))


def pl_path_length(
    way: np.ndarray,
    substeps: int,
    rtol: float = _SEARCH_RTOL,
    max_refine: int = _SEARCH_REFINE,
) -> float:
    """Total quadrature length of a piecewise-linear matrix path."""
    return float(pl_segment_lengths(way, substeps, rtol, max_refine).sum())


def local_search(
    way: np.ndarray,
    kinds: np.ndarray,
    idxs: np.ndarray,
    rows: np.ndarray,
    cols: np.ndarray,
    deltas: np.ndarray,
    substeps: int,
    floor: float,
    rtol: float = _SEARCH_RTOL,
    max_refine: int = _SEARCH_REFINE,
) -> tuple[np.ndarray, np.ndarray]:
    """Run the greedy waypoint search; returns (waypoints, segment lengths)."""
    way = np.ascontiguousarray(way, dtype=float).copy()
    seg = _path_segment_lengths_impl(way, int(substeps), float(rtol), int(max_refine))
    _local_search_impl(
        way,
        seg,
        np.ascontiguousarray(kinds, dtype=np.int64),
        np.ascontiguousarray(idxs, dtype=np.int64),
        np.ascontiguousarray(rows, dtype=np.int64),
        np.ascontiguousarray(cols, dtype=np.int64),
        np.ascontiguousarray(deltas, dtype=float),
        int(substeps),
        float(rtol),
        int(max_refine),
        float(floor),
    )
    return way, seg
