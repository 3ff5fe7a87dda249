"""Pointwise geometry of the fiber of SPD tensors and its completion.

The fiber over a sample point is the set of SPD tensors together with a
single cone point absorbing every degenerate (positive semidefinite,
singular) tensor.  This module provides the closed-form exponential map,
its inverse, the fiber distance, and evaluation of the unique minimal path
between any two fiber points, including concatenated paths through the
cone point.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .spd import (
    SPD_TOLERANCE,
    InvalidInput,
    NotPositiveDefinite,
    SpdTensor,
    SymTensor,
    _as_matrix,
    _spd_matrix,
    _sym_apply,
    fiber_inner,
    traceless_split,
)


class OutOfDomain(ValueError):
    """Geodesic evaluated past the end of its domain of definition."""


class NotInExpImage(ValueError):
    """Endpoint pair has no Riemannian geodesic (outside the exp image)."""


class CaseTag(str, enum.Enum):
    """Trichotomy of minimal paths between two fiber points."""

    RIEMANNIAN = "riemannian"
    CONE = "cone_concatenation"
    FROM_CONE = "from_cone"
    TO_CONE = "to_cone"
    BOTH_CONE = "both_cone"


@dataclass(frozen=True, eq=False)
class FiberPoint:
    """An element of the fiber completion: an SPD tensor or the cone point."""

    dim: int
    mat: Optional[np.ndarray]

    @classmethod
    def spd(cls, m) -> "FiberPoint":
        a = _spd_matrix(m)
        a = a.copy()
        a.flags.writeable = False
        return cls(dim=a.shape[0], mat=a)

    @classmethod
    def cone(cls, dim: int) -> "FiberPoint":
        return cls(dim=int(dim), mat=None)

    @classmethod
    def from_matrix(cls, m, tol: float = SPD_TOLERANCE) -> "FiberPoint":
        """Ingest a symmetric matrix, collapsing degenerate input to the cone.

        Positive semidefinite but singular tensors belong to the collapsed
        boundary; they map to the cone point with a warning so callers can
        tell "given as zero" apart from "collapsed".  Indefinite input is
        rejected.
        """
        a = _as_matrix(m, "fiber point")
        a = 0.5 * (a + a.T)
        w = np.linalg.eigvalsh(a)
        scale = max(abs(w[0]), abs(w[-1]))
        if scale == 0.0:
            return cls.cone(a.shape[0])
        if w[0] < -tol * scale:
            raise InvalidInput(
                f"matrix is indefinite (eigenvalue {w[0]:.3e}), "
                "not a semimetric value"
            )
        if w[0] <= tol * w[-1]:
            warnings.warn(
                "degenerate tensor collapsed to the cone point",
                stacklevel=2,
            )
            return cls.cone(a.shape[0])
        a.flags.writeable = False
        return cls(dim=a.shape[0], mat=a)

    @property
    def is_cone(self) -> bool:
        return self.mat is None

    def det_quarter_root(self) -> float:
        """det^(1/4) of the stored matrix; zero at the cone point."""
        if self.mat is None:
            return 0.0
        return float(np.linalg.det(self.mat) ** 0.25)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiberPoint):
            return NotImplemented
        if self.dim != other.dim:
            return False
        if self.is_cone or other.is_cone:
            return self.is_cone and other.is_cone
        return np.array_equal(self.mat, other.mat)


@dataclass(frozen=True, eq=False)
class GeodesicCase:
    """Classification of a fiber pair plus the data driving the formulas."""

    tag: CaseTag
    log_coords: Optional[SymTensor] = None
    traceless_norm_sq: Optional[float] = None
    switch_time: Optional[float] = None


@dataclass(frozen=True, eq=False)
class SampledPath:
    """A path recorded at finitely many times in [0, 1]."""

    times: np.ndarray
    points: tuple

    def __init__(self, times, points):
        t = np.asarray(times, dtype=float)
        pts = tuple(points)
        if t.ndim != 1 or len(t) != len(pts):
            raise InvalidInput("times and points must be 1d and equal length")
        if len(t) < 2:
            raise InvalidInput("need at least two samples")
        if np.any(np.diff(t) <= 0.0):
            raise InvalidInput("times must be strictly increasing")
        if t[0] != 0.0 or t[-1] != 1.0:
            raise InvalidInput("times must start at 0 and end at 1")
        t.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", pts)


def _threshold(n: int) -> float:
    return (4.0 * np.pi) ** 2 / n


#: Classification margin at the threshold: pairs within this distance of
#: (4 pi)^2 / n (or past it) take the concatenated path through the cone.
#: The two formulas agree there to far below every stated tolerance, and
#: the margin keeps the inverse exponential away from the boundary where
#: its traceless part underflows.
CLASSIFICATION_MARGIN = 1e-9

#: Relative cutoff (on tr(b_T^2) against the full tangent scale) under
#: which a traceless part counts as exactly zero.  Rounding noise in a
#: genuinely pure-trace tangent sits near 1e-32; genuinely mixed tangents
#: classified Riemannian stay above 1e-24 thanks to the margin above.
_TRACELESS_ZERO = 1e-28


def log_coords(a0, a1) -> SymTensor:
    """The unique k with a1 = a0 expm(a0^-1 k).

    Computed through symmetric whitening, k = a0^(1/2) logm(a0^(-1/2) a1
    a0^(-1/2)) a0^(1/2), so a0^-1 k is similar to a symmetric matrix.
    """
    m0 = _spd_matrix(a0)
    m1 = _spd_matrix(a1)
    if m0.shape != m1.shape:
        raise InvalidInput(f"dimension mismatch: {m0.shape} vs {m1.shape}")
    w, v = np.linalg.eigh(m0)
    rt = (v * np.sqrt(w)) @ v.T
    irt = (v / np.sqrt(w)) @ v.T
    middle = irt @ m1 @ irt
    middle = 0.5 * (middle + middle.T)
    mw, mv = np.linalg.eigh(middle)
    # Rounding can push the smallest whitened eigenvalue to zero when the
    # pair is rotated beyond float range; the floor keeps the log finite,
    # and such pairs land far past the cone threshold where only the
    # endpoint determinants matter.
    mw = np.maximum(mw, 1e-300)
    return SymTensor(rt @ ((mv * np.log(mw)) @ mv.T) @ rt)


def _exp_like(a0: np.ndarray, c: np.ndarray) -> np.ndarray:
    """a0 expm(a0^-1 c) for symmetric c, evaluated symmetrically."""
    w, v = np.linalg.eigh(a0)
    rt = (v * np.sqrt(w)) @ v.T
    irt = (v / np.sqrt(w)) @ v.T
    middle = irt @ c @ irt
    middle = 0.5 * (middle + middle.T)
    return rt @ _sym_apply(middle, np.exp) @ rt


def exp_map(a0, b, t: float, tol: float = SPD_TOLERANCE) -> FiberPoint:
    """Geodesic starting at ``a0`` with initial tangent ``b``, at time ``t``.

    Implements the closed form with q(t) = 1 + (t/4) tr_{a0} b and
    r(t) = (t/4) sqrt(n tr_{a0}(b_T^2)).  A pure-trace tangent with negative
    trace reaches the cone point at t0 = -4 / tr_{a0} b and is undefined
    past it; every other tangent gives a path defined for all t >= 0.
    """
    m0 = _spd_matrix(a0)
    bm = _as_matrix(b, "tangent")
    if m0.shape != bm.shape:
        raise InvalidInput(f"dimension mismatch: {m0.shape} vs {bm.shape}")
    if t < 0.0:
        raise OutOfDomain("geodesics are parametrized by t >= 0")
    n = m0.shape[0]
    tr, b_t = traceless_split(m0, bm)
    s_t = max(trace_sq(m0, b_t.mat), 0.0)
    b_scale = tr * tr / n + s_t
    q = 1.0 + 0.25 * t * tr
    if s_t <= _TRACELESS_ZERO * b_scale:
        # Pure-trace tangent: a straight ray through scalings of a0.
        if tr < 0.0:
            t0 = -4.0 / tr
            if t > t0 * (1.0 + 1e-15):
                raise OutOfDomain(
                    f"pure-trace contraction is defined for t in [0, {t0}]"
                )
        if q * q <= tol:
            return FiberPoint.cone(n)
        return FiberPoint.spd(q ** (4.0 / n) * m0)
    r = 0.25 * t * np.sqrt(n * s_t)
    rho_sq = q * q + r * r
    if rho_sq <= tol:
        return FiberPoint.cone(n)
    theta = np.arctan2(r, q)
    coeff = 4.0 * theta / np.sqrt(n * s_t)
    return FiberPoint.spd(rho_sq ** (2.0 / n) * _exp_like(m0, coeff * b_t.mat))


def trace_sq(a0: np.ndarray, b: np.ndarray) -> float:
    """tr_{a0}(b^2), the squared trace-norm without the volume factor."""
    x = np.linalg.solve(a0, b)
    return float(np.trace(x @ x))


def inv_exp(a0, a1) -> SymTensor:
    """Initial velocity of the Riemannian geodesic from ``a0`` to ``a1``.

    This is the closed-form inverse of the exponential map, defined exactly
    when the pair classifies as Riemannian; other pairs raise
    :class:`NotInExpImage`.
    """
    m0 = _spd_matrix(a0)
    k = log_coords(m0, a1)
    n = m0.shape[0]
    tr, k_t = traceless_split(m0, k.mat)
    s_t = max(trace_sq(m0, k_t.mat), 0.0)
    if s_t >= _threshold(n) - CLASSIFICATION_MARGIN:
        raise NotInExpImage(
            f"tr(k_T^2) = {s_t:.6g} is at or past (4 pi)^2 / n = "
            f"{_threshold(n):.6g}: no Riemannian geodesic reaches this endpoint"
        )
    growth = np.exp(0.25 * tr)
    if s_t <= _TRACELESS_ZERO * (tr * tr / n + s_t):
        return SymTensor((4.0 / n) * (growth - 1.0) * m0)
    theta = 0.25 * np.sqrt(n * s_t)
    trace_part = (4.0 / n) * (growth * np.cos(theta) - 1.0) * m0
    # sin(theta)/theta via sinc keeps the small-angle limit exact.
    traceless_part = growth * np.sinc(theta / np.pi) * k_t.mat
    return SymTensor(trace_part + traceless_part)


def classify(p0: FiberPoint, p1: FiberPoint, tol: float = SPD_TOLERANCE) -> GeodesicCase:
    """Classify a fiber pair into the minimal-path trichotomy.

    A pair of SPD tensors is Riemannian exactly when tr_{a0}(k_T^2) stays
    strictly under (4 pi)^2 / n; pairs at or past the threshold take the
    concatenated path through the cone point.  The two distance formulas
    agree at the threshold, so the boundary choice is observationally
    irrelevant for distances.
    """
    p0 = _as_fiber(p0)
    p1 = _as_fiber(p1)
    if p0.dim != p1.dim:
        raise InvalidInput(f"dimension mismatch: {p0.dim} vs {p1.dim}")
    if p0.is_cone and p1.is_cone:
        return GeodesicCase(tag=CaseTag.BOTH_CONE)
    if p0.is_cone:
        return GeodesicCase(tag=CaseTag.FROM_CONE)
    if p1.is_cone:
        return GeodesicCase(tag=CaseTag.TO_CONE)
    n = p0.dim
    k = log_coords(p0.mat, p1.mat)
    _, k_t = traceless_split(p0.mat, k.mat)
    s_t = max(trace_sq(p0.mat, k_t.mat), 0.0)
    if s_t < _threshold(n) - CLASSIFICATION_MARGIN:
        return GeodesicCase(tag=CaseTag.RIEMANNIAN, log_coords=k, traceless_norm_sq=s_t)
    d0 = p0.det_quarter_root()
    d1 = p1.det_quarter_root()
    return GeodesicCase(
        tag=CaseTag.CONE,
        log_coords=k,
        traceless_norm_sq=s_t,
        switch_time=d0 / (d0 + d1),
    )


def _as_fiber(p) -> FiberPoint:
    if isinstance(p, FiberPoint):
        return p
    if isinstance(p, SpdTensor) or isinstance(p, np.ndarray) or hasattr(p, "mat"):
        return FiberPoint.spd(p)
    raise InvalidInput(f"not a fiber point: {type(p)!r}")


def fiber_distance(p0, p1) -> float:
    """Distance between two fiber points in the completion.

    Riemannian pairs use the law-of-cosines form; pairs past the threshold
    and pairs involving the cone point use the concatenated straight-segment
    values.
    """
    p0 = _as_fiber(p0)
    p1 = _as_fiber(p1)
    if p0.dim != p1.dim:
        raise InvalidInput(f"dimension mismatch: {p0.dim} vs {p1.dim}")
    n = p0.dim
    root_n = np.sqrt(n)
    d0 = p0.det_quarter_root()
    d1 = p1.det_quarter_root()
    if p0.is_cone or p1.is_cone:
        return (4.0 / root_n) * (d0 + d1)
    case = classify(p0, p1)
    if case.tag is CaseTag.CONE:
        return (4.0 / root_n) * (d0 + d1)
    s_t = case.traceless_norm_sq
    if s_t <= 0.0:
        return (4.0 / root_n) * abs(d1 - d0)
    theta = 0.25 * np.sqrt(n * s_t)
    inner = d0 * d0 - 2.0 * d0 * d1 * np.cos(theta) + d1 * d1
    return (4.0 / root_n) * np.sqrt(max(inner, 0.0))


def fiber_geodesic(p0, p1, t: float) -> FiberPoint:
    """Point at parameter ``t`` on the unique minimal path from p0 to p1.

    The path is parametrized proportionally to arc length.  Cone-case pairs
    traverse two straight constant-speed scalings meeting at the cone point
    at the switch time.
    """
    p0 = _as_fiber(p0)
    p1 = _as_fiber(p1)
    if not 0.0 <= t <= 1.0:
        raise InvalidInput(f"t = {t} outside [0, 1]")
    if t == 0.0:
        return p0
    if t == 1.0:
        return p1
    case = classify(p0, p1)
    n = p0.dim
    if case.tag is CaseTag.BOTH_CONE:
        return FiberPoint.cone(n)
    if case.tag is CaseTag.FROM_CONE:
        return FiberPoint.spd(t ** (4.0 / n) * p1.mat)
    if case.tag is CaseTag.TO_CONE:
        return FiberPoint.spd((1.0 - t) ** (4.0 / n) * p0.mat)
    if case.tag is CaseTag.RIEMANNIAN:
        return exp_map(p0.mat, inv_exp(p0.mat, p1.mat), t)
    t_star = case.switch_time
    if t < t_star:
        return FiberPoint.spd((1.0 - t / t_star) ** (4.0 / n) * p0.mat)
    if t > t_star:
        return FiberPoint.spd(((t - t_star) / (1.0 - t_star)) ** (4.0 / n) * p1.mat)
    return FiberPoint.cone(n)


def path_length(path: SampledPath) -> float:
    """Length of a sampled path from its finite-difference speeds.

    The speed on each segment is estimated as the metric difference
    quotient d(p_i, p_{i+1}) / dt; integrating that piecewise-constant
    speed field gives the sum of consecutive fiber distances.  This is a
    lower bound for the length of any path through the samples, and it is
    exact (to rounding) when the samples lie on a minimal path, including
    segments whose minimal connection passes through the cone point.  For
    the length of the entrywise-linear interpolant itself, see
    :func:`chord_length`.
    """
    if not isinstance(path, SampledPath):
        path = SampledPath(*path)
    return float(
        sum(
            fiber_distance(path.points[i], path.points[i + 1])
            for i in range(len(path.points) - 1)
        )
    )


def _chord_segment_length(p0: FiberPoint, p1: FiberPoint, substeps: int) -> float:
    """Length of the entrywise-linear segment between two fiber points.

    Segments with a cone endpoint are straight scalings of the other
    endpoint and integrate in closed form; SPD-to-SPD segments use
    composite-Simpson quadrature of the speed along the chord.
    """
    n = p0.dim
    d0 = p0.det_quarter_root()
    d1 = p1.det_quarter_root()
    if p0.is_cone and p1.is_cone:
        return 0.0
    if p0.is_cone or p1.is_cone:
        return (4.0 / np.sqrt(n)) * (d0 + d1)
    a0 = p0.mat
    da = p1.mat - a0
    if not np.any(da):
        return 0.0
    substeps += substeps % 2
    sigma = np.linspace(0.0, 1.0, substeps + 1)
    nodes = a0[None, :, :] + sigma[:, None, None] * da[None, :, :]
    w, v = np.linalg.eigh(nodes)
    w = np.maximum(w, 1e-300)
    m = np.swapaxes(v, 1, 2) @ da[None, :, :] @ v
    trace_term = np.sum(m * m / (w[:, :, None] * w[:, None, :]), axis=(1, 2))
    vals = np.sqrt(trace_term * np.sqrt(np.prod(w, axis=1)))
    h = 1.0 / substeps
    simpson = vals[0] + vals[-1] + 4.0 * vals[1:-1:2].sum() + 2.0 * vals[2:-1:2].sum()
    return float(simpson * h / 3.0)


def chord_length(path: SampledPath, substeps: int = 64) -> float:
    """Length of the entrywise piecewise-linear interpolant of a path.

    Always at least :func:`path_length` of the same samples; strictly
    larger whenever the chords leave the minimal path (the naive chord
    between far-rotated tensors is badly non-minimal).
    """
    if not isinstance(path, SampledPath):
        path = SampledPath(*path)
    return float(
        sum(
            _chord_segment_length(path.points[i], path.points[i + 1], substeps)
            for i in range(len(path.points) - 1)
        )
    )


def sample_geodesic(p0, p1, times) -> SampledPath:
    """Evaluate the minimal path at the given times and wrap as a path."""
    pts = [fiber_geodesic(p0, p1, float(t)) for t in times]
    return SampledPath(times, pts)


def finite_difference_speeds(path: SampledPath) -> np.ndarray:
    """Finite-difference speed estimates at interior samples.

    Uses metric difference quotients: the averaged one-sided quotients
    d(p_{i-1}, p_i)/dt and d(p_i, p_{i+1})/dt.  Next to a cone sample only
    the one-sided quotient away from the cone is averaged in, matching the
    one-sided treatment of the singular time.
    """
    if not isinstance(path, SampledPath):
        path = SampledPath(*path)
    t = path.times
    pts = path.points
    speeds = np.empty(len(pts) - 2)
    for i in range(1, len(pts) - 1):
        left = fiber_distance(pts[i - 1], pts[i]) / (t[i] - t[i - 1])
        right = fiber_distance(pts[i], pts[i + 1]) / (t[i + 1] - t[i])
        if pts[i - 1].is_cone and not pts[i + 1].is_cone:
            speeds[i - 1] = right
        elif pts[i + 1].is_cone and not pts[i - 1].is_cone:
            speeds[i - 1] = left
        else:
            speeds[i - 1] = 0.5 * (left + right)
    return speeds
