"""Independent numerical oracles for the structural claims.

Nothing in this module reuses the closed-form geodesics: the brute-force
oracle minimizes quadrature lengths over piecewise-linear paths in raw
matrix space, precisely so that agreement with the closed forms is
evidence rather than tautology.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ._kernels import local_search, pl_path_length, using_numba
from .fiber import (
    CaseTag,
    FiberPoint,
    classify,
    fiber_distance,
    fiber_geodesic,
    finite_difference_speeds,
    sample_geodesic,
)
from .field import MetricField, field_distance, field_geodesic
from .spd import InvalidInput

#: Eigenvalue floor for oracle waypoints (NaN guard, not a regularization).
WAYPOINT_FLOOR = 1e-14

#: Absolute tolerance for CAT(0) comparison slacks on distances of order 1-10.
CAT0_TOLERANCE = 1e-9


@dataclass(frozen=True)
class OracleConfig:
    """Budget and reproducibility knobs for the brute-force path oracle."""

    waypoints: int = 33
    quadrature_substeps: int = 32
    iterations: int = 16000
    restarts: int = 4
    step_scale: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.waypoints < 3:
            raise InvalidInput("need at least 3 waypoints")
        if self.quadrature_substeps < 8:
            raise InvalidInput("need at least 8 quadrature substeps")
        if self.iterations < 1 or self.restarts < 1:
            raise InvalidInput("iterations and restarts must be positive")
        if not 0.0 < self.step_scale <= 1.0:
            raise InvalidInput("step_scale must lie in (0, 1]")
        if self.seed < 0:
            raise InvalidInput("seed must be a nonnegative integer")


@dataclass
class Cat0Report:
    """Outcome of a comparison-triangle sweep."""

    trials: int
    max_violation: float
    worst_case: Optional[dict] = None
    shape_counts: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def passed(self) -> bool:
        return self.max_violation <= CAT0_TOLERANCE

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        d["tolerance"] = CAT0_TOLERANCE
        return d


@dataclass
class BoundsReport:
    """Extremal slacks of the determinant bounds over a random sweep."""

    trials: int
    min_lower_slack: float
    min_upper_slack: float
    max_conformal_gap: float
    max_cone_gap: float
    seed: int = 0

    @property
    def passed(self) -> bool:
        return (
            self.min_lower_slack >= -1e-10
            and self.min_upper_slack >= -1e-10
            and self.max_conformal_gap <= 1e-12
            and self.max_cone_gap <= 1e-12
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


@dataclass
class SpeedReport:
    """Constancy of finite-difference geodesic speeds over a random sweep."""

    trials: int
    max_speed_deviation: float
    max_endpoint_error: float
    max_length_error_riemannian: float
    max_length_error_cone: float
    seed: int = 0

    @property
    def passed(self) -> bool:
        return (
            self.max_speed_deviation < 1e-4
            and self.max_endpoint_error < 1e-9
            and self.max_length_error_riemannian < 1e-6
            and self.max_length_error_cone < 1e-3
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


@dataclass
class OracleReport:
    """Agreement between the path oracle and the closed-form distance."""

    pairs: int
    max_rel_diff: float
    max_undercut: float
    min_crossing_det_root: float
    elapsed_seconds: float
    seed: int = 0
    numba: bool = True

    @property
    def passed(self) -> bool:
        return self.max_rel_diff <= 0.03 and self.max_undercut <= 1e-3

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def worker_count() -> int:
    """Worker cap from METGEO_THREADS (default: single-threaded)."""
    raw = os.environ.get("METGEO_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map(fn, items):
    workers = worker_count()
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Brute-force path oracle
# ---------------------------------------------------------------------------


def _endpoint_matrix(p: FiberPoint) -> np.ndarray:
    if p.is_cone:
        return np.zeros((p.dim, p.dim))
    return np.asarray(p.mat, dtype=float)


def _chord_init(a0: np.ndarray, a1: np.ndarray, m: int) -> np.ndarray:
    s = np.linspace(0.0, 1.0, m)
    return a0[None] + s[:, None, None] * (a1 - a0)[None]


def _cone_chord_init(
    a0: np.ndarray, a1: np.ndarray, m: int, delta: float = 1e-8
) -> np.ndarray:
    """Chord routed through a small-determinant midpoint.

    The midpoint is a strongly shrunk average of the endpoints, so the
    direction change between them is paid for at a tiny volume scale.
    """
    mid = delta * 0.5 * (a0 + a1)
    half = m // 2 + 1
    first = _chord_init(a0, mid, half)
    second = _chord_init(mid, a1, m - half + 1)
    return np.concatenate([first, second[1:]], axis=0)


def brute_force_distance(
    p0, p1, cfg: OracleConfig = OracleConfig(), full_output: bool = False
):
    """Minimize quadrature length over piecewise-linear waypoint paths.

    Local search: seeded random coordinate perturbations with a decaying
    step, best of ``cfg.restarts`` runs alternating between the straight
    chord and a chord through a small-determinant midpoint.  Waypoints are
    clamped to eigenvalues >= 1e-14; the integrand's vanishing volume
    factor keeps near-degenerate paths finite, so the cone crossing is
    discoverable without special-casing.  The reported value is the best
    path re-measured at four times the search quadrature resolution; it
    can never undershoot the true distance by more than quadrature error.
    """
    p0 = p0 if isinstance(p0, FiberPoint) else FiberPoint.spd(p0)
    p1 = p1 if isinstance(p1, FiberPoint) else FiberPoint.spd(p1)
    if p0.dim != p1.dim:
        raise InvalidInput(f"dimension mismatch: {p0.dim} vs {p1.dim}")
    if p0.is_cone and p1.is_cone:
        raise InvalidInput("endpoints must not both be the cone point")
    a0 = _endpoint_matrix(p0)
    a1 = _endpoint_matrix(p1)
    m = cfg.waypoints
    best_len = np.inf
    best_way = None
    for restart in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, restart])
        if restart % 2 == 0:
            way = _chord_init(a0, a1, m)
        else:
            way = _cone_chord_init(a0, a1, m, delta=10.0 ** -(4 + 2 * (restart // 2)))
        kinds = (rng.uniform(size=cfg.iterations) < 0.35).astype(np.int64)
        idxs = rng.integers(1, m - 1, cfg.iterations)
        rows = rng.integers(0, p0.dim, cfg.iterations)
        cols = rng.integers(0, p0.dim, cfg.iterations)
        decay = np.exp(np.linspace(0.0, np.log(1e-3), cfg.iterations))
        deltas = rng.standard_normal(cfg.iterations) * cfg.step_scale * decay
        way, _ = local_search(
            way, kinds, idxs, rows, cols, deltas,
            cfg.quadrature_substeps, WAYPOINT_FLOOR,
        )
        length = pl_path_length(way, 2 * cfg.quadrature_substeps, 3e-5, 7)
        if length < best_len:
            best_len = length
            best_way = way
    if full_output:
        return float(best_len), best_way
    return float(best_len)


def min_det_quarter_root(way: np.ndarray) -> float:
    """Smallest det^(1/4) among the waypoints of a path."""
    dets = np.abs(np.linalg.det(way))
    return float(np.min(dets) ** 0.25)


# ---------------------------------------------------------------------------
# CAT(0) comparison triangles
# ---------------------------------------------------------------------------


def _comparison_corner(d_ab: float, d_ac: float, d_bc: float):
    """Plant the comparison triangle: a at origin, b on the +x axis.

    Returns (b_bar, c_bar) and the worst triangle-inequality violation of
    the side lengths (positive means the sides are not a triangle, which is
    itself a reportable failure).
    """
    violation = max(
        d_bc - (d_ab + d_ac),
        d_ab - (d_ac + d_bc),
        d_ac - (d_ab + d_bc),
    )
    b_bar = np.array([d_ab, 0.0])
    if d_ab == 0.0:
        c_bar = np.array([d_ac, 0.0])
    else:
        x = (d_ab * d_ab + d_ac * d_ac - d_bc * d_bc) / (2.0 * d_ab)
        y_sq = d_ac * d_ac - x * x
        c_bar = np.array([x, np.sqrt(max(y_sq, 0.0))])
    return b_bar, c_bar, violation


def cat0_check(a, b, c, s: float, t: float) -> float:
    """CAT(0) comparison slack for one triangle and one parameter pair.

    Measures d(w1, w2) - |w1_bar - w2_bar| with w1 on [a, b] at parameter
    ``s`` and w2 on [a, c] at parameter ``t``; geodesics run proportionally
    to arc length, so comparison points sit at the same parameters on the
    straight sides.  Nonpositive up to roundoff when the space is CAT(0).
    """
    a = a if isinstance(a, FiberPoint) else FiberPoint.spd(a)
    b = b if isinstance(b, FiberPoint) else FiberPoint.spd(b)
    c = c if isinstance(c, FiberPoint) else FiberPoint.spd(c)
    d_ab = fiber_distance(a, b)
    d_ac = fiber_distance(a, c)
    d_bc = fiber_distance(b, c)
    b_bar, c_bar, violation = _comparison_corner(d_ab, d_ac, d_bc)
    if violation > 1e-9:
        return violation
    w1 = fiber_geodesic(a, b, s)
    w2 = fiber_geodesic(a, c, t)
    w1_bar = s * b_bar
    w2_bar = t * c_bar
    return fiber_distance(w1, w2) - float(np.linalg.norm(w2_bar - w1_bar))


def field_cat0_slacks(
    g: MetricField, h: MetricField, k: MetricField, s: float, t: float
) -> tuple[float, float]:
    """Planar and per-sample comparison slacks for a field triangle.

    The planar slack compares against a single Euclidean triangle with the
    field side lengths.  The per-sample slack realizes the comparison in
    the weighted L2 space of planar sections: one comparison triangle per
    sample, with the displayed chain d(l1, l2) <= || l2_bar - l1_bar ||.
    """
    d_gh = field_distance(g, h)
    d_gk = field_distance(g, k)
    d_hk = field_distance(h, k)
    h_bar, k_bar, violation = _comparison_corner(d_gh, d_gk, d_hk)
    l1 = field_geodesic(g, h, s)
    l2 = field_geodesic(g, k, t)
    d_l = field_distance(l1, l2)
    if violation > 1e-9:
        planar = violation
    else:
        planar = d_l - float(np.linalg.norm(t * k_bar - s * h_bar))
    grid = g.grid
    acc = 0.0
    for w, pg, ph, pk in zip(grid.weights, g.values, h.values, k.values):
        d_gh_x = fiber_distance(pg, ph)
        d_gk_x = fiber_distance(pg, pk)
        d_hk_x = fiber_distance(ph, pk)
        hb, kb, v_x = _comparison_corner(d_gh_x, d_gk_x, d_hk_x)
        if v_x > 1e-9:
            return max(planar, v_x), v_x
        diff = t * kb - s * hb
        acc += w * float(diff @ diff)
    per_sample = d_l - float(np.sqrt(acc))
    return planar, per_sample


def field_cat0_check(
    g: MetricField, h: MetricField, k: MetricField, s: float, t: float
) -> float:
    """Worst CAT(0) comparison slack (planar vs per-sample) for fields."""
    planar, per_sample = field_cat0_slacks(g, h, k, s, t)
    return max(planar, per_sample)


# ---------------------------------------------------------------------------
# Random generators for sweeps
# ---------------------------------------------------------------------------


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def random_spd(rng: np.random.Generator, n: int, log_range: float = 1.0) -> np.ndarray:
    q = random_orthogonal(rng, n)
    w = np.exp(rng.uniform(-log_range, log_range, n))
    return (q * w) @ q.T


def _exp_at(a0: np.ndarray, k: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(a0)
    rt = (v * np.sqrt(w)) @ v.T
    irt = (v / np.sqrt(w)) @ v.T
    mid = irt @ k @ irt
    mid = 0.5 * (mid + mid.T)
    mw, mv = np.linalg.eigh(mid)
    out = rt @ ((mv * np.exp(mw)) @ mv.T) @ rt
    return 0.5 * (out + out.T)


def partner_with_rotation(
    rng: np.random.Generator, a0: np.ndarray, rotation_sq: float,
    trace_range: float = 1.0,
) -> np.ndarray:
    """Second endpoint with prescribed tr_{a0}(k_T^2) = rotation_sq."""
    n = a0.shape[0]
    k = rng.normal(size=(n, n))
    k = 0.5 * (k + k.T)
    tr = np.trace(np.linalg.solve(a0, k))
    k_t = k - (tr / n) * a0
    x = np.linalg.solve(a0, k_t)
    s = float(np.trace(x @ x))
    if s <= 0.0 or rotation_sq == 0.0:
        k_t = np.zeros_like(a0)
    else:
        k_t = k_t * np.sqrt(rotation_sq / s)
    k = k_t + rng.uniform(-trace_range, trace_range) * a0
    return _exp_at(a0, k)


def random_fiber_pair(
    rng: np.random.Generator, n: int, include_cone: bool = True
) -> tuple[FiberPoint, FiberPoint]:
    """Mixed draw over Riemannian, cone-case, and cone-point pairs."""
    thr = (4.0 * np.pi) ** 2 / n
    a0 = random_spd(rng, n)
    roll = rng.uniform()
    if include_cone and roll < 0.1:
        return FiberPoint.spd(a0), FiberPoint.cone(n)
    if include_cone and roll < 0.15:
        return FiberPoint.cone(n), FiberPoint.spd(a0)
    if roll < 0.45:
        # past the threshold, but moderate: a cone-case pair already needs
        # condition >= e^(2 sqrt(2 thr / n)), and determinant roundoff grows
        # with condition, so extreme rotations just add noise
        a1 = partner_with_rotation(rng, a0, thr * rng.uniform(1.02, 1.35))
    elif roll < 0.55:
        a1 = np.exp(rng.uniform(-1.0, 1.0)) * a0
    else:
        a1 = partner_with_rotation(rng, a0, thr * rng.uniform(0.0, 0.98))
    return FiberPoint.spd(a0), FiberPoint.spd(a1)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


def bounds_sweep(trials: int, seed: int = 0, dims=(2, 3)) -> BoundsReport:
    """Check the determinant bounds on random pairs, with equality cases.

    Lower bound (4/sqrt n)|det^(1/4) difference| and upper bound
    (4/sqrt n)(sum of det^(1/4)); conformal pairs must attain the lower
    bound, cone-case and cone-point pairs the upper one.
    """
    if trials < 1:
        raise InvalidInput("trials must be positive")

    def one(trial: int):
        rng = np.random.default_rng([seed, trial])
        n = dims[trial % len(dims)]
        p0, p1 = random_fiber_pair(rng, n)
        if rng.uniform() < 0.1 and not p1.is_cone:
            # near-degenerate second endpoint
            p1 = FiberPoint.spd(1e-8 * p1.mat)
        d = fiber_distance(p0, p1)
        d0 = p0.det_quarter_root()
        d1 = p1.det_quarter_root()
        lower = (4.0 / np.sqrt(n)) * abs(d1 - d0)
        upper = (4.0 / np.sqrt(n)) * (d0 + d1)
        case = classify(p0, p1)
        conformal_gap = np.inf
        cone_gap = np.inf
        if case.tag is CaseTag.RIEMANNIAN and case.traceless_norm_sq == 0.0:
            conformal_gap = abs(d - lower)
        if case.tag in (CaseTag.CONE, CaseTag.FROM_CONE, CaseTag.TO_CONE):
            cone_gap = abs(d - upper)
        return d - lower, upper - d, conformal_gap, cone_gap

    rows = _map(one, range(trials))
    lows = [r[0] for r in rows]
    ups = [r[1] for r in rows]
    conf = [r[2] for r in rows if np.isfinite(r[2])]
    cone = [r[3] for r in rows if np.isfinite(r[3])]
    # make sure the equality cases are represented
    rng = np.random.default_rng([seed, trials + 1])
    a0 = random_spd(rng, 2)
    conf.append(
        abs(
            fiber_distance(FiberPoint.spd(a0), FiberPoint.spd(2.0 * a0))
            - (4.0 / np.sqrt(2.0))
            * abs(
                FiberPoint.spd(2.0 * a0).det_quarter_root()
                - FiberPoint.spd(a0).det_quarter_root()
            )
        )
    )
    cone.append(
        abs(
            fiber_distance(FiberPoint.spd(a0), FiberPoint.cone(2))
            - (4.0 / np.sqrt(2.0)) * FiberPoint.spd(a0).det_quarter_root()
        )
    )
    return BoundsReport(
        trials=trials,
        min_lower_slack=float(min(lows)),
        min_upper_slack=float(min(ups)),
        max_conformal_gap=float(max(conf)),
        max_cone_gap=float(max(cone)),
        seed=seed,
    )


def _triangle_for_shape(rng: np.random.Generator, n: int, shape: int):
    """Construct a fiber triangle in one of the five apex case shapes.

    1: no cone vertex, all three legs past the threshold;
    2: no cone vertex, one Riemannian leg;
    3: no cone vertex, two Riemannian legs sharing a flat plane;
    4: one cone vertex, remaining leg past the threshold;
    5: one cone vertex, remaining leg Riemannian.
    """
    thr = (4.0 * np.pi) ** 2 / n
    a0 = random_spd(rng, n, log_range=0.5)
    if shape in (4, 5):
        rot = thr * (rng.uniform(1.05, 1.3) if shape == 4 else rng.uniform(0.1, 0.9))
        b = partner_with_rotation(rng, a0, rot, trace_range=0.5)
        return FiberPoint.spd(a0), FiberPoint.spd(b), FiberPoint.cone(n)
    if shape == 3:
        # two sub-threshold legs along one traceless direction; the outer
        # leg accumulates both rotations and crosses the threshold
        k = rng.normal(size=(n, n))
        k = 0.5 * (k + k.T)
        tr = np.trace(np.linalg.solve(a0, k))
        k_t = k - (tr / n) * a0
        x = np.linalg.solve(a0, k_t)
        s = float(np.trace(x @ x))
        u = k_t / np.sqrt(s)
        y1 = np.sqrt(thr) * rng.uniform(0.6, 0.95)
        y2 = np.sqrt(thr) * rng.uniform(0.6, 0.95)
        b = _exp_at(a0, y1 * u + rng.uniform(-0.3, 0.3) * a0)
        c = _exp_at(a0, (y1 + y2) * u + rng.uniform(-0.3, 0.3) * a0)
        return FiberPoint.spd(a0), FiberPoint.spd(b), FiberPoint.spd(c)
    if shape == 2:
        b = partner_with_rotation(rng, a0, thr * rng.uniform(0.1, 0.9), 0.3)
        c = partner_with_rotation(rng, a0, thr * rng.uniform(1.1, 1.35), 0.3)
        return FiberPoint.spd(a0), FiberPoint.spd(b), FiberPoint.spd(c)
    b = partner_with_rotation(rng, a0, thr * rng.uniform(1.1, 1.35), 0.3)
    c = partner_with_rotation(rng, a0, thr * rng.uniform(1.1, 1.35), 0.3)
    return FiberPoint.spd(a0), FiberPoint.spd(b), FiberPoint.spd(c)


def _triangle_shape(a: FiberPoint, b: FiberPoint, c: FiberPoint) -> int:
    """Bucket an actual triangle into the five-case taxonomy (0 = other)."""
    cones = sum(p.is_cone for p in (a, b, c))
    if cones >= 2:
        return 0
    if cones == 1:
        spd = [p for p in (a, b, c) if not p.is_cone]
        leg = classify(spd[0], spd[1])
        return 5 if leg.tag is CaseTag.RIEMANNIAN else 4
    riem = sum(
        classify(p, q).tag is CaseTag.RIEMANNIAN
        for p, q in ((a, b), (b, c), (c, a))
    )
    if riem == 0:
        return 1
    if riem == 1:
        return 2
    if riem == 2:
        return 3
    return 0


def cat0_sweep(
    trials: int, seed: int = 0, include_cone: bool = True, dims=(2, 3)
) -> Cat0Report:
    """Sweep CAT(0) comparison slacks over fiber triangles.

    Cycles through targeted constructions of the five apex case shapes
    (plus fully random triples) and records the worst slack.
    """
    if trials < 1:
        raise InvalidInput("trials must be positive")
    shapes = (1, 2, 3, 4, 5) if include_cone else (1, 2, 3)

    def one(trial: int):
        rng = np.random.default_rng([seed, trial])
        n = dims[trial % len(dims)]
        if trial % 4 == 3:
            a, b, c = (
                FiberPoint.spd(random_spd(rng, n)),
                FiberPoint.spd(random_spd(rng, n)),
                FiberPoint.spd(random_spd(rng, n)),
            )
        else:
            shape = shapes[trial % len(shapes)]
            a, b, c = _triangle_for_shape(rng, n, shape)
        s = rng.uniform()
        t = rng.uniform()
        slack = cat0_check(a, b, c, s, t)
        return slack, _triangle_shape(a, b, c), (n, s, t, trial)

    rows = _map(one, range(trials))
    worst = max(rows, key=lambda r: r[0])
    counts: dict[int, int] = {}
    for _, shape, _ in rows:
        counts[shape] = counts.get(shape, 0) + 1
    return Cat0Report(
        trials=trials,
        max_violation=float(worst[0]),
        worst_case={
            "dim": worst[2][0],
            "s": worst[2][1],
            "t": worst[2][2],
            "trial": worst[2][3],
        },
        shape_counts={str(k): v for k, v in sorted(counts.items())},
        seed=seed,
    )


def random_metric_field(
    rng: np.random.Generator,
    grid,
    cone_fraction: float = 0.1,
    log_range: float = 0.8,
) -> MetricField:
    """Random field on a grid, with an optional share of cone-point samples."""
    values = []
    for _ in grid.ids:
        if rng.uniform() < cone_fraction:
            values.append(FiberPoint.cone(grid.dim))
        else:
            values.append(FiberPoint.spd(random_spd(rng, grid.dim, log_range)))
    return MetricField(grid, values)


def _default_grid(rng: np.random.Generator, samples: int, dim: int):
    from .field import SampleGrid

    raw = rng.uniform(0.5, 1.5, samples)
    raw = raw / raw.sum()
    return SampleGrid(
        [(f"x{i}", float(w)) for i, w in enumerate(raw)], dim=dim, normalize=True
    )


def field_cat0_sweep(
    trials: int, seed: int = 0, samples: int = 16, dim: int = 2
) -> Cat0Report:
    """Sweep CAT(0) comparison slacks over random field triangles.

    Every few trials one vertex is the everywhere-cone field, exercising
    the comparison through the fully singular point.  Both the planar and
    the per-sample comparison slacks count toward the reported maximum.
    """
    if trials < 1:
        raise InvalidInput("trials must be positive")

    def one(trial: int):
        rng = np.random.default_rng([seed, 31337 + trial])
        grid = _default_grid(rng, samples, dim)
        g = random_metric_field(rng, grid)
        h = random_metric_field(rng, grid)
        if trial % 5 == 4:
            k = MetricField(grid, [FiberPoint.cone(dim)] * samples)
        else:
            k = random_metric_field(rng, grid)
        s = rng.uniform()
        t = rng.uniform()
        planar, per_sample = field_cat0_slacks(g, h, k, s, t)
        return max(planar, per_sample), (s, t, trial)

    rows = _map(one, range(trials))
    worst = max(rows, key=lambda r: r[0])
    return Cat0Report(
        trials=trials,
        max_violation=float(worst[0]),
        worst_case={"s": worst[1][0], "t": worst[1][1], "trial": worst[1][2]},
        shape_counts={"field": trials},
        seed=seed,
    )


def speed_sweep(trials: int, seed: int = 0, dims=(2, 3), samples: int = 65) -> SpeedReport:
    """Check geodesic endpoints, constant speed, and sampled path lengths."""
    if trials < 1:
        raise InvalidInput("trials must be positive")
    times = np.linspace(0.0, 1.0, samples)

    def one(trial: int):
        rng = np.random.default_rng([seed, trial])
        n = dims[trial % len(dims)]
        p0, p1 = random_fiber_pair(rng, n)
        d = fiber_distance(p0, p1)
        path = sample_geodesic(p0, p1, times)
        end_err = 0.0
        for got, want in ((path.points[0], p0), (path.points[-1], p1)):
            if want.is_cone:
                end_err = max(end_err, 0.0 if got.is_cone else np.inf)
            else:
                scale = np.abs(want.mat).max()
                end_err = max(
                    end_err, np.abs(got.mat - want.mat).max() / scale
                )
        speeds = finite_difference_speeds(path)
        mean = speeds.mean()
        dev = np.abs(speeds - mean).max() / mean if mean > 0 else 0.0
        from .fiber import path_length

        length_err = abs(path_length(path) - d) / d if d > 0 else 0.0
        case = classify(p0, p1)
        riem = case.tag is CaseTag.RIEMANNIAN
        return end_err, dev, length_err if riem else 0.0, 0.0 if riem else length_err

    rows = _map(one, range(trials))
    return SpeedReport(
        trials=trials,
        max_speed_deviation=float(max(r[1] for r in rows)),
        max_endpoint_error=float(max(r[0] for r in rows)),
        max_length_error_riemannian=float(max(r[2] for r in rows)),
        max_length_error_cone=float(max(r[3] for r in rows)),
        seed=seed,
    )


def oracle_corpus(seed: int = 0, pairs: int = 50, dims=(2, 3)) -> list:
    """Fixed seeded corpus of fiber pairs spanning both geodesic cases."""
    out = []
    for i in range(pairs):
        rng = np.random.default_rng([seed, 7000 + i])
        n = dims[i % len(dims)]
        thr = (4.0 * np.pi) ** 2 / n
        a0 = random_spd(rng, n, log_range=0.6)
        if i % 3 == 2:
            a1 = partner_with_rotation(rng, a0, thr * rng.uniform(1.2, 2.5), 0.5)
        elif i % 3 == 1:
            a1 = partner_with_rotation(rng, a0, thr * rng.uniform(0.1, 0.8), 0.5)
        else:
            a1 = np.exp(rng.uniform(-0.8, 0.8)) * a0
        out.append((FiberPoint.spd(a0), FiberPoint.spd(a1)))
    return out


def oracle_sweep(
    pairs=None, cfg: OracleConfig = OracleConfig(), seed: int = 0
) -> OracleReport:
    """Compare the brute-force oracle against the closed form on a corpus."""
    if pairs is None:
        pairs = oracle_corpus(seed=seed)
    started = time.perf_counter()

    def one(item):
        index, (p0, p1) = item
        pair_cfg = OracleConfig(
            waypoints=cfg.waypoints,
            quadrature_substeps=cfg.quadrature_substeps,
            iterations=cfg.iterations,
            restarts=cfg.restarts,
            step_scale=cfg.step_scale,
            seed=cfg.seed + 1000 * index,
        )
        d = fiber_distance(p0, p1)
        length, way = brute_force_distance(p0, p1, pair_cfg, full_output=True)
        rel = abs(length - d) / d if d > 0 else abs(length)
        undercut = max(0.0, (d - length) / d) if d > 0 else 0.0
        crossing = min_det_quarter_root(way)
        is_cone_case = classify(p0, p1).tag is CaseTag.CONE
        return rel, undercut, crossing if is_cone_case else np.inf

    rows = _map(one, list(enumerate(pairs)))
    crossings = [r[2] for r in rows if np.isfinite(r[2])]
    return OracleReport(
        pairs=len(rows),
        max_rel_diff=float(max(r[0] for r in rows)),
        max_undercut=float(max(r[1] for r in rows)),
        min_crossing_det_root=float(min(crossings)) if crossings else np.inf,
        elapsed_seconds=time.perf_counter() - started,
        seed=seed,
        numba=using_numba(),
    )
