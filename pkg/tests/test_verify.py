"""Oracle, CAT(0) comparison checks, and sweep machinery."""

import numpy as np
import pytest

from metgeo.fiber import FiberPoint, fiber_distance
from metgeo.field import MetricField, SampleGrid
from metgeo.spd import InvalidInput, sym_exp
from metgeo.verify import (
    OracleConfig,
    bounds_sweep,
    brute_force_distance,
    cat0_check,
    cat0_sweep,
    field_cat0_check,
    field_cat0_slacks,
    field_cat0_sweep,
    min_det_quarter_root,
    oracle_corpus,
    oracle_sweep,
    speed_sweep,
)

EYE = np.eye(2)
SQ2 = np.sqrt(2.0)
FAR = sym_exp(np.diag([10.0, -10.0])).mat

FAST_CFG = OracleConfig(iterations=6000, restarts=2, seed=5)


def test_oracle_config_validation():
    with pytest.raises(InvalidInput):
        OracleConfig(waypoints=2)
    with pytest.raises(InvalidInput):
        OracleConfig(quadrature_substeps=4)
    with pytest.raises(InvalidInput):
        OracleConfig(step_scale=0.0)


def test_oracle_trivial_pair():
    assert brute_force_distance(
        FiberPoint.spd(EYE), FiberPoint.spd(EYE), FAST_CFG
    ) == pytest.approx(0.0, abs=1e-12)


def test_oracle_conformal_within_two_percent():
    L = brute_force_distance(FiberPoint.spd(EYE), FiberPoint.spd(4 * EYE), FAST_CFG)
    assert abs(L - 2 * SQ2) / (2 * SQ2) < 0.02


def test_oracle_discovers_cone_crossing():
    cfg = OracleConfig(seed=5)
    L, way = brute_force_distance(
        FiberPoint.spd(EYE), FiberPoint.spd(FAR), cfg, full_output=True
    )
    assert abs(L - 4 * SQ2) / (4 * SQ2) < 0.03
    assert min_det_quarter_root(way) < 0.05


def test_oracle_cone_endpoint():
    L = brute_force_distance(FiberPoint.spd(EYE), FiberPoint.cone(2), FAST_CFG)
    assert L == pytest.approx(2 * SQ2, rel=1e-3)


def test_oracle_rejects_two_cones():
    with pytest.raises(InvalidInput):
        brute_force_distance(FiberPoint.cone(2), FiberPoint.cone(2), FAST_CFG)


def test_oracle_never_undercuts():
    rng = np.random.default_rng(81)
    for p0, p1 in oracle_corpus(seed=81, pairs=6):
        d = fiber_distance(p0, p1)
        L = brute_force_distance(p0, p1, FAST_CFG)
        assert L >= d * (1 - 1e-3)


def test_cat0_degenerate_side():
    v = cat0_check(FiberPoint.spd(EYE), FiberPoint.spd(EYE), FiberPoint.spd(4 * EYE),
                   0.3, 0.6)
    assert abs(v) <= 1e-10


def test_cat0_cone_vertex_triangle():
    v = cat0_check(
        FiberPoint.spd(EYE), FiberPoint.spd(4 * EYE), FiberPoint.cone(2), 0.5, 0.5
    )
    assert v <= 1e-9


def test_cat0_random_riemannian():
    rng = np.random.default_rng(83)
    from metgeo.verify import random_spd

    for _ in range(50):
        a = FiberPoint.spd(random_spd(rng, 2))
        b = FiberPoint.spd(random_spd(rng, 2))
        c = FiberPoint.spd(random_spd(rng, 2))
        v = cat0_check(a, b, c, rng.uniform(), rng.uniform())
        assert v <= 1e-9


def test_cat0_sweep_covers_shapes():
    report = cat0_sweep(200, seed=11)
    assert report.passed
    # all five apex shapes exercised
    for shape in "12345":
        assert report.shape_counts.get(shape, 0) > 0


def test_field_cat0_constant_fields_reduce_to_fiber():
    g = SampleGrid([("a", 0.5), ("b", 0.5)], dim=2)
    fa = MetricField(g, [EYE, EYE])
    fb = MetricField(g, [4 * EYE, 4 * EYE])
    fc = MetricField(g, [FAR, FAR])
    v_field = field_cat0_check(fa, fb, fc, 0.4, 0.7)
    v_fiber = cat0_check(
        FiberPoint.spd(EYE), FiberPoint.spd(4 * EYE), FiberPoint.spd(FAR), 0.4, 0.7
    )
    assert v_field == pytest.approx(v_fiber, abs=1e-12)


def test_field_cat0_cone_vertex():
    g = SampleGrid([("a", 0.5), ("b", 0.5)], dim=2)
    fa = MetricField(g, [EYE, 2 * EYE])
    fb = MetricField(g, [4 * EYE, FAR])
    fc = MetricField(g, [FiberPoint.cone(2), FiberPoint.cone(2)])
    planar, per_sample = field_cat0_slacks(fa, fb, fc, 0.3, 0.8)
    assert planar <= 1e-9
    assert per_sample <= 1e-9


def test_field_cat0_sweep():
    report = field_cat0_sweep(20, seed=13)
    assert report.passed


def test_bounds_sweep():
    report = bounds_sweep(500, seed=17)
    assert report.passed
    assert report.min_lower_slack >= -1e-10
    assert report.min_upper_slack >= -1e-10
    assert report.max_conformal_gap <= 1e-12
    assert report.max_cone_gap <= 1e-12


def test_speed_sweep():
    report = speed_sweep(50, seed=19)
    assert report.passed


def test_oracle_sweep_report():
    pairs = oracle_corpus(seed=23, pairs=4)
    report = oracle_sweep(pairs, cfg=FAST_CFG, seed=23)
    assert report.pairs == 4
    assert report.passed
    d = report.to_dict()
    assert d["passed"] and "max_rel_diff" in d
