"""Symmetric-matrix algebra: hand-derived values and algebraic invariants."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metgeo.spd import (
    InvalidInput,
    NotPositiveDefinite,
    SpdTensor,
    SymTensor,
    fiber_inner,
    spd_log,
    spd_sqrt,
    sym_eigen,
    sym_exp,
    trace_pair,
    traceless_split,
    whiten,
)

SQ3 = np.sqrt(3.0)


@st.composite
def sym_matrix(draw, n=None, scale=1.0):
    if n is None:
        n = draw(st.integers(min_value=2, max_value=4))
    seed = draw(st.integers(min_value=0, max_value=2**31 - 1))
    rng = np.random.default_rng(seed)
    m = rng.uniform(-scale, scale, (n, n))
    return 0.5 * (m + m.T)


@st.composite
def spd_matrix(draw, n=None, log_range=1.0):
    if n is None:
        n = draw(st.integers(min_value=2, max_value=4))
    seed = draw(st.integers(min_value=0, max_value=2**31 - 1))
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    q = q * np.sign(np.diag(r))
    w = np.exp(rng.uniform(-log_range, log_range, n))
    return (q * w) @ q.T


def test_sym_eigen_identity():
    es = sym_eigen(np.eye(2))
    assert np.allclose(es.eigenvalues, [1.0, 1.0])
    assert np.allclose(es.frame @ es.frame.T, np.eye(2), atol=1e-12)


def test_sym_eigen_diagonal():
    es = sym_eigen(np.diag([4.0, 1.0]))
    assert np.allclose(es.eigenvalues, [4.0, 1.0])
    assert np.allclose(np.abs(es.frame), np.eye(2), atol=1e-12)


def test_sym_eigen_hand_case():
    # characteristic polynomial of [[2,1],[1,2]]: (2-l)^2 - 1 -> l = 3, 1
    es = sym_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(es.eigenvalues, [3.0, 1.0])
    v = es.frame[:, 0]
    assert np.allclose(np.abs(v), [1 / np.sqrt(2)] * 2)


def test_sym_eigen_rejects_nonfinite():
    with pytest.raises(InvalidInput):
        sym_eigen(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_exp_of_zero():
    assert np.allclose(sym_exp(np.zeros((3, 3))).mat, np.eye(3))


def test_log_of_scaled_identity():
    assert np.allclose(spd_log(np.e * np.eye(2)).mat, np.eye(2))


def test_sqrt_hand_case():
    # eigenvalues 3 and 1 in the (1,1)/(1,-1) frame
    root = spd_sqrt(np.array([[2.0, 1.0], [1.0, 2.0]])).mat
    want = np.array([[(SQ3 + 1) / 2, (SQ3 - 1) / 2], [(SQ3 - 1) / 2, (SQ3 + 1) / 2]])
    assert np.allclose(root, want, atol=1e-12)
    assert np.allclose(root @ root, [[2, 1], [1, 2]], atol=1e-12)


def test_log_refuses_near_singular():
    with pytest.raises(NotPositiveDefinite):
        spd_log(np.diag([1.0, 1e-15]))
    with pytest.raises(NotPositiveDefinite):
        spd_log(np.diag([1.0, -0.5]))


def test_trace_pair_values():
    eye = np.eye(2)
    assert trace_pair(eye, eye, eye) == pytest.approx(2.0)
    assert trace_pair(2 * eye, eye, eye) == pytest.approx(0.5)
    assert trace_pair(eye, np.diag([1.0, -1.0]), eye) == pytest.approx(0.0, abs=1e-15)


def test_trace_pair_dim_mismatch():
    with pytest.raises(InvalidInput):
        trace_pair(np.eye(2), np.eye(3), np.eye(3))


def test_fiber_inner_values():
    eye = np.eye(2)
    assert fiber_inner(eye, eye, eye) == pytest.approx(2.0)
    # tr_a(b^2) = 2/16, sqrt(det 4I) = 4
    assert fiber_inner(4 * eye, eye, eye) == pytest.approx(0.5)


def test_traceless_split_values():
    eye = np.eye(2)
    tr, b_t = traceless_split(eye, eye)
    assert tr == pytest.approx(2.0)
    assert np.allclose(b_t.mat, 0.0, atol=1e-15)

    tr, b_t = traceless_split(eye, np.diag([1.0, -1.0]))
    assert tr == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(b_t.mat, np.diag([1.0, -1.0]))

    tr, b_t = traceless_split(eye, np.diag([3.0, 1.0]))
    assert tr == pytest.approx(4.0)
    assert np.allclose(b_t.mat, np.diag([1.0, -1.0]), atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(spd_matrix(n=3), sym_matrix(n=3), sym_matrix(n=3), st.integers(0, 2**31 - 1))
def test_conjugation_invariance(a, b, c, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    before = trace_pair(a, b, c)
    after = trace_pair(q.T @ a @ q, q.T @ b @ q, q.T @ c @ q)
    assert after == pytest.approx(before, rel=1e-10, abs=1e-12)
    before = fiber_inner(a, b, c)
    after = fiber_inner(q.T @ a @ q, q.T @ b @ q, q.T @ c @ q)
    assert after == pytest.approx(before, rel=1e-10, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(spd_matrix(), st.data())
def test_cauchy_schwarz(a, data):
    n = a.shape[0]
    b = data.draw(sym_matrix(n=n))
    c = data.draw(sym_matrix(n=n))
    lhs = fiber_inner(a, b, c) ** 2
    rhs = fiber_inner(a, b, b) * fiber_inner(a, c, c)
    assert lhs <= rhs * (1 + 1e-10) + 1e-12


@settings(max_examples=60, deadline=None)
@given(spd_matrix(), st.data())
def test_trace_traceless_orthogonality(a0, data):
    n = a0.shape[0]
    b = data.draw(sym_matrix(n=n))
    lam = data.draw(st.floats(-3.0, 3.0))
    tr, b_t = traceless_split(a0, b)
    assert trace_pair(a0, b_t.mat, a0) == pytest.approx(0.0, abs=1e-12)
    assert fiber_inner(a0, b_t.mat, lam * a0) == pytest.approx(0.0, abs=1e-12)
    # reassembly: b = b_T + (tr/n) a0
    assert np.allclose(b_t.mat + (tr / n) * a0, b, atol=1e-12)


@settings(max_examples=80, deadline=None)
@given(spd_matrix(log_range=3.0))
def test_exp_log_round_trip(p):
    # log_range 3 per eigenvalue keeps condition under ~1e6
    k = spd_log(p)
    back = sym_exp(k)
    assert np.allclose(back.mat, p, rtol=1e-10, atol=1e-12)
    root = spd_sqrt(p)
    assert np.allclose(root.mat @ root.mat, p, rtol=1e-10, atol=1e-12)


def test_spd_validation():
    with pytest.raises(NotPositiveDefinite):
        SpdTensor(np.diag([1.0, 0.0]))
    SpdTensor(np.diag([1.0, 1e-6]))  # fine


def test_sym_tensor_enforces_symmetry():
    s = SymTensor(np.array([[1.0, 2.0], [0.0, 1.0]]))
    assert np.array_equal(s.mat, s.mat.T)
    assert s.dim == 2


def test_whiten_reduces_reference_to_identity():
    rng = np.random.default_rng(5)
    g = np.array([[2.0, 0.3], [0.3, 1.0]])
    a = np.array([[1.5, 0.1], [0.1, 0.7]])
    w = whiten(a, g)
    assert np.allclose(whiten(g, g), np.eye(2), atol=1e-12)
    # whitening preserves det(g^-1 a)
    assert np.linalg.det(w) == pytest.approx(
        np.linalg.det(np.linalg.solve(g, a)), rel=1e-12
    )
