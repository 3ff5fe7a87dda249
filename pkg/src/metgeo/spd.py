"""Small-dimension symmetric-matrix algebra.

Everything downstream consumes tensors expressed in a frame where the
reference metric at the sample point is the identity, so raising an index
is a no-op and determinants / matrix roots act on the stored entries
directly.  Inputs carrying an explicit reference metric are whitened on
ingestion (see :func:`whiten`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InvalidInput(ValueError):
    """Malformed or inconsistent numerical input."""


class NotPositiveDefinite(ValueError):
    """An operation required a positive-definite tensor and did not get one."""


#: Relative eigenvalue floor below which a symmetric tensor no longer counts
#: as positive definite.  Deliberately loose: the completion contains
#: degenerate tensors and classification must be explicit, not accidental.
SPD_TOLERANCE = 1e-12


def _as_matrix(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(getattr(m, "mat", m), dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInput(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput(f"{name} has non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class SymTensor:
    """A symmetric bilinear form at a point, stored in the reference frame.

    Storage enforces exact symmetry: the constructor averages ``m`` with its
    transpose, so ``mat[i, j] == mat[j, i]`` holds bitwise.
    """

    mat: np.ndarray

    def __init__(self, m):
        a = _as_matrix(m, "SymTensor")
        a = 0.5 * (a + a.T)
        a.flags.writeable = False
        object.__setattr__(self, "mat", a)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, SymTensor) and np.array_equal(self.mat, other.mat)


class SpdTensor(SymTensor):
    """A symmetric tensor whose eigenvalues are all strictly positive."""

    def __init__(self, m, tol: float = SPD_TOLERANCE):
        super().__init__(m)
        w = np.linalg.eigvalsh(self.mat)
        if w[0] <= tol * max(w[-1], 0.0):
            raise NotPositiveDefinite(
                f"smallest eigenvalue {w[0]:.3e} under tolerance "
                f"{tol:.1e} * {w[-1]:.3e}"
            )


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigendecomposition ``frame @ diag(eigenvalues) @ frame.T``.

    Eigenvalues are sorted in descending order; the frame is orthogonal.
    """

    eigenvalues: np.ndarray
    frame: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.frame * self.eigenvalues) @ self.frame.T


def sym_eigen(s) -> EigenSystem:
    """Eigendecomposition of a symmetric tensor, eigenvalues descending."""
    a = SymTensor(s).mat if not isinstance(s, SymTensor) else s.mat
    w, v = np.linalg.eigh(a)
    return EigenSystem(eigenvalues=w[::-1].copy(), frame=v[:, ::-1].copy())


def _sym_apply(a: np.ndarray, fn) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    return (v * fn(w)) @ v.T


def sym_exp(s) -> SpdTensor:
    """Matrix exponential of a symmetric tensor (always SPD)."""
    a = _as_matrix(s, "SymTensor")
    return SpdTensor(_sym_apply(0.5 * (a + a.T), np.exp))


def spd_log(p, tol: float = SPD_TOLERANCE) -> SymTensor:
    """Matrix logarithm of an SPD tensor.

    Near-singular input is refused rather than regularized: callers must
    route degenerate points through the cone-point code path.
    """
    a = _spd_matrix(p, tol)
    return SymTensor(_sym_apply(a, np.log))


def spd_sqrt(p, tol: float = SPD_TOLERANCE) -> SpdTensor:
    """Principal square root of an SPD tensor."""
    a = _spd_matrix(p, tol)
    return SpdTensor(_sym_apply(a, np.sqrt))


def _spd_matrix(p, tol: float = SPD_TOLERANCE) -> np.ndarray:
    if isinstance(p, SpdTensor):
        return p.mat
    a = _as_matrix(p, "SpdTensor")
    a = 0.5 * (a + a.T)
    w = np.linalg.eigvalsh(a)
    if w[0] <= tol * max(w[-1], 0.0):
        raise NotPositiveDefinite(
            f"smallest eigenvalue {w[0]:.3e} under tolerance {tol:.1e} * {w[-1]:.3e}"
        )
    return a


def _pair(a, b, c):
    am = _spd_matrix(a)
    bm = _as_matrix(b, "b")
    cm = _as_matrix(c, "c")
    if not (am.shape == bm.shape == cm.shape):
        raise InvalidInput(
            f"dimension mismatch: {am.shape}, {bm.shape}, {cm.shape}"
        )
    return am, bm, cm


def trace_pair(a, b, c) -> float:
    """tr(a^-1 b a^-1 c), the scalar product an SPD tensor induces on forms."""
    am, bm, cm = _pair(a, b, c)
    x = np.linalg.solve(am, bm)
    y = np.linalg.solve(am, cm)
    return float(np.trace(x @ y))


def fiber_inner(a, b, c) -> float:
    """The fiber metric <b, c>_a = tr(a^-1 b a^-1 c) * sqrt(det a)."""
    am, bm, cm = _pair(a, b, c)
    x = np.linalg.solve(am, bm)
    y = np.linalg.solve(am, cm)
    return float(np.trace(x @ y) * np.sqrt(np.linalg.det(am)))


def fiber_norm(a, b) -> float:
    """Norm of ``b`` in the fiber metric based at ``a``."""
    return float(np.sqrt(max(fiber_inner(a, b, b), 0.0)))


def traceless_split(a0, b) -> tuple[float, SymTensor]:
    """Split ``b`` into its trace against ``a0`` and its traceless remainder.

    Returns ``(tr_{a0} b, b - (tr_{a0} b / n) a0)``.
    """
    am = _spd_matrix(a0)
    bm = _as_matrix(b, "b")
    if am.shape != bm.shape:
        raise InvalidInput(f"dimension mismatch: {am.shape} vs {bm.shape}")
    n = am.shape[0]
    tr = float(np.trace(np.linalg.solve(am, bm)))
    return tr, SymTensor(bm - (tr / n) * am)


def whiten(mat, reference) -> np.ndarray:
    """Express ``mat`` in a frame where ``reference`` is the identity.

    Computes ``g^{-1/2} a g^{-1/2}``, after which ``g^{-1} a`` coincides with
    the stored matrix and determinants/roots act entrywise.
    """
    g = _spd_matrix(reference)
    a = _as_matrix(mat, "matrix")
    if g.shape != a.shape:
        raise InvalidInput(f"dimension mismatch: {a.shape} vs {g.shape}")
    w, v = np.linalg.eigh(g)
    ginv_sqrt = (v / np.sqrt(w)) @ v.T
    return ginv_sqrt @ a @ ginv_sqrt
