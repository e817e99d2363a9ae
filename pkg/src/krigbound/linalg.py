"""Cholesky factorization with a diagonal-jitter ladder, and triangular solves."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular

from .errors import InvalidInputError, SingularMatrixError

DEFAULT_LADDER = (0.0, 1e-12, 1e-10, 1e-8, 1e-6)


@dataclass(frozen=True, eq=False)
class SpdFactor:
    """Lower Cholesky factor of ``matrix + jitter_used * I``."""

    factor: np.ndarray
    jitter_used: float

    @property
    def n(self):
        return self.factor.shape[0]

    def reconstruct(self):
        return self.factor @ self.factor.T


def factor_spd(matrix, jitter_ladder=DEFAULT_LADDER, sym_tol=1e-12):
    """Factor a symmetric positive definite matrix.

    Tries each rung of ``jitter_ladder`` in order, adding ``rung * max(diag)``
    to the diagonal, and returns the first success.

    Raises
    ------
    InvalidInputError
        Matrix not square, not finite, or asymmetric beyond ``sym_tol``.
    SingularMatrixError
        Every rung failed. ``.pivot`` holds the smallest diagonal entry of an
        LDL^T decomposition of the jittered matrix at the last rung.
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise InvalidInputError("matrix has non-finite entries")
    if a.size and _asymmetry(a) > sym_tol * max(float(np.max(np.abs(a))), 1.0):
        raise InvalidInputError("matrix is not symmetric")
    ladder = sorted(float(j) for j in jitter_ladder)
    if not ladder or ladder[0] < 0:
        raise InvalidInputError("jitter ladder must be nonempty and nonnegative")
    diag_scale = float(np.max(np.diag(a))) if a.size else 1.0
    jitter = 0.0
    for rung in ladder:
        jitter = rung * diag_scale
        work = np.array(a, order="F")
        if jitter:
            work.flat[::work.shape[0] + 1] += jitter
        try:
            low = cholesky(work, lower=True, overwrite_a=True, check_finite=False)
        except LinAlgError:
            continue
        if np.all(np.diag(low) > 0):
            return SpdFactor(low, jitter)
    del work
    jittered = a + jitter * np.eye(a.shape[0]) if jitter else a
    raise SingularMatrixError(
        f"matrix not positive definite after jitter {ladder[-1]:g} x max diag",
        pivot=_min_pivot(jittered),
    )


def _asymmetry(a, block=512):
    worst = 0.0
    for s in range(0, a.shape[0], block):
        worst = max(worst, float(np.max(np.abs(a[s:s + block] - a[:, s:s + block].T))))
    return worst


def _min_pivot(a):
    from scipy.linalg import ldl

    try:
        _, d, _ = ldl(a, lower=True)
    except (LinAlgError, ValueError):
        return float("nan")
    return float(np.min(np.diag(d)))


def solve(factor: SpdFactor, rhs):
    """Solve ``K x = rhs`` for vector or matrix right-hand sides."""
    b = np.asarray(rhs, dtype=np.float64)
    if b.shape[:1] != (factor.n,):
        raise InvalidInputError(f"rhs has leading dimension {b.shape[:1]}, expected {factor.n}")
    return cho_solve((factor.factor, True), b, check_finite=False)


def half_solve(factor: SpdFactor, rhs):
    """Return ``L^{-1} rhs``, so that ``|L^{-1} r|^2 = r^T K^{-1} r``."""
    b = np.asarray(rhs, dtype=np.float64)
    if b.shape[:1] != (factor.n,):
        raise InvalidInputError(f"rhs has leading dimension {b.shape[:1]}, expected {factor.n}")
    return solve_triangular(factor.factor, b, lower=True, check_finite=False)


def quad_form(factor: SpdFactor, r):
    """``r^T K^{-1} r`` column-wise; always >= 0."""
    v = half_solve(factor, r)
    return np.sum(v * v, axis=0)
