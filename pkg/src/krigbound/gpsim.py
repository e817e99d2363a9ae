"""Exact joint draws of a mean-zero stationary Gaussian process at finite point sets."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ConditioningError, InvalidInputError, SingularMatrixError
from .kernels import Kernel


def normal_stream(seed, *keys):
    """Counter-based generator for the stream named by ``(seed, *keys)``.

    Streams with distinct keys are independent; a stream's contents never
    depend on which other streams were drawn, or in what order.
    """
    words = [int(k) & 0xFFFFFFFFFFFFFFFF for k in (seed, *keys)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


@dataclass(frozen=True, eq=False)
class GpSample:
    points: np.ndarray
    values: np.ndarray
    kernel: Kernel
    sigma2: float
    seed: int


def covariance_factor(points, kernel: Kernel, sigma2=1.0, jitter_ladder=linalg.DEFAULT_LADDER,
                      gram=None):
    """Cholesky factor of ``sigma2 * Psi(x_i - x_j)``.

    ``gram`` may supply a precomputed correlation matrix for ``points``.
    """
    k = kernel.matrix(points) if gram is None else gram
    try:
        return linalg.factor_spd(sigma2 * k, jitter_ladder)
    except SingularMatrixError as exc:
        raise ConditioningError(
            f"{exc}; use a larger jitter or fewer / coarser points", exc.pivot) from None


def draw(factor: linalg.SpdFactor, seed, *keys):
    """One realization ``L xi`` with ``xi`` from ``normal_stream(seed, *keys)``."""
    xi = normal_stream(seed, *keys).standard_normal(factor.n)
    return factor.factor @ xi


def draw_many(factor: linalg.SpdFactor, seed, keys):
    """Stack of realizations, one column per key tuple in ``keys``."""
    xi = np.empty((factor.n, len(keys)))
    for col, key in enumerate(keys):
        xi[:, col] = normal_stream(seed, *key).standard_normal(factor.n)
    return factor.factor @ xi


def sample_gp(points, kernel: Kernel, sigma2=1.0, seed=0, jitter_ladder=linalg.DEFAULT_LADDER):
    """Draw Z at ``points`` jointly, with covariance ``sigma2 * Psi``.

    Raises
    ------
    InvalidInputError
        Points not finite, of the wrong dimension, or not pairwise distinct.
    ConditioningError
        The covariance could not be factored with the given jitter ladder.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, kernel.dim)
    if pts.ndim != 2 or pts.shape[1] != kernel.dim or not np.all(np.isfinite(pts)):
        raise InvalidInputError(f"points must be a finite (m, {kernel.dim}) array")
    sigma2 = float(sigma2)
    if not (sigma2 > 0 and math.isfinite(sigma2)):
        raise InvalidInputError("sigma2 must be > 0")
    if len(np.unique(pts, axis=0)) != len(pts):
        raise InvalidInputError("sample points must be pairwise distinct")
    factor = covariance_factor(pts, kernel, sigma2, jitter_ladder)
    return GpSample(pts, draw(factor, seed), kernel, sigma2, int(seed))


def dump_csv(sample: GpSample, path):
    """Write points and values as CSV for debugging."""
    from .design import format_float

    d = sample.points.shape[1]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join([f"x{k + 1}" for k in range(d)] + ["z"]) + "\n")
        for p, v in zip(sample.points, sample.values):
            fh.write(",".join(format_float(c) for c in (*p, v)) + "\n")
