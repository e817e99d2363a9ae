"""Simple kriging: interpolant, predictive variance and the power function."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .design import Design, Region, grid_points
from .errors import ConditioningError, DuplicatePointsError, InvalidInputError, SingularMatrixError
from .kernels import Kernel

# Variances below -NEGATIVE_VARIANCE_WARN (relative to sigma2) trigger a warning before clamping.
NEGATIVE_VARIANCE_WARN = 1e-8


class ConditioningWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class Prediction:
    mean: float
    variance: float


@dataclass(frozen=True, eq=False)
class KrigingModel:
    design: Design
    kernel: Kernel
    factor: linalg.SpdFactor
    sigma2: float = 1.0

    @property
    def n(self):
        return self.design.n

    def cross(self, x):
        """Correlations r(x) between the design and query points, shape (n, m)."""
        return self.kernel.matrix(self.design.points, _queries(x, self.design.dim))

    def weights(self, values):
        """``K^{-1} F`` for one value vector or an (n, k) block of them."""
        f = np.asarray(values, dtype=np.float64)
        if f.shape[:1] != (self.n,):
            raise InvalidInputError(f"expected {self.n} values, got shape {f.shape}")
        return linalg.solve(self.factor, f)


def _queries(x, dim):
    q = np.asarray(x, dtype=np.float64)
    if q.ndim <= 1:
        q = q.reshape(1, -1) if dim > 1 or q.ndim == 1 and q.size == 1 else q.reshape(-1, 1)
    if q.ndim != 2 or q.shape[1] != dim:
        raise InvalidInputError(f"query points must have dimension {dim}, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise InvalidInputError("query points must be finite")
    return q


def fit(design: Design, kernel: Kernel, sigma2=1.0, jitter_ladder=linalg.DEFAULT_LADDER):
    """Assemble and factor the correlation matrix of ``design`` under ``kernel``.

    Raises
    ------
    DuplicatePointsError
        Two design points coincide.
    ConditioningError
        The matrix could not be factored even with the largest jitter.
    """
    if kernel.dim != design.dim:
        raise InvalidInputError(f"kernel dim {kernel.dim} != design dim {design.dim}")
    sigma2 = float(sigma2)
    if not (sigma2 > 0 and math.isfinite(sigma2)):
        raise InvalidInputError("sigma2 must be > 0")
    if design.n > 1:
        _, counts = np.unique(design.points, axis=0, return_counts=True)
        if np.any(counts > 1):
            raise DuplicatePointsError(f"design has {int(np.sum(counts > 1))} duplicated point(s)")
    try:
        factor = linalg.factor_spd(kernel.matrix(design.points), jitter_ladder)
    except SingularMatrixError as exc:
        raise ConditioningError(str(exc), exc.pivot) from None
    return KrigingModel(design, kernel, factor, sigma2)


def interpolate(model: KrigingModel, values, x):
    """Kriging interpolant ``r(x)^T K^{-1} F``.

    ``x`` is one point (returns a float) or an (m, d) array (returns shape (m,)).
    A 2-D ``values`` of shape (n, k) interpolates k functions at once.
    """
    single = np.ndim(x) <= 1 and np.size(x) == model.design.dim
    out = model.cross(x).T @ model.weights(values)
    return out[0] if single else out


def power_function_sq(model: KrigingModel, x):
    """Squared power function ``1 - r^T K^{-1} r``, clamped to [0, 1]."""
    single = np.ndim(x) <= 1 and np.size(x) == model.design.dim
    p2 = _clamp(1.0 - linalg.quad_form(model.factor, model.cross(x)))
    return float(p2[0]) if single else p2


def _clamp(p2):
    low = np.min(p2) if p2.size else 0.0
    if low < -NEGATIVE_VARIANCE_WARN:
        warnings.warn(f"negative predictive variance {low:.3g} clamped to 0; "
                      "the correlation matrix is ill-conditioned", ConditioningWarning,
                      stacklevel=3)
    return np.clip(p2, 0.0, 1.0)


def predict(model: KrigingModel, values, x):
    """Conditional mean and variance ``sigma2 (1 - r^T K^{-1} r)``."""
    single = np.ndim(x) <= 1 and np.size(x) == model.design.dim
    r = model.cross(x)
    mean = r.T @ model.weights(values)
    var = model.sigma2 * _clamp(1.0 - linalg.quad_form(model.factor, r))
    if single:
        return Prediction(float(mean[0]), float(var[0]))
    return mean, var


def power_on_grid(model: KrigingModel, grid, chunk=20000):
    """Power function (not squared) at each row of ``grid``."""
    out = np.empty(len(grid))
    for s in range(0, len(grid), chunk):
        out[s:s + chunk] = np.sqrt(power_function_sq(model, grid[s:s + chunk]))
    return out


def sup_power(model: KrigingModel, region: Region = None, grid_step=0.01):
    """Max of the power function over a regular grid of ``region``.

    This under-estimates the supremum over the continuous region.
    """
    region = region or model.design.region
    grid = grid_points(region, grid_step)
    return float(np.max(power_on_grid(model, grid)))


def theorem1_bound(sup_p, k_const=1.0, sigma=1.0, grid_step=0.01):
    """``K sigma P sqrt(log(e / P))`` with ``P`` the sup of the power function.

    ``sup_p`` is either the value ``P`` in [0, 1] or a fitted ``KrigingModel``;
    for a model, ``P = sup_power(model, grid_step=grid_step)`` and ``sigma``
    defaults to ``sqrt(model.sigma2)``.
    """
    if isinstance(sup_p, KrigingModel):
        if sigma == 1.0:
            sigma = math.sqrt(sup_p.sigma2)
        sup_p = sup_power(sup_p, grid_step=grid_step)
    p = float(sup_p)
    if not (0 <= p <= 1 + 1e-12):
        raise InvalidInputError("sup power must lie in [0, 1]")
    if float(k_const) <= 0 or float(sigma) <= 0:
        raise InvalidInputError("k_const and sigma must be > 0")
    if p == 0:
        return 0.0
    return float(k_const) * float(sigma) * p * math.sqrt(math.log(math.e / min(p, 1.0)))


def rkhs_norm_sq(kernel: Kernel, centers, coeffs):
    """Native-space norm squared of ``sum_j c_j Phi(. - y_j)``, i.e. ``c^T K c``."""
    c = np.asarray(coeffs, dtype=np.float64)
    return float(c @ kernel.matrix(centers) @ c)
