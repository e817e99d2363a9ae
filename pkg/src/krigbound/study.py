"""Monte-Carlo study of the uniform kriging error against fill distance.

For each design size n: build a maximin LHD, measure its fill distance h, draw
``replicates`` realizations of the true process jointly on design and grid,
interpolate each with the imposed kernel, and record the mean over replicates
of the grid sup-error. The rate is the OLS slope of log(error) on log(h).
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import gpsim, kriging, linalg
from .design import Region, fill_distance, format_float, grid_points, maximin_lhd
from .errors import ConditioningError, InvalidInputError
from .kernels import Kernel

log = logging.getLogger(__name__)

PAPER_SIZES = tuple(10 * k for k in range(1, 51))


@dataclass(frozen=True)
class StudyConfig:
    true_kernel: Kernel
    imposed_kernel: Kernel
    region: Region = field(default_factory=lambda: Region.unit(2))
    design_sizes: tuple = PAPER_SIZES
    replicates: int = 100
    grid_step: float = 0.01
    seed: int = 0
    maximin_budget: int | None = None
    sigma2: float = 1.0
    jitter_ladder: tuple = linalg.DEFAULT_LADDER
    fill_grid_step: float | None = None
    dump_samples: str | None = None

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.design_sizes)
        if not sizes or any(n < 1 for n in sizes):
            raise InvalidInputError("design_sizes must be positive integers")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise InvalidInputError("design_sizes must be strictly increasing")
        object.__setattr__(self, "design_sizes", sizes)
        if int(self.replicates) < 1:
            raise InvalidInputError("replicates must be >= 1")
        object.__setattr__(self, "replicates", int(self.replicates))
        if not (float(self.grid_step) > 0):
            raise InvalidInputError("grid_step must be > 0")
        object.__setattr__(self, "grid_step", float(self.grid_step))
        if self.fill_grid_step is not None and not (float(self.fill_grid_step) > 0):
            raise InvalidInputError("fill_grid_step must be > 0")
        if self.maximin_budget is not None and int(self.maximin_budget) < 0:
            raise InvalidInputError("maximin_budget must be >= 0")
        if not (float(self.sigma2) > 0):
            raise InvalidInputError("sigma2 must be > 0")
        object.__setattr__(self, "jitter_ladder", tuple(float(j) for j in self.jitter_ladder))
        dim = self.region.dim
        if self.true_kernel.dim != dim or self.imposed_kernel.dim != dim:
            raise InvalidInputError("kernels must share the region's dimension")

    def to_dict(self):
        return {
            "true_kernel": self.true_kernel.to_dict(),
            "imposed_kernel": self.imposed_kernel.to_dict(),
            "region": self.region.to_dict(),
            "design_sizes": list(self.design_sizes),
            "replicates": self.replicates,
            "grid_step": self.grid_step,
            "seed": self.seed,
            "maximin_budget": self.maximin_budget,
            "sigma2": self.sigma2,
            "jitter_ladder": list(self.jitter_ladder),
            "fill_grid_step": self.fill_grid_step,
            "dump_samples": self.dump_samples,
        }

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise InvalidInputError("study config must be a JSON object")
        allowed = {f for f in cls.__dataclass_fields__}
        extra = set(data) - allowed
        if extra:
            raise InvalidInputError(f"unknown study config fields: {sorted(extra)}")
        for key in ("true_kernel", "imposed_kernel"):
            if key not in data:
                raise InvalidInputError(f"study config needs {key!r}")
        kw = dict(data)
        region = Region.from_dict(kw["region"]) if "region" in kw else None
        dim = region.dim if region else 2
        for key in ("true_kernel", "imposed_kernel"):
            kd = dict(kw[key]) if isinstance(kw[key], dict) else kw[key]
            if isinstance(kd, dict):
                kd.setdefault("dim", dim)
            kw[key] = Kernel.from_dict(kd)
        if region is not None:
            kw["region"] = region
        if "design_sizes" in kw:
            kw["design_sizes"] = tuple(kw["design_sizes"])
        if "jitter_ladder" in kw:
            kw["jitter_ladder"] = tuple(kw["jitter_ladder"])
        try:
            return cls(**kw)
        except (TypeError, KeyError, ValueError) as exc:
            if isinstance(exc, InvalidInputError):
                raise
            raise InvalidInputError(f"bad study config: {exc}") from None

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"bad study config JSON: {exc}") from None
        return cls.from_dict(data)


@dataclass(frozen=True)
class StudyRow:
    n: int
    h_x: float
    mean_sup_error: float
    sd_sup_error: float
    sup_power: float
    jitter: float = 0.0
    ok: bool = True
    message: str = ""


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class StudyResult:
    rows: tuple
    fit: LogLogFit | None
    config: StudyConfig

    @property
    def partial(self):
        return any(not r.ok for r in self.rows)

    @property
    def relative_difference(self):
        nu = self.config.imposed_kernel.nu
        if self.fit is None or not nu:
            return float("nan")
        return abs(self.fit.slope - nu) / nu

    def to_dict(self):
        return {
            "config": self.config.to_dict(),
            "rows": [asdict(r) for r in self.rows],
            "fit": asdict(self.fit) if self.fit else None,
            "relative_difference": self.relative_difference,
            "partial": self.partial,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, allow_nan=True) + "\n"

    def rows_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "h_X", "mean_sup_error", "sd", "sup_power"])
        for r in self.rows:
            if r.ok:
                writer.writerow([r.n, *(format_float(v) for v in
                                        (r.h_x, r.mean_sup_error, r.sd_sup_error, r.sup_power))])
        return buf.getvalue()


def fit_loglog(rows):
    """Ordinary least squares of log(e) on log(h).

    ``rows`` is a sequence of ``(h, e)`` pairs, all positive, at least two of
    them, with at least two distinct ``h``.
    """
    data = np.asarray(rows, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 2:
        raise InvalidInputError("fit_loglog needs at least two (h, e) pairs")
    if not np.all(np.isfinite(data)) or np.any(data <= 0):
        raise InvalidInputError("h and e must be finite and positive")
    x = np.log(data[:, 0])
    y = np.log(data[:, 1])
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0:
        raise InvalidInputError("all h values are equal; slope undefined")
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    syy = float(np.sum((y - ym) ** 2))
    resid = float(np.sum((y - intercept - slope * x) ** 2))
    r2 = 1.0 if syy == 0 else min(max(1.0 - resid / syy, 0.0), 1.0)
    return LogLogFit(slope, intercept, r2)


def sup_error(sample_values, model: kriging.KrigingModel, grid_indices, points=None):
    """Max over ``grid_indices`` of ``|Z(x) - I Z(x)|``.

    ``sample_values`` holds Z at the joint point set whose first ``model.n``
    entries are the design. ``sample_values`` may be a GpSample, a vector, or
    an (m, k) block of k realizations (giving k sup-errors).
    """
    if isinstance(sample_values, gpsim.GpSample):
        points = sample_values.points if points is None else points
        sample_values = sample_values.values
    z = np.asarray(sample_values, dtype=np.float64)
    idx = np.asarray(grid_indices, dtype=np.intp)
    n = model.n
    if z.shape[0] < n or idx.size == 0 or idx.min() < 0 or idx.max() >= z.shape[0]:
        raise InvalidInputError("grid indices do not fit the sample")
    if points is None:
        raise InvalidInputError("sample points are needed to locate grid indices")
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape[0] != z.shape[0] or not np.array_equal(pts[:n], model.design.points):
        raise InvalidInputError("sample points must start with the model's design")
    pred = kriging.interpolate(model, z[:n], pts[idx])
    return np.max(np.abs(z[idx] - pred), axis=0)


def _design_seed(seed, index):
    return int(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, 0xD5, index])
               .generate_state(1, np.uint64)[0])


class _Workspace:
    """State shared by all design sizes of one study: grid and its Gram block."""

    def __init__(self, config: StudyConfig):
        self.config = config
        self.grid = grid_points(config.region, config.grid_step)
        self.grid_gram = config.true_kernel.matrix(self.grid)


def _run_size(ws: _Workspace, index, n):
    cfg = ws.config
    design = maximin_lhd(n, cfg.region.dim, _design_seed(cfg.seed, index),
                         budget=cfg.maximin_budget, region=cfg.region)
    h = fill_distance(design, cfg.fill_grid_step or cfg.grid_step)
    truth = cfg.true_kernel
    pts = np.vstack([design.points, ws.grid])
    cross = truth.matrix(design.points, ws.grid)
    gram = np.block([[truth.matrix(design.points), cross], [cross.T, ws.grid_gram]])
    try:
        factor = gpsim.covariance_factor(pts, truth, cfg.sigma2, cfg.jitter_ladder, gram=gram)
        del gram, cross
        z = gpsim.draw_many(factor, cfg.seed, [(index, r) for r in range(cfg.replicates)])
        jitter = factor.jitter_used
        del factor
        model = kriging.fit(design, cfg.imposed_kernel, cfg.sigma2, cfg.jitter_ladder)
    except ConditioningError as exc:
        log.warning("design size %d aborted: %s", n, exc)
        return StudyRow(n, h, math.nan, math.nan, math.nan, math.nan, False, str(exc))
    if cfg.dump_samples:
        os.makedirs(cfg.dump_samples, exist_ok=True)
        for r in range(cfg.replicates):
            sample = gpsim.GpSample(pts, z[:, r], truth, cfg.sigma2, cfg.seed)
            gpsim.dump_csv(sample, os.path.join(cfg.dump_samples, f"n{n}_r{r}.csv"))
    pred = model.cross(ws.grid).T @ model.weights(z[:n])
    errs = np.max(np.abs(z[n:] - pred), axis=0)
    p_sup = float(np.max(kriging.power_on_grid(model, ws.grid)))
    sd = float(np.std(errs, ddof=1)) if errs.size > 1 else 0.0
    log.info("n=%d h=%.4g E=%.4g P=%.4g jitter=%.3g", n, h, float(np.mean(errs)), p_sup, jitter)
    return StudyRow(n, h, float(np.mean(errs)), sd, p_sup, jitter)


def run_study(config: StudyConfig, threads=1):
    """Run the convergence experiment; see the module docstring.

    Design sizes run as independent tasks on up to ``threads`` workers. Every
    random draw is keyed by (seed, size index, replicate), so the result does
    not depend on ``threads``. A size whose covariance cannot be factored is
    kept as a row with ``ok=False`` and left out of the regression.
    """
    ws = _Workspace(config)
    tasks = list(enumerate(config.design_sizes))
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda t: _run_size(ws, *t), tasks))
    else:
        rows = [_run_size(ws, i, n) for i, n in tasks]
    good = [(r.h_x, r.mean_sup_error) for r in rows if r.ok]
    fit = fit_loglog(good) if len(good) >= 2 else None
    return StudyResult(tuple(rows), fit, config)


@dataclass(frozen=True)
class BoundRow:
    n: int
    empirical: float
    bound: float


def bound_comparison(result: StudyResult, k_const=1.0):
    """Per size, the empirical mean sup-error next to ``K sigma P sqrt(log(e/P))``."""
    sigma = math.sqrt(result.config.sigma2)
    return [BoundRow(r.n, r.mean_sup_error, kriging.theorem1_bound(r.sup_power, k_const, sigma))
            for r in result.rows if r.ok]
