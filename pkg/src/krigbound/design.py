"""Latin hypercube designs, maximin optimization, and fill distance."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import InvalidInputError, ResourceError

MAX_GRID_NODES = 10_000_000


@dataclass(frozen=True)
class Region:
    """Axis-aligned box ``[lower_k, upper_k]`` in each coordinate."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or not lo:
            raise InvalidInputError("region bounds must have equal, positive length")
        if any(not (math.isfinite(a) and math.isfinite(b) and a <= b) for a, b in zip(lo, hi)):
            raise InvalidInputError("region needs finite lower <= upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def unit(cls, dim):
        return cls((0.0,) * dim, (1.0,) * dim)

    @property
    def dim(self):
        return len(self.lower)

    def contains(self, points, tol=1e-12):
        p = np.asarray(points, dtype=np.float64)
        return np.all((p >= np.array(self.lower) - tol) & (p <= np.array(self.upper) + tol), axis=-1)

    def to_dict(self):
        return {"lower": list(self.lower), "upper": list(self.upper)}

    @classmethod
    def from_dict(cls, data):
        if isinstance(data, (list, tuple)):
            lo, hi = zip(*data)
            return cls(lo, hi)
        return cls(data["lower"], data["upper"])


def grid_axes(region: Region, step):
    """Per-axis node coordinates; each axis includes both endpoints.

    The node spacing is ``length / ceil(length / step)``, i.e. at most ``step``.
    """
    step = float(step)
    if not (step > 0 and math.isfinite(step)):
        raise InvalidInputError("grid_step must be > 0")
    axes = []
    for lo, hi in zip(region.lower, region.upper):
        length = hi - lo
        cells = max(int(math.ceil(length / step - 1e-9)), 0)
        axes.append(np.linspace(lo, hi, cells + 1) if cells else np.array([lo]))
    return axes


def grid_points(region: Region, step, max_nodes=MAX_GRID_NODES):
    """Regular grid over ``region`` as an (m, d) array, first axis slowest.

    Raises
    ------
    ResourceError
        If the grid would exceed ``max_nodes`` nodes.
    """
    axes = grid_axes(region, step)
    total = math.prod(len(a) for a in axes)
    if total > max_nodes:
        raise ResourceError(f"grid of {total} nodes exceeds limit {max_nodes}; coarsen grid_step")
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


@dataclass(frozen=True, eq=False)
class Design:
    """An (n, d) point set inside a region, with provenance metadata."""

    points: np.ndarray
    region: Region = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise InvalidInputError(f"design needs an (n, d) array with n >= 1, got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("design points must be finite")
        pts = np.ascontiguousarray(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        region = self.region if self.region is not None else Region.unit(pts.shape[1])
        if region.dim != pts.shape[1]:
            raise InvalidInputError("region and design dimensions differ")
        if not np.all(region.contains(pts)):
            raise InvalidInputError("design points must lie inside the region")
        object.__setattr__(self, "region", region)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"x{k + 1}" for k in range(self.dim)])
        for row in self.points:
            writer.writerow([format_float(v) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, region=None):
        return cls(read_matrix_csv(text), region=region)

    def to_json(self):
        return json.dumps({"points": self.points.tolist(), "region": self.region.to_dict(),
                           "meta": self.meta})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        region = Region.from_dict(data["region"]) if data.get("region") else None
        return cls(np.array(data["points"], dtype=np.float64), region=region,
                   meta=data.get("meta", {}))


def format_float(v):
    """17 significant digits, so round trips are exact and output is byte-stable."""
    return f"{float(v):.17g}"


def read_matrix_csv(text):
    """Parse a numeric CSV (with an optional header row) into a 2-D array."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise InvalidInputError("empty CSV")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]
    if not rows:
        raise InvalidInputError("CSV has a header but no data")
    width = len(rows[0])
    try:
        data = np.array([[float(c) for c in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise InvalidInputError(f"non-numeric CSV entry: {exc}") from None
    if any(len(r) != width for r in rows):
        raise InvalidInputError("ragged CSV rows")
    return data


def _rng(seed, tag):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed) & (2**63 - 1), tag])))


def _ranks_to_points(ranks, region: Region):
    n = ranks.shape[0]
    lo = np.array(region.lower)
    hi = np.array(region.upper)
    return lo + (ranks + 0.5) / n * (hi - lo)


def _random_ranks(n, d, seed):
    rng = _rng(seed, 0)
    return np.ascontiguousarray(np.column_stack([rng.permutation(n) for _ in range(d)]),
                                dtype=np.int64)


def random_lhd(n, d, seed, region=None):
    """Midpoint Latin hypercube: one point per stratum in every coordinate."""
    if int(n) < 1 or int(d) < 1:
        raise InvalidInputError("n and d must be >= 1")
    n, d = int(n), int(d)
    region = region or Region.unit(d)
    ranks = _random_ranks(n, d, seed)
    return Design(_ranks_to_points(ranks, region), region,
                  {"seed": int(seed), "generator": "random_lhd"})


def maximin_lhd(n, d, seed, budget=None, region=None):
    """Latin hypercube optimized for a large minimum pairwise distance.

    Starts from ``random_lhd(n, d, seed)`` and tries ``budget`` swaps (default
    ``10 n^2``) of two random entries within one random coordinate, which keeps
    the Latin property. A swap is kept when the sorted list of pairwise
    distances grows lexicographically: first the minimum distance, then its
    multiplicity, then the next smallest distance, and so on. The minimum
    separation therefore never decreases. Distances are measured on the integer
    stratum lattice, so ties are exact.
    """
    if int(n) < 1 or int(d) < 1:
        raise InvalidInputError("n and d must be >= 1")
    n, d = int(n), int(d)
    budget = 10 * n * n if budget is None else int(budget)
    if budget < 0:
        raise InvalidInputError("budget must be >= 0")
    region = region or Region.unit(d)
    ranks = _random_ranks(n, d, seed)
    accepted = 0
    if budget and n >= 2:
        rng = _rng(seed, 1)
        cols = rng.integers(0, d, size=budget)
        rows_a = rng.integers(0, n, size=budget)
        rows_b = rng.integers(0, n, size=budget)
        accepted = int(_backend.maximin_search(ranks, cols, rows_a, rows_b))
    return Design(_ranks_to_points(ranks, region), region,
                  {"seed": int(seed), "generator": "maximin_lhd", "budget": budget,
                   "accepted_swaps": accepted})


def is_latin(design: Design):
    """True iff every coordinate has exactly one point per stratum."""
    lo = np.array(design.region.lower)
    width = np.array(design.region.upper) - lo
    u = (design.points - lo) / np.where(width > 0, width, 1.0)
    strata = np.minimum(np.floor(u * design.n).astype(int), design.n - 1)
    return all(len(np.unique(strata[:, k])) == design.n for k in range(design.dim))


def fill_distance(design: Design, grid_step=0.01):
    """Largest distance from a grid node of the region to its nearest design point.

    Grid nodes include the region's corners. This under-estimates the exact
    fill distance by at most ``grid_step * sqrt(d) / 2``.
    """
    grid = grid_points(design.region, grid_step)
    return float(np.max(_backend.nearest_distance(grid, design.points)))


def min_separation(design: Design):
    """Smallest pairwise Euclidean distance between design points."""
    if design.n < 2:
        raise InvalidInputError("min_separation needs at least two points")
    p = design.points
    best = math.inf
    for i in range(design.n - 1):
        diff = p[i + 1:] - p[i]
        best = min(best, float(np.min(np.einsum("ij,ij->i", diff, diff))))
    return math.sqrt(best)
