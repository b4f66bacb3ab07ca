"""Distance computation for L^p norms and unit-grid shortest-path metrics.

Every comparison that decides a tie is exact wherever the metric allows it:
L1, Linf and hop-count values compare as integers, L2 compares squared
integers, and only general p (e.g. 1.5 or 3) falls back to floating point
with a relative tolerance.  Distance values are kept in scaled grid units;
divide by the owning instance's ``scale`` at reporting boundaries.
"""
from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np

from ._kernels import impl as _impl

# Relative tolerance for comparing distances under a general L^p norm.
REL_TOL = 1e-9


class Comparison(Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class DisconnectedGraphError(ValueError):
    """Raised when a hop-count metric is requested on a disconnected graph."""

    def __init__(self, pair: tuple[int, int]):
        self.pair = pair
        super().__init__(f"graph is disconnected: no path between cities {pair[0]} and {pair[1]}")


@dataclass(frozen=True)
class ScaledPoint:
    """Integer city coordinates; the true position is (x / scale, y / scale)."""

    x: int
    y: int


@dataclass(frozen=True)
class LpMetric:
    """The planar L^p norm, p >= 1; use ``math.inf`` for the max norm."""

    p: float

    def __post_init__(self):
        if not (self.p >= 1):  # also rejects NaN
            raise ValueError(f"L^p metric requires p >= 1, got {self.p}")

    @property
    def name(self) -> str:
        if math.isinf(self.p):
            return "linf"
        if float(self.p).is_integer():
            return f"l{int(self.p)}"
        return f"l{self.p:g}"


@dataclass(frozen=True)
class GraphicMetric:
    """Hop-count metric over an explicit graph on the city indices.

    The adjacency must be connected, otherwise some distances would be
    undefined; construction fails with the first unreachable pair.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for a, b in self.edges:
            if not (0 <= a < self.n and 0 <= b < self.n) or a == b:
                raise ValueError(f"bad edge ({a}, {b}) for {self.n} cities")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        if self.n > 0:
            row = _impl.bfs_row(*self._csr_of(self.n, self.edges), 0)
            unreachable = np.flatnonzero(row < 0)
            if unreachable.size:
                raise DisconnectedGraphError((0, int(unreachable[0])))

    @staticmethod
    def _csr_of(n: int, edges) -> tuple[np.ndarray, np.ndarray]:
        deg = np.zeros(n + 1, dtype=np.int32)
        for a, b in edges:
            deg[a + 1] += 1
            deg[b + 1] += 1
        indptr = np.cumsum(deg, dtype=np.int32)
        indices = np.empty(2 * len(edges), dtype=np.int32)
        fill = indptr[:-1].copy()
        for a, b in edges:
            indices[fill[a]] = b
            fill[a] += 1
            indices[fill[b]] = a
            fill[b] += 1
        return indptr, indices

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        return self._csr_of(self.n, self.edges)

    @cached_property
    def _row_lock(self) -> threading.Lock:
        return threading.Lock()

    @cached_property
    def _row_cache(self) -> dict[int, np.ndarray]:
        return {}

    def row(self, source: int) -> np.ndarray:
        """Hop counts from ``source`` to every city (cached per source)."""
        with self._row_lock:
            cached = self._row_cache.get(source)
            if cached is None:
                indptr, indices = self.csr
                cached = _impl.bfs_row(indptr, indices, source)
                self._row_cache[source] = cached
            return cached

    @property
    def name(self) -> str:
        return "graphic"


MetricSpec = LpMetric | GraphicMetric


def parse_metric(spec) -> "LpMetric | str":
    """Parse a metric given as 'l2', 'linf', 'graphic', a bare p, or a metric.

    Returns an :class:`LpMetric`, or the sentinel string ``"graphic"`` (the
    adjacency can only be built once the cities exist).
    """
    if isinstance(spec, (LpMetric, GraphicMetric)):
        return spec
    if isinstance(spec, str):
        text = spec.strip().lower()
        if text == "graphic":
            return "graphic"
        if text.startswith("l"):
            text = text[1:]
        if text in ("inf", "infinity", "∞", "max"):
            return LpMetric(math.inf)
        try:
            p = float(text)
        except ValueError:
            raise ValueError(f"cannot parse metric {spec!r}") from None
        return LpMetric(p)
    if isinstance(spec, (int, float)):
        return LpMetric(float(spec))
    raise ValueError(f"cannot parse metric {spec!r}")


@dataclass(frozen=True)
class DistanceValue:
    """A distance in scaled grid units, with its exact form when one exists.

    ``exact`` is the integer scaled distance for L1, Linf and hop-count
    metrics (and for axis-aligned pairs under any L^p); ``squared_exact``
    is the scaled squared distance under L2, which is what comparisons
    use there.  ``approx`` always holds the floating value of the scaled
    distance, so ``approx == exact`` whenever ``exact`` is present.
    """

    metric_key: tuple
    scale: int
    approx: float
    exact: Optional[int] = None
    squared_exact: Optional[int] = None

    @property
    def true_value(self) -> float:
        """The distance in true (unscaled) units."""
        return self.approx / self.scale


def _rel_compare(a: float, b: float, rel_tol: float = REL_TOL) -> Comparison:
    if abs(a - b) <= rel_tol * max(abs(a), abs(b)):
        return Comparison.EQUAL
    return Comparison.LESS if a < b else Comparison.GREATER


def lp_distance(p: float, a: ScaledPoint, b: ScaledPoint, scale: int = 1) -> DistanceValue:
    """Distance between two scaled points under the L^p norm.

    The result is in scaled units.  For p in {1, inf}, and for axis-aligned
    pairs under any p, the exact integer value is populated; under L2 the
    exact squared integer is always populated.
    """
    if not (p >= 1):
        raise ValueError(f"L^p distance requires p >= 1, got {p}")
    if scale < 1:
        raise ValueError(f"scale must be a positive integer, got {scale}")
    dx = abs(a.x - b.x)
    dy = abs(a.y - b.y)
    key = ("lp", float(p), scale)
    if math.isinf(p):
        e = max(dx, dy)
        return DistanceValue(key, scale, float(e), exact=e)
    if p == 1:
        e = dx + dy
        return DistanceValue(key, scale, float(e), exact=e)
    if p == 2:
        sq = dx * dx + dy * dy
        root = math.isqrt(sq)
        exact = root if root * root == sq else None
        return DistanceValue(key, scale, math.sqrt(sq), exact=exact, squared_exact=sq)
    if dx == 0 or dy == 0:
        e = dx + dy
        return DistanceValue(key, scale, float(e), exact=e)
    value = (dx**p + dy**p) ** (1.0 / p)
    return DistanceValue(key, scale, value)


def graphic_distance(metric: GraphicMetric, a: int, b: int) -> DistanceValue:
    """Exact hop count of a shortest path between cities ``a`` and ``b``."""
    if not (0 <= a < metric.n and 0 <= b < metric.n):
        raise IndexError(f"city index out of range: ({a}, {b})")
    hops = int(metric.row(a)[b])
    if hops < 0:
        raise DisconnectedGraphError((a, b))
    return DistanceValue(("graphic", 1), 1, float(hops), exact=hops)


def compare(d1: DistanceValue, d2: DistanceValue, metric: MetricSpec | None = None) -> Comparison:
    """Exact three-way comparison of two distances under one metric.

    Integer forms (L1, Linf, hop counts; squared integers for L2) compare
    exactly; anything else compares within ``REL_TOL`` relative tolerance,
    where EQUAL means indistinguishable at that tolerance.
    """
    if d1.metric_key != d2.metric_key:
        raise ValueError(f"cannot compare distances from different metrics: {d1.metric_key} vs {d2.metric_key}")
    if metric is not None:
        kind = "graphic" if isinstance(metric, GraphicMetric) else "lp"
        if d1.metric_key[0] != kind or (kind == "lp" and d1.metric_key[1] != float(metric.p)):
            raise ValueError(f"distance values were not produced under {metric}")
    if d1.squared_exact is not None and d2.squared_exact is not None:
        a, b = d1.squared_exact, d2.squared_exact
        if a == b:
            return Comparison.EQUAL
        return Comparison.LESS if a < b else Comparison.GREATER
    if d1.exact is not None and d2.exact is not None:
        if d1.exact == d2.exact:
            return Comparison.EQUAL
        return Comparison.LESS if d1.exact < d2.exact else Comparison.GREATER
    return _rel_compare(d1.approx, d2.approx)


@dataclass(frozen=True)
class ConditionViolation:
    cities: tuple[int, ...]
    kind: str
    measured: float
    required: float


@dataclass(frozen=True)
class ConditionReport:
    passed: bool
    violations: tuple[ConditionViolation, ...]
    checked: int

    def __post_init__(self):
        assert self.passed == (len(self.violations) == 0)


def _metric_rows(instance):
    """Yield (i, row) of scaled distances from city i to all cities.

    Integer dtype rows are exact (L1/Linf/hops; squared for L2 is handled
    separately); float rows carry the general-p tolerance semantics.
    """
    xs, ys = instance.coord_arrays()
    metric = instance.metric
    n = instance.n
    if isinstance(metric, GraphicMetric):
        for i in range(n):
            yield i, metric.row(i).astype(np.int64)
        return
    p = metric.p
    for i in range(n):
        dx = np.abs(xs - xs[i])
        dy = np.abs(ys - ys[i])
        if math.isinf(p):
            yield i, np.maximum(dx, dy)
        elif p == 1:
            yield i, dx + dy
        elif p == 2:
            yield i, dx * dx + dy * dy  # squared, callers know
        else:
            axis = (dx == 0) | (dy == 0)
            vals = (dx.astype(np.float64) ** p + dy.astype(np.float64) ** p) ** (1.0 / p)
            yield i, np.where(axis, (dx + dy).astype(np.float64), vals)


def check_metric_conditions(instance, distance_fn: Callable[[int, int], float] | None = None) -> ConditionReport:
    """Verify the grid conditions that the worst-case construction relies on.

    For every pair of cities: if they share an x- or y-coordinate their
    distance must equal the euclidean distance exactly; otherwise it must be
    at least the absolute difference of their x-coordinates.  Violations are
    reported as data, never raised.
    """
    n = instance.n
    xs, ys = instance.coord_arrays()
    violations: list[ConditionViolation] = []
    checked = n * (n - 1) // 2

    if distance_fn is not None:
        for i in range(n):
            for j in range(i + 1, n):
                d = float(distance_fn(i, j))
                dx = abs(int(xs[i]) - int(xs[j]))
                dy = abs(int(ys[i]) - int(ys[j]))
                if dx == 0 or dy == 0:
                    euclid = float(dx + dy)
                    if _rel_compare(d, euclid) is not Comparison.EQUAL:
                        violations.append(ConditionViolation((i, j), "same-axis-not-euclidean", d, euclid))
                elif d < dx and _rel_compare(d, float(dx)) is not Comparison.EQUAL:
                    violations.append(ConditionViolation((i, j), "below-x-difference", d, float(dx)))
        return ConditionReport(not violations, tuple(violations), checked)

    is_l2 = isinstance(instance.metric, LpMetric) and instance.metric.p == 2
    for i, row in _metric_rows(instance):
        dx = np.abs(xs - xs[i])
        dy = np.abs(ys - ys[i])
        upper = np.arange(n) > i
        axis = ((dx == 0) | (dy == 0)) & upper
        cross = ~((dx == 0) | (dy == 0)) & upper
        delta = dx + dy  # the euclidean distance on axis-aligned pairs
        if np.issubdtype(row.dtype, np.integer):
            if is_l2:
                bad_axis = axis & (row != delta * delta)
                bad_cross = cross & (row < dx * dx)
            else:
                bad_axis = axis & (row != delta)
                bad_cross = cross & (row < dx)
        else:
            bad_axis = axis & (np.abs(row - delta) > REL_TOL * np.maximum(np.abs(row), delta))
            bad_cross = cross & (row < dx * (1.0 - REL_TOL))
        for j in np.flatnonzero(bad_axis):
            measured = instance.distance(i, int(j)).approx
            violations.append(ConditionViolation((i, int(j)), "same-axis-not-euclidean", measured, float(delta[j])))
        for j in np.flatnonzero(bad_cross):
            measured = instance.distance(i, int(j)).approx
            violations.append(ConditionViolation((i, int(j)), "below-x-difference", measured, float(dx[j])))
    return ConditionReport(not violations, tuple(violations), checked)


def check_triangle_inequality(
    instance,
    sample_size: int = 2000,
    seed: int = 0,
    distance_fn: Callable[[int, int], float] | None = None,
) -> ConditionReport:
    """Test d(i,j) <= d(i,k) + d(k,j) on sampled triples (exhaustive for n <= 40)."""
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    n = instance.n
    if distance_fn is None:
        distance_fn = lambda i, j: instance.distance(i, j).approx  # noqa: E731

    if n <= 40:
        triples = combinations(range(n), 3)
        checked = n * (n - 1) * (n - 2) // 6
    else:
        rng = random.Random(seed)
        triples = (tuple(rng.sample(range(n), 3)) for _ in range(sample_size))
        checked = sample_size

    violations = []
    for i, j, k in triples:
        dij = float(distance_fn(i, j))
        dik = float(distance_fn(i, k))
        dkj = float(distance_fn(k, j))
        for (a, b, c), lhs, r1, r2 in (
            ((i, j, k), dij, dik, dkj),
            ((i, k, j), dik, dij, dkj),
            ((j, k, i), dkj, dij, dik),
        ):
            if lhs > (r1 + r2) * (1.0 + REL_TOL):
                violations.append(ConditionViolation((a, b, c), "triangle", lhs, r1 + r2))
    return ConditionReport(not violations, tuple(violations), checked)
