"""Generation of the doubling family of 2-row grid instances.

The k-th family member lives on a 2 x (8*2^k - 3) integer grid, has
n = 16*2^k - 6 cities, and carries two landmarks: the lower-left vertex
(the forced tour's start) and the top-middle vertex (its end).  General
2 x m grids are available for oracle cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable

import numpy as np

from .metrics import (
    DistanceValue,
    GraphicMetric,
    LpMetric,
    MetricSpec,
    ScaledPoint,
    graphic_distance,
    lp_distance,
    parse_metric,
)

# Scaled coordinates must leave int64 headroom for squared distances.
_COORD_LIMIT = 2**30


def family_size(k: int) -> int:
    """Number of cities of the k-th family instance: 16 * 2^k - 6."""
    return 16 * 2**k - 6


def family_columns(k: int) -> int:
    """Grid width of the k-th family instance: 8 * 2^k - 3."""
    return 8 * 2**k - 3


@dataclass(frozen=True)
class Instance:
    """An immutable city set with its metric and landmark indices."""

    cities: tuple[ScaledPoint, ...]
    scale: int = 1
    metric: MetricSpec = LpMetric(2.0)
    landmark_l: int = 0
    landmark_m: int = 0
    family_k: int | None = None

    def __post_init__(self):
        n = len(self.cities)
        if n == 0:
            raise ValueError("instance needs at least one city")
        if self.scale < 1:
            raise ValueError("scale must be a positive integer")
        seen = set()
        for c in self.cities:
            if abs(c.x) >= _COORD_LIMIT or abs(c.y) >= _COORD_LIMIT:
                raise ValueError(f"coordinate magnitude of {c} exceeds {_COORD_LIMIT}")
            if (c.x, c.y) in seen:
                raise ValueError(f"duplicate city at ({c.x}, {c.y})")
            seen.add((c.x, c.y))
        for idx in (self.landmark_l, self.landmark_m):
            if not 0 <= idx < n:
                raise ValueError(f"landmark index {idx} out of range")
        if isinstance(self.metric, GraphicMetric) and self.metric.n != n:
            raise ValueError("adjacency size does not match the city count")
        if self.family_k is not None:
            k = self.family_k
            if n != family_size(k):
                raise ValueError(f"family member {k} must have {family_size(k)} cities, got {n}")
            if self.scale == 1:
                expected = {(x, y) for x in range(family_columns(k)) for y in (0, 1)}
                if seen != expected:
                    raise ValueError(f"cities do not form the 2x{family_columns(k)} grid")
                lx, ly = self.cities[self.landmark_l].x, self.cities[self.landmark_l].y
                mx, my = self.cities[self.landmark_m].x, self.cities[self.landmark_m].y
                if (lx, ly) != (0, 0) or (mx, my) != (4 * 2**k - 2, 1):
                    raise ValueError("family landmarks must be the lower-left and top-middle vertices")

    @property
    def n(self) -> int:
        return len(self.cities)

    def coord_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return self._arrays

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        xs = np.fromiter((c.x for c in self.cities), dtype=np.int64, count=self.n)
        ys = np.fromiter((c.y for c in self.cities), dtype=np.int64, count=self.n)
        xs.setflags(write=False)
        ys.setflags(write=False)
        return xs, ys

    def distance(self, i: int, j: int) -> DistanceValue:
        """Scaled distance between two cities under the instance metric."""
        if isinstance(self.metric, GraphicMetric):
            return graphic_distance(self.metric, i, j)
        return lp_distance(self.metric.p, self.cities[i], self.cities[j], self.scale)

    def to_true(self, scaled_value: float) -> float:
        """Convert a scaled length to true units."""
        return scaled_value / self.scale


@dataclass(frozen=True)
class UnitGraph:
    """Edges between city pairs at distance exactly one true unit."""

    n: int
    edges: tuple[tuple[int, int], ...]
    connected: bool


def build_unit_graph(instance: Instance) -> UnitGraph:
    """Adjacency over unit-distance pairs; flags a disconnected result.

    For integer coordinates at scale 1 the unit-distance pairs are exactly
    the axis neighbors, so a coordinate lookup enumerates them all.
    """
    if instance.scale != 1:
        raise ValueError("unit graph requires an unscaled instance (scale == 1)")
    where = {(c.x, c.y): i for i, c in enumerate(instance.cities)}
    edges = []
    for i, c in enumerate(instance.cities):
        for nx, ny in ((c.x + 1, c.y), (c.x, c.y + 1)):
            j = where.get((nx, ny))
            if j is not None:
                edges.append((min(i, j), max(i, j)))
    edges.sort()

    reached = {0}
    if edges:
        adj: dict[int, list[int]] = {}
        for a, b in edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj.get(u, ()):
                if v not in reached:
                    reached.add(v)
                    stack.append(v)
    return UnitGraph(instance.n, tuple(edges), connected=len(reached) == instance.n)


def _grid_cities(cols: int) -> tuple[ScaledPoint, ...]:
    # Column-major with the bottom row first, so city (x, y) has index 2x + y.
    return tuple(ScaledPoint(x, y) for x in range(cols) for y in (0, 1))


def _with_metric(cities, metric_request, landmark_l, landmark_m, family_k) -> Instance:
    metric = parse_metric(metric_request)
    if metric == "graphic":
        probe = Instance(cities=cities, landmark_l=landmark_l, landmark_m=landmark_m)
        graph = build_unit_graph(probe)
        metric = GraphicMetric(probe.n, graph.edges)  # raises when disconnected
    return Instance(
        cities=cities,
        metric=metric,
        landmark_l=landmark_l,
        landmark_m=landmark_m,
        family_k=family_k,
    )


def grid_instance(cols: int, metric="l2") -> Instance:
    """A full 2 x cols grid with lower-left / top-middle landmarks.

    For an even column count the top-middle landmark rounds down.
    """
    if cols < 2:
        raise ValueError(f"grid needs at least 2 columns, got {cols}")
    cities = _grid_cities(cols)
    mid_x = (cols - 1) // 2
    return _with_metric(cities, metric, landmark_l=0, landmark_m=2 * mid_x + 1, family_k=None)


def family_instance(k: int, metric="l2") -> Instance:
    """The k-th member of the worst-case family (n = 16 * 2^k - 6 cities)."""
    if k < 0:
        raise ValueError(f"family parameter must be >= 0, got {k}")
    cols = family_columns(k)
    cities = _grid_cities(cols)
    mid_x = 4 * 2**k - 2
    return _with_metric(cities, metric, landmark_l=0, landmark_m=2 * mid_x + 1, family_k=k)


def rescale(instance: Instance, new_scale: int) -> Instance:
    """Same geometry on a refined lattice (coordinates multiplied)."""
    if new_scale < 1:
        raise ValueError("scale must be a positive integer")
    if instance.scale != 1:
        raise ValueError("rescale expects an unscaled instance")
    if isinstance(instance.metric, GraphicMetric):
        raise ValueError("hop-count metrics do not support rescaling")
    cities = tuple(ScaledPoint(c.x * new_scale, c.y * new_scale) for c in instance.cities)
    return replace(instance, cities=cities, scale=new_scale)
