"""Nearest-neighbor execution, tie-breaking policies, and tour certification.

The executor and the validator are deliberately independent code paths:
the executor keeps incremental unvisited bookkeeping, the validator
recomputes every step's argmin set from scratch, so a bug in one cannot
silently vouch for the other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._kernels import impl as _impl
from ._kernels.fallback import GRAPHIC, L1, L2, LINF, LP
from .family import Instance
from .metrics import (
    REL_TOL,
    Comparison,
    DistanceValue,
    GraphicMetric,
    LpMetric,
    compare,
)


@dataclass(frozen=True)
class TourPath:
    """An ordered sequence of distinct city indices, open or closed."""

    order: tuple[int, ...]
    closed: bool = False

    def __post_init__(self):
        if len(set(self.order)) != len(self.order):
            raise ValueError("tour repeats a city")

    def __len__(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class NnrStep:
    origin: int
    chosen: int
    distance: DistanceValue
    tie_set: frozenset[int]


@dataclass(frozen=True)
class NnrTrace:
    steps: tuple[NnrStep, ...]


@dataclass(frozen=True)
class Lexicographic:
    """Break ties toward the smallest (x, y) coordinate pair."""

    name = "lexicographic"


@dataclass(frozen=True)
class IndexOrder:
    """Break ties toward the smallest city index."""

    name = "index"


@dataclass(frozen=True)
class Adversarial:
    """Follow a prescribed target tour, failing loudly if it ever leaves the argmin set."""

    target: TourPath
    name = "adversarial"


TieBreakPolicy = Lexicographic | IndexOrder | Adversarial


class AdversarialTargetIllegal(ValueError):
    """The target tour is not realizable by the nearest-neighbor rule."""

    def __init__(self, step: int, origin: int, wanted: int, tie_set: frozenset[int]):
        self.step = step
        self.origin = origin
        self.wanted = wanted
        self.tie_set = tie_set
        super().__init__(
            f"target tour illegal at step {step}: city {wanted} is not among "
            f"the nearest unvisited cities {sorted(tie_set)} of city {origin}"
        )


def _metric_code(instance: Instance) -> tuple[int, float, np.ndarray | None, np.ndarray | None]:
    metric = instance.metric
    if isinstance(metric, GraphicMetric):
        indptr, indices = metric.csr
        return GRAPHIC, 0.0, indptr, indices
    if not isinstance(metric, LpMetric):
        raise TypeError(f"nearest-neighbor execution supports Lp and hop-count metrics, not {metric!r}")
    if metric.p == 1:
        return L1, 0.0, None, None
    if metric.p == 2:
        return L2, 0.0, None, None
    if math.isinf(metric.p):
        return LINF, 0.0, None, None
    return LP, float(metric.p), None, None


def _policy_rank(instance: Instance, policy: TieBreakPolicy) -> np.ndarray:
    if isinstance(policy, IndexOrder):
        return np.arange(instance.n, dtype=np.int32)
    xs, ys = instance.coord_arrays()
    by_coord = np.lexsort((ys, xs))
    rank = np.empty(instance.n, dtype=np.int32)
    rank[by_coord] = np.arange(instance.n, dtype=np.int32)
    return rank


def run_nearest_neighbor(instance: Instance, start: int, policy: TieBreakPolicy) -> tuple[TourPath, NnrTrace]:
    """Run the nearest-neighbor rule from ``start`` under a tie policy.

    Returns the open tour over all cities and the full per-step trace,
    including each step's complete argmin set.
    """
    n = instance.n
    if not 0 <= start < n:
        raise ValueError(f"start index {start} out of range")
    target = None
    if isinstance(policy, Adversarial):
        order = policy.target.order
        if len(order) != n or len(set(order)) != n:
            raise ValueError("adversarial target must visit every city exactly once")
        if order[0] != start:
            raise ValueError(f"adversarial target starts at {order[0]}, not at {start}")
        target = np.asarray(order, dtype=np.int32)

    xs, ys = instance.coord_arrays()
    code, p, indptr, indices = _metric_code(instance)
    rank = None if target is not None else _policy_rank(instance, policy)
    order_arr, tie_flat, tie_off, fail_step = _impl.nn_run(
        xs, ys, start, code, p, REL_TOL, rank, target, indptr, indices
    )
    if fail_step >= 0:
        ties = frozenset(int(c) for c in tie_flat[tie_off[fail_step] : tie_off[fail_step + 1]])
        raise AdversarialTargetIllegal(fail_step, int(order_arr[fail_step]), int(target[fail_step + 1]), ties)

    order = tuple(int(v) for v in order_arr)
    steps = []
    for i in range(n - 1):
        ties = frozenset(int(c) for c in tie_flat[tie_off[i] : tie_off[i + 1]])
        steps.append(NnrStep(order[i], order[i + 1], instance.distance(order[i], order[i + 1]), ties))
    return TourPath(order), NnrTrace(tuple(steps))


@dataclass(frozen=True)
class ValidationVerdict:
    valid: bool
    mode: str
    fail_step: int | None = None
    origin: int | None = None
    chosen: int | None = None
    minimum: DistanceValue | None = None
    found: DistanceValue | None = None
    tie_set: frozenset[int] | None = None

    def __str__(self) -> str:
        if self.valid:
            return f"valid ({self.mode})"
        return (
            f"invalid ({self.mode}) at step {self.fail_step}: from city {self.origin} "
            f"the step goes to {self.chosen} at distance {self.found.approx:g} but the "
            f"minimum is {self.minimum.approx:g} with argmin set {sorted(self.tie_set)}"
        )


def _argmin_details(instance: Instance, visited: set[int], origin: int):
    best = None
    ties: list[int] = []
    for j in range(instance.n):
        if j in visited:
            continue
        d = instance.distance(origin, j)
        if best is None:
            best, ties = d, [j]
            continue
        c = compare(d, best)
        if c is Comparison.LESS:
            best, ties = d, [j]
        elif c is Comparison.EQUAL:
            ties.append(j)
    return best, frozenset(ties)


def validate_tour(instance: Instance, tour: TourPath, mode: str = "weak") -> ValidationVerdict:
    """Certify a (partial) tour against the nearest-neighbor rule.

    Weak mode accepts any step that attains the minimum distance over
    unvisited cities; strict mode additionally demands the minimizer be
    unique.  Invalidity is a verdict carrying the first violating step,
    the true minimum, and the argmin set there.
    """
    if mode not in ("weak", "strict"):
        raise ValueError(f"unknown validation mode {mode!r}")
    for idx in tour.order:
        if not 0 <= idx < instance.n:
            raise ValueError(f"tour city {idx} out of range")
    if len(tour.order) <= 1:
        return ValidationVerdict(valid=True, mode=mode)

    xs, ys = instance.coord_arrays()
    code, p, indptr, indices = _metric_code(instance)
    order = np.asarray(tour.order, dtype=np.int32)
    fail = _impl.nn_validate(xs, ys, order, code, p, REL_TOL, mode == "strict", indptr, indices)
    if fail < 0:
        return ValidationVerdict(valid=True, mode=mode)

    visited = set(tour.order[: fail + 1])
    origin, chosen = tour.order[fail], tour.order[fail + 1]
    minimum, ties = _argmin_details(instance, visited, origin)
    return ValidationVerdict(
        valid=False,
        mode=mode,
        fail_step=fail,
        origin=origin,
        chosen=chosen,
        minimum=minimum,
        found=instance.distance(origin, chosen),
        tie_set=ties,
    )


def measure_length(instance: Instance, order: Sequence[int], closed: bool = False) -> tuple[int | None, float]:
    """Length of a tour as (exact scaled integer when every edge has one, true-unit float)."""
    pairs = list(zip(order, order[1:]))
    if closed and len(order) > 1:
        pairs.append((order[-1], order[0]))
    exact_total: int | None = 0
    total = 0.0
    for a, b in pairs:
        d = instance.distance(a, b)
        total += d.approx
        if exact_total is not None and d.exact is not None:
            exact_total += d.exact
        else:
            exact_total = None
    return exact_total, instance.to_true(total)


def close_tour(instance: Instance, open_tour: TourPath) -> tuple[TourPath, float]:
    """Close a complete open tour; returns the closed tour and its true-unit length."""
    if open_tour.closed:
        raise ValueError("tour is already closed")
    if len(open_tour.order) != instance.n:
        raise ValueError(f"open tour covers {len(open_tour.order)} of {instance.n} cities")
    _, total = measure_length(instance, open_tour.order, closed=instance.n > 1)
    return TourPath(open_tour.order, closed=True), total


@dataclass(frozen=True)
class SweepRow:
    start: int
    policy: str
    open_length: float
    closed_length: float
    optimum: float
    ratio_open: float
    ratio_closed: float
    weak_valid: bool


def _grid_optimum(instance: Instance) -> float:
    """Optimum closed length, analytic for full 2 x m grids, exact DP for small n."""
    from .optimum import exact_optimum, is_full_grid

    if is_full_grid(instance):
        return float(instance.n)
    return exact_optimum(instance)


def start_sweep(
    instance: Instance,
    policies: Sequence[TieBreakPolicy],
    starts: Iterable[int] | None = None,
) -> tuple[SweepRow, ...]:
    """Run every (start, policy) cell, weak-validate, and report closed ratios.

    Rows are ordered by start then by the given policy order.
    """
    opt = _grid_optimum(instance)
    if starts is None:
        starts = range(instance.n)
    rows = []
    for start in starts:
        for policy in policies:
            tour, _ = run_nearest_neighbor(instance, start, policy)
            verdict = validate_tour(instance, tour, "weak")
            _, open_len = measure_length(instance, tour.order)
            _, closed_len = close_tour(instance, tour)
            rows.append(
                SweepRow(
                    start=start,
                    policy=policy.name,
                    open_length=open_len,
                    closed_length=closed_len,
                    optimum=opt,
                    ratio_open=open_len / opt,
                    ratio_closed=closed_len / opt,
                    weak_valid=verdict.valid,
                )
            )
    return tuple(rows)


def dumps_tour(tour: TourPath) -> str:
    """Tour interchange text: first line CLOSED or OPEN, one index per line."""
    lines = ["CLOSED" if tour.closed else "OPEN"]
    lines.extend(str(i) for i in tour.order)
    return "\n".join(lines) + "\n"


def loads_tour(text: str) -> TourPath:
    """Parse the tour interchange format; '#' starts a comment."""
    entries = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            entries.append(line)
    if not entries:
        raise ValueError("empty tour file")
    head = entries[0].upper()
    if head not in ("OPEN", "CLOSED"):
        raise ValueError(f"tour file must start with OPEN or CLOSED, got {entries[0]!r}")
    try:
        order = tuple(int(e) for e in entries[1:])
    except ValueError as exc:
        raise ValueError(f"bad city index in tour file: {exc}") from None
    return TourPath(order, closed=head == "CLOSED")
