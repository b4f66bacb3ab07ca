"""Pure-Python reference implementation of the tour kernels.

Semantics are the contract for the compiled backend: integer metric codes
compare exact integer keys (squared integers for L2), the general-p code
compares floating keys with a relative tolerance, and the hop-count code
runs a breadth-first search from the current city at every step.

Metric codes: 0 = L1, 1 = L2 (squared keys), 2 = Linf, 3 = general p
(float keys), 4 = hop count over a CSR adjacency.
"""
from __future__ import annotations

from collections import deque

import numpy as np

BACKEND = "python"

L1, L2, LINF, LP, GRAPHIC = 0, 1, 2, 3, 4


def bfs_row(indptr, indices, source: int) -> np.ndarray:
    """Hop counts from ``source`` to every vertex; -1 where unreachable."""
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    dist[source] = 0
    queue = deque([source])
    ptr = np.asarray(indptr)
    idx = np.asarray(indices)
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in idx[ptr[u] : ptr[u + 1]]:
            if dist[v] < 0:
                dist[v] = du
                queue.append(v)
    return dist


def _int_key(code: int, dx: int, dy: int) -> int:
    if code == L1:
        return dx + dy
    if code == L2:
        return dx * dx + dy * dy
    return dx if dx > dy else dy


def _equal_float(a: float, b: float, rel_tol: float) -> bool:
    return abs(a - b) <= rel_tol * max(abs(a), abs(b))


def _step_scan(xs, ys, code, p, rel_tol, cx, cy, candidates, hops):
    """Min key and argmin set over ``candidates``; two passes, exact ties."""
    best = None
    if code == LP:
        for j in candidates:
            key = (abs(xs[j] - cx) ** p + abs(ys[j] - cy) ** p) ** (1.0 / p)
            if best is None or key < best:
                best = key
        ties = [
            j
            for j in candidates
            if _equal_float((abs(xs[j] - cx) ** p + abs(ys[j] - cy) ** p) ** (1.0 / p), best, rel_tol)
        ]
    elif code == GRAPHIC:
        for j in candidates:
            key = hops[j]
            if best is None or key < best:
                best = key
        ties = [j for j in candidates if hops[j] == best]
    else:
        for j in candidates:
            key = _int_key(code, abs(xs[j] - cx), abs(ys[j] - cy))
            if best is None or key < best:
                best = key
        ties = [j for j in candidates if _int_key(code, abs(xs[j] - cx), abs(ys[j] - cy)) == best]
    return best, ties


def nn_run(xs, ys, start, code, p, rel_tol, rank=None, target=None, indptr=None, indices=None):
    """Greedy nearest-neighbor execution with explicit tie handling.

    Maintains a shrinking candidate array (swap-removal).  With ``rank``
    the smallest-ranked tied city is chosen; with ``target`` the run
    follows the given order and reports the first step whose next city
    falls outside the argmin set.

    Returns (order, tie_flat, tie_offsets, fail_step); fail_step is -1 on
    success, otherwise the order is only meaningful up to that step.
    """
    xs = [int(v) for v in xs]
    ys = [int(v) for v in ys]
    n = len(xs)
    rank = None if rank is None else [int(v) for v in rank]
    target = None if target is None else [int(v) for v in target]

    order = [start]
    candidates = [j for j in range(n) if j != start]
    tie_flat: list[int] = []
    tie_offsets = [0] * n
    current = start
    for step in range(n - 1):
        hops = bfs_row(indptr, indices, current) if code == GRAPHIC else None
        _, ties = _step_scan(xs, ys, code, p, rel_tol, xs[current], ys[current], candidates, hops)
        tie_flat.extend(ties)
        tie_offsets[step + 1] = len(tie_flat)
        if target is not None:
            chosen = target[step + 1]
            if chosen not in ties:
                return (
                    np.asarray(order + [0] * (n - len(order)), dtype=np.int32),
                    np.asarray(tie_flat, dtype=np.int32),
                    np.asarray(tie_offsets, dtype=np.int32),
                    step,
                )
        else:
            chosen = min(ties, key=lambda j: rank[j])
        order.append(chosen)
        candidates[candidates.index(chosen)] = candidates[-1]
        candidates.pop()
        current = chosen
    return (
        np.asarray(order, dtype=np.int32),
        np.asarray(tie_flat, dtype=np.int32),
        np.asarray(tie_offsets, dtype=np.int32),
        -1,
    )


def nn_validate(xs, ys, order, code, p, rel_tol, strict, indptr=None, indices=None):
    """First step of ``order`` that breaks the nearest-neighbor property.

    Recomputes the argmin set from scratch at every step (independent of
    the executor's bookkeeping).  Weak mode requires the step to attain
    the minimum; strict mode requires a unique minimizer.  Returns -1 when
    every step is legal.
    """
    xs = [int(v) for v in xs]
    ys = [int(v) for v in ys]
    order = [int(v) for v in order]
    n = len(xs)
    visited = [False] * n
    visited[order[0]] = True
    for step in range(len(order) - 1):
        current = order[step]
        chosen = order[step + 1]
        hops = bfs_row(indptr, indices, current) if code == GRAPHIC else None
        unvisited = [j for j in range(n) if not visited[j]]
        _, ties = _step_scan(xs, ys, code, p, rel_tol, xs[current], ys[current], unvisited, hops)
        if chosen not in ties or (strict and len(ties) > 1):
            return step
        visited[chosen] = True
    return -1
