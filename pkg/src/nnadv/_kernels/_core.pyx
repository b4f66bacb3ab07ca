# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tour kernels; semantics match nnadv._kernels.fallback exactly.

Metric codes: 0 = L1, 1 = L2 (squared integer keys), 2 = Linf,
3 = general p (float keys, relative tolerance), 4 = hop count (BFS per
step over a CSR adjacency).
"""

from libc.limits cimport LLONG_MAX
from libc.math cimport INFINITY, fabs, pow

import numpy as np

BACKEND = "cython"

L1, L2, LINF, LP, GRAPHIC = 0, 1, 2, 3, 4

cdef enum:
    C_LP = 3
    C_GRAPHIC = 4


cdef inline long long int_key(int code, long long dx, long long dy) noexcept nogil:
    if dx < 0:
        dx = -dx
    if dy < 0:
        dy = -dy
    if code == 0:
        return dx + dy
    if code == 1:
        return dx * dx + dy * dy
    return dx if dx > dy else dy


cdef inline double f_key(double p, double dx, double dy) noexcept nogil:
    return pow(pow(fabs(dx), p) + pow(fabs(dy), p), 1.0 / p)


cdef inline bint f_equal(double a, double b, double rel) noexcept nogil:
    cdef double diff = a - b
    cdef double scale_a = fabs(a)
    cdef double scale_b = fabs(b)
    if diff < 0:
        diff = -diff
    if scale_b > scale_a:
        scale_a = scale_b
    return diff <= rel * scale_a


cdef void bfs_fill(const int[::1] indptr, const int[::1] indices, int source,
                   int[::1] dist, int[::1] queue) noexcept nogil:
    cdef Py_ssize_t n = dist.shape[0]
    cdef Py_ssize_t i, head, tail
    cdef int u, v, du
    cdef Py_ssize_t e
    for i in range(n):
        dist[i] = -1
    dist[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if dist[v] < 0:
                dist[v] = du
                queue[tail] = v
                tail += 1


def bfs_row(indptr_o, indices_o, int source):
    """Hop counts from ``source`` to every vertex; -1 where unreachable."""
    cdef const int[::1] indptr = np.ascontiguousarray(indptr_o, dtype=np.int32)
    cdef const int[::1] indices = np.ascontiguousarray(indices_o, dtype=np.int32)
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.empty(n, dtype=np.int32)
    queue = np.empty(n, dtype=np.int32)
    cdef int[::1] dist_v = out
    cdef int[::1] queue_v = queue
    with nogil:
        bfs_fill(indptr, indices, source, dist_v, queue_v)
    return out


cdef inline long long graph_key(const int[::1] hops, int j) noexcept nogil:
    # Unreachable vertices must never win an argmin scan.
    return hops[j] if hops[j] >= 0 else LLONG_MAX // 2


def nn_run(xs_o, ys_o, int start, int code, double p, double rel_tol,
           rank_o=None, target_o=None, indptr_o=None, indices_o=None):
    """Greedy nearest-neighbor run; see the fallback module for semantics."""
    cdef const long long[::1] xs = np.ascontiguousarray(xs_o, dtype=np.int64)
    cdef const long long[::1] ys = np.ascontiguousarray(ys_o, dtype=np.int64)
    cdef Py_ssize_t n = xs.shape[0]

    cdef bint has_rank = rank_o is not None
    cdef bint has_target = target_o is not None
    cdef bint graphic = code == C_GRAPHIC
    empty = np.empty(0, dtype=np.int32)
    cdef const int[::1] rank = np.ascontiguousarray(rank_o, dtype=np.int32) if has_rank else empty
    cdef const int[::1] target = np.ascontiguousarray(target_o, dtype=np.int32) if has_target else empty
    cdef const int[::1] indptr = np.ascontiguousarray(indptr_o, dtype=np.int32) if graphic else empty
    cdef const int[::1] indices = np.ascontiguousarray(indices_o, dtype=np.int32) if graphic else empty

    order = np.zeros(n, dtype=np.int32)
    tie_offsets = np.zeros(n, dtype=np.int32)
    cdef int[::1] order_v = order
    cdef int[::1] off_v = tie_offsets

    cand_arr = np.empty(n, dtype=np.int32)
    cdef int[::1] cand = cand_arr
    cdef Py_ssize_t m = 0
    cdef Py_ssize_t i
    for i in range(n):
        if i != start:
            cand[m] = i
            m += 1

    tie_cap = max(4 * n, 16)
    tie_arr = np.empty(tie_cap, dtype=np.int32)
    cdef int[::1] ties = tie_arr
    cdef Py_ssize_t tie_len = 0

    dist_arr = np.empty(n if graphic else 0, dtype=np.int32)
    queue_arr = np.empty(n if graphic else 0, dtype=np.int32)
    cdef int[::1] hops = dist_arr
    cdef int[::1] queue = queue_arr

    cdef int current = start
    cdef int chosen, best_rank, j
    cdef Py_ssize_t step, t, cnt, chosen_pos
    cdef long long cx, cy, ibest, ik
    cdef double fbest, fk, fcx, fcy

    order_v[0] = start
    for step in range(n - 1):
        cx = xs[current]
        cy = ys[current]
        if graphic:
            with nogil:
                bfs_fill(indptr, indices, current, hops, queue)

        # Pass 1: minimum key over the remaining candidates.
        cnt = 0
        if code == C_LP:
            fcx = cx
            fcy = cy
            fbest = INFINITY
            for t in range(m):
                j = cand[t]
                fk = f_key(p, xs[j] - fcx, ys[j] - fcy)
                if fk < fbest:
                    fbest = fk
            for t in range(m):
                j = cand[t]
                if f_equal(f_key(p, xs[j] - fcx, ys[j] - fcy), fbest, rel_tol):
                    cnt += 1
        else:
            ibest = LLONG_MAX
            for t in range(m):
                j = cand[t]
                ik = graph_key(hops, j) if graphic else int_key(code, xs[j] - cx, ys[j] - cy)
                if ik < ibest:
                    ibest = ik
            for t in range(m):
                j = cand[t]
                ik = graph_key(hops, j) if graphic else int_key(code, xs[j] - cx, ys[j] - cy)
                if ik == ibest:
                    cnt += 1

        # Pass 2: record the argmin set (growing the flat buffer as needed).
        if tie_len + cnt > tie_cap:
            tie_cap = max(2 * tie_cap, tie_len + cnt)
            tie_arr = np.concatenate([tie_arr[:tie_len], np.empty(tie_cap - tie_len, dtype=np.int32)])
            ties = tie_arr
        if code == C_LP:
            for t in range(m):
                j = cand[t]
                if f_equal(f_key(p, xs[j] - fcx, ys[j] - fcy), fbest, rel_tol):
                    ties[tie_len] = j
                    tie_len += 1
        else:
            for t in range(m):
                j = cand[t]
                ik = graph_key(hops, j) if graphic else int_key(code, xs[j] - cx, ys[j] - cy)
                if ik == ibest:
                    ties[tie_len] = j
                    tie_len += 1
        off_v[step + 1] = <int> tie_len

        # Choose: follow the target (checking argmin membership) or min rank.
        if has_target:
            chosen = target[step + 1]
            cnt = 0
            for t in range(off_v[step], off_v[step + 1]):
                if ties[t] == chosen:
                    cnt = 1
                    break
            if cnt == 0:
                return order, tie_arr[:tie_len].copy(), tie_offsets, <int> step
        else:
            chosen = -1
            best_rank = -1
            for t in range(off_v[step], off_v[step + 1]):
                j = ties[t]
                if chosen < 0 or rank[j] < best_rank:
                    chosen = j
                    best_rank = rank[j]

        order_v[step + 1] = chosen
        chosen_pos = 0
        for t in range(m):
            if cand[t] == chosen:
                chosen_pos = t
                break
        cand[chosen_pos] = cand[m - 1]
        m -= 1
        current = chosen

    return order, tie_arr[:tie_len].copy(), tie_offsets, -1


cdef int validate_loop(const long long[::1] xs, const long long[::1] ys, const int[::1] order,
                       int code, double p, double rel, bint strict, bint graphic,
                       const int[::1] indptr, const int[::1] indices,
                       unsigned char[::1] visited, int[::1] hops, int[::1] queue) noexcept nogil:
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t length = order.shape[0]
    cdef Py_ssize_t step, j, cnt
    cdef int current, chosen
    cdef long long ibest, ik, ich
    cdef double fbest, fk, fch

    for j in range(n):
        visited[j] = 0
    visited[order[0]] = 1
    for step in range(length - 1):
        current = order[step]
        chosen = order[step + 1]
        if graphic:
            bfs_fill(indptr, indices, current, hops, queue)
        if code == C_LP:
            fbest = INFINITY
            for j in range(n):
                if visited[j]:
                    continue
                fk = f_key(p, xs[j] - xs[current], ys[j] - ys[current])
                if fk < fbest:
                    fbest = fk
            fch = f_key(p, xs[chosen] - xs[current], ys[chosen] - ys[current])
            if not f_equal(fch, fbest, rel):
                return <int> step
            if strict:
                cnt = 0
                for j in range(n):
                    if visited[j]:
                        continue
                    if f_equal(f_key(p, xs[j] - xs[current], ys[j] - ys[current]), fbest, rel):
                        cnt += 1
                if cnt > 1:
                    return <int> step
        else:
            ibest = LLONG_MAX
            for j in range(n):
                if visited[j]:
                    continue
                ik = graph_key(hops, <int> j) if graphic else int_key(code, xs[j] - xs[current], ys[j] - ys[current])
                if ik < ibest:
                    ibest = ik
            ich = graph_key(hops, chosen) if graphic else int_key(code, xs[chosen] - xs[current], ys[chosen] - ys[current])
            if ich != ibest:
                return <int> step
            if strict:
                cnt = 0
                for j in range(n):
                    if visited[j]:
                        continue
                    ik = graph_key(hops, <int> j) if graphic else int_key(code, xs[j] - xs[current], ys[j] - ys[current])
                    if ik == ibest:
                        cnt += 1
                if cnt > 1:
                    return <int> step
        visited[chosen] = 1
    return -1


def nn_validate(xs_o, ys_o, order_o, int code, double p, double rel_tol,
                bint strict, indptr_o=None, indices_o=None):
    """First violating step of ``order``, or -1; argmin sets recomputed from scratch."""
    cdef const long long[::1] xs = np.ascontiguousarray(xs_o, dtype=np.int64)
    cdef const long long[::1] ys = np.ascontiguousarray(ys_o, dtype=np.int64)
    cdef const int[::1] order = np.ascontiguousarray(order_o, dtype=np.int32)
    cdef Py_ssize_t n = xs.shape[0]
    cdef bint graphic = code == C_GRAPHIC
    empty = np.empty(0, dtype=np.int32)
    cdef const int[::1] indptr = np.ascontiguousarray(indptr_o, dtype=np.int32) if graphic else empty
    cdef const int[::1] indices = np.ascontiguousarray(indices_o, dtype=np.int32) if graphic else empty

    visited_arr = np.zeros(n, dtype=np.uint8)
    dist_arr = np.empty(n if graphic else 0, dtype=np.int32)
    queue_arr = np.empty(n if graphic else 0, dtype=np.int32)
    cdef unsigned char[::1] visited = visited_arr
    cdef int[::1] hops = dist_arr
    cdef int[::1] queue = queue_arr

    cdef int fail
    with nogil:
        fail = validate_loop(xs, ys, order, code, p, rel_tol, strict, graphic,
                             indptr, indices, visited, hops, queue)
    return fail
