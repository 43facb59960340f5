"""Hot inner loops over bitmask-encoded subsets.

Every kernel has a numba implementation (``*_nb``) and a pure-numpy one
(``*_np``).  The public name picks one at import time: numba is used when it
is importable and ``SUBMP_DISABLE_NUMBA`` is not set to a truthy value.
Both paths must return identical results; the test-suite checks this.
"""

import os

import numpy as np

_CHUNK = 1 << 16


def _numba_requested():
    return os.environ.get("SUBMP_DISABLE_NUMBA", "").strip().lower() not in (
        "1",
        "true",
        "yes",
        "on",
    )


try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


USE_NUMBA = HAVE_NUMBA and _numba_requested()


# ---------------------------------------------------------------------------
# hyperedge cut:  sum of w(e) over edges that meet the set but are not inside it


def _ordered_sum(hit, weights):
    # edge by edge, so rounding matches the sequential numba loop exactly
    acc = np.zeros(hit.shape[0])
    for e in range(weights.shape[0]):
        acc += np.where(hit[:, e], weights[e], 0.0)
    return acc


def cut_values_np(masks, edge_masks, weights):
    out = np.empty(masks.shape[0], dtype=np.float64)
    if edge_masks.shape[0] == 0:
        out[:] = 0.0
        return out
    for lo in range(0, masks.shape[0], _CHUNK):
        block = masks[lo : lo + _CHUNK]
        inter = block[:, None] & edge_masks[None, :]
        crossing = (inter != 0) & (inter != edge_masks[None, :])
        out[lo : lo + _CHUNK] = _ordered_sum(crossing, weights)
    return out


@njit(cache=True)
def cut_values_nb(masks, edge_masks, weights):
    out = np.zeros(masks.shape[0], dtype=np.float64)
    zero = np.uint64(0)
    for a in range(masks.shape[0]):
        m = masks[a]
        s = 0.0
        for e in range(edge_masks.shape[0]):
            inter = m & edge_masks[e]
            if inter != zero and inter != edge_masks[e]:
                s += weights[e]
        out[a] = s
    return out


# ---------------------------------------------------------------------------
# hypergraph multiway-cut reduction:  sum of w(e) * [u_e in S and e not inside S]


def mc_reduced_values_np(masks, edge_masks, aux_masks, weights):
    out = np.empty(masks.shape[0], dtype=np.float64)
    if edge_masks.shape[0] == 0:
        out[:] = 0.0
        return out
    for lo in range(0, masks.shape[0], _CHUNK):
        block = masks[lo : lo + _CHUNK]
        has_aux = (block[:, None] & aux_masks[None, :]) != 0
        inside = (block[:, None] & edge_masks[None, :]) == edge_masks[None, :]
        out[lo : lo + _CHUNK] = _ordered_sum(has_aux & ~inside, weights)
    return out


@njit(cache=True)
def mc_reduced_values_nb(masks, edge_masks, aux_masks, weights):
    out = np.zeros(masks.shape[0], dtype=np.float64)
    zero = np.uint64(0)
    for a in range(masks.shape[0]):
        m = masks[a]
        s = 0.0
        for e in range(edge_masks.shape[0]):
            if (m & aux_masks[e]) != zero and (m & edge_masks[e]) != edge_masks[e]:
                s += weights[e]
        out[a] = s
    return out


# ---------------------------------------------------------------------------
# exhaustive brute force over assignments of free elements, f given as a table
#
# Assignments are enumerated in lexicographic order with the first free
# element as the most significant digit; the first strict minimum wins.


def assignment_parts(idx, free_bits, base_masks, k):
    """Part masks, shape (len(idx), k), for mixed-radix assignment indices."""
    m = free_bits.shape[0]
    parts = np.tile(base_masks, (idx.shape[0], 1))
    rem = idx.copy()
    for p in range(m - 1, -1, -1):
        digit = rem % k
        rem //= k
        parts[np.arange(idx.shape[0]), digit] |= free_bits[p]
    return parts


def decode_assignment(index, m, k):
    digits = np.zeros(m, dtype=np.int64)
    for p in range(m - 1, -1, -1):
        digits[p] = index % k
        index //= k
    return digits


def brute_force_table_np(table, free_bits, base_masks, k):
    m = free_bits.shape[0]
    total = k**m
    best = np.inf
    best_index = 0
    for lo in range(0, total, _CHUNK):
        idx = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        parts = assignment_parts(idx, free_bits, base_masks, k)
        costs = table[parts.astype(np.int64)].sum(axis=1)
        a = int(np.argmin(costs))
        if costs[a] < best:
            best = float(costs[a])
            best_index = lo + a
    return best, decode_assignment(best_index, m, k)


@njit(cache=True)
def brute_force_table_nb(table, free_bits, base_masks, k):
    m = free_bits.shape[0]
    digits = np.zeros(m, dtype=np.int64)
    best_digits = np.zeros(m, dtype=np.int64)
    parts = base_masks.copy()
    for p in range(m):
        parts[0] |= free_bits[p]
    best = np.inf
    while True:
        cost = 0.0
        for i in range(k):
            cost += table[np.int64(parts[i])]
        if cost < best:
            best = cost
            best_digits[:] = digits
        p = m - 1
        while p >= 0:
            old = digits[p]
            parts[old] &= ~free_bits[p]
            if old + 1 < k:
                digits[p] = old + 1
                parts[old + 1] |= free_bits[p]
                break
            digits[p] = 0
            parts[0] |= free_bits[p]
            p -= 1
        if p < 0:
            break
    return best, best_digits


# ---------------------------------------------------------------------------
# submodularity: f(A+v) - f(A) >= f(A+v+w) - f(A+w) for all A and v != w outside A
# returns (A, v, w) of the first violation in (v, w, A) order, or (-1, -1, -1)


def submodular_witness_np(table, n, tol):
    size = 1 << n
    allmasks = np.arange(size, dtype=np.int64)
    for v in range(n):
        bv = 1 << v
        for w in range(v + 1, n):
            bw = 1 << w
            a = allmasks[(allmasks & (bv | bw)) == 0]
            gap = table[a | bv] + table[a | bw] - table[a] - table[a | bv | bw]
            bad = np.nonzero(gap < -tol)[0]
            if bad.shape[0]:
                return int(a[bad[0]]), v, w
    return -1, -1, -1


@njit(cache=True)
def submodular_witness_nb(table, n, tol):
    size = 1 << n
    for v in range(n):
        bv = 1 << v
        for w in range(v + 1, n):
            bw = 1 << w
            for a in range(size):
                if a & (bv | bw):
                    continue
                gap = table[a | bv] + table[a | bw] - table[a] - table[a | bv | bw]
                if gap < -tol:
                    return a, v, w
    return -1, -1, -1


# ---------------------------------------------------------------------------
# grid search over two free rows: min over point pairs (a, b) of
#   sum_i col_tables[i, pts[a, i], pts[b, i]]


def grid_pair_min_np(col_tables, pts):
    k = pts.shape[1]
    best = np.inf
    best_a = best_b = 0
    step = max(1, _CHUNK // max(1, pts.shape[0]))
    for lo in range(0, pts.shape[0], step):
        block = pts[lo : lo + step]
        total = np.zeros((block.shape[0], pts.shape[0]))
        for i in range(k):
            total += col_tables[i][block[:, i][:, None], pts[:, i][None, :]]
        flat = int(np.argmin(total))
        a, b = divmod(flat, pts.shape[0])
        if total[a, b] < best:
            best = float(total[a, b])
            best_a, best_b = lo + a, b
    return best, best_a, best_b


@njit(cache=True)
def grid_pair_min_nb(col_tables, pts):
    k = pts.shape[1]
    best = np.inf
    best_a = 0
    best_b = 0
    for a in range(pts.shape[0]):
        for b in range(pts.shape[0]):
            s = 0.0
            for i in range(k):
                s += col_tables[i, pts[a, i], pts[b, i]]
            if s < best:
                best = s
                best_a = a
                best_b = b
    return best, best_a, best_b


if USE_NUMBA:
    cut_values = cut_values_nb
    mc_reduced_values = mc_reduced_values_nb
    brute_force_table = brute_force_table_nb
    submodular_witness = submodular_witness_nb
    grid_pair_min = grid_pair_min_nb
else:
    cut_values = cut_values_np
    mc_reduced_values = mc_reduced_values_np
    brute_force_table = brute_force_table_np
    submodular_witness = submodular_witness_np
    grid_pair_min = grid_pair_min_np
