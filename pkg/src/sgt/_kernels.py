"""Numba hot loops shared by the tree and sampling code.

Everything here operates on plain int64/float64 arrays; object-level wrappers
live in the public modules.  Set NUMBA_DISABLE_JIT=1 to run the pure-Python
versions (slow, for debugging).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def ladder_violation(deg):
    """Index of the first prefix where sum(d_i - 1) drops below 0, or -1.

    A valid outdegree encoding keeps all proper prefix sums >= 0; the full sum
    is -1 and is not checked here.
    """
    n = len(deg)
    c = 0
    for i in range(n - 1):
        c += deg[i] - 1
        if c < 0:
            return i
    return -1


@njit(cache=True)
def cycle_start(y):
    """Start offset of the unique rotation of ``y`` satisfying the ladder rule.

    ``y`` must sum to len(y) - 1.  The valid rotation starts right after the
    first position where the walk sum(y_i - 1) attains its minimum.
    """
    n = len(y)
    best = np.int64(1) << 62
    besti = -1
    c = np.int64(0)
    for i in range(n):
        c += y[i] - 1
        if c < best:
            best = c
            besti = i
    return (besti + 1) % n


@njit(cache=True)
def tree_arrays(deg):
    """parents, depths and subtree sizes of a DFS outdegree sequence."""
    n = len(deg)
    parent = np.empty(n, dtype=np.int64)
    depth = np.empty(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    parent[0] = -1
    depth[0] = 0
    stack_v = np.empty(n, dtype=np.int64)
    stack_c = np.empty(n, dtype=np.int64)
    top = 0
    stack_v[0] = 0
    stack_c[0] = deg[0]
    for i in range(1, n):
        while stack_c[top] == 0:
            top -= 1
        p = stack_v[top]
        stack_c[top] -= 1
        parent[i] = p
        depth[i] = depth[p] + 1
        top += 1
        stack_v[top] = i
        stack_c[top] = deg[i]
    for i in range(n - 1, 0, -1):
        size[parent[i]] += size[i]
    return parent, depth, size


@njit(cache=True)
def split_draw(sizes, left, right, leafpos, row_s, row_l, row_r, efac, colmat,
               m_total, u, out):
    """One draw of (Y_0..Y_{n-1}) iid-conditioned on sum == m_total.

    Walks the balanced split tree: at each internal node the left-half sum is
    drawn by inverse CDF over k -> S_L(k) * S_R(m - k), normalized against the
    node's own column value (efac undoes the per-column power-of-two scaling).
    Nodes are listed parent-before-child; size-1 nodes write their sum to
    ``out`` at ``leafpos``.
    """
    nn = len(sizes)
    sums = np.empty(nn, dtype=np.int64)
    sums[0] = m_total
    ui = 0
    for node in range(nn):
        m = sums[node]
        if sizes[node] == 1:
            out[leafpos[node]] = m
            continue
        col_l = colmat[row_l[node]]
        col_r = colmat[row_r[node]]
        target = u[ui] * colmat[row_s[node], m] * efac[node]
        ui += 1
        acc = 0.0
        k = 0
        while k < m:
            acc += col_l[k] * col_r[m - k]
            if acc >= target:
                break
            k += 1
        sums[left[node]] = k
        sums[right[node]] = m - k
    return out


@njit(cache=True)
def sequential_draw(base, cols, col_exp, n, u, out):
    """One draw of (Y_0..Y_{n-1}) from a full column table, slot by slot.

    Slot i is drawn from pmf(k) proportional to base[k] * cols[s, m-k] with s
    slots and sum m remaining; the normalizer is read off cols[s+1, m].
    """
    m = n - 1
    for i in range(n):
        s = n - 1 - i
        target = u[i] * cols[s + 1, m] * 2.0 ** (col_exp[s + 1] - col_exp[s])
        acc = 0.0
        k = 0
        while k < m:
            acc += base[k] * cols[s, m - k]
            if acc >= target:
                break
            k += 1
        out[i] = k
        m -= k
    return out


@njit(cache=True)
def ancestor_with_large_degree(deg, parent, v, omega):
    """(ancestor index, distance) for the youngest proper ancestor of v with
    outdegree > omega, or (-1, steps-to-root+1) when none exists."""
    a = parent[v]
    k = 1
    while a >= 0:
        if deg[a] > omega:
            return a, k
        a = parent[a]
        k += 1
    return -1, k
