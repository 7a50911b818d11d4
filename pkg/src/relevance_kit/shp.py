"""Approximate shortest Hamiltonian path construction.

Finding the exact minimum-cost Hamiltonian path is NP-hard, so the main
entry point :func:`approximate_shp` uses a greedy sorted-edge heuristic:
edges are scanned in nondecreasing cost order and admitted whenever they
neither close a cycle nor push a vertex degree above 2, stopping once
N - 1 edges are in place.  :func:`brute_force_shp` solves small
instances exactly and serves as a quality oracle in the tests.
"""

from __future__ import annotations

import itertools

import numpy as np

from .cost import check_cost_matrix

__all__ = ["approximate_shp", "brute_force_shp", "path_cost", "check_path"]

_BRUTE_FORCE_MAX = 10


def check_path(path, n: int) -> np.ndarray:
    """Validate that ``path`` is a permutation of 0..n-1."""
    p = np.asarray(path, dtype=np.int64)
    if p.ndim != 1 or p.size != n:
        raise ValueError(f"path must be a 1-D sequence of length {n}, got shape {p.shape}")
    if not np.array_equal(np.sort(p), np.arange(n)):
        raise ValueError("path must visit every node index 0..n-1 exactly once")
    return p


def _sorted_edges(C: np.ndarray):
    """All unordered edges ordered by (cost, min index, max index)."""
    n = C.shape[0]
    iu, ju = np.triu_indices(n, 1)
    order = np.lexsort((ju, iu, C[iu, ju]))
    return iu[order], ju[order]


def approximate_shp(costs) -> np.ndarray:
    """Greedy sorted-edge approximation of the shortest Hamiltonian path.

    Equal-cost edges are broken lexicographically by (min index, max
    index), so the result is deterministic.  Cycle detection uses a
    union-find structure; degrees are tracked per vertex.

    Returns
    -------
    ndarray, shape (N,)
        Node order of the constructed path, oriented to start at the
        endpoint with the smaller index.
    """
    C = check_cost_matrix(costs)
    n = C.shape[0]
    us, vs = _sorted_edges(C)

    parent = np.arange(n)
    degree = np.zeros(n, dtype=np.int64)
    adjacency: list[list[int]] = [[] for _ in range(n)]

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:  # path compression
            parent[x], x = root, parent[x]
        return root

    selected = 0
    for u, v in zip(us, vs):
        if degree[u] >= 2 or degree[v] >= 2:
            continue
        ru, rv = find(u), find(v)
        if ru == rv:
            continue  # would close a cycle
        parent[ru] = rv
        degree[u] += 1
        degree[v] += 1
        adjacency[u].append(v)
        adjacency[v].append(u)
        selected += 1
        if selected == n - 1:
            break

    endpoints = np.flatnonzero(degree <= 1)
    start = int(endpoints.min())
    order = np.empty(n, dtype=np.int64)
    order[0] = start
    prev = -1
    node = start
    for i in range(1, n):
        nxt = adjacency[node][0] if adjacency[node][0] != prev else adjacency[node][1]
        order[i] = nxt
        prev, node = node, nxt
    order.setflags(write=False)
    return order


def _half_permutations(n: int) -> np.ndarray:
    """All orientations with first < last node, in lexicographic order.

    A path and its reversal carry the same cost, so only the
    canonically oriented half is enumerated.
    """
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int8)
    return perms[perms[:, 0] < perms[:, -1]]


# Permutation tables are expensive to build at N=9..10; keep them around.
_PERM_CACHE: dict[int, np.ndarray] = {}


def brute_force_shp(costs) -> np.ndarray:
    """Exact shortest Hamiltonian path by exhaustive enumeration.

    Guarded to N <= 10; cost ties are broken by the lexicographically
    smallest node order.
    """
    C = check_cost_matrix(costs)
    n = C.shape[0]
    if n > _BRUTE_FORCE_MAX:
        raise ValueError(f"brute_force_shp is limited to N <= {_BRUTE_FORCE_MAX}, got N={n}")
    if n == 2:
        return np.array([0, 1], dtype=np.int64)
    if n not in _PERM_CACHE:
        _PERM_CACHE[n] = _half_permutations(n)
    perms = _PERM_CACHE[n]
    totals = C[perms[:, :-1].astype(np.int64), perms[:, 1:].astype(np.int64)].sum(axis=1)
    best = int(np.argmin(totals))  # first occurrence = lexicographically smallest
    return perms[best].astype(np.int64)


def path_cost(path, costs) -> float:
    """Total cost along consecutive path edges."""
    C = check_cost_matrix(costs)
    p = check_path(path, C.shape[0])
    return float(C[p[:-1], p[1:]].sum())
