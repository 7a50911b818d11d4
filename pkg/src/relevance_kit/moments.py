"""Permutation-null moments and covariances of path edge counts.

Under uniform permutation of group labels over a fixed path, the
between- and within-group edge counts have closed-form first and second
moments depending only on the group sizes.  This module provides those
formulas, the covariance dispatcher used by the test statistics, and an
exhaustive enumeration oracle (:func:`enumerate_null_moments`) that
recomputes every moment exactly for small N by iterating over all
distinct label arrangements.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .counts import GroupAssignment

__all__ = [
    "MomentContext",
    "mean_between",
    "mean_within",
    "second_moment_between",
    "second_moment_within",
    "cross_moment_disjoint",
    "cross_moment_shared",
    "cross_moment_within_pairs",
    "var_between",
    "cov_counts",
    "EnumeratedMoments",
    "enumerate_null_moments",
]

_ENUM_MAX = 8


def _check_sizes(N: int, *sizes: int) -> None:
    if int(N) != N or N < 2:
        raise ValueError(f"total N must be an integer >= 2, got {N}")
    for n in sizes:
        if int(n) != n or n < 1:
            raise ValueError(f"group sizes must be integers >= 1, got {n}")
    if sum(sizes) > N:
        raise ValueError(f"group sizes {sizes} exceed total N={N}")


@dataclass(frozen=True)
class MomentContext:
    """Group sizes n_1..n_k and their total N."""

    sizes: np.ndarray
    total: int = field(init=False)

    def __post_init__(self):
        sizes = np.asarray(self.sizes, dtype=np.int64)
        if sizes.ndim != 1 or sizes.size < 1:
            raise ValueError("sizes must be a non-empty 1-D sequence")
        N = int(sizes.sum())
        _check_sizes(N, *sizes.tolist())
        sizes.setflags(write=False)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "total", N)

    @classmethod
    def from_assignment(cls, assignment: GroupAssignment) -> "MomentContext":
        return cls(assignment.sizes)

    @property
    def n_groups(self) -> int:
        return int(self.sizes.size)


def mean_between(n1: int, n2: int, N: int) -> float:
    """E S(G1, G2) for disjoint groups of sizes n1, n2."""
    _check_sizes(N, n1, n2)
    return 2.0 * n1 * n2 / N


def mean_within(n1: int, N: int) -> float:
    """E S(G1, G1)."""
    _check_sizes(N, n1)
    return n1 * (n1 - 1.0) / N


def second_moment_between(n1: int, n2: int, N: int) -> float:
    """E S(G1, G2)^2."""
    _check_sizes(N, n1, n2)
    NN1 = N * (N - 1.0)
    return (
        2.0 * n1 * n2 / N
        + 2.0 * n1 * n2 * (n1 + n2 - 2.0) / NN1
        + 4.0 * n1 * (n1 - 1.0) * n2 * (n2 - 1.0) / NN1
    )


def second_moment_within(n1: int, N: int) -> float:
    """E S(G1, G1)^2."""
    _check_sizes(N, n1)
    NN1 = N * (N - 1.0)
    a = n1 * (n1 - 1.0)
    return a / N + 2.0 * a * (n1 - 2.0) / NN1 + a * (n1 - 2.0) * (n1 - 3.0) / NN1


def cross_moment_disjoint(n1: int, n2: int, n3: int, n4: int, N: int) -> float:
    """E {S(G1, G2) * S(G3, G4)} for four distinct groups."""
    _check_sizes(N, n1, n2, n3, n4)
    return 4.0 * n1 * n2 * n3 * n4 / (N * (N - 1.0))


def cross_moment_shared(n1: int, n2: int, n3: int, N: int) -> float:
    """E {S(G1, G2) * S(G2, G3)} — the shared group is the middle argument."""
    _check_sizes(N, n1, n2, n3)
    return 2.0 * n1 * n3 * n2 * (2.0 * n2 - 1.0) / (N * (N - 1.0))


def cross_moment_within_pairs(n1: int, n2: int, N: int) -> float:
    """E {S(G1, G1) * S(G2, G2)} for two distinct groups."""
    _check_sizes(N, n1, n2)
    return n1 * (n1 - 1.0) * n2 * (n2 - 1.0) / (N * (N - 1.0))


def var_between(n1: int, n2: int, N: int) -> float:
    """Var S(G1, G2); clipped at 0 against roundoff."""
    m = mean_between(n1, n2, N)
    return max(second_moment_between(n1, n2, N) - m * m, 0.0)


def cov_counts(pair1, pair2, ctx: MomentContext) -> float:
    """Null covariance of two between-group counts S(pair1), S(pair2).

    Pairs are 1-based (m, l) with m < l.  Dispatches on how many groups
    the two pairs share: both (variance), one (shared-group cross
    moment), or none (disjoint cross moment).
    """
    k = ctx.n_groups
    pairs = []
    for p in (pair1, pair2):
        m, l = int(p[0]), int(p[1])
        if not (1 <= m < l <= k):
            raise ValueError(f"pair {p!r} is not an ordered group pair within 1..{k}")
        pairs.append((m, l))
    (m1, l1), (m2, l2) = pairs
    n = ctx.sizes
    N = ctx.total
    shared = set((m1, l1)) & set((m2, l2))
    if len(shared) == 2:
        return var_between(n[m1 - 1], n[l1 - 1], N)
    if len(shared) == 1:
        s = shared.pop()
        o1 = m1 + l1 - s
        o2 = m2 + l2 - s
        cross = cross_moment_shared(n[o1 - 1], n[s - 1], n[o2 - 1], N)
        return cross - mean_between(n[o1 - 1], n[s - 1], N) * mean_between(n[s - 1], n[o2 - 1], N)
    cross = cross_moment_disjoint(n[m1 - 1], n[l1 - 1], n[m2 - 1], n[l2 - 1], N)
    return cross - mean_between(n[m1 - 1], n[l1 - 1], N) * mean_between(n[m2 - 1], n[l2 - 1], N)


@dataclass(frozen=True)
class EnumeratedMoments:
    """Exact enumeration moments of every pairwise count.

    ``mean``/``second`` are symmetric k x k tables indexed by 0-based
    group ids; ``product_moment`` returns E{S(pair1) * S(pair2)} for any
    two (possibly within, m == l) pairs.
    """

    mean: np.ndarray
    second: np.ndarray
    _products: np.ndarray
    _slot: np.ndarray
    n_arrangements: int

    def mean_of(self, m: int, l: int) -> float:
        return float(self.mean[m - 1, l - 1])

    def second_moment_of(self, m: int, l: int) -> float:
        return float(self.second[m - 1, l - 1])

    def product_moment(self, pair1, pair2) -> float:
        s1 = self._slot[min(pair1) - 1, max(pair1) - 1]
        s2 = self._slot[min(pair2) - 1, max(pair2) - 1]
        return float(self._products[s1, s2])

    def cov_of(self, pair1, pair2) -> float:
        return self.product_moment(pair1, pair2) - self.mean_of(*pair1) * self.mean_of(*pair2)


def enumerate_null_moments(assignment: GroupAssignment) -> EnumeratedMoments:
    """Exact null moments by exhausting all distinct label arrangements.

    Counts along a path depend only on the label sequence, so the
    arrangement space is the N!/(n_1!...n_k!) distinct multiset
    permutations rather than all N! node orders.  Guarded to N <= 8.
    """
    N = assignment.n_total
    if N > _ENUM_MAX:
        raise ValueError(f"enumeration oracle is limited to N <= {_ENUM_MAX}, got N={N}")
    k = assignment.n_groups
    arrangements = np.array(
        sorted(set(itertools.permutations(assignment.labels.tolist()))), dtype=np.int64
    )
    M = arrangements.shape[0]

    # Slot every unordered pair (incl. within, m == l) into one vector index.
    iu, ju = np.triu_indices(k)
    slot = np.zeros((k, k), dtype=np.int64)
    slot[iu, ju] = np.arange(iu.size)
    slot += np.triu(slot, 1).T

    a = arrangements[:, :-1] - 1
    b = arrangements[:, 1:] - 1
    pos = slot[np.minimum(a, b), np.maximum(a, b)]
    vec = np.zeros((M, iu.size), dtype=np.int64)
    np.add.at(vec, (np.arange(M)[:, None], pos), 1)

    mean_vec = vec.mean(axis=0)
    products = (vec.T @ vec) / M

    mean = np.zeros((k, k))
    mean[iu, ju] = mean_vec
    mean += np.triu(mean, 1).T
    second = np.zeros((k, k))
    second[iu, ju] = np.diag(products)[slot[iu, ju]]
    second += np.triu(second, 1).T
    for arr in (mean, second, products, slot):
        arr.setflags(write=False)
    return EnumeratedMoments(mean, second, products, slot, M)
