"""Relevance analysis: standardized z-scores of between-sample counts.

Each z-score centers and scales a between-group edge count by its
permutation-null moments.  Large negative values mean the path crosses
between the two samples far less than chance — the samples differ;
values near zero (or positive) indicate mixing, i.e. the samples are
mutually relevant.  Unions of samples are compared by merging them into
two pseudo-groups and standardizing the between-union count with the
merged sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .counts import GroupAssignment, count_between_unions, count_edges
from .moments import MomentContext, mean_between, var_between
from .shp import check_path

__all__ = ["RelevanceReport", "z_score", "combined_z_score", "relevance_report"]


def z_score(m: int, l: int, table, ctx: MomentContext) -> float:
    """Standardized between-count for groups m and l (1-based)."""
    k = ctx.n_groups
    if not (1 <= m <= k and 1 <= l <= k) or m == l:
        raise ValueError(f"need two distinct group ids in 1..{k}, got ({m}, {l})")
    table = np.asarray(table)
    if table.shape != (k, k):
        raise ValueError(f"count table shape {table.shape} does not match k={k}")
    n, N = ctx.sizes, ctx.total
    var = var_between(n[m - 1], n[l - 1], N)
    if var <= 0.0:
        raise ValueError(f"null variance of pair ({m},{l}) is zero; z-score undefined")
    return float((table[m - 1, l - 1] - mean_between(n[m - 1], n[l - 1], N)) / var ** 0.5)


def _check_subsets(A1, A2, k: int) -> tuple[list[int], list[int]]:
    a1 = sorted(set(int(g) for g in A1))
    a2 = sorted(set(int(g) for g in A2))
    if not a1 or not a2:
        raise ValueError("both subsets must be non-empty")
    if set(a1) & set(a2):
        raise ValueError(f"subsets must be disjoint, got {a1} and {a2}")
    for g in a1 + a2:
        if not (1 <= g <= k):
            raise ValueError(f"group id {g} outside 1..{k}")
    return a1, a2


def combined_z_score(A1, A2, path, groups: GroupAssignment, ctx: MomentContext) -> tuple[float, float]:
    """Standardized count between two unions of samples.

    The unions are merged into pseudo-groups whose sizes feed the null
    mean and variance, so the scaling reflects the merged comparison
    rather than a sum of pairwise terms.  Returns (signed z, |z|): the
    sign distinguishes fewer crossings than chance (negative, samples
    differ) from more (positive, samples mix).
    """
    a1, a2 = _check_subsets(A1, A2, ctx.n_groups)
    path = check_path(path, groups.n_total)
    table = count_edges(path, groups)
    count = count_between_unions(table, a1, a2)
    n, N = ctx.sizes, ctx.total
    na = int(n[[g - 1 for g in a1]].sum())
    nb = int(n[[g - 1 for g in a2]].sum())
    var = var_between(na, nb, N)
    if var <= 0.0:
        raise ValueError("null variance of the merged comparison is zero")
    z = float((count - mean_between(na, nb, N)) / var ** 0.5)
    return z, abs(z)


@dataclass(frozen=True)
class RelevanceReport:
    """Pairwise z grid plus any combined-union entries.

    ``z`` is symmetric with NaN on the diagonal (a group against itself
    carries no between-count).  ``combined`` maps (tuple(A1), tuple(A2))
    to the signed z of the union comparison.
    """

    z: np.ndarray
    combined: dict[tuple[tuple[int, ...], tuple[int, ...]], float]

    @property
    def k(self) -> int:
        return int(self.z.shape[0])

    def z_of(self, m: int, l: int) -> float:
        return float(self.z[m - 1, l - 1])


def relevance_report(path, groups: GroupAssignment, combined=None) -> RelevanceReport:
    """Full pairwise z grid for one path, with optional union entries.

    Parameters
    ----------
    combined : iterable of (A1, A2), optional
        Pairs of disjoint group-id collections to compare as unions.
    """
    ctx = MomentContext.from_assignment(groups)
    k = ctx.n_groups
    if k < 2:
        raise ValueError("relevance analysis needs at least 2 groups")
    path = check_path(path, groups.n_total)
    table = count_edges(path, groups)
    z = np.full((k, k), np.nan)
    for m in range(1, k + 1):
        for l in range(m + 1, k + 1):
            z[m - 1, l - 1] = z[l - 1, m - 1] = z_score(m, l, table, ctx)
    entries: dict = {}
    for A1, A2 in combined or ():
        a1, a2 = _check_subsets(A1, A2, k)
        signed, _ = combined_z_score(a1, a2, path, groups, ctx)
        entries[(tuple(a1), tuple(a2))] = signed
    z.setflags(write=False)
    return RelevanceReport(z=z, combined=entries)
