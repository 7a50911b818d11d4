"""Between-sample edge counts along a Hamiltonian path.

Given a path over the pooled observations and a group label per node,
``count_edges`` tabulates, for every pair of groups (m, l), the number
of consecutive path edges whose endpoints belong to groups m and l.
Diagonal entries count within-group edges.  The table is symmetric and
its entries over unordered pairs sum to N - 1, one per path edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .shp import check_path

__all__ = ["GroupAssignment", "count_edges", "count_between_unions"]


@dataclass(frozen=True)
class GroupAssignment:
    """Dense 1-based group labels for N pooled observations.

    Attributes
    ----------
    labels : ndarray, shape (N,)
        Group id per observation, values in 1..k.
    sizes : ndarray, shape (k,)
        Observations per group; all entries >= 1.
    """

    labels: np.ndarray
    sizes: np.ndarray = field(init=False)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size < 2:
            raise ValueError("labels must be a 1-D sequence of at least 2 group ids")
        k = int(labels.max(initial=0))
        if labels.min(initial=1) < 1 or k < 1:
            raise ValueError("group ids must be integers >= 1")
        sizes = np.bincount(labels, minlength=k + 1)[1:]
        if (sizes == 0).any():
            missing = (np.flatnonzero(sizes == 0) + 1).tolist()
            raise ValueError(f"group ids must be dense 1..k; missing {missing}")
        labels.setflags(write=False)
        sizes.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def from_labels(cls, raw) -> "GroupAssignment":
        """Map arbitrary hashable labels to dense ids 1..k.

        Ids are assigned in order of first appearance, so the mapping is
        reproducible from the input ordering alone.
        """
        raw = list(raw)
        mapping: dict = {}
        dense = np.empty(len(raw), dtype=np.int64)
        for i, lab in enumerate(raw):
            if lab not in mapping:
                mapping[lab] = len(mapping) + 1
            dense[i] = mapping[lab]
        return cls(dense)

    @property
    def n_groups(self) -> int:
        return int(self.sizes.size)

    @property
    def n_total(self) -> int:
        return int(self.labels.size)


def count_edges(path, assignment: GroupAssignment) -> np.ndarray:
    """Symmetric k x k table of path-edge counts by endpoint groups.

    Entry (m-1, l-1) is the number of path edges with one endpoint in
    group m and the other in group l; within-group edges land on the
    diagonal.
    """
    path = check_path(path, assignment.n_total)
    k = assignment.n_groups
    a = assignment.labels[path[:-1]] - 1
    b = assignment.labels[path[1:]] - 1
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    table = np.zeros((k, k), dtype=np.int64)
    np.add.at(table, (lo, hi), 1)
    table += np.triu(table, 1).T
    table.setflags(write=False)
    return table


def count_between_unions(table, groups_a, groups_b) -> int:
    """Edges joining the union of ``groups_a`` to the union of ``groups_b``.

    The two unions must be disjoint; group ids are 1-based.
    """
    table = np.asarray(table)
    a = np.asarray(sorted(set(int(g) for g in groups_a)), dtype=np.int64)
    b = np.asarray(sorted(set(int(g) for g in groups_b)), dtype=np.int64)
    if a.size == 0 or b.size == 0:
        raise ValueError("both group collections must be non-empty")
    if np.intersect1d(a, b).size:
        raise ValueError("group collections must be disjoint")
    k = table.shape[0]
    for g in np.concatenate([a, b]):
        if g < 1 or g > k:
            raise ValueError(f"group id {g} outside 1..{k}")
    return int(table[np.ix_(a - 1, b - 1)].sum())
