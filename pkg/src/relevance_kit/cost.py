"""Edge-cost construction for high-dimensional observations.

Three cost families turn an N x d data matrix into a symmetric N x N
matrix of nonnegative edge costs:

- :func:`gamma_cost` -- dimension-scaled gamma-norm of the coordinate
  differences, gamma in (0, 2].
- :func:`average_cost` -- absolute difference of the (scaled) coordinate
  sums; sensitive to mean shifts only.
- :func:`diff_augmented_cost` -- Euclidean cost augmented with the norms
  of each observation's successive-difference vector; sensitive to both
  mean and covariance changes.

:func:`validate_assumptions` checks the regularity conditions the
downstream tests rely on (positivity, symmetry, triangle inequality)
and reports violations without raising.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

__all__ = [
    "gamma_cost",
    "average_cost",
    "diff_augmented_cost",
    "validate_assumptions",
    "CostDiagnostics",
    "check_data_matrix",
    "check_cost_matrix",
]


def check_data_matrix(data) -> np.ndarray:
    """Validate and return an N x d data matrix as float64.

    Requires N >= 2 rows, d >= 1 columns, and finite entries.
    """
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"data must be 2-D (observations x features), got ndim={X.ndim}")
    n, d = X.shape
    if n < 2 or d < 1:
        raise ValueError(f"data must have at least 2 rows and 1 column, got shape {X.shape}")
    if not np.isfinite(X).all():
        bad = np.argwhere(~np.isfinite(X))[0]
        raise ValueError(f"data contains a non-finite entry at row {bad[0]}, column {bad[1]}")
    return X


def check_cost_matrix(costs) -> np.ndarray:
    """Validate basic shape requirements of a square cost matrix."""
    C = np.asarray(costs, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {C.shape}")
    if C.shape[0] < 2:
        raise ValueError("cost matrix needs at least 2 nodes")
    if not np.isfinite(C).all():
        raise ValueError("cost matrix contains non-finite entries")
    return C


def _finalize(condensed: np.ndarray, n: int) -> np.ndarray:
    """Expand condensed pairwise costs to a full symmetric matrix.

    Each unordered pair is computed once and mirrored, so symmetry is
    bit-exact and the diagonal is exactly zero.
    """
    C = squareform(condensed)
    C.setflags(write=False)
    return C


def gamma_cost(data, gamma: float) -> np.ndarray:
    """Dimension-scaled gamma-norm cost matrix.

    cost(t1, t2) = d**(-1/gamma) * (sum_q |X[t1,q] - X[t2,q]|**gamma)**(1/gamma)

    Parameters
    ----------
    data : array_like, shape (N, d)
        Observations as rows.
    gamma : float
        Norm order, must lie in (0, 2].  gamma = 2 gives the scaled
        Euclidean distance; values below 1 are accepted but the result
        may violate the triangle inequality (see
        :func:`validate_assumptions`).

    Returns
    -------
    ndarray, shape (N, N)
        Symmetric cost matrix with zero diagonal.
    """
    if not (0.0 < gamma <= 2.0):
        raise ValueError(f"gamma must lie in (0, 2], got {gamma}")
    X = check_data_matrix(data)
    n, d = X.shape
    if gamma == 2.0:
        condensed = pdist(X, "euclidean")
    elif gamma == 1.0:
        condensed = pdist(X, "cityblock")
    else:
        condensed = pdist(X, "minkowski", p=gamma)
    return _finalize(condensed * d ** (-1.0 / gamma), n)


def average_cost(data) -> np.ndarray:
    """Cost matrix from scaled coordinate sums.

    cost(t1, t2) = |sum_q X[t1,q] - sum_q X[t2,q]| / d

    Collapses each observation to its coordinate sum, so only mean
    shifts separate the samples.
    """
    X = check_data_matrix(data)
    n, d = X.shape
    sums = X.sum(axis=1) / d
    condensed = pdist(sums[:, None], "cityblock")
    return _finalize(condensed, n)


def diff_augmented_cost(data) -> np.ndarray:
    """Euclidean cost augmented with successive-difference norms.

    With Xdot[t] = (X[t,2]-X[t,1], ..., X[t,d]-X[t,d-1]),

    cost(t1, t2) = d**(-1/2) * sqrt(||X[t1]-X[t2]||**2
                                    + ||Xdot[t1]||**2 + ||Xdot[t2]||**2)

    The per-observation difference terms react to changes in the
    autocovariance structure, not just the mean.  Requires d >= 2.
    """
    X = check_data_matrix(data)
    n, d = X.shape
    if d < 2:
        raise ValueError(f"diff_augmented_cost needs at least 2 features, got d={d}")
    sq = pdist(X, "sqeuclidean")
    dot_sq = (np.diff(X, axis=1) ** 2).sum(axis=1)
    iu, ju = np.triu_indices(n, 1)
    condensed = np.sqrt((sq + dot_sq[iu] + dot_sq[ju]) / d)
    return _finalize(condensed, n)


@dataclass(frozen=True)
class CostDiagnostics:
    """Advisory report on cost-matrix regularity.

    Attributes list offending index pairs/triples (capped at
    ``max_listed`` each); the ``*_count`` fields always hold the full
    violation counts.
    """

    n: int
    positivity_violations: list = field(default_factory=list)
    symmetry_violations: list = field(default_factory=list)
    triangle_violations: list = field(default_factory=list)
    positivity_count: int = 0
    symmetry_count: int = 0
    triangle_count: int = 0

    @property
    def ok(self) -> bool:
        return (self.positivity_count + self.symmetry_count + self.triangle_count) == 0

    def summary(self) -> str:
        if self.ok:
            return f"cost matrix on {self.n} nodes: all regularity checks passed"
        return (
            f"cost matrix on {self.n} nodes: "
            f"{self.positivity_count} nonpositive off-diagonal entries, "
            f"{self.symmetry_count} asymmetric pairs, "
            f"{self.triangle_count} triangle-inequality violations"
        )


def validate_assumptions(
    costs,
    *,
    symmetry_tol: float = 1e-12,
    triangle_tol: float = 1e-9,
    max_listed: int = 100,
) -> CostDiagnostics:
    """Check positivity, symmetry, and the triangle inequality.

    The checks are diagnostic only: duplicate observations (zero cost)
    or a sub-1 gamma norm can legitimately trip them, and the path
    construction tolerates both.  Nothing is raised.

    Returns
    -------
    CostDiagnostics
        Violation lists (index pairs for positivity/symmetry, index
        triples ``(a, b, c)`` with cost(a,b) > cost(a,c) + cost(b,c)
        for the triangle check) plus total counts.
    """
    C = check_cost_matrix(costs)
    n = C.shape[0]

    iu, ju = np.triu_indices(n, 1)
    off = C[iu, ju]
    pos_mask = off <= 0.0
    pos_pairs = [(int(i), int(j)) for i, j in zip(iu[pos_mask], ju[pos_mask])]

    asym = np.abs(C - C.T)
    asym_mask = asym[iu, ju] > symmetry_tol
    asym_pairs = [(int(i), int(j)) for i, j in zip(iu[asym_mask], ju[asym_mask])]

    tri: list[tuple[int, int, int]] = []
    tri_count = 0
    # One intermediate node at a time keeps memory at O(N^2).
    for c in range(n):
        excess = C - (C[:, c][:, None] + C[c, :][None, :])
        bad = np.argwhere(excess > triangle_tol)
        for a, b in bad:
            if a == c or b == c or a >= b:
                continue
            tri_count += 1
            if len(tri) < max_listed:
                tri.append((int(a), int(b), int(c)))

    return CostDiagnostics(
        n=n,
        positivity_violations=pos_pairs[:max_listed],
        symmetry_violations=asym_pairs[:max_listed],
        triangle_violations=tri,
        positivity_count=len(pos_pairs),
        symmetry_count=len(asym_pairs),
        triangle_count=tri_count,
    )
