"""Hypothesis tests on between-group edge counts.

Two one-sided tests share the permutation-null moments: the weighted-sum
test aggregates all between-group counts into a single asymptotically
normal statistic, and the minimum test takes the smallest weighted
centered count, whose null tail is a multivariate-normal orthant
probability.  That orthant probability is computed natively by
:func:`mvn_upper_tail`, a quasi-Monte-Carlo integrator using the
separation-of-variables transform of Genz (reordered Cholesky plus a
randomized Richtmyer lattice).  :func:`permutation_pvalue` offers an
exact-in-the-limit Monte-Carlo fallback that holds the path fixed and
re-draws label arrangements.

Both tests reject for small statistics: under a location or scale
alternative the path crosses between samples less often than permutation
chance predicts.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtr, ndtri
from scipy.stats import norm

from .counts import GroupAssignment, count_edges
from .moments import MomentContext, cov_counts, mean_between, var_between
from .shp import check_path

__all__ = [
    "PairIndexer",
    "pair_index",
    "pair_unindex",
    "WeightMatrix",
    "TestResult",
    "weighted_sum_statistic",
    "weighted_sum_test",
    "minimum_statistic",
    "minimum_test",
    "build_sigma",
    "mvn_upper_tail",
    "permutation_pvalue",
]

_MVN_SEED = 20210802  # fixed default so every report is reproducible


def pair_index(i: int, j: int, k: int) -> int:
    """1-based linear index L(i, j) of the group pair (i, j), i < j.

    Pairs are laid out row-major over the strict upper triangle:
    (1,2), (1,3), ..., (1,k), (2,3), ..., (k-1,k).
    """
    if not (1 <= i < j <= k):
        raise ValueError(f"need 1 <= i < j <= k, got i={i}, j={j}, k={k}")
    return (j - i) + (2 * k - i) * (i - 1) // 2


def pair_unindex(l: int, k: int) -> tuple[int, int]:
    """Inverse of :func:`pair_index`: the unique (i, j) with L(i, j) = l."""
    total = k * (k - 1) // 2
    if not (1 <= l <= total):
        raise ValueError(f"need 1 <= l <= {total} for k={k}, got {l}")
    i = 1
    while l > k - i:
        l -= k - i
        i += 1
    return i, i + l


@dataclass(frozen=True)
class PairIndexer:
    """Bijection between group pairs (i < j) and linear indices 1..k(k-1)/2."""

    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"need at least 2 groups, got k={self.k}")

    @property
    def n_pairs(self) -> int:
        return self.k * (self.k - 1) // 2

    def index(self, i: int, j: int) -> int:
        return pair_index(i, j, self.k)

    def unindex(self, l: int) -> tuple[int, int]:
        return pair_unindex(l, self.k)

    def pairs(self) -> list[tuple[int, int]]:
        """All pairs in linear-index order."""
        return [self.unindex(l) for l in range(1, self.n_pairs + 1)]


@dataclass(frozen=True)
class WeightMatrix:
    """Symmetric k x k nonnegative weights for between-group pairs.

    The diagonal is unused and stored as zero.  At least one
    off-diagonal weight must be positive.  Zero weights exclude a pair
    from both statistics, which is how subsample analyses focus on a
    few comparisons of interest.
    """

    grid: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.grid, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 2:
            raise ValueError(f"weights must be a k x k grid with k >= 2, got shape {w.shape}")
        if not np.isfinite(w).all() or (w < 0).any():
            raise ValueError("weights must be finite and nonnegative")
        if np.abs(w - w.T).max() > 1e-12:
            raise ValueError("weight grid must be symmetric")
        w = (w + w.T) / 2.0
        np.fill_diagonal(w, 0.0)
        if not (w > 0).any():
            raise ValueError("at least one off-diagonal weight must be positive")
        w.setflags(write=False)
        object.__setattr__(self, "grid", w)

    @property
    def k(self) -> int:
        return int(self.grid.shape[0])

    @classmethod
    def default(cls, ctx: MomentContext) -> "WeightMatrix":
        """Inverse null standard deviation per pair: w = Var(S)^(-1/2)."""
        k = ctx.n_groups
        n, N = ctx.sizes, ctx.total
        w = np.zeros((k, k))
        for i in range(k):
            for j in range(i + 1, k):
                v = var_between(n[i], n[j], N)
                if v <= 0.0:
                    raise ValueError(
                        f"null variance of pair ({i + 1},{j + 1}) is zero; "
                        "default weights undefined"
                    )
                w[i, j] = w[j, i] = v ** -0.5
        return cls(w)

    @classmethod
    def unit(cls, k: int) -> "WeightMatrix":
        w = np.ones((k, k))
        return cls(w)

    def with_zeroed_pairs(self, pairs) -> "WeightMatrix":
        """Copy with the listed 1-based (m, l) pairs set to zero weight."""
        w = np.array(self.grid)
        for m, l in pairs:
            m, l = int(m), int(l)
            if not (1 <= m <= self.k and 1 <= l <= self.k and m != l):
                raise ValueError(f"invalid pair ({m},{l}) for k={self.k}")
            w[m - 1, l - 1] = w[l - 1, m - 1] = 0.0
        return WeightMatrix(w)

    def vector(self) -> np.ndarray:
        """Weights flattened in linear pair-index order."""
        k = self.k
        iu, ju = np.triu_indices(k, 1)
        return self.grid[iu, ju]


@dataclass(frozen=True)
class TestResult:
    """Outcome of one hypothesis test.

    ``null_mean``/``null_sd`` are populated for the weighted-sum test
    only; the minimum test's null is not a single normal.
    """

    statistic: float
    p_value: float
    critical_value: float
    reject: bool
    method: str
    alpha: float
    null_mean: Optional[float] = None
    null_sd: Optional[float] = None

    def __post_init__(self):
        if not (0.0 <= self.p_value <= 1.0):
            raise ValueError(f"p_value {self.p_value} outside [0, 1]")


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return alpha


def _warn_singletons(ctx: MomentContext) -> None:
    if (ctx.sizes == 1).any():
        warnings.warn(
            "some groups have a single observation; asymptotic approximations "
            "are unreliable at that size — consider permutation_pvalue",
            RuntimeWarning,
            stacklevel=3,
        )


def _check_table(table, k: int) -> np.ndarray:
    t = np.asarray(table, dtype=np.float64)
    if t.shape != (k, k):
        raise ValueError(f"count table shape {t.shape} does not match k={k}")
    return t


def weighted_sum_statistic(table, w: WeightMatrix) -> float:
    """Sum over pairs m < l of w[m][l] * counts[m][l]."""
    t = _check_table(table, w.k)
    iu, ju = np.triu_indices(w.k, 1)
    return float((w.grid[iu, ju] * t[iu, ju]).sum())


def build_sigma(ctx: MomentContext) -> np.ndarray:
    """Null covariance matrix of all between-group counts.

    Entry (l1-1, l2-1) is the covariance of S(pair l1) and S(pair l2)
    in linear pair-index order; exactly symmetric by construction.
    """
    idx = PairIndexer(ctx.n_groups)
    K = idx.n_pairs
    pairs = idx.pairs()
    sigma = np.zeros((K, K))
    for a in range(K):
        for b in range(a, K):
            sigma[a, b] = sigma[b, a] = cov_counts(pairs[a], pairs[b], ctx)
    return sigma


def _null_mean_vector(ctx: MomentContext) -> np.ndarray:
    n, N = ctx.sizes, ctx.total
    return np.array([mean_between(n[i - 1], n[j - 1], N) for i, j in PairIndexer(ctx.n_groups).pairs()])


def weighted_sum_test(table, w: WeightMatrix, ctx: MomentContext, alpha: float = 0.05) -> TestResult:
    """One-sided lower-tail test on the weighted sum of between counts.

    The null mean and variance come from the closed-form moments (the
    variance is the full quadratic form over the pair covariance
    matrix, not a sum of marginal variances).  Rejects when the
    statistic falls below ``null_mean - z_alpha * null_sd``.
    """
    alpha = _check_alpha(alpha)
    if ctx.n_groups != w.k:
        raise ValueError(f"weight grid is {w.k} x {w.k} but context has k={ctx.n_groups}")
    _warn_singletons(ctx)
    stat = weighted_sum_statistic(table, w)
    wvec = w.vector()
    null_mean = float(wvec @ _null_mean_vector(ctx))
    null_var = float(wvec @ build_sigma(ctx) @ wvec)
    if null_var <= 0.0:
        raise ValueError("null variance of the weighted sum is zero; test is degenerate")
    null_sd = null_var ** 0.5
    p = float(ndtr((stat - null_mean) / null_sd))
    critical = null_mean + norm.ppf(alpha) * null_sd
    return TestResult(
        statistic=stat,
        p_value=p,
        critical_value=critical,
        reject=bool(stat < critical),
        method="weighted_sum",
        alpha=alpha,
        null_mean=null_mean,
        null_sd=null_sd,
    )


def minimum_statistic(table, w: WeightMatrix, ctx: MomentContext) -> float:
    """Smallest weighted centered count over pairs with positive weight."""
    if ctx.n_groups != w.k:
        raise ValueError(f"weight grid is {w.k} x {w.k} but context has k={ctx.n_groups}")
    t = _check_table(table, w.k)
    iu, ju = np.triu_indices(w.k, 1)
    wvec = w.grid[iu, ju]
    pos = wvec > 0
    n, N = ctx.sizes, ctx.total
    means = np.array([mean_between(n[i], n[j], N) for i, j in zip(iu, ju)])
    centered = wvec[pos] * (t[iu, ju][pos] - means[pos])
    return float(centered.min())


# --------------------------------------------------------------------------
# Multivariate-normal upper-tail engine


def _first_primes(m: int) -> np.ndarray:
    """First m primes by growing sieve."""
    if m <= 0:
        return np.array([], dtype=np.int64)
    limit = 16
    while True:
        sieve = np.ones(limit, dtype=bool)
        sieve[:2] = False
        for p in range(2, int(limit ** 0.5) + 1):
            if sieve[p]:
                sieve[p * p :: p] = False
        primes = np.flatnonzero(sieve)
        if primes.size >= m:
            return primes[:m].astype(np.int64)
        limit *= 4


def _reorder_cholesky(sigma: np.ndarray, upper: np.ndarray):
    """Pivoted Cholesky with limit reordering for orthant integration.

    At each step the remaining variable with the smallest conditional
    probability mass below its limit is factored next; conditioning uses
    the truncated-normal mean of the already-factored variables.  This
    ordering reduces the variance of the separation-of-variables
    integrand.  Returns the lower factor and the permuted limits.
    """
    n = sigma.shape[0]
    C = np.array(sigma, dtype=np.float64)
    u = np.array(upper, dtype=np.float64)
    y = np.zeros(n)
    eps = 1e-12
    for i in range(n):
        best_j, best_e, best_ut = i, np.inf, 0.0
        for j in range(i, n):
            denom2 = C[j, j] - (C[j, :i] ** 2).sum()
            num = u[j] - C[j, :i] @ y[:i]
            if denom2 > eps:
                ut = num / np.sqrt(denom2)
            else:
                ut = np.inf if num >= 0 else -np.inf
            e = ndtr(ut)
            if e < best_e:
                best_j, best_e, best_ut = j, e, ut
        if best_j != i:
            C[[i, best_j], :] = C[[best_j, i], :]
            C[:, [i, best_j]] = C[:, [best_j, i]]
            u[[i, best_j]] = u[[best_j, i]]
        diag2 = C[i, i] - (C[i, :i] ** 2).sum()
        if diag2 > eps:
            C[i, i] = np.sqrt(diag2)
            for j in range(i + 1, n):
                C[j, i] = (C[j, i] - C[j, :i] @ C[i, :i]) / C[i, i]
        else:
            # Degenerate direction: variable is determined by its
            # predecessors; keep a zero column so it contributes a
            # 0/1 factor through its (infinite) scaled limit.
            C[i:, i] = 0.0
            C[i, i] = 0.0
        y[i] = -norm.pdf(best_ut) / best_e if best_e > 1e-300 else best_ut
    return C, u


def mvn_upper_tail(
    sigma,
    thresholds,
    *,
    n_points: int = 10_000,
    n_shifts: int = 12,
    error_target: float = 1e-4,
    seed: int = _MVN_SEED,
    full_output: bool = False,
):
    """P(Z > thresholds) for Z ~ N(0, sigma), componentwise strict.

    Components with threshold -inf are always satisfied and are
    marginalized out before integration.  The remaining orthant
    probability is evaluated by the separation-of-variables transform
    over a randomized Richtmyer lattice; the point count doubles until
    the shift-to-shift standard error meets ``error_target`` (at most
    three doublings).

    Parameters
    ----------
    sigma : (K, K) array_like
        Covariance matrix, symmetric positive semidefinite.  A diagonal
        jitter of 1e-10 is attempted once before rejecting a
        numerically indefinite matrix.
    thresholds : (K,) array_like
        Lower bounds; entries of -inf drop their component.
    full_output : bool
        If true, return ``(probability, standard_error)``.

    Returns
    -------
    float or (float, float)
    """
    S = np.asarray(sigma, dtype=np.float64)
    t = np.atleast_1d(np.asarray(thresholds, dtype=np.float64))
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] != t.size:
        raise ValueError(f"sigma shape {S.shape} incompatible with {t.size} thresholds")
    if np.isnan(t).any():
        raise ValueError("thresholds must not be NaN")
    if np.abs(S - S.T).max() > 1e-8 * max(1.0, np.abs(S).max()):
        raise ValueError("sigma must be symmetric")
    if np.isposinf(t).any():
        out = (0.0, 0.0)
        return out if full_output else 0.0
    keep = ~np.isneginf(t)
    S = S[np.ix_(keep, keep)]
    t = t[keep]
    n = t.size
    if n == 0:
        return (1.0, 0.0) if full_output else 1.0
    if n == 1:
        p = float(ndtr(-t[0] / np.sqrt(S[0, 0]))) if S[0, 0] > 0 else float(t[0] < 0)
        return (p, 0.0) if full_output else p

    try:
        np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        S = S + 1e-10 * np.eye(n)
        try:
            np.linalg.cholesky(S)
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(
                "sigma is not positive semidefinite within tolerance"
            ) from exc

    # P(Z > t) = P(-Z < -t) = CDF of N(0, S) at upper limits -t.
    C, u = _reorder_cholesky(S, -t)
    rng = np.random.default_rng(seed)
    sqrt_primes = np.sqrt(_first_primes(n - 1).astype(np.float64))

    tiny = 1e-300
    pts = int(n_points)
    for _ in range(4):
        estimates = np.empty(n_shifts)
        j = np.arange(1, pts + 1, dtype=np.float64)[:, None]
        for s in range(n_shifts):
            shift = rng.random(n - 1)
            x = np.abs(2.0 * np.modf(j * sqrt_primes + shift)[0] - 1.0)
            f = np.full(pts, ndtr(u[0] / C[0, 0]) if C[0, 0] > 0 else float(u[0] >= 0))
            Y = np.empty((pts, n - 1))
            Y[:, 0] = ndtri(np.clip(x[:, 0] * f, tiny, 1.0 - 1e-16))
            for i in range(1, n):
                num = u[i] - Y[:, :i] @ C[i, :i]
                if C[i, i] > 0:
                    e = ndtr(num / C[i, i])
                else:
                    e = (num >= 0).astype(np.float64)
                f = f * e
                if i < n - 1:
                    Y[:, i] = ndtri(np.clip(x[:, i] * e, tiny, 1.0 - 1e-16))
            estimates[s] = f.mean()
        prob = float(estimates.mean())
        err = float(estimates.std(ddof=1) / np.sqrt(n_shifts))
        if err <= error_target:
            break
        pts *= 2
    prob = min(max(prob, 0.0), 1.0)
    return (prob, err) if full_output else prob


# --------------------------------------------------------------------------
# Minimum test

_CRIT_CACHE: dict[tuple, float] = {}


def _min_tail(x: float, sigma_pos: np.ndarray, w_pos: np.ndarray, **mvn_kw) -> float:
    """P(min of weighted centered counts > x) under the null."""
    return mvn_upper_tail(sigma_pos, x / w_pos, **mvn_kw)


def _min_critical(sigma_pos: np.ndarray, w_pos: np.ndarray, alpha: float, key: tuple) -> float:
    """Root z of 1 - P(min > z) = alpha, by bisection; cached per config."""
    if key in _CRIT_CACHE:
        return _CRIT_CACHE[key]

    def g(z: float) -> float:
        return 1.0 - _min_tail(z, sigma_pos, w_pos) - alpha

    scale = float(np.sqrt(np.diag(sigma_pos).max()) * w_pos.max())
    lo, hi = -20.0 * max(scale, 1.0), 0.0
    for _ in range(60):
        if g(lo) < 0.0:
            break
        lo *= 2.0
    else:
        raise FloatingPointError("could not bracket the minimum-test critical value from below")
    for _ in range(60):
        if g(hi) > 0.0:
            break
        hi += 5.0 * max(scale, 1.0)
    else:
        raise FloatingPointError("could not bracket the minimum-test critical value from above")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-6:
            break
    crit = 0.5 * (lo + hi)
    _CRIT_CACHE[key] = crit
    return crit


def minimum_test(table, w: WeightMatrix, ctx: MomentContext, alpha: float = 0.05) -> TestResult:
    """One-sided test on the minimum weighted centered count.

    The p-value is 1 - P(Z > x / w) where Z carries the joint null
    covariance of the positive-weight counts: the minimum exceeds x
    exactly when every weighted coordinate does, and dividing by the
    (positive) weights moves the comparison onto the raw-count scale.
    Zero-weight pairs impose no constraint and are dropped.  Rejects
    when the statistic is at or below the critical value, the level-
    alpha root of the same tail function.
    """
    alpha = _check_alpha(alpha)
    _warn_singletons(ctx)
    stat = minimum_statistic(table, w, ctx)
    wvec = w.vector()
    pos = wvec > 0
    sigma = build_sigma(ctx)
    sigma_pos = sigma[np.ix_(pos, pos)]
    w_pos = wvec[pos]
    p = 1.0 - _min_tail(stat, sigma_pos, w_pos)
    p = min(max(p, 0.0), 1.0)
    key = (
        tuple(ctx.sizes.tolist()),
        tuple(w_pos.tolist()),
        tuple(np.flatnonzero(pos).tolist()),
        alpha,
    )
    critical = _min_critical(sigma_pos, w_pos, alpha, key)
    return TestResult(
        statistic=stat,
        p_value=p,
        critical_value=critical,
        reject=bool(stat <= critical),
        method="minimum",
        alpha=alpha,
    )


# --------------------------------------------------------------------------
# Permutation fallback


def permutation_pvalue(
    path,
    groups: GroupAssignment,
    statistic: str,
    w: WeightMatrix,
    B: int,
    seed: int = 0,
) -> float:
    """Lower-tail Monte-Carlo p-value under uniform label re-arrangement.

    The path is held fixed; each replicate re-draws the label
    arrangement uniformly using an independent stream keyed by
    (seed, replicate), so the result does not depend on evaluation
    order.  Add-one smoothing keeps the p-value strictly positive.
    """
    if statistic not in ("weighted_sum", "minimum"):
        raise ValueError(f"statistic must be 'weighted_sum' or 'minimum', got {statistic!r}")
    B = int(B)
    if B < 100:
        raise ValueError(f"need at least 100 replicates, got B={B}")
    path = check_path(path, groups.n_total)
    ctx = MomentContext.from_assignment(groups)

    def stat_of(labels: np.ndarray) -> float:
        table = count_edges(path, GroupAssignment(labels))
        if statistic == "weighted_sum":
            return weighted_sum_statistic(table, w)
        return minimum_statistic(table, w, ctx)

    observed = stat_of(groups.labels)
    at_or_below = 0
    labels = groups.labels
    for rep in range(B):
        rng = np.random.default_rng((seed, rep))
        if stat_of(labels[rng.permutation(labels.size)]) <= observed:
            at_or_below += 1
    return (1 + at_or_below) / (B + 1)
