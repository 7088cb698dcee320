"""Average-sort-project and block-average-project matrix estimators.

ASP recovers a noisy-sorting matrix: average the observed outcomes into
empirical scores, sort, then fit the single noise parameter by maximum
likelihood given the sorted order.  BAP targets the larger SST class:
partition items by rescaled row sums, average a second sample block by
block, and project onto the permuted bivariate isotonic set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import isotonic_regression as _scipy_isotonic

from ._biso import dykstra_biso
from .graphs import Graph
from .models import (
    check_permutation,
    inverse_permutation,
    make_noisy_sorting,
    permute_matrix,
)
from .observation import ObservationSample, empirical_scores, sample_matrix

__all__ = [
    "AspResult",
    "asp_sort",
    "inversion_set",
    "asp_lambda_mle",
    "asp_estimate",
    "pav_isotonic",
    "BisoProjection",
    "project_biso",
    "BlockPartition",
    "block_partition",
    "block_average",
    "row_block_average",
    "bap_estimate",
]


# ---------------------------------------------------------------------------
# ASP
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AspResult:
    """pi_hat ranks, lambda_hat in [0, 1/2], and m_hat = M_NS(pi_hat, lambda_hat)."""

    pi_hat: np.ndarray
    lambda_hat: float
    m_hat: np.ndarray


def asp_sort(tau_hat) -> np.ndarray:
    """Ranking by descending score; ties give the smaller item the better rank."""
    tau = np.asarray(tau_hat, dtype=np.float64)
    if not np.all(np.isfinite(tau)):
        raise ValueError("scores must be finite")
    order = np.lexsort((np.arange(len(tau)), -tau))
    ranks = np.empty(len(tau), dtype=np.int64)
    ranks[order] = np.arange(len(tau), dtype=np.int64)
    return ranks


def inversion_set(s: ObservationSample, pi) -> np.ndarray:
    """Observed pairs (i, j), i < j, whose order pi inverts (pi[i] > pi[j])."""
    p = check_permutation(pi)
    mask = p[s.pairs[:, 0]] > p[s.pairs[:, 1]]
    return s.pairs[mask]


def asp_lambda_mle(s: ObservationSample, pi) -> float:
    """MLE of the noise-gap parameter treating pi as the true ranking.

    Averages Y over concordant observed pairs and 1 - Y over inverted ones,
    subtracts 1/2, and clamps into [0, 1/2] so the output matrix stays a
    valid noisy-sorting model.
    """
    if s.num_pairs == 0:
        raise ValueError("cannot fit lambda from an empty sample")
    p = check_permutation(pi)
    inverted = p[s.pairs[:, 0]] > p[s.pairs[:, 1]]
    aligned = np.where(inverted, 1.0 - s.values, s.values)
    lam = float(aligned.mean() - 0.5)
    return min(max(lam, 0.0), 0.5)


def asp_estimate(s: ObservationSample) -> AspResult:
    """Average, sort, then project: output M_NS(pi_hat, lambda_hat)."""
    tau_hat = empirical_scores(s)
    pi_hat = asp_sort(tau_hat)
    lam_hat = asp_lambda_mle(s, pi_hat)
    return AspResult(pi_hat=pi_hat, lambda_hat=lam_hat, m_hat=make_noisy_sorting(pi_hat, lam_hat))


# ---------------------------------------------------------------------------
# Isotonic projection
# ---------------------------------------------------------------------------


def pav_isotonic(values, weights=None, direction: str = "nondecreasing") -> np.ndarray:
    """Weighted least-squares projection onto the monotone cone (PAV)."""
    y = np.asarray(values, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError("values must be one-dimensional")
    if weights is None:
        w = np.ones_like(y)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != y.shape:
            raise ValueError(f"length mismatch: {len(y)} values, {len(w)} weights")
        if np.any(w <= 0):
            raise ValueError("weights must be strictly positive")
    if direction not in ("nondecreasing", "nonincreasing"):
        raise ValueError(f"unknown direction {direction!r}")
    increasing = direction == "nondecreasing"
    return np.asarray(_scipy_isotonic(y, weights=w, increasing=increasing).x, dtype=np.float64)


@dataclass(frozen=True)
class BisoProjection:
    """Projection output plus convergence metadata."""

    matrix: np.ndarray
    converged: bool
    iterations: int


def project_biso(x: np.ndarray, tol: float = 1e-8, max_iter: int = 10000) -> BisoProjection:
    """Euclidean projection onto the bivariate isotonic set.

    Dykstra's alternating projections over (a) the per-row nondecreasing
    cones via PAV and (b) the skew/box set, whose joint projection is
    clip((x - x^T + 1)/2, 0, 1).  Column monotonicity follows from row
    monotonicity plus the skew constraint.  Stops when successive sweeps
    move less than tol in Frobenius norm and the row-monotonicity residual
    is below tol/2; on hitting max_iter the best iterate is returned with
    converged=False.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {x.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    out, converged, iterations = dykstra_biso(x, tol, max_iter)
    return BisoProjection(matrix=out, converged=converged, iterations=iterations)


# ---------------------------------------------------------------------------
# Blocking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockPartition:
    """Ordered partition of item indices by value intervals.

    groups are disjoint index arrays covering 0..n-1, ordered by their
    defining interval; threshold is the interval-generating gap t.
    """

    groups: tuple[np.ndarray, ...]
    threshold: float

    @property
    def num_groups(self) -> int:
        return len(self.groups)

    def labels(self, n: int) -> np.ndarray:
        lab = np.full(n, -1, dtype=np.int64)
        for k, grp in enumerate(self.groups):
            lab[grp] = k
        if np.any(lab < 0):
            raise ValueError("partition does not cover 0..n-1")
        return lab


def block_partition(values, t: float, upper: float | None = None) -> BlockPartition:
    """Group indices whose values share an interval [floor((i-1)t), floor(it)).

    Values equal to the top of the covered range land in the last interval;
    empty groups are dropped.  upper, when given, bounds the admissible
    values (used with row sums in [0, n]).
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or len(v) == 0:
        raise ValueError("values must be a nonempty vector")
    if np.any(v < 0):
        raise ValueError("values must be nonnegative")
    if upper is not None and np.any(v > upper):
        raise ValueError(f"values must not exceed {upper}")
    if t <= 0:
        raise ValueError("threshold must be positive")
    top = float(upper) if upper is not None else float(v.max())
    if top <= 0:
        return BlockPartition(groups=(np.arange(len(v), dtype=np.int64),), threshold=float(t))
    bounds = [0.0]
    k = 1
    while bounds[-1] < top:
        bounds.append(float(np.floor(k * t)))
        k += 1
    lows = np.unique(bounds[:-1])  # last bound only closes the final interval
    lows = lows[lows < top]
    idx = np.searchsorted(lows, v, side="right") - 1
    idx = np.clip(idx, 0, len(lows) - 1)  # top values go to the last interval
    groups = tuple(
        np.flatnonzero(idx == g) for g in range(len(lows)) if np.any(idx == g)
    )
    return BlockPartition(groups=groups, threshold=float(t))


def block_average(x: np.ndarray, observed: np.ndarray, c: BlockPartition) -> np.ndarray:
    """Replace each partition block with the mean of its observed entries.

    Blocks are products S x T of partition groups; blocks with no observed
    entries are set to 1/2.  The observed mask should be symmetric (each
    observed pair present in both orders with x_ji = 1 - x_ij).
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    lab = c.labels(n)
    g = c.num_groups
    ind = np.zeros((n, g))
    ind[np.arange(n), lab] = 1.0
    obs = observed.astype(np.float64)
    counts = ind.T @ obs @ ind
    sums = ind.T @ (x * obs) @ ind
    vals = np.where(counts > 0, sums / np.where(counts > 0, counts, 1.0), 0.5)
    return ind @ vals @ ind.T


def row_block_average(x: np.ndarray, c: BlockPartition) -> np.ndarray:
    """Replace each row by the mean of the rows sharing its group."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    for grp in c.groups:
        out[grp] = x[grp].mean(axis=0)
    return out


# ---------------------------------------------------------------------------
# BAP
# ---------------------------------------------------------------------------


def bap_estimate(
    s1: ObservationSample,
    s2: ObservationSample | None,
    g: Graph,
    single_sample: bool = False,
    tol: float = 1e-8,
    max_iter: int = 10000,
) -> np.ndarray:
    """Block-average-project estimate of an SST comparison matrix.

    Blocks come from the first sample: rescale observed entries by n/D_i,
    partition the clamped row sums with gap t = sum_v 1/sqrt(d_v), and take
    the score ranking.  The second sample is averaged within blocks (the
    first again when single_sample is set), and the result is projected
    onto the permuted bivariate isotonic set by conjugating with the score
    ranking around :func:`project_biso`.
    """
    if g.degrees.min() == 0:
        raise ValueError("comparison graph must have no isolated vertices")
    if s1.n != g.n:
        raise ValueError(f"sample size {s1.n} does not match graph size {g.n}")
    n = g.n

    y1, o1 = sample_matrix(s1)
    d = o1.sum(axis=1)
    assert d.min() > 0  # guaranteed: no isolated vertices under any assignment
    y_scaled = np.where(o1, (n / d)[:, None] * y1, 0.0)
    row_sums = np.clip(y_scaled.sum(axis=1), 0.0, n)
    t = float(np.sum(1.0 / np.sqrt(g.degrees)))
    if t >= n:
        partition = BlockPartition(
            groups=(np.arange(n, dtype=np.int64),), threshold=t
        )
    else:
        partition = block_partition(row_sums, t, upper=n)
    pi_hat = asp_sort(empirical_scores(s1))

    if single_sample:
        m_blocked = block_average(y1, o1, partition)
    else:
        if s2 is None:
            raise ValueError("two-sample BAP needs a second observation sample")
        if s2.n != g.n:
            raise ValueError(f"sample size {s2.n} does not match graph size {g.n}")
        y2, o2 = sample_matrix(s2)
        m_blocked = block_average(y2, o2, partition)

    inv = inverse_permutation(pi_hat)
    projected = project_biso(permute_matrix(m_blocked, inv), tol=tol, max_iter=max_iter)
    return permute_matrix(projected.matrix, pi_hat)
