"""Permutations, Kendall-tau machinery, and comparison-matrix models.

Conventions
-----------
A permutation is an int array ``ranks`` of length n where ``ranks[i]`` is
the 0-based rank of item i, smaller = better: item i is preferred to item
j iff ``ranks[i] < ranks[j]``.

A comparison matrix M is an (n, n) float array with M[i, i] = 1/2 and the
skew constraint M + M^T = ee^T; M[i, j] is the probability that item i
beats item j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "check_permutation",
    "identity_permutation",
    "reverse_permutation",
    "inverse_permutation",
    "permute_matrix",
    "kt_distance",
    "inversion_table",
    "table_to_permutation",
    "make_noisy_sorting",
    "sample_sst_bands",
    "scores",
    "BisoCheck",
    "is_biso",
    "is_sst",
    "frobenius_error",
    "check_comparison_matrix",
    "matrix_to_csv",
    "matrix_from_csv",
    "permutation_to_line",
    "permutation_from_line",
]

SKEW_TOL = 1e-12


def check_permutation(ranks) -> np.ndarray:
    p = np.asarray(ranks, dtype=np.int64)
    if p.ndim != 1:
        raise ValueError("permutation must be one-dimensional")
    n = len(p)
    if not np.array_equal(np.sort(p), np.arange(n)):
        raise ValueError("ranks must be a bijection onto 0..n-1")
    return p


def identity_permutation(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.int64)


def reverse_permutation(n: int) -> np.ndarray:
    return np.arange(n - 1, -1, -1, dtype=np.int64)


def inverse_permutation(ranks) -> np.ndarray:
    """inv[r] = the item holding rank r."""
    p = check_permutation(ranks)
    inv = np.empty_like(p)
    inv[p] = np.arange(len(p), dtype=np.int64)
    return inv


def permute_matrix(m: np.ndarray, ranks) -> np.ndarray:
    """Conjugate rows and columns: result[i, j] = m[ranks[i], ranks[j]].

    With this convention make_noisy_sorting(pi, lam) equals
    permute_matrix(make_noisy_sorting(identity, lam), pi).
    """
    p = check_permutation(ranks)
    return m[np.ix_(p, p)]


def _count_inversions(a: np.ndarray) -> tuple[np.ndarray, int]:
    # merge-based inversion counting; O(n log^2 n) with vectorized merges
    n = len(a)
    if n <= 1:
        return a, 0
    mid = n // 2
    left, cl = _count_inversions(a[:mid])
    right, cr = _count_inversions(a[mid:])
    pos = np.searchsorted(left, right, side="right")
    cross = len(left) * len(right) - int(pos.sum())
    return np.sort(np.concatenate((left, right)), kind="mergesort"), cl + cr + cross


def kt_distance(p, q) -> int:
    """Number of discordant item pairs between two rankings."""
    p = check_permutation(p)
    q = check_permutation(q)
    if len(p) != len(q):
        raise ValueError(f"length mismatch: {len(p)} vs {len(q)}")
    # q-ranks listed in p-rank order; inversions of that sequence are
    # exactly the pairs ordered one way by p and the other way by q
    seq = q[np.argsort(p)]
    _, count = _count_inversions(seq)
    return count


def inversion_table(p) -> np.ndarray:
    """b[i] = number of items j > i ranked better than item i."""
    p = check_permutation(p)
    n = len(p)
    later_is_smaller = p[:, None] > p[None, :]
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    return (later_is_smaller & upper).sum(axis=1).astype(np.int64)


def table_to_permutation(b) -> np.ndarray:
    """Inverse of :func:`inversion_table`."""
    t = np.asarray(b, dtype=np.int64)
    n = len(t)
    if np.any(t < 0) or np.any(t > np.arange(n - 1, -1, -1)):
        raise ValueError("table entry out of range {0, ..., n-i-1}")
    avail = list(range(n))
    ranks = np.empty(n, dtype=np.int64)
    for i in range(n):
        ranks[i] = avail.pop(int(t[i]))
    return ranks


def make_noisy_sorting(ranks, lam: float) -> np.ndarray:
    """Comparison matrix with all off-diagonal entries 1/2 +- lam.

    Entry (i, j) is 1/2 + lam exactly when item i outranks item j.
    """
    if not 0.0 <= lam <= 0.5:
        raise ValueError(f"lambda must lie in [0, 1/2], got {lam}")
    p = check_permutation(ranks)
    return 0.5 + lam * np.sign(p[None, :] - p[:, None]).astype(np.float64)


def sample_sst_bands(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random bivariate isotonic matrix built band by band.

    The first superdiagonal is i.i.d. uniform on [1/2, 1]; each higher
    band k is drawn per entry uniformly from [max(left, below), 1], where
    left is entry (i, i+k-1) and below is entry (i+1, i+k).  Bands are
    filled for k = 1..n-1 with increasing row index inside a band; the
    lower triangle is the skew reflection.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got n={n}")
    m = np.full((n, n), 0.5)
    band = 0.5 + 0.5 * rng.random(n - 1)
    idx = np.arange(n - 1)
    m[idx, idx + 1] = band
    prev = band
    for k in range(2, n):
        lo = np.maximum(prev[:-1], prev[1:])
        cur = lo + (1.0 - lo) * rng.random(n - k)
        i = np.arange(n - k)
        m[i, i + k] = cur
        prev = cur
    iu = np.triu_indices(n, k=1)
    m[(iu[1], iu[0])] = 1.0 - m[iu]
    return m


def scores(m: np.ndarray) -> np.ndarray:
    """Per-item win probability against a uniformly random opponent."""
    check_comparison_matrix(m)
    n = m.shape[0]
    if n < 2:
        raise ValueError("scores need at least two items")
    return (m.sum(axis=1) - 0.5) / (n - 1)


@dataclass(frozen=True)
class BisoCheck:
    ok: bool
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_biso(m: np.ndarray, tol: float) -> BisoCheck:
    """Check membership in the bivariate isotonic set, reporting the first violation."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    m = np.asarray(m, dtype=np.float64)
    n = m.shape[0]
    skew = np.abs(m + m.T - 1.0)
    if skew.max(initial=0.0) > tol:
        i, j = np.unravel_index(int(np.argmax(skew)), skew.shape)
        return BisoCheck(False, f"skew violated at ({i}, {j}) by {skew[i, j]:.3g}")
    if n > 1:
        rows = np.diff(m, axis=1)
        if rows.min(initial=0.0) < -tol:
            i, j = np.unravel_index(int(np.argmin(rows)), rows.shape)
            return BisoCheck(
                False, f"row {i} decreases at column {j} -> {j + 1} by {-rows[i, j]:.3g}"
            )
        cols = np.diff(m, axis=0)
        if cols.max(initial=0.0) > tol:
            i, j = np.unravel_index(int(np.argmax(cols)), cols.shape)
            return BisoCheck(
                False, f"column {j} increases at row {i} -> {i + 1} by {cols[i, j]:.3g}"
            )
    return BisoCheck(True)


def is_sst(m: np.ndarray, tol: float) -> bool | None:
    """Check SST membership via the score-sorted candidate permutation.

    Returns True when conjugating by the score ranking lands in the
    bivariate isotonic set (a certificate), False when it does not and
    the scores are distinct (the candidate is forced), and None when the
    check fails but tied scores leave other candidates untested.
    """
    tau = scores(m)
    order = np.lexsort((np.arange(len(tau)), -tau))
    if is_biso(m[np.ix_(order, order)], tol):
        return True
    ties = bool(np.any(np.diff(tau[order]) == 0.0))
    return None if ties else False


def frobenius_error(a: np.ndarray, b: np.ndarray) -> float:
    """Squared Frobenius distance normalized by n^2."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float((d * d).sum() / a.shape[0] ** 2)


def check_comparison_matrix(m: np.ndarray, tol: float = SKEW_TOL) -> None:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"comparison matrix must be square, got {m.shape}")
    if m.min() < -tol or m.max() > 1.0 + tol:
        raise ValueError("entries must lie in [0, 1]")
    if np.abs(np.diagonal(m) - 0.5).max(initial=0.0) > tol:
        raise ValueError("diagonal entries must equal 1/2")
    if np.abs(m + m.T - 1.0).max(initial=0.0) > tol:
        raise ValueError("skew constraint M + M^T = ee^T violated")


def matrix_to_csv(m: np.ndarray) -> str:
    rows = (",".join(format(v, ".17g") for v in row) for row in np.asarray(m))
    return "\n".join(rows) + "\n"


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [
        [float(tok) for tok in line.split(",")]
        for line in text.splitlines()
        if line.strip()
    ]
    m = np.asarray(rows, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def permutation_to_line(ranks) -> str:
    return ",".join(str(int(r)) for r in check_permutation(ranks)) + "\n"


def permutation_from_line(line: str) -> np.ndarray:
    return check_permutation([int(tok) for tok in line.strip().split(",")])
