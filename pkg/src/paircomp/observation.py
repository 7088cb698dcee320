"""Observation sampling under worst-case and average-case designs.

The comparison graph fixes which vertex pairs are compared; a permutation
sigma assigns items to vertices (the identity for worst-case designs, a
uniform draw for average-case designs).  Item pair (i, j) with i < j is
observed exactly when (sigma(i), sigma(j)) is a graph edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph
from .models import check_comparison_matrix, check_permutation, inverse_permutation

__all__ = [
    "ObservationSample",
    "assign_random",
    "observe",
    "empirical_scores",
    "sample_matrix",
    "sample_to_text",
    "sample_from_text",
]


@dataclass(frozen=True)
class ObservationSample:
    """Observed pairwise outcomes for one design draw.

    pairs holds the observed (i, j) with i < j, lexicographically sorted;
    values holds Y_ij in [0, 1] (the reverse direction is implied via
    Y_ji = 1 - Y_ij and is never stored).  assignment is the item-to-vertex
    permutation sigma that produced the pair set.
    """

    n: int
    pairs: np.ndarray
    values: np.ndarray
    assignment: np.ndarray

    @property
    def num_pairs(self) -> int:
        return int(self.pairs.shape[0])


def assign_random(g: Graph, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random item-to-vertex assignment (Fisher-Yates)."""
    return rng.permutation(g.n).astype(np.int64)


def observe(
    m: np.ndarray,
    g: Graph,
    sigma,
    mode: str,
    rng: np.random.Generator | None = None,
) -> ObservationSample:
    """Draw one observation sample of m on the graph under assignment sigma.

    mode 'bernoulli' draws Y_ij ~ Ber(M_ij) independently per observed pair
    and requires rng; mode 'expectation' sets Y_ij = M_ij exactly (the
    infinite-sample-per-pair test hook).
    """
    check_comparison_matrix(m)
    sigma = check_permutation(sigma)
    if m.shape[0] != g.n or len(sigma) != g.n:
        raise ValueError(
            f"size mismatch: matrix {m.shape[0]}, graph {g.n}, sigma {len(sigma)}"
        )
    if mode not in ("bernoulli", "expectation"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "bernoulli" and rng is None:
        raise ValueError("bernoulli mode requires a seeded generator")

    inv = inverse_permutation(sigma)
    items = inv[g.edges] if g.num_edges else np.empty((0, 2), dtype=np.int64)
    pairs = np.sort(items, axis=1)
    if pairs.size:
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    probs = m[pairs[:, 0], pairs[:, 1]]
    if mode == "bernoulli":
        values = (rng.random(len(probs)) < probs).astype(np.float64)
    else:
        values = probs.astype(np.float64, copy=True)
    pairs.setflags(write=False)
    values.setflags(write=False)
    return ObservationSample(n=g.n, pairs=pairs, values=values, assignment=sigma)


def empirical_scores(s: ObservationSample) -> np.ndarray:
    """Fraction of observed comparisons won by each item."""
    i, j = s.pairs[:, 0], s.pairs[:, 1]
    counts = np.bincount(i, minlength=s.n) + np.bincount(j, minlength=s.n)
    if s.num_pairs == 0 or counts.min() == 0:
        raise ValueError(f"item {int(np.argmin(counts))} has no observed comparisons")
    wins = np.bincount(i, weights=s.values, minlength=s.n)
    wins += np.bincount(j, weights=1.0 - s.values, minlength=s.n)
    return wins / counts


def sample_matrix(s: ObservationSample) -> tuple[np.ndarray, np.ndarray]:
    """Dense symmetric view: (Y, observed) with Y_ji = 1 - Y_ij filled in.

    Unobserved entries of Y are 1/2 (including the diagonal) and flagged
    False in the observed mask.
    """
    y = np.full((s.n, s.n), 0.5)
    observed = np.zeros((s.n, s.n), dtype=bool)
    i, j = s.pairs[:, 0], s.pairs[:, 1]
    y[i, j] = s.values
    y[j, i] = 1.0 - s.values
    observed[i, j] = True
    observed[j, i] = True
    return y, observed


def sample_to_text(s: ObservationSample) -> str:
    lines = [f"{s.n} {s.num_pairs}"]
    lines.extend(
        f"{i} {j} {format(v, '.17g')}"
        for (i, j), v in zip(s.pairs, s.values)
    )
    lines.append(",".join(str(int(r)) for r in s.assignment))
    return "\n".join(lines) + "\n"


def sample_from_text(text: str) -> ObservationSample:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, k = (int(tok) for tok in lines[0].split())
    if len(lines) != k + 2:
        raise ValueError(f"header promises {k} pairs, found {len(lines) - 2}")
    pairs = np.empty((k, 2), dtype=np.int64)
    values = np.empty(k, dtype=np.float64)
    for r, ln in enumerate(lines[1 : k + 1]):
        i, j, v = ln.split()
        pairs[r] = (int(i), int(j))
        values[r] = float(v)
    sigma = check_permutation([int(tok) for tok in lines[-1].split(",")])
    pairs.setflags(write=False)
    values.setflags(write=False)
    return ObservationSample(n=n, pairs=pairs, values=values, assignment=sigma)
