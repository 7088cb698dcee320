"""Comparison-topology construction, validation, and degree statistics.

Graphs are simple and undirected, with vertices labelled 0..n-1.  Families
cover the topologies used in the scaling experiments (two disjoint cliques,
clique-plus-path, power-law via Havel-Hakimi, regular bipartite) plus the
usual small benchmark graphs (star, path, cycle, complete, Erdos-Renyi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Graph",
    "InfeasibleDegreeSequenceError",
    "make_graph",
    "make_topology",
    "havel_hakimi",
    "degree_functional",
    "adjacency_matrix",
    "to_edge_list",
    "from_edge_list",
    "GRAPH_FAMILIES",
]

GRAPH_FAMILIES = (
    "complete",
    "two_cliques",
    "clique_plus_path",
    "power_law",
    "regular_bipartite",
    "star",
    "path",
    "cycle",
    "erdos_renyi",
)

_EVEN_N_FAMILIES = ("two_cliques", "clique_plus_path", "regular_bipartite")


class InfeasibleDegreeSequenceError(ValueError):
    """Raised when a degree sequence admits no simple-graph realization."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph.

    Attributes
    ----------
    n : int
        Vertex count.
    edges : ndarray of shape (m, 2)
        Unordered edges stored as rows (u, v) with u < v, lexicographically
        sorted.  Read-only.
    degrees : ndarray of shape (n,)
        Per-vertex edge counts.  Read-only.
    family : str or None
        Construction-family tag, when built by :func:`make_topology`.
        Lets diagnostics substitute closed forms for exact search.
    """

    n: int
    edges: np.ndarray
    degrees: np.ndarray
    family: str | None = field(default=None, compare=False)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])


def make_graph(n: int, edges, family: str | None = None) -> Graph:
    """Validate an edge list and build an immutable :class:`Graph`."""
    if n < 1:
        raise ValueError(f"need at least one vertex, got n={n}")
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if e.size:
        if e.min() < 0 or e.max() >= n:
            raise ValueError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise ValueError("self-loops are not allowed")
        e = np.sort(e, axis=1)
        e = e[np.lexsort((e[:, 1], e[:, 0]))]
        dup = (np.diff(e[:, 0]) == 0) & (np.diff(e[:, 1]) == 0)
        if np.any(dup):
            raise ValueError("duplicate edges are not allowed")
    degrees = np.bincount(e.ravel(), minlength=n).astype(np.int64)
    e.setflags(write=False)
    degrees.setflags(write=False)
    return Graph(n=n, edges=e, degrees=degrees, family=family)


def adjacency_matrix(g: Graph) -> np.ndarray:
    """Dense boolean adjacency matrix (built on demand)."""
    a = np.zeros((g.n, g.n), dtype=bool)
    if g.num_edges:
        a[g.edges[:, 0], g.edges[:, 1]] = True
        a[g.edges[:, 1], g.edges[:, 0]] = True
    return a


def _complete_edges(n: int) -> np.ndarray:
    iu = np.triu_indices(n, k=1)
    return np.column_stack(iu)


def _clique_edges(vertices: np.ndarray) -> np.ndarray:
    iu = np.triu_indices(len(vertices), k=1)
    return np.column_stack((vertices[iu[0]], vertices[iu[1]]))


def _path_edges(vertices: np.ndarray) -> np.ndarray:
    return np.column_stack((vertices[:-1], vertices[1:]))


def make_topology(
    family: str,
    n: int,
    *,
    alpha: float | None = None,
    p: float | None = None,
    rng: np.random.Generator | None = None,
) -> Graph:
    """Construct one of the named comparison-topology families.

    Parameters
    ----------
    family : str
        One of :data:`GRAPH_FAMILIES`.
    n : int
        Vertex count.  Must be even and >= 4 for two_cliques,
        clique_plus_path, and regular_bipartite.
    alpha : float, optional
        Regular-bipartite exponent in (0, 1]; each left vertex connects to
        max(1, floor((n/2)**alpha)) right vertices cyclically.
    p : float, optional
        Erdos-Renyi edge probability in (0, 1].
    rng : numpy Generator, optional
        Required for erdos_renyi only.
    """
    if family not in GRAPH_FAMILIES:
        raise ValueError(f"unknown graph family {family!r}")
    if family in _EVEN_N_FAMILIES:
        if n < 4 or n % 2 != 0:
            raise ValueError(f"{family} requires an even n >= 4, got n={n}")
    elif n < 2:
        raise ValueError(f"{family} requires n >= 2, got n={n}")

    h = n // 2
    if family == "complete":
        edges = _complete_edges(n)
    elif family == "two_cliques":
        edges = np.vstack(
            [_clique_edges(np.arange(h)), _clique_edges(np.arange(h, n))]
        )
    elif family == "clique_plus_path":
        # path hangs off the last clique vertex, h - 1
        chain = np.concatenate(([h - 1], np.arange(h, n)))
        edges = np.vstack([_clique_edges(np.arange(h)), _path_edges(chain)])
    elif family == "power_law":
        return _power_law(n)
    elif family == "regular_bipartite":
        if alpha is None or not 0.0 < alpha <= 1.0:
            raise ValueError("regular_bipartite requires alpha in (0, 1]")
        d = max(1, int(math.floor(h**alpha + 1e-9)))
        left = np.repeat(np.arange(h), d)
        shift = np.tile(np.arange(d), h)
        right = h + (left + shift) % h
        edges = np.column_stack((left, right))
    elif family == "star":
        edges = np.column_stack((np.zeros(n - 1, dtype=np.int64), np.arange(1, n)))
    elif family == "path":
        edges = _path_edges(np.arange(n))
    elif family == "cycle":
        if n < 3:
            raise ValueError(f"cycle requires n >= 3, got n={n}")
        edges = np.column_stack((np.arange(n), (np.arange(n) + 1) % n))
    else:  # erdos_renyi
        if p is None or not 0.0 < p <= 1.0:
            raise ValueError("erdos_renyi requires p in (0, 1]")
        if rng is None:
            raise ValueError("erdos_renyi requires a seeded generator")
        iu = np.triu_indices(n, k=1)
        keep = rng.random(len(iu[0])) < p
        edges = np.column_stack((iu[0][keep], iu[1][keep]))
    return make_graph(n, edges, family=family)


def _power_law(n: int) -> Graph:
    # The literal staircase d_i = i is not graphical (d_n = n exceeds n-1,
    # and capping at n-1 leaves duplicate near-universal degrees that clash
    # with the degree-1 vertex).  Subtracting 1 on the upper half gives
    # d_i = i - 1{2i > n}, the degree sequence of the half graph, which is
    # graphical for every n while keeping the linear profile.
    i = np.arange(1, n + 1, dtype=np.int64)
    seq = i - (2 * i > n)
    g = havel_hakimi(seq)
    return Graph(n=g.n, edges=g.edges, degrees=g.degrees, family="power_law")


def havel_hakimi(degseq) -> Graph:
    """Realize a degree sequence as a simple graph, or fail.

    Vertex i of the returned graph has degree exactly degseq[i].  Raises
    :class:`InfeasibleDegreeSequenceError` (naming the step at which the
    greedy construction got stuck) when the sequence is not graphical.
    """
    seq = np.asarray(degseq, dtype=np.int64)
    n = len(seq)
    if n < 1:
        raise ValueError("empty degree sequence")
    if seq.min() < 1 or seq.max() > n - 1:
        raise ValueError("degrees must lie in [1, n-1]")
    if seq.sum() % 2 != 0:
        raise ValueError("degree sum must be even")

    remaining = seq.copy()
    edges: list[tuple[int, int]] = []
    for step in range(n):
        # highest remaining degree first; ties broken by vertex index
        order = np.lexsort((np.arange(n), -remaining))
        v = int(order[0])
        d = int(remaining[v])
        if d == 0:
            break
        targets = order[1 : d + 1]
        if len(targets) < d or remaining[targets[-1]] <= 0:
            raise InfeasibleDegreeSequenceError(
                f"not graphical: step {step} needs {d} partners for vertex {v}"
            )
        remaining[v] = 0
        remaining[targets] -= 1
        for u in targets:
            edges.append((v, int(u)))
    if remaining.max() > 0:
        raise InfeasibleDegreeSequenceError("not graphical: degrees left unmatched")
    g = make_graph(n, edges)
    assert np.array_equal(g.degrees, seq)
    return g


def degree_functional(g: Graph) -> float:
    """(1/n) * sum over vertices of 1/sqrt(degree); in (0, 1]."""
    if g.degrees.min() == 0:
        v = int(np.argmin(g.degrees))
        raise ValueError(f"vertex {v} is isolated; degree functional undefined")
    return float(np.sum(1.0 / np.sqrt(g.degrees)) / g.n)


def to_edge_list(g: Graph) -> str:
    """Serialize as 'n m' header plus one 'u v' line per edge (u < v)."""
    lines = [f"{g.n} {g.num_edges}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def from_edge_list(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty edge-list text")
    n, m = (int(tok) for tok in lines[0].split())
    if len(lines) - 1 != m:
        raise ValueError(f"header promises {m} edges, found {len(lines) - 1}")
    edges = [tuple(int(tok) for tok in ln.split()) for ln in lines[1:]]
    for u, v in edges:
        if not u < v:
            raise ValueError(f"edge ({u}, {v}) violates u < v")
    return make_graph(n, edges)
