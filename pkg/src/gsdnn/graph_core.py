"""Undirected graphs with self-loops and their normalized operators.

The whole library works on a single graph representation: an undirected,
unweighted graph whose edge set is stored once in canonical form (u <= v),
plus the operators derived from it after self-loops are added,

    A_hat = D^{-1/2} A D^{-1/2},    L_hat = I - A_hat,

where D = diag(A 1). The oriented normalized incidence matrix
B_hat = B D^{-1/2} over the non-loop edges satisfies B_hat^T B_hat = L_hat
and exists mainly so tests can assert that identity; algorithms only ever
apply A_hat.

Signals are plain float64 numpy arrays of shape (num_nodes, d), validated
by :func:`as_signal`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Graph",
    "NormalizedOperators",
    "load_edge_list",
    "add_self_loops",
    "normalize",
    "spmm",
    "as_signal",
    "load_signal_csv",
]


def _canonical_edges(edges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    seen = {(min(u, v), max(u, v)) for u, v in edges}
    return tuple(sorted(seen))


@dataclass(frozen=True)
class Graph:
    """Undirected unweighted graph.

    Edges are deduplicated and stored once as (u, v) with u <= v, 0-indexed.
    ``has_self_loops`` is derived: true iff (i, i) is present for every node.
    """

    num_nodes: int
    edges: tuple[tuple[int, int], ...]
    has_self_loops: bool = field(init=False)

    def __post_init__(self) -> None:
        if self.num_nodes <= 0:
            raise ValueError("num_nodes must be positive")
        canon = _canonical_edges(self.edges)
        for u, v in canon:
            if u < 0 or v >= self.num_nodes:
                raise ValueError(f"edge ({u}, {v}) out of range for {self.num_nodes} nodes")
        object.__setattr__(self, "edges", canon)
        loops = {u for u, v in canon if u == v}
        object.__setattr__(self, "has_self_loops", len(loops) == self.num_nodes)

    @property
    def num_edges(self) -> int:
        return len(self.edges)


def load_edge_list(text: str) -> Graph:
    """Parse a line-oriented edge list into a Graph.

    Each non-empty, non-comment line holds two nonnegative integers "u v".
    Lines starting with '#' are comments. An optional first data line
    "nodes N" fixes the node count; otherwise it is 1 + the largest index.
    """
    edges: list[tuple[int, int]] = []
    declared: int | None = None
    first_data_line = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if first_data_line and len(parts) == 2 and parts[0] == "nodes":
            try:
                declared = int(parts[1])
            except ValueError:
                raise ValueError(f"line {lineno}: malformed node-count header {line!r}")
            if declared <= 0:
                raise ValueError(f"line {lineno}: node count must be positive")
            first_data_line = False
            continue
        first_data_line = False
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: expected two integers, got {line!r}")
        if u < 0 or v < 0:
            raise ValueError(f"line {lineno}: negative node index in {line!r}")
        edges.append((u, v))

    if declared is None:
        if not edges:
            raise ValueError("empty edge list and no 'nodes N' header")
        declared = 1 + max(max(u, v) for u, v in edges)
    else:
        for u, v in edges:
            if max(u, v) >= declared:
                raise ValueError(
                    f"edge ({u}, {v}) exceeds declared node count {declared}"
                )
    return Graph(num_nodes=declared, edges=tuple(edges))


def add_self_loops(g: Graph) -> Graph:
    """Return a graph with (i, i) added for every node. Idempotent."""
    loops = tuple((i, i) for i in range(g.num_nodes))
    return Graph(num_nodes=g.num_nodes, edges=g.edges + loops)


@dataclass
class NormalizedOperators:
    """Precomputed normalized operators of a self-looped graph.

    ``a_hat`` is stored as CSR with both triangles so row iteration never
    branches on orientation; its values are d_u^{-1/2} d_v^{-1/2}, which
    makes the stored matrix exactly symmetric (float multiplication
    commutes). ``b_hat`` is built lazily on first access.
    """

    graph: Graph
    a_hat: sp.csr_matrix
    degrees: np.ndarray
    _b_hat: sp.csr_matrix | None = field(default=None, repr=False)

    @property
    def num_nodes(self) -> int:
        return self.graph.num_nodes

    @property
    def b_hat(self) -> sp.csr_matrix:
        """Oriented normalized incidence over non-loop edges, one row per
        edge: +d_u^{-1/2} at the smaller index u, -d_v^{-1/2} at v."""
        if self._b_hat is None:
            dinv = 1.0 / np.sqrt(self.degrees)
            nonloop = [(u, v) for u, v in self.graph.edges if u != v]
            rows = np.repeat(np.arange(len(nonloop)), 2)
            cols = np.empty(2 * len(nonloop), dtype=np.int64)
            vals = np.empty(2 * len(nonloop), dtype=np.float64)
            for e, (u, v) in enumerate(nonloop):
                cols[2 * e], cols[2 * e + 1] = u, v
                vals[2 * e], vals[2 * e + 1] = dinv[u], -dinv[v]
            self._b_hat = sp.csr_matrix(
                (vals, (rows, cols)), shape=(len(nonloop), self.num_nodes)
            )
        return self._b_hat

    def laplacian_apply(self, x: np.ndarray) -> np.ndarray:
        """Apply L_hat = I - A_hat to a signal."""
        return x - spmm(self, x)


def normalize(g: Graph) -> NormalizedOperators:
    """Build A_hat = D^{-1/2} A D^{-1/2} and degrees for a self-looped graph.

    Rejects graphs without full self-loops: a zero-degree node would make
    the normalization undefined, and every algorithm here assumes loops.
    """
    if not g.has_self_loops:
        raise ValueError("graph must have self-loops on every node; call add_self_loops first")
    n = g.num_nodes
    us = np.fromiter((u for u, _ in g.edges), dtype=np.int64, count=g.num_edges)
    vs = np.fromiter((v for _, v in g.edges), dtype=np.int64, count=g.num_edges)
    loop = us == vs
    rows = np.concatenate([us, vs[~loop]])
    cols = np.concatenate([vs, us[~loop]])

    degrees = np.zeros(n, dtype=np.float64)
    np.add.at(degrees, rows, 1.0)
    if np.any(degrees <= 0):
        raise ValueError("zero-degree node encountered after normalization setup")

    dinv = 1.0 / np.sqrt(degrees)
    vals = dinv[rows] * dinv[cols]
    a_hat = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    a_hat.sum_duplicates()
    return NormalizedOperators(graph=g, a_hat=a_hat, degrees=degrees)


def spmm(ops: NormalizedOperators, x: np.ndarray) -> np.ndarray:
    """Sparse A_hat times dense signal. Deterministic for fixed input."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != ops.num_nodes:
        raise ValueError(
            f"signal has {x.shape[0]} rows but the graph has {ops.num_nodes} nodes"
        )
    return ops.a_hat @ x


def as_signal(values: Sequence | np.ndarray, num_nodes: int | None = None) -> np.ndarray:
    """Validate and coerce a dense signal to a float64 (n, d) array.

    Rejects non-finite entries; 1-D input becomes a single-column signal.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError(f"signal must be 2-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains NaN or Inf entries")
    if num_nodes is not None and x.shape[0] != num_nodes:
        raise ValueError(f"signal has {x.shape[0]} rows, expected {num_nodes}")
    return x


def load_signal_csv(path: str, num_nodes: int | None = None) -> np.ndarray:
    """Load a headerless CSV where row i holds the features of node i."""
    x = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    return as_signal(x, num_nodes=num_nodes)
