"""Undirected graphs, graphon specifications and random graph samplers.

A graphon is a symmetric function W: [0,1]^2 -> [0,1].  Three representations
are supported:

* ``ProductFormGraphon`` -- W(u, v) = g(u) g(v) with g(u) = sqrt(rho) * lam *
  u^(lam - 1); ``lam = 1`` is the Erdos-Renyi model with density ``rho``.
* ``BlockwiseGraphon`` -- W(u, v) = pi[C(u), C(v)] where C is the binning
  function induced by the cumulative class proportions; this is exactly the
  stochastic block model.
* ``GridGraphon`` -- piecewise-constant values tabulated on an m x m midpoint
  grid (used for estimates).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "Graph",
    "LatentDraw",
    "GraphonSpec",
    "ProductFormGraphon",
    "BlockwiseGraphon",
    "GridGraphon",
    "eval_graphon",
    "binning_function",
    "sample_wgraph",
    "sample_sbm",
    "read_edge_list",
    "write_edge_list",
]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes 0..n-1.

    Edges are stored as a frozenset of (i, j) pairs with i < j; no self loops,
    no duplicates.  Instances are immutable and safe to share across threads.
    """

    n: int
    edges: frozenset
    node_names: Optional[tuple] = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("node count must be nonnegative")
        for e in self.edges:
            i, j = e
            if not (0 <= i < j < self.n):
                raise ValueError(f"invalid edge {e} for n={self.n}")
        if self.node_names is not None and len(self.node_names) != self.n:
            raise ValueError("node_names length must equal n")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def density(self) -> float:
        pairs = self.n * (self.n - 1) // 2
        return self.num_edges / pairs if pairs else 0.0

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        a, b = (i, j) if i < j else (j, i)
        return (a, b) in self.edges

    def adjacency_matrix(self) -> np.ndarray:
        """Dense symmetric 0/1 adjacency matrix with zero diagonal."""
        x = np.zeros((self.n, self.n))
        if self.edges:
            idx = np.array(sorted(self.edges))
            x[idx[:, 0], idx[:, 1]] = 1.0
            x[idx[:, 1], idx[:, 0]] = 1.0
        return x

    def adjacency_lists(self) -> list:
        adj = [[] for _ in range(self.n)]
        for i, j in sorted(self.edges):
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "edges": sorted(map(list, self.edges)),
            "names": list(self.node_names) if self.node_names else None,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Graph":
        names = obj.get("names")
        return cls(
            n=int(obj["n"]),
            edges=frozenset((int(i), int(j)) for i, j in obj["edges"]),
            node_names=tuple(names) if names else None,
        )

    @classmethod
    def from_adjacency(cls, x, node_names=None) -> "Graph":
        x = np.asarray(x)
        if x.ndim != 2 or x.shape[0] != x.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if not np.array_equal(x, x.T):
            raise ValueError("adjacency matrix must be symmetric")
        if np.any(np.diag(x) != 0):
            raise ValueError("adjacency matrix must have zero diagonal")
        if not np.isin(x, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        ii, jj = np.nonzero(np.triu(x, 1))
        edges = frozenset(zip(ii.tolist(), jj.tolist()))
        return cls(n=x.shape[0], edges=edges, node_names=node_names)


@dataclass(frozen=True)
class LatentDraw:
    """Latent node variables behind a sampled graph.

    ``u`` holds the uniform coordinates of a W-graph draw; ``z`` holds the
    1-based class labels when the graphon is blockwise (SBM).
    """

    u: Optional[tuple] = None
    z: Optional[tuple] = None

    def __post_init__(self):
        if self.u is None and self.z is None:
            raise ValueError("at least one of u, z must be given")
        if self.u is not None and not all(0.0 <= x <= 1.0 for x in self.u):
            raise ValueError("latent coordinates must lie in [0, 1]")
        if self.z is not None and min(self.z) < 1:
            raise ValueError("class labels are 1-based")


class GraphonSpec:
    """Base class for evaluable graphon specifications."""

    def evaluate(self, u, v):
        """Evaluate W(u, v); accepts scalars or broadcastable arrays."""
        raise NotImplementedError

    def mean_density(self) -> float:
        """Integral of W over the unit square (Monte Carlo fallback)."""
        rng = np.random.default_rng(0)
        u = rng.random(200_000)
        v = rng.random(200_000)
        return float(np.mean(self.evaluate(u, v)))


@dataclass(frozen=True)
class ProductFormGraphon(GraphonSpec):
    """W(u, v) = g(u) g(v) with g(u) = sqrt(rho) * lam * u**(lam - 1)."""

    rho: float
    lam: float

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("rho must lie in (0, 1]")
        if self.lam < 1.0:
            raise ValueError("lam must be >= 1")
        # max W = rho * lam**2 must stay <= 1
        if self.lam > 1.0 / np.sqrt(self.rho) + 1e-12:
            raise ValueError("lam must satisfy lam <= 1/sqrt(rho)")

    def g(self, u):
        u = np.asarray(u, dtype=float)
        return np.sqrt(self.rho) * self.lam * u ** (self.lam - 1.0)

    def evaluate(self, u, v):
        return self.g(u) * self.g(v)

    def mean_density(self) -> float:
        return self.rho


@dataclass(frozen=True)
class BlockwiseGraphon(GraphonSpec):
    """Blockwise-constant graphon: W(u, v) = pi[C(u), C(v)]."""

    alpha: tuple
    pi: tuple

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        pi = np.asarray(self.pi, dtype=float)
        if alpha.ndim != 1 or np.any(alpha <= 0):
            raise ValueError("alpha must be a strictly positive vector")
        if abs(alpha.sum() - 1.0) > 1e-12:
            raise ValueError("alpha must sum to 1")
        if pi.shape != (alpha.size, alpha.size):
            raise ValueError("pi must be Q x Q")
        if not np.allclose(pi, pi.T, rtol=0, atol=0):
            raise ValueError("pi must be symmetric")
        if np.any(pi < 0) or np.any(pi > 1):
            raise ValueError("pi entries must lie in [0, 1]")
        object.__setattr__(self, "alpha", tuple(alpha.tolist()))
        object.__setattr__(self, "pi", tuple(map(tuple, pi.tolist())))

    @property
    def Q(self) -> int:
        return len(self.alpha)

    def labels(self, u):
        """1-based block label C(u) for each coordinate."""
        return binning_function(np.asarray(self.alpha), u)

    def evaluate(self, u, v):
        pi = np.asarray(self.pi)
        cu = self.labels(u) - 1
        cv = self.labels(v) - 1
        return pi[cu, cv]

    def mean_density(self) -> float:
        a = np.asarray(self.alpha)
        return float(a @ np.asarray(self.pi) @ a)


@dataclass(frozen=True)
class GridGraphon(GraphonSpec):
    """Graphon tabulated on an m x m midpoint grid; cell (i, j) covers
    [i/m, (i+1)/m) x [j/m, (j+1)/m)."""

    values: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("grid must be square")
        if np.any(v < 0) or np.any(v > 1):
            raise ValueError("grid values must lie in [0, 1]")
        if not np.array_equal(v, v.T):
            raise ValueError("grid must be symmetric")
        object.__setattr__(self, "values", tuple(map(tuple, v.tolist())))

    @property
    def m(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values)

    def evaluate(self, u, v):
        vals = self.as_array()
        iu = np.minimum((np.asarray(u, dtype=float) * self.m).astype(int), self.m - 1)
        iv = np.minimum((np.asarray(v, dtype=float) * self.m).astype(int), self.m - 1)
        return vals[iu, iv]


def binning_function(alpha: np.ndarray, u) -> np.ndarray:
    """1-based block index of u under cumulative proportions of alpha.

    Blocks are the half-open intervals [sigma_{q-1}, sigma_q), with the top
    point mapped to the last block.
    """
    u = np.asarray(u, dtype=float)
    sigma = np.cumsum(alpha)
    # interior boundaries only, so u = 1 lands in block Q
    labels = np.searchsorted(sigma[:-1], u, side="right") + 1
    return labels


def eval_graphon(spec: GraphonSpec, u, v):
    """Evaluate a graphon at (u, v); coordinates must lie in [0, 1]."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u < 0) or np.any(u > 1) or np.any(v < 0) or np.any(v > 1):
        raise ValueError("graphon coordinates must lie in [0, 1]")
    out = spec.evaluate(u, v)
    if u.ndim == 0 and v.ndim == 0:
        return float(out)
    return out


def sample_wgraph(spec: GraphonSpec, n: int, seed) -> tuple:
    """Sample a W-graph: uniform latents, independent Bernoulli edges.

    Uses numpy's PCG64 generator, so a given seed reproduces the same graph
    on any platform.  Returns (Graph, LatentDraw); for blockwise specs the
    draw carries the class labels as well, and the graph is identical to the
    one ``sample_sbm`` produces for the same seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    p = np.asarray(spec.evaluate(u[:, None], u[None, :]), dtype=float)
    r = rng.random((n, n))
    ii, jj = np.nonzero(np.triu(r < p, 1))
    edges = frozenset(zip(ii.tolist(), jj.tolist()))
    z = None
    if isinstance(spec, BlockwiseGraphon):
        z = tuple(int(c) for c in spec.labels(u))
    return Graph(n=n, edges=edges), LatentDraw(u=tuple(u.tolist()), z=z)


def sample_sbm(alpha, pi, n: int, seed) -> tuple:
    """Sample an SBM graph: multinomial labels, blockwise Bernoulli edges.

    Labels are drawn by binning uniform latents through the cumulative class
    proportions, so this coincides exactly with ``sample_wgraph`` on the
    corresponding blockwise graphon.
    """
    spec = BlockwiseGraphon(alpha=tuple(np.asarray(alpha, dtype=float)), pi=tuple(map(tuple, np.asarray(pi, dtype=float))))
    return sample_wgraph(spec, n, seed)


def read_edge_list(path) -> Graph:
    """Read a whitespace- or comma-separated edge list.

    Node identifiers are arbitrary strings, mapped to dense indices in order
    of first appearance.  Duplicate edges are collapsed; self loops are
    dropped with a warning (real network exports contain them).
    """
    names: dict = {}
    edges = set()
    loops = 0
    n_lines = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            n_lines += 1
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ValueError(f"{path}: malformed line {lineno}: {line!r}")
            a, b = parts
            for node in (a, b):
                if node not in names:
                    names[node] = len(names)
            if a == b:
                loops += 1
                continue
            i, j = names[a], names[b]
            edges.add((i, j) if i < j else (j, i))
    if n_lines == 0:
        raise ValueError(f"{path}: empty edge list")
    if loops:
        warnings.warn(f"{path}: dropped {loops} self-loop(s)")
    return Graph(n=len(names), edges=frozenset(edges), node_names=tuple(names))


def write_edge_list(graph: Graph, path) -> None:
    """Write one edge per line using node names when available."""
    names = graph.node_names or tuple(str(i) for i in range(graph.n))
    with open(path, "w") as fh:
        for i, j in sorted(graph.edges):
            fh.write(f"{names[i]} {names[j]}\n")
