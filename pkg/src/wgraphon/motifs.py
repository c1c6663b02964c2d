"""Motif occurrence probabilities in W-graphs and their posterior means.

A motif is a small pattern of required edges given by a symmetric 0/1
adjacency matrix.  Its occurrence probability mu is the chance that a fixed
tuple of k distinct nodes realizes all prescribed edges (non-induced
semantics: extra edges are allowed).  Several routes to mu are provided --
exact enumeration under an SBM, a closed form for product-form graphons,
Monte Carlo for arbitrary graphons, empirical counting on an observed graph,
and the variational posterior mean under a fitted SBM -- so each can serve
as an independent check on the others.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from .graphs import Graph, GraphonSpec, ProductFormGraphon
from .vbem import FitEnsemble, VariationalPosterior

__all__ = [
    "MotifSpec",
    "MotifProbability",
    "builtin_motifs",
    "parse_motif",
    "empirical_frequency",
    "mu_sbm",
    "mu_product_form",
    "mu_numeric",
    "mu_posterior_mean",
    "mu_averaged",
]

_LABELING_GUARD = 10**6


@dataclass(frozen=True)
class MotifSpec:
    """Motif given by its k x k 0/1 adjacency matrix (2 <= k <= 5)."""

    adjacency: tuple
    name: Optional[str] = None

    def __post_init__(self):
        m = np.asarray(self.adjacency, dtype=int)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("motif adjacency must be square")
        if not 2 <= m.shape[0] <= 5:
            raise ValueError("motif size must be between 2 and 5")
        if not np.isin(m, (0, 1)).all():
            raise ValueError("motif adjacency must be 0/1")
        if np.any(np.diag(m) != 0):
            raise ValueError("motif adjacency must have zero diagonal")
        if not np.array_equal(m, m.T):
            raise ValueError("motif adjacency must be symmetric")
        if m.sum() == 0:
            raise ValueError("motif must have at least one edge")
        object.__setattr__(self, "adjacency", tuple(map(tuple, m.tolist())))

    @property
    def k(self) -> int:
        return len(self.adjacency)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.adjacency)

    @property
    def degrees(self) -> np.ndarray:
        return self.as_array().sum(axis=1)

    @property
    def edge_list(self) -> tuple:
        m = self.as_array()
        return tuple(zip(*np.nonzero(np.triu(m))))

    @property
    def num_edges(self) -> int:
        return len(self.edge_list)


@dataclass(frozen=True)
class MotifProbability:
    """Occurrence probability with the method that produced it."""

    value: float
    method: str
    se: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError("probability must lie in [0, 1]")

    def __float__(self) -> float:
        return self.value


def builtin_motifs() -> dict:
    """Named small motifs: edge, 3-path, triangle, 4-star and 4-cycle."""
    return {
        "edge": MotifSpec(((0, 1), (1, 0)), name="edge"),
        "path3": MotifSpec(((0, 1, 0), (1, 0, 1), (0, 1, 0)), name="path3"),
        "triangle": MotifSpec(((0, 1, 1), (1, 0, 1), (1, 1, 0)), name="triangle"),
        "star4": MotifSpec(
            ((0, 1, 1, 1), (1, 0, 0, 0), (1, 0, 0, 0), (1, 0, 0, 0)), name="star4"
        ),
        "square": MotifSpec(
            ((0, 1, 0, 1), (1, 0, 1, 0), (0, 1, 0, 1), (1, 0, 1, 0)), name="square"
        ),
    }


def parse_motif(text: str) -> MotifSpec:
    """Motif from a builtin name or comma-separated 0/1 row strings."""
    named = builtin_motifs()
    if text in named:
        return named[text]
    rows = text.split(",")
    try:
        m = [[int(c) for c in row] for row in rows]
    except ValueError as exc:
        raise ValueError(f"cannot parse motif {text!r}") from exc
    return MotifSpec(tuple(map(tuple, m)), name=text)


def empirical_frequency(
    graph: Graph,
    motif: MotifSpec,
    mode: str = "exhaustive",
    n_samples: int = 100_000,
    seed=None,
) -> float:
    """Fraction of ordered k-tuples of distinct nodes realizing the motif.

    ``mode='exhaustive'`` enumerates every tuple (guarded for small graphs);
    ``mode='sampled'`` averages over uniformly drawn tuples.
    """
    k = motif.k
    if k > graph.n:
        raise ValueError("motif larger than graph")
    x = graph.adjacency_matrix()
    edges = motif.edge_list
    if mode == "exhaustive":
        total = math.perm(graph.n, k)
        if total > 5_000_000:
            raise ValueError(f"{total} tuples: use mode='sampled'")
        hits = 0
        for tup in itertools.permutations(range(graph.n), k):
            for a, b in edges:
                if not x[tup[a], tup[b]]:
                    break
            else:
                hits += 1
        return hits / total
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        idx = rng.integers(graph.n, size=(n_samples, k))
        # resample tuples with repeated nodes
        while True:
            dup = np.zeros(idx.shape[0], dtype=bool)
            for a in range(k):
                for b in range(a + 1, k):
                    dup |= idx[:, a] == idx[:, b]
            if not dup.any():
                break
            idx[dup] = rng.integers(graph.n, size=(int(dup.sum()), k))
        y = np.ones(n_samples)
        for a, b in edges:
            y *= x[idx[:, a], idx[:, b]]
        return float(y.mean())
    raise ValueError(f"unknown mode {mode!r}")


def _labelings(q: int, k: int) -> np.ndarray:
    if q**k > _LABELING_GUARD:
        raise ValueError(f"labeling space {q}^{k} exceeds guard {_LABELING_GUARD}")
    return np.array(list(itertools.product(range(q), repeat=k)), dtype=int)


def mu_sbm(alpha, pi, motif: MotifSpec) -> float:
    """Exact occurrence probability under an SBM: sum over all labelings of
    the k motif nodes."""
    alpha = np.asarray(alpha, dtype=float)
    pi = np.asarray(pi, dtype=float)
    q = alpha.size
    if pi.shape != (q, q) or not np.allclose(pi, pi.T):
        raise ValueError("pi must be a symmetric Q x Q matrix")
    labs = _labelings(q, motif.k)
    p = alpha[labs].prod(axis=1)
    for a, b in motif.edge_list:
        p = p * pi[labs[:, a], labs[:, b]]
    return float(math.fsum(p))


def xi_product_form(rho: float, lam: float, h: int) -> float:
    """Integral of g(z)^h for g(z) = sqrt(rho) * lam * z**(lam-1)."""
    if h == 0:
        return 1.0
    return (math.sqrt(rho) * lam) ** h / (h * lam - h + 1.0)


def mu_product_form(rho: float, lam: float, motif: MotifSpec) -> float:
    """Closed-form occurrence probability when W(u, v) = g(u) g(v) with
    g(u) = sqrt(rho) * lam * u**(lam-1): a product over vertex degrees."""
    spec = ProductFormGraphon(rho=rho, lam=lam)  # validates (rho, lam)
    del spec
    return float(np.prod([xi_product_form(rho, lam, int(h)) for h in motif.degrees]))


def mu_product_generic(g, motif: MotifSpec, quad_points: int = 2001) -> float:
    """Product-form probability for an arbitrary g via 1-D quadrature."""
    from scipy.integrate import quad

    out = 1.0
    for h in motif.degrees:
        val, _ = quad(lambda z, h=int(h): g(z) ** h, 0.0, 1.0, limit=200)
        out *= val
    return float(out)


def mu_numeric(spec: GraphonSpec, motif: MotifSpec, n_samples: int = 1_000_000, seed=None) -> MotifProbability:
    """Monte Carlo estimate of the k-dimensional motif integral for any
    evaluable graphon; reports the standard error of the estimate."""
    rng = np.random.default_rng(seed)
    u = rng.random((n_samples, motif.k))
    y = np.ones(n_samples)
    for a, b in motif.edge_list:
        y *= np.asarray(spec.evaluate(u[:, a], u[:, b]), dtype=float)
    value = float(y.mean())
    se = float(y.std(ddof=1) / math.sqrt(n_samples))
    return MotifProbability(value=value, method="numeric", se=se)


def mu_posterior_mean(posterior: VariationalPosterior, motif: MotifSpec) -> float:
    """Variational posterior mean of the occurrence probability.

    Ratios of Gamma functions are evaluated as log-gamma differences and the
    labeling sum is accumulated with log-sum-exp.
    """
    q_n = posterior.Q
    k = motif.k
    labs = _labelings(q_n, k)
    a = posterior.a
    eta = posterior.eta
    zeta = posterior.zeta
    iu = np.triu_indices(q_n)
    log_pref = float(
        np.sum(gammaln(eta[iu] + zeta[iu]) - gammaln(eta[iu]))
        + gammaln(a.sum())
        - np.sum(gammaln(a))
    )
    edges = motif.edge_list
    terms = np.empty(labs.shape[0])
    for t, c in enumerate(labs):
        # per-labeling edge counts per (unordered) class pair and node counts
        eta_c = np.zeros((q_n, q_n))
        for a_, b_ in edges:
            qa, qb = c[a_], c[b_]
            if qa <= qb:
                eta_c[qa, qb] += 1
            else:
                eta_c[qb, qa] += 1
        n_c = np.bincount(c, minlength=q_n)
        term = np.sum(gammaln(eta[iu] + eta_c[iu]) - gammaln(eta[iu] + eta_c[iu] + zeta[iu]))
        term += np.sum(gammaln(a + n_c)) - gammaln(a.sum() + k)
        terms[t] = term
    value = math.exp(log_pref + logsumexp(terms))
    if not math.isfinite(value):
        raise FloatingPointError("non-finite posterior motif probability")
    return min(max(value, 0.0), 1.0)


def mu_averaged(ensemble: FitEnsemble, motif: MotifSpec, map_only: bool = False) -> float:
    """Model-averaged posterior motif probability, or the MAP-Q variant."""
    if map_only:
        return mu_posterior_mean(ensemble.map_fit, motif)
    total = 0.0
    for weight, fit in zip(ensemble.weights, ensemble.fits):
        if fit is not None and weight > 0:
            total += weight * mu_posterior_mean(fit, motif)
    return total
