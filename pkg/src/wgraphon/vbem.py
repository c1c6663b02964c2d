"""Variational Bayes EM for the Bernoulli stochastic block model.

Conjugate priors (Dirichlet on class proportions, Beta on connectivities)
give closed-form coordinate updates.  The evidence lower bound at a
parameter optimum reduces to differences of log-Beta and log-Dirichlet
normalizers plus the entropy of the soft labels; its converged value drives
both model selection (argmax over Q) and model averaging (softmax weights).
The converged bound stands in for the log marginal likelihood; the two are
identical at Q = 1, where the bound collapses to the exact Beta-Binomial
log marginal.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.special import betaln, digamma, gammaln, xlogy

from .graphs import Graph

__all__ = [
    "SbmPrior",
    "FitConfig",
    "VariationalPosterior",
    "FitEnsemble",
    "fit",
    "elbo",
    "sort_identifiable",
    "fit_ensemble",
    "model_weights",
]

_TAU_FLOOR = 1e-12


@dataclass(frozen=True)
class SbmPrior:
    """Conjugate prior hyperparameters for a Q-group SBM.

    ``a0`` is the Dirichlet vector on class proportions, ``eta0``/``zeta0``
    the Beta parameter matrices on connectivities.  Defaults are uniform.
    """

    a0: np.ndarray
    eta0: np.ndarray
    zeta0: np.ndarray

    def __post_init__(self):
        a0 = np.asarray(self.a0, dtype=float)
        eta0 = np.asarray(self.eta0, dtype=float)
        zeta0 = np.asarray(self.zeta0, dtype=float)
        q = a0.size
        if np.any(a0 <= 0) or np.any(eta0 <= 0) or np.any(zeta0 <= 0):
            raise ValueError("prior hyperparameters must be strictly positive")
        if eta0.shape != (q, q) or zeta0.shape != (q, q):
            raise ValueError("eta0, zeta0 must be Q x Q")
        if not (np.allclose(eta0, eta0.T) and np.allclose(zeta0, zeta0.T)):
            raise ValueError("eta0, zeta0 must be symmetric")
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "eta0", eta0)
        object.__setattr__(self, "zeta0", zeta0)

    @property
    def Q(self) -> int:
        return self.a0.size

    @classmethod
    def uniform(cls, q: int, a0: float = 1.0, eta0: float = 1.0, zeta0: float = 1.0) -> "SbmPrior":
        return cls(
            a0=np.full(q, a0),
            eta0=np.full((q, q), eta0),
            zeta0=np.full((q, q), zeta0),
        )


@dataclass(frozen=True)
class FitConfig:
    """Knobs for a single VBEM fit."""

    max_iter: int = 500
    tol: float = 1e-6
    restarts: int = 5
    seed: Optional[int] = None


@dataclass(frozen=True)
class VariationalPosterior:
    """Converged variational posterior of a Q-group SBM fit.

    ``a`` parametrizes the Dirichlet over class proportions, ``eta``/``zeta``
    the Beta matrices over connectivities, ``tau`` the row-stochastic soft
    labels.  ``elbo`` is the converged bound; ``elbo_trace`` the per-iteration
    values of the run that produced it.
    """

    Q: int
    a: np.ndarray
    eta: np.ndarray
    zeta: np.ndarray
    tau: np.ndarray
    elbo: float
    elbo_trace: tuple = ()
    n_iter: int = 0
    converged: bool = True

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=float))
        object.__setattr__(self, "zeta", np.asarray(self.zeta, dtype=float))
        object.__setattr__(self, "tau", np.asarray(self.tau, dtype=float))

    def alpha_mean(self) -> np.ndarray:
        """Posterior mean class proportions."""
        return self.a / self.a.sum()

    def pi_mean(self) -> np.ndarray:
        """Posterior mean connectivity matrix."""
        return self.eta / (self.eta + self.zeta)

    def expected_degrees(self) -> np.ndarray:
        """Plug-in expected degree of each group, d_q = sum_l alpha_l pi_ql."""
        return self.pi_mean() @ self.alpha_mean()

    def to_json(self, include_tau: bool = False) -> dict:
        out = {
            "Q": self.Q,
            "a": self.a.tolist(),
            "eta": self.eta.tolist(),
            "zeta": self.zeta.tolist(),
            "elbo": self.elbo,
        }
        if include_tau:
            out["tau"] = self.tau.tolist()
        return out


@dataclass(frozen=True)
class FitEnsemble:
    """Best fit per Q in 1..Q_max with model-averaging weights.

    Weights are the softmax of the converged bounds; ``map_q`` is the 1-based
    Q maximizing the bound.  Failed fits appear as None with weight 0.
    """

    fits: tuple
    weights: np.ndarray
    map_q: int

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))

    @property
    def q_max(self) -> int:
        return len(self.fits)

    @property
    def map_fit(self) -> VariationalPosterior:
        return self.fits[self.map_q - 1]

    def to_json(self, include_tau: bool = False) -> dict:
        return {
            "per_q": [f.to_json(include_tau) if f is not None else None for f in self.fits],
            "weights": self.weights.tolist(),
            "map_q": self.map_q,
        }


def _as_adjacency(graph) -> np.ndarray:
    if isinstance(graph, Graph):
        return graph.adjacency_matrix()
    return np.asarray(graph, dtype=float)


def elbo(graph, posterior: VariationalPosterior, prior: SbmPrior) -> float:
    """Evidence lower bound at a parameter optimum for the given soft labels.

    Computed entirely in the log domain as log-Beta and log-Dirichlet
    normalizer differences plus the label entropy; for Q = 1 this is the
    exact Beta-Binomial log marginal likelihood.
    """
    x = _as_adjacency(graph)
    if posterior.tau.shape[0] != x.shape[0] or posterior.Q != prior.Q:
        raise ValueError("graph / posterior / prior dimensions disagree")
    iu = np.triu_indices(posterior.Q)
    j = np.sum(
        betaln(posterior.eta[iu], posterior.zeta[iu])
        - betaln(prior.eta0[iu], prior.zeta0[iu])
    )
    j += np.sum(gammaln(posterior.a)) - gammaln(posterior.a.sum())
    j -= np.sum(gammaln(prior.a0)) - gammaln(prior.a0.sum())
    j -= np.sum(xlogy(posterior.tau, posterior.tau))
    return float(j)


def _m_step(x: np.ndarray, tau: np.ndarray, prior: SbmPrior):
    """Closed-form update of (a, eta, zeta) given soft labels."""
    s = tau.sum(axis=0)
    a = prior.a0 + s
    n_edges = tau.T @ x @ tau
    n_pairs = np.outer(s, s) - tau.T @ tau
    # diagonal cells count each unordered pair once
    eta_stat = n_edges.copy()
    zeta_stat = n_pairs - n_edges
    np.fill_diagonal(eta_stat, np.diag(n_edges) / 2.0)
    np.fill_diagonal(zeta_stat, (np.diag(n_pairs) - np.diag(n_edges)) / 2.0)
    eta = prior.eta0 + np.maximum(eta_stat, 0.0)
    zeta = prior.zeta0 + np.maximum(zeta_stat, 0.0)
    return a, eta, zeta


def _e_step(x: np.ndarray, tau: np.ndarray, a, eta, zeta) -> np.ndarray:
    """One sweep of node-by-node soft label updates.

    Nodes are updated sequentially (each update is an exact coordinate
    maximization given the others), which preserves the ascent guarantee that
    a synchronous sweep would not.
    """
    n, q = tau.shape
    dig_a = digamma(a) - digamma(a.sum())
    amat = digamma(eta) - digamma(zeta)
    bmat = digamma(zeta) - digamma(eta + zeta)
    tau = tau.copy()
    col_sum = tau.sum(axis=0)
    xt = x @ tau
    for i in range(n):
        logt = dig_a + amat @ xt[i] + bmat @ (col_sum - tau[i])
        logt -= logt.max()
        t = np.exp(logt)
        t = np.maximum(t, _TAU_FLOOR)
        t /= t.sum()
        delta = t - tau[i]
        if np.abs(delta).max() > 1e-15:
            col_sum += delta
            xt += np.outer(x[:, i], delta)
            tau[i] = t
    return tau


def _init_tau(x: np.ndarray, q: int, restart: int, rng: np.random.Generator) -> np.ndarray:
    """Initial soft labels: k-means on adjacency rows first, then perturbed
    random assignments for the remaining restarts."""
    n = x.shape[0]
    if q == 1:
        return np.ones((n, 1))
    if restart == 0:
        try:
            from sklearn.cluster import KMeans

            km = KMeans(n_clusters=q, n_init=1, random_state=int(rng.integers(2**31)))
            labels = km.fit_predict(x)
        except Exception:
            labels = rng.integers(q, size=n)
        tau = np.full((n, q), 0.05 / q)
        tau[np.arange(n), labels] += 0.95
    else:
        tau = rng.dirichlet(np.ones(q) * 2.0, size=n)
        tau = np.maximum(tau, _TAU_FLOOR)
    return tau / tau.sum(axis=1, keepdims=True)


def _fit_single(x: np.ndarray, q: int, prior: SbmPrior, config: FitConfig, tau0: np.ndarray) -> VariationalPosterior:
    tau = tau0
    trace = []
    a = eta = zeta = None
    prev = None
    converged = False
    for it in range(config.max_iter):
        a, eta, zeta = _m_step(x, tau, prior)
        post = VariationalPosterior(Q=q, a=a, eta=eta, zeta=zeta, tau=tau, elbo=0.0)
        j = elbo(x, post, prior)
        if not np.isfinite(j):
            raise FloatingPointError("non-finite ELBO")
        trace.append(j)
        if prev is not None and abs(j - prev) <= config.tol * abs(prev):
            converged = True
            break
        prev = j
        if q == 1:
            converged = True
            break
        tau = _e_step(x, tau, a, eta, zeta)
    return VariationalPosterior(
        Q=q,
        a=a,
        eta=eta,
        zeta=zeta,
        tau=tau,
        elbo=trace[-1],
        elbo_trace=tuple(trace),
        n_iter=len(trace),
        converged=converged,
    )


def fit(graph, q: int, prior: Optional[SbmPrior] = None, config: Optional[FitConfig] = None) -> VariationalPosterior:
    """Fit a Q-group SBM by VBEM, keeping the best of several restarts.

    Alternates soft-label sweeps with closed-form parameter updates until the
    relative change of the bound falls below ``config.tol``.  The returned
    posterior has its groups sorted by increasing expected degree.
    """
    if q < 1:
        raise ValueError("Q must be >= 1")
    x = _as_adjacency(graph)
    if x.shape[0] < 1:
        raise ValueError("graph must be nonempty")
    prior = prior if prior is not None else SbmPrior.uniform(q)
    if prior.Q != q:
        raise ValueError("prior dimension does not match Q")
    config = config if config is not None else FitConfig()
    rng = np.random.default_rng(config.seed)
    n_restarts = 1 if q == 1 else max(1, config.restarts)
    best = None
    failures = []
    for restart in range(n_restarts):
        tau0 = _init_tau(x, q, restart, rng)
        try:
            post = _fit_single(x, q, prior, config, tau0)
        except FloatingPointError as exc:
            failures.append(exc)
            continue
        if best is None or post.elbo > best.elbo:
            best = post
    if best is None:
        raise RuntimeError(f"all {n_restarts} restarts failed for Q={q}: {failures[-1]}")
    return sort_identifiable(best)


def sort_identifiable(posterior: VariationalPosterior) -> VariationalPosterior:
    """Relabel groups so plug-in expected degrees are nondecreasing.

    Fixes the version of the blockwise graphon being estimated; idempotent,
    ties broken by original index, ELBO unchanged.
    """
    if posterior.Q == 1:
        return posterior
    order = np.argsort(posterior.expected_degrees(), kind="stable")
    if np.array_equal(order, np.arange(posterior.Q)):
        return posterior
    return replace(
        posterior,
        a=posterior.a[order],
        eta=posterior.eta[np.ix_(order, order)],
        zeta=posterior.zeta[np.ix_(order, order)],
        tau=posterior.tau[:, order],
    )


def fit_ensemble(
    graph,
    q_max: int,
    prior_family: Optional[callable] = None,
    config: Optional[FitConfig] = None,
) -> FitEnsemble:
    """Fit every Q in 1..q_max and compute model-averaging weights.

    ``prior_family`` maps Q to an SbmPrior (uniform by default).  Weights are
    softmax of the converged bounds (log-sum-exp normalized); fits that fail
    in all restarts get weight 0 with a warning.
    """
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    prior_family = prior_family if prior_family is not None else SbmPrior.uniform
    config = config if config is not None else FitConfig()
    seeds = np.random.SeedSequence(config.seed).spawn(q_max)
    fits = []
    for q in range(1, q_max + 1):
        cfg = replace(config, seed=seeds[q - 1])
        try:
            fits.append(fit(graph, q, prior_family(q), cfg))
        except RuntimeError as exc:
            warnings.warn(f"fit failed for Q={q}: {exc}")
            fits.append(None)
    elbos = np.array([f.elbo if f is not None else -np.inf for f in fits])
    if not np.isfinite(elbos).any():
        raise RuntimeError("all fits failed")
    w = model_weights(elbos)
    map_q = int(np.argmax(elbos)) + 1
    return FitEnsemble(fits=tuple(fits), weights=w, map_q=map_q)


def model_weights(elbos) -> np.ndarray:
    """Model-averaging weights proportional to exp(elbo), normalized by
    log-sum-exp; -inf entries get weight 0."""
    elbos = np.asarray(elbos, dtype=float)
    shifted = elbos - elbos.max()
    w = np.exp(shifted)
    return w / w.sum()
