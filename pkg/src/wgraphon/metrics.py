"""Evaluation metrics for graphon and motif estimates."""

from __future__ import annotations

import math

import numpy as np

from .graphs import GraphonSpec, GridGraphon

__all__ = ["rmse", "kl_bernoulli"]


def rmse(true_spec: GraphonSpec, est_grid: GridGraphon) -> float:
    """Root mean squared error between a graphon and a grid estimate.

    The true graphon is evaluated at the estimate's midpoint grid, so the
    result approximates the integrated squared error on [0, 1]^2.
    """
    m = est_grid.m
    mid = (np.arange(m) + 0.5) / m
    truth = np.asarray(true_spec.evaluate(mid[:, None], mid[None, :]), dtype=float)
    est = est_grid.as_array()
    return float(np.sqrt(np.mean((truth - est) ** 2)))


def kl_bernoulli(mu_true: float, mu_est: float) -> float:
    """Kullback-Leibler divergence between Bernoulli(mu_true) and
    Bernoulli(mu_est), with the convention 0 * log 0 = 0.

    Returns +inf when the estimate is degenerate (0 or 1) while the true
    probability is interior; callers should flag rather than aggregate it.
    """
    if not 0.0 <= mu_true <= 1.0:
        raise ValueError("mu_true must lie in [0, 1]")
    if not 0.0 <= mu_est <= 1.0:
        raise ValueError("mu_est must lie in [0, 1]")

    def _term(p, q):
        if p == 0.0:
            return 0.0
        if q == 0.0:
            return math.inf
        return p * math.log(p / q)

    return _term(mu_true, mu_est) + _term(1.0 - mu_true, 1.0 - mu_est)
