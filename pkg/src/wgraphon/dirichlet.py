"""Uni- and bivariate cdfs of cumulative sums of Dirichlet components.

For alpha ~ Dir(a) with cumulated parameters s_q = a_1 + ... + a_q, the
cumulative proportions sigma_q = alpha_1 + ... + alpha_q have marginals
Beta(s_q, s_Q - s_q).  The joint cdf of (sigma_q, sigma_l) reduces, by
Dirichlet aggregation, to cdfs of a 3-part Dirichlet (d1, d2, d3):

    G1(x)     = P(d1 < x)            (a Beta cdf)
    G13(x, y) = P(d1 < x, d3 < y)    (one-dimensional quadrature)

The bivariate case is evaluated by Gauss-Legendre quadrature of the exact
conditional decomposition, with the node count doubled until two successive
evaluations agree to tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, betaln, xlog1py, xlogy

__all__ = [
    "DirichletParams",
    "dirichlet_cdf_uni",
    "dirichlet_cdf_biv",
    "joint_sigma_cdf",
]

_QUAD_TOL = 1e-8
_QUAD_NODES = (64, 128, 256, 512, 1024)

_leggauss_cache: dict = {}


def _leggauss(k: int):
    if k not in _leggauss_cache:
        _leggauss_cache[k] = np.polynomial.legendre.leggauss(k)
    return _leggauss_cache[k]


@dataclass(frozen=True)
class DirichletParams:
    """Dirichlet parameter vector with its cumulated sums."""

    a: np.ndarray
    s: np.ndarray = None

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 1 or np.any(a <= 0):
            raise ValueError("Dirichlet parameters must be strictly positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "s", np.cumsum(a))

    @property
    def Q(self) -> int:
        return self.a.size


def _check_a3(a3) -> np.ndarray:
    a3 = np.asarray(a3, dtype=float)
    if a3.shape != (3,) or np.any(a3 <= 0):
        raise ValueError("expected 3 strictly positive Dirichlet parameters")
    return a3


def dirichlet_cdf_uni(x: float, a3) -> float:
    """P(d1 < x) for (d1, d2, d3) ~ Dir(a3): the Beta(a1, a2+a3) cdf."""
    a3 = _check_a3(a3)
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return float(betainc(a3[0], a3[1] + a3[2], x))


def _biv_cdf_batch(x, y, a3, tol: float = _QUAD_TOL):
    """Vectorized G13(x, y) = P(d1 < x, d3 < y) over paired arrays.

    Integrates f_Beta(t; a1, a2+a3) * F_Beta(y/(1-t); a3, a2) over t in
    (0, min(x, 1)) with adaptive-order Gauss-Legendre nodes.
    """
    a1, a2, a3_ = a3
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    y = np.asarray(y, dtype=float)
    out = np.zeros(np.broadcast(x, y).shape)
    x, y = np.broadcast_arrays(x, y)
    live = (x > 0.0) & (y > 0.0)
    # y >= 1 makes the second event sure
    sure = live & (y >= 1.0)
    if sure.any():
        out[sure] = betainc(a1, a2 + a3_, x[sure])
    todo = live & (y < 1.0)
    if not todo.any():
        return out
    xs = x[todo]
    ys = y[todo]
    lbeta = betaln(a1, a2 + a3_)
    prev = None
    for k in _QUAD_NODES:
        nodes, weights = _leggauss(k)
        t = xs[:, None] * (nodes[None, :] + 1.0) / 2.0
        w = xs[:, None] / 2.0 * weights[None, :]
        logf = xlogy(a1 - 1.0, t) + xlog1py(a2 + a3_ - 1.0, -t) - lbeta
        inner = betainc(a3_, a2, np.clip(ys[:, None] / (1.0 - t), 0.0, 1.0))
        val = np.sum(w * np.exp(logf) * inner, axis=1)
        if prev is not None and np.max(np.abs(val - prev)) < tol:
            break
        prev = val
    else:
        err = float(np.max(np.abs(val - prev)))
        if err > 100 * tol:
            raise RuntimeError(f"bivariate Dirichlet cdf quadrature reached only {err:.2e}")
    out[todo] = np.clip(val, 0.0, 1.0)
    return out


def dirichlet_cdf_biv(x: float, y: float, a3) -> float:
    """P(d1 < x, d3 < y) for a 3-part Dirichlet; limits match the univariate
    cdf when the second event is sure."""
    a3 = _check_a3(a3)
    return float(_biv_cdf_batch(np.array([x]), np.array([y]), a3)[0])


def _sigma_marginal_cdf(j: int, x, d: DirichletParams):
    """P(sigma_j < x) with boundary conventions sigma_0 = 0, sigma_Q = 1."""
    x = np.asarray(x, dtype=float)
    if j == 0:
        return (x > 0.0).astype(float)
    if j == d.Q:
        return (x > 1.0).astype(float)
    sq = d.s[j - 1]
    return betainc(sq, d.s[-1] - sq, np.clip(x, 0.0, 1.0))


def _joint_sigma_cdf_batch(q: int, l: int, u, v, d: DirichletParams):
    """Vectorized F_{q,l}(u, v) = P(sigma_q < u, sigma_l < v), q <= l.

    When called with q > l the arguments are swapped (the event is symmetric
    in the two coordinates).
    """
    if q > l:
        return _joint_sigma_cdf_batch(l, q, v, u, d)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if q == 0:
        return (u > 0.0).astype(float) * _sigma_marginal_cdf(l, v, d)
    if l == d.Q:
        return _sigma_marginal_cdf(q, u, d) * (v > 1.0).astype(float)
    if q == l:
        return _sigma_marginal_cdf(q, np.minimum(u, v), d)
    sq = d.s[q - 1]
    sl = d.s[l - 1]
    a3 = np.array([sq, sl - sq, d.s[-1] - sl])
    return _sigma_marginal_cdf(q, u, d) - _biv_cdf_batch(u, 1.0 - v, a3)


def joint_sigma_cdf(q: int, l: int, u: float, v: float, d: DirichletParams) -> float:
    """Joint cdf of the cumulative proportions (sigma_q, sigma_l).

    Indices run from 0 to Q with the conventions sigma_0 = 0 and sigma_Q = 1,
    which contribute indicator factors at the boundaries.
    """
    Q = d.Q
    if not (0 <= q <= Q and 0 <= l <= Q):
        raise ValueError(f"indices must lie in [0, {Q}]")
    return float(_joint_sigma_cdf_batch(q, l, np.array([u]), np.array([v]), d)[0])
