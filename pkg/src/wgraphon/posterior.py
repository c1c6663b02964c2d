"""Posterior distribution of the graphon value W(u, v) under a fitted SBM.

At a fixed coordinate pair the posterior is a mixture of Beta distributions:
component (q, l) is the connectivity posterior Beta(eta_ql, zeta_ql), and its
weight is the posterior probability that u falls in block q and v in block l,
obtained from joint cdfs of the cumulative Dirichlet proportions.  Averaging
over the number of groups with the model weights gives the model-averaged
versions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, betaln, xlog1py, xlogy

from .dirichlet import DirichletParams, _joint_sigma_cdf_batch, _sigma_marginal_cdf
from .graphs import GridGraphon
from .vbem import FitEnsemble, VariationalPosterior

__all__ = [
    "CellWeights",
    "cell_weights",
    "posterior_pdf",
    "posterior_mean",
    "posterior_sd",
    "averaged_pdf",
    "averaged_mean",
    "grid_estimate",
]

_NEG_CLAMP = -1e-10
_SUM_TOL = 1e-4


@dataclass(frozen=True)
class CellWeights:
    """Posterior block-membership probabilities for one coordinate pair.

    ``omega[q, l]`` (0-based, upper triangle) is the probability that the
    smaller coordinate lies in block q+1 and the larger in block l+1.
    """

    omega: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float))

    @property
    def Q(self) -> int:
        return self.omega.shape[0]


def _weights_batch(posterior: VariationalPosterior, u, v) -> np.ndarray:
    """Block-membership weights for paired arrays with u <= v elementwise.

    Returns an array of shape (npoints, Q, Q) supported on the upper
    triangle.
    """
    q_n = posterior.Q
    d = DirichletParams(posterior.a)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    # corner cdf table F[q, l]; only l >= q - 1 is referenced below, and with
    # u <= v the (q, q-1) corner collapses to the marginal of sigma_q
    f = np.zeros((q_n + 1, q_n + 1) + u.shape)
    for qi in range(q_n + 1):
        for li in range(max(qi - 1, 0), q_n + 1):
            if li < qi:
                f[qi, li] = _sigma_marginal_cdf(qi, u, d)
            else:
                f[qi, li] = _joint_sigma_cdf_batch(qi, li, u, v, d)
    omega = np.zeros(u.shape + (q_n, q_n))
    for qi in range(1, q_n + 1):
        for li in range(qi, q_n + 1):
            w = f[qi - 1, li - 1] - f[qi, li - 1] - f[qi - 1, li] + f[qi, li]
            omega[..., qi - 1, li - 1] = w
    if omega.min() < _NEG_CLAMP:
        raise RuntimeError(f"negative cell weight {omega.min():.3e}: cdf inconsistency")
    omega = np.maximum(omega, 0.0)
    sums = omega.sum(axis=(-2, -1))
    if np.max(np.abs(sums - 1.0)) > _SUM_TOL:
        raise RuntimeError(f"cell weights sum to {sums.flat[np.argmax(np.abs(sums - 1.0))]:.6f}, not 1")
    return omega


def cell_weights(u: float, v: float, posterior: VariationalPosterior) -> CellWeights:
    """Posterior probabilities of the block pair containing (u, v).

    Coordinates are swapped when u > v (the graphon is symmetric), so the
    returned weights live on the upper triangle q <= l.
    """
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise ValueError("coordinates must lie in [0, 1]")
    if u > v:
        u, v = v, u
    omega = _weights_batch(posterior, np.array(u), np.array(v))
    return CellWeights(omega=omega)


def _beta_pdf(w, eta, zeta):
    w = np.asarray(w, dtype=float)
    return np.exp(xlogy(eta - 1.0, w) + xlog1py(zeta - 1.0, -w) - betaln(eta, zeta))


def posterior_pdf(u: float, v: float, posterior: VariationalPosterior, w_grid) -> np.ndarray:
    """Mixture density of W(u, v) evaluated on a grid of points in (0, 1)."""
    w_grid = np.asarray(w_grid, dtype=float)
    if np.any(w_grid <= 0) or np.any(w_grid >= 1):
        raise ValueError("w_grid points must lie in (0, 1)")
    omega = cell_weights(u, v, posterior).omega
    qq, ll = np.triu_indices(posterior.Q)
    dens = np.zeros_like(w_grid)
    for q, l in zip(qq, ll):
        w = omega[q, l]
        if w > 0:
            dens += w * _beta_pdf(w_grid, posterior.eta[q, l], posterior.zeta[q, l])
    return dens


def posterior_cdf(u: float, v: float, posterior: VariationalPosterior, w_grid) -> np.ndarray:
    """Mixture cdf of W(u, v) on a grid of points in [0, 1]."""
    w_grid = np.clip(np.asarray(w_grid, dtype=float), 0.0, 1.0)
    omega = cell_weights(u, v, posterior).omega
    qq, ll = np.triu_indices(posterior.Q)
    out = np.zeros_like(w_grid)
    for q, l in zip(qq, ll):
        w = omega[q, l]
        if w > 0:
            out += w * betainc(posterior.eta[q, l], posterior.zeta[q, l], w_grid)
    return out


def _mixture_moments(omega: np.ndarray, eta: np.ndarray, zeta: np.ndarray):
    mean_mat = eta / (eta + zeta)
    m2_mat = eta * (eta + 1.0) / ((eta + zeta) * (eta + zeta + 1.0))
    mean = np.sum(omega * mean_mat, axis=(-2, -1))
    m2 = np.sum(omega * m2_mat, axis=(-2, -1))
    return mean, m2


def posterior_mean(u: float, v: float, posterior: VariationalPosterior) -> float:
    """Posterior mean of W(u, v): weight-averaged Beta means."""
    omega = cell_weights(u, v, posterior).omega
    mean, _ = _mixture_moments(omega, posterior.eta, posterior.zeta)
    return float(mean)


def posterior_sd(u: float, v: float, posterior: VariationalPosterior) -> float:
    """Posterior standard deviation of W(u, v) via the mixture second moment."""
    omega = cell_weights(u, v, posterior).omega
    mean, m2 = _mixture_moments(omega, posterior.eta, posterior.zeta)
    return float(np.sqrt(max(m2 - mean**2, 0.0)))


def averaged_pdf(u: float, v: float, ensemble: FitEnsemble, w_grid) -> np.ndarray:
    """Model-averaged density: convex combination of per-Q mixtures."""
    w_grid = np.asarray(w_grid, dtype=float)
    dens = np.zeros_like(w_grid)
    for weight, fit in zip(ensemble.weights, ensemble.fits):
        if fit is not None and weight > 0:
            dens += weight * posterior_pdf(u, v, fit, w_grid)
    return dens


def averaged_mean(u: float, v: float, ensemble: FitEnsemble) -> float:
    """Model-averaged posterior mean of W(u, v)."""
    total = 0.0
    for weight, fit in zip(ensemble.weights, ensemble.fits):
        if fit is not None and weight > 0:
            total += weight * posterior_mean(u, v, fit)
    return total


def _mean_grid(posterior: VariationalPosterior, m: int) -> np.ndarray:
    """Posterior-mean surface on the m x m midpoint grid (upper triangle
    computed, then mirrored)."""
    mid = (np.arange(m) + 0.5) / m
    iu, ju = np.triu_indices(m)
    omega = _weights_batch(posterior, mid[iu], mid[ju])
    mean, _ = _mixture_moments(omega, posterior.eta, posterior.zeta)
    grid = np.zeros((m, m))
    grid[iu, ju] = mean
    grid[ju, iu] = mean
    return grid


def grid_estimate(fit_or_ensemble, m: int) -> GridGraphon:
    """Posterior-mean graphon on an m x m midpoint grid.

    Accepts a single fitted posterior or an ensemble (weighted combination of
    per-Q surfaces).  The result is exactly symmetric.
    """
    if m < 2:
        raise ValueError("grid size must be >= 2")
    if isinstance(fit_or_ensemble, FitEnsemble):
        grid = np.zeros((m, m))
        for weight, fit in zip(fit_or_ensemble.weights, fit_or_ensemble.fits):
            if fit is not None and weight > 0:
                grid += weight * _mean_grid(fit, m)
    else:
        grid = _mean_grid(fit_or_ensemble, m)
    grid = np.clip(grid, 0.0, 1.0)
    return GridGraphon(values=tuple(map(tuple, grid.tolist())))
