"""Scikit-learn style front end for graphon estimation.

``GraphonEstimator.fit`` takes an adjacency matrix (or a ``Graph``), fits
SBMs for Q = 1..q_max by variational Bayes and keeps the whole ensemble, so
the usual sklearn conventions (``get_params`` / ``set_params``, trailing
underscore on fitted attributes, ``check_is_fitted``-style errors) apply.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import motifs as _motifs
from .graphs import Graph
from .posterior import averaged_mean, grid_estimate, posterior_mean
from .vbem import FitConfig, SbmPrior, fit_ensemble

__all__ = ["GraphonEstimator"]


class GraphonEstimator(BaseEstimator):
    """Estimate the graphon of a W-graph by averaging SBM fits over Q.

    Parameters
    ----------
    q_max : largest number of groups to fit.
    a0, eta0, zeta0 : scalar prior hyperparameters (uniform by default).
    max_iter, tol, restarts : VBEM fitting controls.
    random_state : seed for initializations.
    """

    def __init__(
        self,
        q_max: int = 10,
        a0: float = 1.0,
        eta0: float = 1.0,
        zeta0: float = 1.0,
        max_iter: int = 500,
        tol: float = 1e-6,
        restarts: int = 5,
        random_state: Optional[int] = None,
    ):
        self.q_max = q_max
        self.a0 = a0
        self.eta0 = eta0
        self.zeta0 = zeta0
        self.max_iter = max_iter
        self.tol = tol
        self.restarts = restarts
        self.random_state = random_state

    def _validate_graph(self, X) -> Graph:
        if isinstance(X, Graph):
            return X
        return Graph.from_adjacency(np.asarray(X))

    def fit(self, X, y=None):
        """Fit the SBM ensemble on an adjacency matrix or Graph."""
        graph = self._validate_graph(X)
        config = FitConfig(
            max_iter=self.max_iter,
            tol=self.tol,
            restarts=self.restarts,
            seed=self.random_state,
        )
        prior_family = lambda q: SbmPrior.uniform(q, self.a0, self.eta0, self.zeta0)
        self.graph_ = graph
        self.ensemble_ = fit_ensemble(graph, self.q_max, prior_family, config)
        self.map_q_ = self.ensemble_.map_q
        self.weights_ = self.ensemble_.weights
        return self

    def _check_fitted(self):
        if not hasattr(self, "ensemble_"):
            raise NotFittedError("call fit before using this estimator")

    def score(self, X=None, y=None) -> float:
        """Best converged lower bound across Q (model selection criterion)."""
        self._check_fitted()
        return self.ensemble_.map_fit.elbo

    def graphon(self, m: int = 100, average: bool = True) -> np.ndarray:
        """Posterior-mean graphon on an m x m midpoint grid."""
        self._check_fitted()
        source = self.ensemble_ if average else self.ensemble_.map_fit
        return grid_estimate(source, m).as_array()

    def predict_proba(self, coords) -> np.ndarray:
        """Posterior mean connection probability at (u, v) coordinate pairs.

        ``coords`` is an array of shape (n_pairs, 2) with entries in [0, 1].
        """
        self._check_fitted()
        coords = np.asarray(coords, dtype=float)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise ValueError("coords must have shape (n_pairs, 2)")
        return np.array([averaged_mean(u, v, self.ensemble_) for u, v in coords])

    def motif_probability(self, motif, average: bool = True) -> float:
        """Posterior mean occurrence probability of a motif (name, row-string
        or MotifSpec)."""
        self._check_fitted()
        if not isinstance(motif, _motifs.MotifSpec):
            motif = _motifs.parse_motif(motif)
        return _motifs.mu_averaged(self.ensemble_, motif, map_only=not average)
