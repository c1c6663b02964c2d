"""Graphon and motif-probability estimation by Bayesian averaging of
stochastic block models fitted with variational Bayes EM."""

__version__ = "0.1.0"

from .graphs import (
    BlockwiseGraphon,
    Graph,
    GraphonSpec,
    GridGraphon,
    LatentDraw,
    ProductFormGraphon,
    eval_graphon,
    read_edge_list,
    sample_sbm,
    sample_wgraph,
    write_edge_list,
)
from .vbem import (
    FitConfig,
    FitEnsemble,
    SbmPrior,
    VariationalPosterior,
    elbo,
    fit,
    fit_ensemble,
    model_weights,
    sort_identifiable,
)
from .dirichlet import DirichletParams, dirichlet_cdf_biv, dirichlet_cdf_uni, joint_sigma_cdf
from .posterior import (
    CellWeights,
    averaged_mean,
    averaged_pdf,
    cell_weights,
    grid_estimate,
    posterior_mean,
    posterior_pdf,
    posterior_sd,
)
from .motifs import (
    MotifProbability,
    MotifSpec,
    builtin_motifs,
    empirical_frequency,
    mu_averaged,
    mu_numeric,
    mu_posterior_mean,
    mu_product_form,
    mu_sbm,
    parse_motif,
)
from .metrics import kl_bernoulli, rmse
from .estimator import GraphonEstimator
from .simulate import EstimateReport, SimConfig, analyze_network, run_simulation
