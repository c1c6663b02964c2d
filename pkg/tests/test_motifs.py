import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wgraphon import (
    BlockwiseGraphon,
    Graph,
    MotifSpec,
    ProductFormGraphon,
    builtin_motifs,
    empirical_frequency,
    mu_averaged,
    mu_numeric,
    mu_posterior_mean,
    mu_product_form,
    mu_sbm,
    parse_motif,
    sample_sbm,
)
from wgraphon.motifs import mu_product_generic, xi_product_form
from wgraphon.vbem import FitEnsemble, VariationalPosterior

TRIANGLE = builtin_motifs()["triangle"]
SQUARE = builtin_motifs()["square"]
EDGE = builtin_motifs()["edge"]


def permuted_motif(motif, perm):
    m = motif.as_array()
    p = np.asarray(perm)
    return MotifSpec(tuple(map(tuple, m[np.ix_(p, p)].astype(int).tolist())))


class TestMotifSpec:
    def test_builtin_shapes(self):
        named = builtin_motifs()
        assert named["triangle"].num_edges == 3
        assert named["square"].num_edges == 4
        assert named["star4"].degrees.tolist() == [3, 1, 1, 1]
        assert named["path3"].k == 3

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            MotifSpec(((0, 1), (0, 0)))

    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            MotifSpec(((1, 1), (1, 0)))

    def test_rejects_empty_and_oversized(self):
        with pytest.raises(ValueError):
            MotifSpec(((0, 0), (0, 0)))
        with pytest.raises(ValueError):
            MotifSpec(tuple(tuple(1 - (i == j) for j in range(6)) for i in range(6)))

    def test_parse_by_name_and_rows(self):
        assert parse_motif("triangle") == TRIANGLE
        assert parse_motif("011,101,110").num_edges == 3
        with pytest.raises(ValueError):
            parse_motif("01x,100,000")


class TestMuSbm:
    def test_q1_is_pi_power(self):
        for pi in (0.1, 0.35):
            assert mu_sbm([1.0], [[pi]], TRIANGLE) == pytest.approx(pi**3, rel=1e-12)
            assert mu_sbm([1.0], [[pi]], SQUARE) == pytest.approx(pi**4, rel=1e-12)

    def test_two_clique_limit(self):
        # equal blocks with no cross edges: triangles only form inside a block
        val = mu_sbm([0.5, 0.5], [[1.0, 0.0], [0.0, 1.0]], TRIANGLE)
        assert val == pytest.approx(2 * 0.5**3, rel=1e-12)

    def test_against_monte_carlo(self):
        alpha = [0.3, 0.7]
        pi = [[0.6, 0.1], [0.1, 0.4]]
        spec = BlockwiseGraphon(alpha=tuple(alpha), pi=tuple(map(tuple, pi)))
        for motif in (TRIANGLE, SQUARE, builtin_motifs()["star4"]):
            exact = mu_sbm(alpha, pi, motif)
            mc = mu_numeric(spec, motif, n_samples=400_000, seed=0)
            assert abs(exact - mc.value) < 3 * mc.se

    def test_rejects_asymmetric_pi(self):
        with pytest.raises(ValueError):
            mu_sbm([0.5, 0.5], [[0.5, 0.1], [0.2, 0.5]], EDGE)

    def test_labeling_guard(self):
        with pytest.raises(ValueError):
            mu_sbm(np.full(100, 0.01), np.full((100, 100), 0.1), builtin_motifs()["star4"])

    @given(st.permutations(list(range(4))))
    @settings(max_examples=20, deadline=None)
    def test_vertex_relabeling_invariant(self, perm):
        alpha = [0.25, 0.75]
        pi = [[0.7, 0.2], [0.2, 0.3]]
        base = mu_sbm(alpha, pi, SQUARE)
        assert mu_sbm(alpha, pi, permuted_motif(SQUARE, perm)) == pytest.approx(base, rel=1e-12)


class TestProductForm:
    def test_xi_closed_form_matches_quadrature(self):
        from scipy.integrate import quad

        for rho, lam, h in [(0.1, 2.0, 3), (0.05, 3.0, 2), (0.2, 1.0, 4)]:
            g = lambda z: math.sqrt(rho) * lam * z ** (lam - 1)
            num, _ = quad(lambda z: g(z) ** h, 0, 1)
            assert xi_product_form(rho, lam, h) == pytest.approx(num, rel=1e-9)

    def test_erdos_renyi_special_case(self):
        # lambda = 1 gives a flat graphon, so mu = rho^(#edges)
        assert mu_product_form(0.1, 1.0, TRIANGLE) == pytest.approx(1e-3, rel=1e-12)
        assert mu_product_form(0.1, 1.0, SQUARE) == pytest.approx(1e-4, rel=1e-12)

    def test_matches_generic_quadrature(self):
        rho, lam = 0.05, 2.5
        g = lambda z: math.sqrt(rho) * lam * z ** (lam - 1)
        for motif in builtin_motifs().values():
            assert mu_product_form(rho, lam, motif) == pytest.approx(
                mu_product_generic(g, motif), rel=1e-7
            )

    def test_against_monte_carlo(self):
        spec = ProductFormGraphon(rho=10**-1.5, lam=3.0)
        for motif in (TRIANGLE, SQUARE):
            mc = mu_numeric(spec, motif, n_samples=500_000, seed=1)
            exact = mu_product_form(10**-1.5, 3.0, motif)
            assert abs(exact - mc.value) < 3 * mc.se + 1e-8

    def test_invalid_parameters_rejected(self):
        with pytest.raises(ValueError):
            mu_product_form(0.5, 3.0, TRIANGLE)  # W exceeds 1 at the corner


class TestEmpiricalFrequency:
    def test_complete_graph_all_motifs(self):
        n = 8
        edges = frozenset((i, j) for i in range(n) for j in range(i + 1, n))
        g = Graph(n=n, edges=edges)
        for motif in builtin_motifs().values():
            assert empirical_frequency(g, motif) == 1.0

    def test_empty_graph(self):
        g = Graph(n=6, edges=frozenset())
        assert empirical_frequency(g, EDGE) == 0.0

    def test_edge_frequency_is_density(self):
        graph, _ = sample_sbm([1.0], [[0.3]], 40, seed=5)
        assert empirical_frequency(graph, EDGE) == pytest.approx(graph.density, rel=1e-12)

    def test_path_count_by_hand(self):
        # path 0-1-2 plus isolated node 3: ordered 3-paths are the 2
        # orientations of (0,1,2) out of P(4,3)=24 tuples
        g = Graph(n=4, edges=frozenset({(0, 1), (1, 2)}))
        assert empirical_frequency(g, builtin_motifs()["path3"]) == pytest.approx(2 / 24)

    def test_sampled_agrees_with_exhaustive(self):
        graph, _ = sample_sbm([0.5, 0.5], [[0.7, 0.1], [0.1, 0.5]], 30, seed=7)
        exact = empirical_frequency(graph, TRIANGLE)
        n = 200_000
        approx = empirical_frequency(graph, TRIANGLE, mode="sampled", n_samples=n, seed=0)
        se = np.sqrt(exact * (1 - exact) / n)
        assert abs(approx - exact) < 4 * se

    def test_exhaustive_guard(self):
        graph, _ = sample_sbm([1.0], [[0.1]], 200, seed=1)
        with pytest.raises(ValueError, match="sampled"):
            empirical_frequency(graph, SQUARE)

    def test_motif_larger_than_graph(self):
        g = Graph(n=2, edges=frozenset({(0, 1)}))
        with pytest.raises(ValueError):
            empirical_frequency(g, TRIANGLE)


def sampling_oracle_mu(posterior, motif, n_draws=20_000, seed=0):
    """Average the exact SBM motif probability over draws of (alpha, pi)
    from the variational posterior."""
    rng = np.random.default_rng(seed)
    q = posterior.Q
    alphas = rng.dirichlet(posterior.a, n_draws)
    pis = np.empty((n_draws, q, q))
    for i in range(q):
        for j in range(i, q):
            draws = rng.beta(posterior.eta[i, j], posterior.zeta[i, j], n_draws)
            pis[:, i, j] = draws
            pis[:, j, i] = draws
    labs = np.array(list(itertools.product(range(q), repeat=motif.k)))
    vals = np.zeros(n_draws)
    for c in labs:
        p = alphas[:, c].prod(axis=1)
        for a, b in motif.edge_list:
            p = p * pis[:, c[a], c[b]]
        vals += p
    return vals.mean(), vals.std(ddof=1) / math.sqrt(n_draws)


class TestPosteriorMean:
    def test_q1_edge_closed_form(self):
        p = VariationalPosterior(
            Q=1, a=np.array([5.0]), eta=np.array([[3.0]]), zeta=np.array([[7.0]]),
            tau=np.ones((4, 1)), elbo=0.0,
        )
        assert mu_posterior_mean(p, EDGE) == pytest.approx(0.3, abs=1e-12)

    def test_q1_triangle_is_beta_third_moment(self):
        eta, zeta = 3.0, 7.0
        p = VariationalPosterior(
            Q=1, a=np.array([5.0]), eta=np.array([[eta]]), zeta=np.array([[zeta]]),
            tau=np.ones((4, 1)), elbo=0.0,
        )
        moment = eta * (eta + 1) * (eta + 2) / ((eta + zeta) * (eta + zeta + 1) * (eta + zeta + 2))
        assert mu_posterior_mean(p, TRIANGLE) == pytest.approx(moment, rel=1e-12)

    @pytest.mark.parametrize("motif_name", ["edge", "triangle", "square"])
    def test_against_sampling_oracle(self, two_block_fit, motif_name):
        motif = builtin_motifs()[motif_name]
        exact = mu_posterior_mean(two_block_fit, motif)
        mc, se = sampling_oracle_mu(two_block_fit, motif, seed=3)
        assert abs(exact - mc) < 4 * se

    def test_averaged_is_weighted_sum(self, two_block_fit):
        ens = FitEnsemble(fits=(two_block_fit,), weights=np.array([1.0]), map_q=1)
        assert mu_averaged(ens, TRIANGLE) == mu_posterior_mean(two_block_fit, TRIANGLE)
        assert mu_averaged(ens, TRIANGLE, map_only=True) == mu_posterior_mean(
            two_block_fit, TRIANGLE
        )
