import json

import numpy as np
import pytest

from wgraphon import (
    BlockwiseGraphon,
    Graph,
    GridGraphon,
    ProductFormGraphon,
    eval_graphon,
    read_edge_list,
    sample_sbm,
    sample_wgraph,
    write_edge_list,
)
from wgraphon.graphs import binning_function


class TestGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            Graph(n=3, edges=frozenset({(1, 1)}))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Graph(n=3, edges=frozenset({(0, 3)}))

    def test_adjacency_symmetric(self):
        g = Graph(n=4, edges=frozenset({(0, 1), (2, 3)}))
        x = g.adjacency_matrix()
        assert np.array_equal(x, x.T)
        assert np.all(np.diag(x) == 0)
        assert g.has_edge(1, 0) and not g.has_edge(0, 2)

    def test_json_round_trip(self):
        g = Graph(n=3, edges=frozenset({(0, 2)}), node_names=("a", "b", "c"))
        assert Graph.from_json(json.loads(json.dumps(g.to_json()))) == g

    def test_from_adjacency_validates(self):
        with pytest.raises(ValueError):
            Graph.from_adjacency([[0, 1], [0, 0]])


class TestEvalGraphon:
    def test_erdos_renyi_constant(self):
        spec = ProductFormGraphon(rho=0.1, lam=1.0)
        for u, v in [(0.0, 0.0), (0.3, 0.9), (1.0, 1.0)]:
            assert eval_graphon(spec, u, v) == pytest.approx(0.1)

    def test_blockwise_binning(self):
        spec = BlockwiseGraphon(alpha=(0.5, 0.5), pi=((0.8, 0.2), (0.2, 0.8)))
        assert eval_graphon(spec, 0.25, 0.75) == 0.2
        assert eval_graphon(spec, 0.25, 0.25) == 0.8
        # half-open intervals: the boundary belongs to the upper block
        assert eval_graphon(spec, 0.5, 0.5) == 0.8
        assert eval_graphon(spec, 1.0, 1.0) == 0.8

    def test_product_form_corner(self):
        spec = ProductFormGraphon(rho=0.1, lam=2.0)
        assert eval_graphon(spec, 1.0, 1.0) == pytest.approx(0.4)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(0)
        specs = [
            ProductFormGraphon(rho=0.2, lam=2.0),
            BlockwiseGraphon(alpha=(0.3, 0.3, 0.4), pi=((0.5, 0.1, 0.2), (0.1, 0.6, 0.3), (0.2, 0.3, 0.7))),
            GridGraphon(values=((0.1, 0.4), (0.4, 0.9))),
        ]
        for spec in specs:
            for _ in range(50):
                u, v = rng.random(2)
                assert eval_graphon(spec, u, v) == eval_graphon(spec, v, u)

    def test_out_of_range_rejected(self):
        spec = ProductFormGraphon(rho=0.1, lam=1.0)
        with pytest.raises(ValueError):
            eval_graphon(spec, -0.1, 0.5)
        with pytest.raises(ValueError):
            eval_graphon(spec, 0.5, 1.1)

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            ProductFormGraphon(rho=0.1, lam=4.0)  # rho * lam^2 > 1
        with pytest.raises(ValueError):
            BlockwiseGraphon(alpha=(0.5, 0.6), pi=((0.1, 0.1), (0.1, 0.1)))
        with pytest.raises(ValueError):
            GridGraphon(values=((0.1, 0.2), (0.3, 0.4)))  # asymmetric


class TestBinning:
    def test_top_point_in_last_block(self):
        alpha = np.array([0.5, 0.5])
        assert binning_function(alpha, np.array([0.0, 0.49, 0.5, 1.0])).tolist() == [1, 1, 2, 2]


class TestSampleWgraph:
    def test_density_matches_binomial_oracle(self):
        n = 316
        graph, _ = sample_wgraph(ProductFormGraphon(rho=0.1, lam=1.0), n, seed=4)
        pairs = n * (n - 1) // 2
        se = np.sqrt(0.1 * 0.9 / pairs)
        assert abs(graph.density - 0.1) < 3 * se

    def test_zero_graphon_empty(self):
        spec = BlockwiseGraphon(alpha=(1.0,), pi=((0.0,),))
        graph, _ = sample_wgraph(spec, 30, seed=0)
        assert graph.num_edges == 0

    def test_same_seed_identical(self):
        spec = ProductFormGraphon(rho=0.2, lam=2.0)
        g1, l1 = sample_wgraph(spec, 40, seed=7)
        g2, l2 = sample_wgraph(spec, 40, seed=7)
        assert g1 == g2 and l1 == l2

    def test_latents_in_range(self):
        _, lat = sample_wgraph(ProductFormGraphon(rho=0.1, lam=1.0), 20, seed=1)
        assert len(lat.u) == 20

    def test_density_concentrates_on_integral(self):
        # Monte Carlo invariant: edge density near the graphon integral
        spec = ProductFormGraphon(rho=10**-1.5, lam=3.0)
        graph, _ = sample_wgraph(spec, 316, seed=9)
        pairs = graph.n * (graph.n - 1) // 2
        rho = spec.mean_density()
        se = np.sqrt(rho * (1 - rho) / pairs)
        # latent-driven variance inflates the band a little
        assert abs(graph.density - rho) < 5 * se


class TestSampleSbm:
    def test_single_block_density(self):
        graph, lat = sample_sbm([1.0], [[0.3]], 100, seed=2)
        pairs = 100 * 99 // 2
        se = np.sqrt(0.3 * 0.7 / pairs)
        assert abs(graph.density - 0.3) < 3 * se
        assert set(lat.z) == {1}

    def test_two_cliques_no_cross_edges(self):
        graph, lat = sample_sbm([0.5, 0.5], [[1.0, 0.0], [0.0, 1.0]], 50, seed=6)
        z = np.array(lat.z)
        for i, j in graph.edges:
            assert z[i] == z[j]
        # within-block pairs all connected
        for q in (1, 2):
            members = np.flatnonzero(z == q)
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    assert graph.has_edge(members[a], members[b])

    def test_asymmetric_pi_rejected(self):
        with pytest.raises(ValueError):
            sample_sbm([0.5, 0.5], [[0.5, 0.1], [0.2, 0.5]], 10, seed=0)

    def test_matches_blockwise_wgraph_sampling(self):
        alpha = (0.3, 0.7)
        pi = ((0.6, 0.1), (0.1, 0.4))
        g1, l1 = sample_sbm(alpha, pi, 60, seed=13)
        g2, l2 = sample_wgraph(BlockwiseGraphon(alpha=alpha, pi=pi), 60, seed=13)
        assert g1 == g2
        assert l1.z == l2.z


class TestEdgeListIO:
    def test_dedup_and_indexing(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("a b\nb c\na b\n")
        g = read_edge_list(path)
        assert g.n == 3
        assert g.edges == frozenset({(0, 1), (1, 2)})
        assert g.node_names == ("a", "b", "c")

    def test_self_loop_dropped_with_warning(self, tmp_path):
        path = tmp_path / "loop.txt"
        path.write_text("a a\n")
        with pytest.warns(UserWarning, match="self-loop"):
            g = read_edge_list(path)
        assert g.n == 1 and g.num_edges == 0

    def test_malformed_line_names_line_number(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("a b\nonly_one_token\n")
        with pytest.raises(ValueError, match="line 2"):
            read_edge_list(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("")
        with pytest.raises(ValueError, match="empty"):
            read_edge_list(path)

    def test_comma_separated(self, tmp_path):
        path = tmp_path / "csv.txt"
        path.write_text("x,y\ny,z\n")
        assert read_edge_list(path).num_edges == 2

    def test_round_trip(self, tmp_path):
        graph, _ = sample_wgraph(ProductFormGraphon(rho=0.3, lam=1.0), 25, seed=3)
        path = tmp_path / "rt.txt"
        write_edge_list(graph, path)
        back = read_edge_list(path)
        named = {frozenset((back.node_names[i], back.node_names[j])) for i, j in back.edges}
        orig = {frozenset((str(i), str(j))) for i, j in graph.edges}
        assert named == orig

    def test_real_scale_file(self, tmp_path):
        # synthetic network at the scale of the real-data example:
        # 196 nodes, 2864 edges
        rng = np.random.default_rng(0)
        edges = set()
        while len(edges) < 2864:
            i, j = rng.integers(196, size=2)
            if i != j:
                edges.add((min(i, j), max(i, j)))
        path = tmp_path / "blog.txt"
        with open(path, "w") as fh:
            for i, j in sorted(edges):
                fh.write(f"h{i} h{j}\n")
        g = read_edge_list(path)
        assert g.n == 196
        assert g.num_edges == 2864
