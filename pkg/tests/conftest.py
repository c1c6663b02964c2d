import sys

import numpy as np
import pytest

from wgraphon import FitConfig, fit, sample_sbm


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance criteria pass/fail lines after the run."""
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "CRITERION_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def two_clique_graph():
    """Two near-disconnected cliques: a cleanly separable SBM instance."""
    graph, latents = sample_sbm([0.5, 0.5], [[1.0, 0.0], [0.0, 1.0]], 50, seed=11)
    return graph, latents


@pytest.fixture(scope="session")
def two_block_fit():
    """A converged Q=2 fit on a strongly assortative SBM sample."""
    graph, _ = sample_sbm([0.4, 0.6], [[0.7, 0.1], [0.1, 0.5]], 80, seed=3)
    return fit(graph, 2, config=FitConfig(restarts=2, seed=5))
