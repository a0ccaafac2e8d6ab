import math

import numpy as np
import pytest

from pswg.genmodel import Graph, ModelParams, generate


@pytest.fixture(scope="session")
def graph4096():
    return generate(ModelParams(n=4096, c=4.0, alpha=2.0, dbar=1.0, seed=7))


def make_hand_instance() -> Graph:
    """Four collinear nodes on L=20 with local radius 2 and one shortcut.

    s=(0,0) -- shortcut -- a=(3,0); local chain a-b-t with b=(4.5,0),
    t=(6,0).  The expected routes are worked out by hand in the tests.
    """
    n = 400.0
    params = ModelParams(n=n, c=4.0 / math.log(n), alpha=2.0, dbar=1.0, seed=0)
    pos = np.array([[0.0, 0.0], [3.0, 0.0], [4.5, 0.0], [6.0, 0.0]])
    local = np.array([[1, 2], [2, 3]], dtype=np.int32)
    shortcut = np.array([[0, 1]], dtype=np.int32)
    return Graph.build(params, pos, local, shortcut)


@pytest.fixture
def hand_instance():
    return make_hand_instance()


# one line per acceptance criterion, echoed at the end of the run
CRITERION_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
