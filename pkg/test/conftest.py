from __future__ import annotations

import pytest
from click.testing import CliRunner

from treedecomp.main import cli
from treedecomp.services.labeling import Convention, VertexLabeling
from treedecomp.services.trees import Tree


@pytest.fixture
def path5() -> Tree:
    # P5 as 0-1-2-3-4
    return Tree(5, ((0, 1), (1, 2), (2, 3), (3, 4)))


@pytest.fixture
def star5() -> Tree:
    # K_{1,4} with centre 0
    return Tree(5, ((0, 1), (0, 2), (0, 3), (0, 4)))


@pytest.fixture
def path3() -> Tree:
    return Tree(3, ((0, 1), (1, 2)))


@pytest.fixture
def p5_witness() -> VertexLabeling:
    return VertexLabeling(Convention.SEMIGRACEFUL, (2, 3, 1, 4, 5))


@pytest.fixture
def invoke():
    runner = CliRunner()

    def run(*args: str):
        return runner.invoke(cli, ["--log-level", "warning", *args])

    return run
