import pytest

from pathshap.graph import load_graph

RUNNING_EXAMPLE = """\
# running example graph
v1 a v2 n
v1 a v3 n
v3 a v2 n
v4 a v3 n
v2 b v4 n
v4 b v6 n
v3 b v5 n
v2 b v6 n
v5 c v6 n
"""


@pytest.fixture
def fig_graph():
    return load_graph(RUNNING_EXAMPLE)


@pytest.fixture
def fig_graph_text(tmp_path):
    path = tmp_path / "running.graph"
    path.write_text(RUNNING_EXAMPLE)
    return path
