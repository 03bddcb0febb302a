import pytest

from core.formats import format_edgelist

from .graphs import cycle_graph, grid_graph, path_graph


@pytest.fixture
def c6():
    return cycle_graph(6)


@pytest.fixture
def p4():
    return path_graph(4)


@pytest.fixture
def grid4():
    return grid_graph(4, 4)


@pytest.fixture
def write_graph(tmp_path):
    """Write a graph as an edge-list file and return its path as a string"""
    def _write(g, name='graph.txt'):
        path = tmp_path / name
        path.write_text(format_edgelist(g), encoding='utf-8')
        return str(path)
    return _write
