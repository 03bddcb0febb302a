import pytest

from core.exceptions import GraphFormatError
from core.formats import format_edgelist, parse_graph, parse_tree_blocks, read_graph
from core.graph import Graph

from .graphs import cycle_graph


def test_plain_edge_list():
    g = parse_graph("0 1\n1 2\n# a comment\n\n2 0\n")
    assert g == cycle_graph(3)


def test_header_keeps_isolated_vertices():
    g = parse_graph("# spannerweave edgelist n=5 m=1\n0 1\n")
    assert g.n == 5 and g.m == 1


def test_dimacs_is_one_based():
    g = parse_graph("c sample\np edge 3 2\ne 1 2\ne 2 3\n")
    assert g.edges() == [(0, 1), (1, 2)]


def test_pace_bare_edges_after_problem_line():
    g = parse_graph("p tw 4 3\n1 2\n2 3\n3 4\n")
    assert g.edges() == [(0, 1), (1, 2), (2, 3)]


def test_declared_edge_count_mismatch_only_warns(caplog):
    g = parse_graph("p edge 3 5\ne 1 2\n")
    assert g.m == 1
    assert "declared m=5" in caplog.text


@pytest.mark.parametrize("text, line", [
    ("0 1\n1 x\n", 2),
    ("0 1\n2 2\n", 2),
    ("0 1 2\n", 1),
    ("# spannerweave edgelist n=2\n0 1\n1 2\n", 3),
    ("p edge 2 1\np edge 2 1\n", 2),
    ("0 -1\n", 1),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(GraphFormatError) as excinfo:
        parse_graph(text)
    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f"line {line}:")


def test_empty_input():
    with pytest.raises(GraphFormatError):
        parse_graph("# nothing here\n")


def test_missing_file(tmp_path):
    with pytest.raises(GraphFormatError):
        read_graph(tmp_path / "absent.txt")


def test_emitted_edge_list_reingests(c6):
    g = Graph.from_edges(7, c6.edges())
    assert parse_graph(format_edgelist(g)) == g


def test_format_subset_of_edges(c6):
    text = format_edgelist(c6, [(1, 2), (0, 1)])
    assert text.splitlines() == ["# spannerweave edgelist n=6 m=2", "0 1", "1 2"]


def test_tree_blocks():
    text = "# tree 0 level=0 center=0\n0 1\n1 2\n# tree 1 level=1 center=0\n0 2\n"
    first, second = parse_tree_blocks(text, 3)
    assert first.edges() == [(0, 1), (1, 2)]
    assert second.edges() == [(0, 2)]
    assert second.n == 3


def test_tree_blocks_without_headers_is_one_graph():
    (g,) = parse_tree_blocks("0 1\n", 4)
    assert g.n == 4 and g.m == 1
