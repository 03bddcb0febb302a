"""Full-size guarantee runs; deselect with -m "not slow"."""
import math

import numpy as np
import pytest
from hypothesis import given, settings

from core.graph import Graph
from decomposition.hierarchy import build_hierarchy
from decomposition.separators import best_disk_separator
from oracle.breadth import brute_tree_breadth
from oracle.distances import apsp, collective_surplus, surplus
from oracle.evaluation import evaluate, scaling_check
from oracle.generators import gen
from spanners.local_subtrees import local_subtrees
from spanners.system import collective_system, sparse_spanner
from treedec.decomposition import lift, metrics, validate

from .graphs import connected_graphs, cycle_graph, spanning_subgraphs

pytestmark = pytest.mark.slow


def test_brute_force_oracle():
    assert brute_tree_breadth(cycle_graph(6)) == 2
    assert brute_tree_breadth(cycle_graph(9), caps={1: 9}) == 3
    for seed in range(50):
        n = 2 + seed % 6
        g = gen('chordal', {'n': n, 'max_clique': 4}, seed).graph
        assert brute_tree_breadth(g) == 1


@pytest.mark.parametrize("seed", range(50))
def test_chordal_separators_have_unit_radius(seed):
    n = 20 + (seed * 37) % 181
    g = gen('chordal', {'n': n, 'max_clique': 2 + seed % 5}, seed).graph
    assert best_disk_separator(g).radius <= 1
    assert all(node.radius <= 1 for node in build_hierarchy(g).nodes)


@pytest.mark.parametrize("seed", range(100))
def test_depth(seed):
    n = 2 ** (4 + seed % 7)
    g = gen('random_connected', {'n': n, 'extra_edges': n // 2}, seed).graph
    assert build_hierarchy(g).depth <= math.log2(n) - 1
    if n <= 512:
        assert build_hierarchy(g, k=2).depth <= math.log2(n)
    if n <= 128:
        assert build_hierarchy(g, k=3).depth <= math.log2(n)


PLANTED = [(n, t) for n in (250, 500, 1000, 2000) for t in (3, 5, 7)]


@pytest.mark.parametrize("n, t", PLANTED)
def test_sparse_and_collective_on_planted_tree_spanners(n, t):
    g = gen('planted_tree_spanner', {'n': n, 't': t, 'extra_edges': n}, n + t).graph
    rho = math.ceil(t / 2)
    h = build_hierarchy(g)
    assert h.r_max <= rho
    subtrees = local_subtrees(h)
    dist = apsp(g)

    sparse = sparse_spanner(h, subtrees)
    assert sparse.num_edges <= n * math.log2(n)
    assert surplus(g, sparse.union, g_dist=dist).max_surplus <= 2 * rho * math.log2(n) - 1

    system = collective_system(h, subtrees)
    assert system.num_trees <= math.floor(math.log2(n))
    assert all(s.tree.m == n - 1 and s.tree.is_connected() for s in system.trees)
    assert collective_surplus(g, [s.tree for s in system.trees], g_dist=dist).max_surplus <= 2 * rho * math.log2(n)


PLANTED_TW = [(n, k, t) for n, k in ((500, 1), (250, 2)) for t in (3, 5)]


@pytest.mark.parametrize("n, k, t", PLANTED_TW)
def test_collective_on_planted_low_treewidth_spanners(n, k, t):
    g = gen('planted_tw_spanner', {'n': n, 'k': k, 't': t}, n + 10 * k + t).graph
    rho = math.ceil(t / 2)
    h = build_hierarchy(g, k=k + 1)
    assert h.r_max <= rho
    system = collective_system(h)
    assert system.num_trees <= (k + 1) * (1 + math.log2(n))
    assert collective_surplus(g, [s.tree for s in system.trees]).max_surplus <= 2 * rho * (1 + math.log2(n))


@pytest.mark.parametrize("k, t", [(1, 3), (1, 5), (2, 3), (2, 5)])
def test_lift(k, t):
    instance = gen('planted_tw_spanner', {'n': 60, 'k': k, 't': t}, 100 + k + t)
    g = instance.graph
    lifted = lift(g, instance.spanner, instance.decomposition, t)
    assert validate(g, lifted) == []
    result = metrics(g, lifted, k=k + 1, bag_cap=g.n)
    assert result.k_breadth_exact and result.k_breadth <= math.ceil(t / 2)


def test_antipodal_trees():
    for n, cuts in ((12, [(0, 1), (6, 7)]), (9, [(0, 1), (4, 5)])):
        g = cycle_graph(n)
        trees = [Graph.from_edges(n, [e for e in g.edges() if e != cut]) for cut in cuts]
        assert collective_surplus(g, trees).max_surplus == 0


@given(connected_graphs(max_n=8))
@settings(max_examples=1000, deadline=None)
def test_hierarchy_guarantees_at_scale(g):
    h = build_hierarchy(g)
    system = collective_system(h)
    limit = max(0.0, 2 * max(h.r_max, 1) * math.log2(g.n) - 1) if g.n > 1 else 0
    assert collective_surplus(g, [t.tree for t in system.trees]).max_surplus <= limit


@given(connected_graphs(min_n=2, max_n=8).flatmap(lambda g: spanning_subgraphs(g).map(lambda h: (g, h))))
@settings(max_examples=1000, deadline=None)
def test_stretch_relations_at_scale(pair):
    g, h = pair
    report = surplus(g, h)
    assert report.edge_stretch == report.max_stretch <= report.max_surplus + 1


def test_near_linear_scaling():
    df = evaluate([('planted_tree_spanner', {'n': n, 't': 3, 'extra_edges': n}, n) for n in (250, 500, 1000, 2000)],
                  modes=('sparse', 'collective'), verify=False)
    timing = scaling_check(df)
    assert timing['within_limit'].all(), timing.to_string()
    assert np.isfinite(timing['seconds']).all()
