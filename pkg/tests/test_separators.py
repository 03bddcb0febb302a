from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings

from core.exceptions import CapExceededError, ContractViolation, DisconnectedGraphError
from core.graph import Graph, disk, disks_union
from decomposition.separators import (
    balance_threshold, best_disk_separator, best_k_disk_separator, is_balanced, min_radius_at,
)
from oracle.generators import gen

from .graphs import (
    cliques_joined_by_path, complete_graph, connected_graphs, cycle_graph, nx_distances, path_graph, star_graph,
    to_nx,
)


def brute_separator(g, k):
    """First (r, centers) in (radius, lexicographic) order whose disks leave no component above n/2"""
    dist = nx_distances(g)
    half = g.n // 2
    for r in range(g.n):
        for centers in combinations(range(g.n), k):
            near = dist[list(centers)].min(axis=0)
            rest = to_nx(g)
            rest.remove_nodes_from(np.flatnonzero(near <= r).tolist())
            if all(len(c) <= half for c in nx.connected_components(rest)):
                return r, centers
    raise AssertionError("no balanced separator found")


class TestMinRadius:
    def test_path_median(self):
        assert min_radius_at(path_graph(9), 4) == 0

    @pytest.mark.parametrize("v", range(6))
    def test_cycle(self, c6, v):
        assert min_radius_at(c6, v) == 1

    @pytest.mark.parametrize("v", range(5))
    def test_clique(self, v):
        assert min_radius_at(complete_graph(5), v) == 1

    def test_disconnected(self):
        with pytest.raises(DisconnectedGraphError):
            min_radius_at(Graph.from_edges(4, [(0, 1), (2, 3)]), 0)


class TestBestDiskSeparator:
    def test_star(self):
        sep = best_disk_separator(star_graph(6, center=3))
        assert sep.centers == (3,)
        assert sep.radius == 0

    def test_cycle(self, c6):
        sep = best_disk_separator(c6)
        assert (sep.centers, sep.radius) == ((0,), 1)
        assert sep.cover == frozenset({5, 0, 1})

    def test_grid(self, grid4):
        # no unit disk of the 4x4 grid is balanced
        sep = best_disk_separator(grid4)
        assert (sep.centers, sep.radius) == ((1,), 2)
        assert sep.max_component <= balance_threshold(16)

    def test_single_vertex(self):
        sep = best_disk_separator(Graph.empty(1))
        assert (sep.centers, sep.radius) == ((0,), 0)

    @given(connected_graphs(max_n=8))
    @settings(max_examples=150, deadline=None)
    def test_matches_exhaustive_scan(self, g):
        sep = best_disk_separator(g)
        assert (sep.radius, sep.centers) == brute_separator(g, 1)
        assert sep.cover == disks_union(g, sep.centers, sep.radius)
        assert is_balanced(g, sep.cover)

    @pytest.mark.parametrize("seed", range(3))
    def test_threads_do_not_change_the_answer(self, seed):
        g = gen('random_connected', {'n': 80, 'extra_edges': 40}, seed).graph
        assert best_disk_separator(g, threads=3) == best_disk_separator(g)


class TestBestKDiskSeparator:
    def test_k1_is_the_disk_separator(self, c6):
        assert best_k_disk_separator(c6, 1) == best_disk_separator(c6)

    def test_c12_two_centers(self):
        sep = best_k_disk_separator(cycle_graph(12), 2)
        assert (sep.centers, sep.radius) == ((0, 5), 0)
        assert sep.max_component == 6

    def test_cliques_joined_by_path(self):
        g = cliques_joined_by_path()
        assert g.n == 15
        assert best_disk_separator(g).radius == 0
        sep = best_k_disk_separator(g, 2)
        assert sep.radius == 0
        assert sep.centers == (0, 7)

    def test_cap(self, c6):
        with pytest.raises(CapExceededError):
            best_k_disk_separator(c6, 4)
        sep = best_k_disk_separator(c6, 4, allow_over_cap=True)
        assert sep.radius == 0 and sep.k == 4

    def test_k_above_n(self):
        with pytest.raises(ContractViolation):
            best_k_disk_separator(path_graph(2), 3)

    def test_k_below_one(self, c6):
        with pytest.raises(ContractViolation):
            best_k_disk_separator(c6, 0)

    @given(connected_graphs(min_n=2, max_n=7))
    @settings(max_examples=100, deadline=None)
    def test_two_centers_match_exhaustive_scan(self, g):
        sep = best_k_disk_separator(g, 2)
        assert (sep.radius, sep.centers) == brute_separator(g, 2)
        assert is_balanced(g, sep.cover)

    @given(connected_graphs(max_n=8))
    @settings(max_examples=50, deadline=None)
    def test_k1_reduces_to_disk_separator(self, g):
        assert best_k_disk_separator(g, 1) == best_disk_separator(g)

    @pytest.mark.parametrize("seed", range(2))
    def test_scan_spanning_several_batches(self, seed):
        g = gen('random_connected', {'n': 40, 'extra_edges': 15}, seed).graph
        sep = best_k_disk_separator(g, 2)
        assert (sep.radius, sep.centers) == brute_separator(g, 2)

    def test_threads_do_not_change_the_answer(self):
        g = gen('random_connected', {'n': 30, 'extra_edges': 20}, 4).graph
        assert best_k_disk_separator(g, 2, threads=4) == best_k_disk_separator(g, 2)

    @given(connected_graphs(max_n=8))
    @settings(max_examples=100, deadline=None)
    def test_radius_never_grows_with_more_disks(self, g):
        radii = [best_k_disk_separator(g, k).radius for k in range(1, min(3, g.n) + 1)]
        assert radii == sorted(radii, reverse=True)


class TestBalanceMonotonicity:
    @given(connected_graphs(max_n=8))
    @settings(max_examples=100, deadline=None)
    def test_balance_holds_for_every_larger_radius(self, g):
        for v in range(g.n):
            flags = [is_balanced(g, disk(g, v, r)) for r in range(g.n)]
            assert flags == sorted(flags)
            assert flags[min_radius_at(g, v)]

    def test_grid_center(self, grid4):
        flags = [is_balanced(grid4, disk(grid4, 5, r)) for r in range(4)]
        assert flags == [False, False, True, True]


@pytest.mark.slow
class TestSeparatorOracleAtScale:
    @given(connected_graphs(max_n=8))
    @settings(max_examples=1000, deadline=None)
    def test_disk_separator_matches_exhaustive_scan(self, g):
        sep = best_disk_separator(g)
        assert (sep.radius, sep.centers) == brute_separator(g, 1)

    @given(connected_graphs(max_n=8))
    @settings(max_examples=1000, deadline=None)
    def test_two_disk_separator_matches_exhaustive_scan(self, g):
        if g.n < 2:
            return
        sep = best_k_disk_separator(g, 2)
        assert (sep.radius, sep.centers) == brute_separator(g, 2)
