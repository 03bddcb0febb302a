"""
Exhaustive optimal additive tree spanner for tiny graphs (hierarchy leaves).
"""
import logging
from typing import NamedTuple

import networkx as nx
import numpy as np
from scipy.sparse.csgraph import shortest_path

from core.exceptions import CapExceededError
from core.graph import Graph

logger = logging.getLogger(__name__)

DEFAULT_SMALL_SPANNER_CAP = 8


class OptimalTreeSpanner(NamedTuple):
    tree: Graph
    surplus: int


def optimal_tree_spanner_small(g: Graph, cap: int = DEFAULT_SMALL_SPANNER_CAP) -> OptimalTreeSpanner:
    """Spanning tree of minimum additive surplus; ties go to the smallest sorted edge list"""
    if g.n > cap:
        raise CapExceededError(f"exhaustive tree spanner search refused for n={g.n} > cap {cap}")
    if g.n <= 1:
        return OptimalTreeSpanner(g, 0)
    g.require_connected()
    if g.m == g.n - 1:
        return OptimalTreeSpanner(g, 0)

    base = shortest_path(g.csr, directed=False, unweighted=True)
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from(g.edges())

    best = None
    for candidate in nx.SpanningTreeIterator(nxg):
        edges = sorted((min(u, v), max(u, v)) for u, v in candidate.edges())
        tree = Graph.from_edges(g.n, edges)
        surplus = int(np.max(shortest_path(tree.csr, directed=False, unweighted=True) - base))
        key = (surplus, edges)
        if best is None or key < best[0]:
            best = (key, tree)
    (surplus, _), tree = best
    logger.debug(f"optimal small tree spanner n={g.n} m={g.m}: surplus {surplus}")
    return OptimalTreeSpanner(tree, surplus)
