"""
Spanner assembly from local subtrees: the sparse additive spanner (union of all
subtrees) and the system of collective additive tree spanners (one spanning tree
per level, and per center index when k > 1).
"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

from scipy.cluster.hierarchy import DisjointSet

from core.exceptions import ContractViolation
from core.graph import Edge, Graph, bfs_tree_edges
from decomposition.hierarchy import HierTree

from .local_subtrees import LocalSubtree, local_subtrees

logger = logging.getLogger(__name__)


class SpannerMode(str, Enum):
    COLLECTIVE = 'collective'
    SPARSE = 'sparse'
    BFS = 'bfs'


@dataclass(frozen=True)
class SystemTree:
    level: int
    center_index: int
    tree: Graph


@dataclass(frozen=True)
class SpannerSystem:
    mode: SpannerMode
    n: int
    k: int
    r_max: int
    trees: Tuple[SystemTree, ...]
    union: Graph

    @property
    def num_trees(self) -> int:
        return len(self.trees)

    @property
    def num_edges(self) -> int:
        return self.union.m

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mode': self.mode.value,
            'n': self.n,
            'k': self.k,
            'r_max': self.r_max,
            'num_trees': self.num_trees,
            'num_edges': self.num_edges,
            'trees': [{'level': t.level, 'center_index': t.center_index} for t in self.trees],
        }


# ---------------------------------------------------------------------------
# Guarantees, in terms of the radius actually certified by the hierarchy
# ---------------------------------------------------------------------------

def _rho(r_max: int) -> int:
    return max(r_max, 1)


def surplus_bound(n: int, k: int, r_max: int) -> float:
    if n <= 1:
        return 0.0
    log_n = math.log2(n)
    if k == 1:
        return max(0.0, 2 * _rho(r_max) * log_n - 1)
    return 2 * _rho(r_max) * (1 + log_n)


def edge_count_bound(n: int, k: int) -> float:
    if n <= 1:
        return 0.0
    log_n = math.log2(n)
    if k == 1:
        return n * log_n
    return k * (n - 1) * (1 + log_n)


def tree_count_bound(n: int, k: int) -> int:
    if n <= 1:
        return 1
    log_n = math.log2(n)
    if k == 1:
        return max(1, math.floor(log_n))
    return max(1, math.floor(k * (1 + log_n)))


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def _union_graph(n: int, edge_groups: Iterable[Iterable[Edge]]) -> Graph:
    return Graph.from_edges(n, (e for group in edge_groups for e in group))


def sparse_spanner(h: HierTree, subtrees: Optional[List[LocalSubtree]] = None, threads: int = 1) -> SpannerSystem:
    """Union of every local subtree as one spanning subgraph"""
    subtrees = local_subtrees(h, threads=threads) if subtrees is None else subtrees
    union = _union_graph(h.original_n, (s.edges for s in subtrees))
    logger.info(f"sparse spanner: {union.m} edges on {union.n} vertices")
    return SpannerSystem(SpannerMode.SPARSE, h.original_n, h.k, h.r_max, (), union)


def complete_forest(g: Graph, forest: Iterable[Edge], pool: Iterable[Edge] = ()) -> Graph:
    """Extend a forest of g to a spanning tree.

    Completion edges come from `pool` first and then from the rest of g, each in
    ascending order; a pool that spans g keeps the tree inside the pool.
    """
    uf = DisjointSet(range(g.n))
    edges = []
    for u, v in sorted(forest):
        if not g.has_edge(u, v):
            raise ContractViolation(f"forest edge ({u}, {v}) is not an edge of the graph")
        if not uf.merge(u, v):
            raise ContractViolation(f"forest edges close a cycle at ({u}, {v})")
        edges.append((u, v))
    for u, v in sorted(pool):
        if not g.has_edge(u, v):
            raise ContractViolation(f"pool edge ({u}, {v}) is not an edge of the graph")
        if uf.merge(u, v):
            edges.append((u, v))
    if len(edges) < g.n - 1:
        for u, v in g.edges():
            if uf.merge(u, v):
                edges.append((u, v))
    return Graph.from_edges(g.n, edges)


def collective_system(h: HierTree, subtrees: Optional[List[LocalSubtree]] = None, threads: int = 1) -> SpannerSystem:
    """One spanning tree per (level, center index) group of local subtrees"""
    subtrees = local_subtrees(h, threads=threads) if subtrees is None else subtrees
    g = h.graph
    groups: Dict[Tuple[int, int], List[Edge]] = defaultdict(list)
    for s in subtrees:
        groups[(s.level, s.center_index)].extend(s.edges)
    if not groups:
        groups[(0, 0)] = []
    # completing inside the sparse union keeps every tree a subgraph of it
    pool = sorted({e for s in subtrees for e in s.edges})
    kept: List[SystemTree] = []
    seen = set()
    for level, l in sorted(groups):
        tree = complete_forest(g, groups[(level, l)], pool)
        # identical trees serve the same pairs; keep the first
        if tree.adjacency in seen:
            continue
        seen.add(tree.adjacency)
        kept.append(SystemTree(level, l, tree))
    trees = tuple(kept)
    union = _union_graph(g.n, (t.tree.edges() for t in trees))
    logger.info(f"collective system: {len(trees)} spanning trees, union has {union.m} edges")
    return SpannerSystem(SpannerMode.COLLECTIVE, g.n, h.k, h.r_max, trees, union)


def bfs_system(g: Graph) -> SpannerSystem:
    """BFS trees rooted at 0..n-2: every pair u < v is served exactly by the tree rooted at u"""
    g.require_connected()
    roots = range(max(1, g.n - 1))
    trees = tuple(SystemTree(0, root, Graph.from_edges(g.n, bfs_tree_edges(g, root))) for root in roots)
    union = _union_graph(g.n, (t.tree.edges() for t in trees))
    return SpannerSystem(SpannerMode.BFS, g.n, 1, 0, trees, union)
