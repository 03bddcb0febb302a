"""
Local subtrees of a hierarchy: one BFS tree per (node, original center) inside the
meta-free graph Ĝ(↓Y), optimal forests at k = 1 leaves and BFS trees from the
dominating centers at general-k leaves. Edges are reported in original ids.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

from joblib import Parallel, delayed

from core.graph import Edge, Induced, VertexSet, bfs_parents, components, induced, normalize_edge
from decomposition.hierarchy import HierNode, HierTree

from .small import DEFAULT_SMALL_SPANNER_CAP, optimal_tree_spanner_small

logger = logging.getLogger(__name__)


class SubtreeSource(str, Enum):
    BFS_TREE = 'bfs_tree'
    OPTIMAL_LEAF = 'optimal_leaf_spanner'
    DOMINATING_BFS = 'dominating_bfs'


@dataclass(frozen=True)
class LocalSubtree:
    level: int
    node_id: int
    center_index: int
    root: Optional[int]
    edges: Tuple[Edge, ...]
    vertices: VertexSet
    source: SubtreeSource


def _to_original(node: HierNode, stripped: Induced, x: int) -> int:
    return node.graph.original_id(stripped.new_to_old[x])


def _bfs_subtree(node: HierNode, stripped: Induced, l: int, source: SubtreeSource) -> Optional[LocalSubtree]:
    root = node.original_centers()[l]
    if root is None:
        return None
    start = stripped.old_to_new[node.centers[l]]
    dist, parent = bfs_parents(stripped.graph, start)
    edges, vertices = [], []
    for x, p in enumerate(parent.tolist()):
        if dist[x] == float('inf'):
            continue
        vertices.append(_to_original(node, stripped, x))
        if p >= 0:
            edges.append(normalize_edge(_to_original(node, stripped, x), _to_original(node, stripped, p)))
    return LocalSubtree(node.depth, node.id, l, root, tuple(sorted(edges)), frozenset(vertices), source)


def _leaf_forest(node: HierNode, stripped: Induced, cap: int) -> Optional[LocalSubtree]:
    if stripped.graph.n == 0:
        return None
    edges = []
    for comp in components(stripped.graph):
        sub = induced(stripped.graph, comp)
        best = optimal_tree_spanner_small(sub.graph, cap=cap)
        for a, b in best.tree.edges():
            x, y = sub.new_to_old[a], sub.new_to_old[b]
            edges.append(normalize_edge(_to_original(node, stripped, x), _to_original(node, stripped, y)))
    vertices = frozenset(_to_original(node, stripped, x) for x in range(stripped.graph.n))
    return LocalSubtree(node.depth, node.id, 0, None, tuple(sorted(edges)), vertices, SubtreeSource.OPTIMAL_LEAF)


def node_subtrees(node: HierNode, k: int, small_cap: int = DEFAULT_SMALL_SPANNER_CAP) -> List[LocalSubtree]:
    stripped = node.graph.stripped()
    if node.is_leaf and k == 1:
        forest = _leaf_forest(node, stripped, small_cap)
        return [forest] if forest is not None else []
    source = SubtreeSource.DOMINATING_BFS if node.is_leaf else SubtreeSource.BFS_TREE
    out = []
    for l in range(len(node.centers)):
        subtree = _bfs_subtree(node, stripped, l, source)
        if subtree is not None:
            out.append(subtree)
    return out


def local_subtrees(h: HierTree, threads: int = 1, small_cap: int = DEFAULT_SMALL_SPANNER_CAP) -> List[LocalSubtree]:
    """All local subtrees ordered by (level, node id, center index)"""
    if threads > 1 and len(h.nodes) > 1:
        per_node = Parallel(n_jobs=threads, prefer="threads")(
            delayed(node_subtrees)(node, h.k, small_cap) for node in h.nodes
        )
    else:
        per_node = [node_subtrees(node, h.k, small_cap) for node in h.nodes]
    subtrees = [s for group in per_node for s in group]
    logger.info(f"{len(subtrees)} local subtrees from {len(h.nodes)} hierarchy nodes")
    return subtrees
