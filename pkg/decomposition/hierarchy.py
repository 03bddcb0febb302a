"""
Hierarchical decomposition tree H(G).

Every node owns a connected minor G(↓Y) of the input. Internal nodes remove a
minimum-radius balanced (k-)disk separator Y and hand each remaining component,
plus meta vertices standing in for the removed disks, to a child. Leaves are the
small graphs left at the bottom (at most 5 vertices for k = 1, 2k + 1 otherwise).

Node ids are assigned level by level once the whole tree exists, so a threaded
build and a sequential build produce the same tree.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from core.exceptions import ContractViolation
from core.graph import (
    AnnotatedGraph, Graph, Meta, VertexKind, VertexSet, components, induced,
)

from .separators import DEFAULT_K_CAP, DiskSeparator, best_k_disk_separator

logger = logging.getLogger(__name__)


class NodeKind(str, Enum):
    INTERNAL = 'internal'
    LEAF = 'leaf'


def leaf_size(k: int) -> int:
    return 5 if k == 1 else 2 * k + 1


# ---------------------------------------------------------------------------
# Splitting a node graph into its children
# ---------------------------------------------------------------------------

def _child(ag: AnnotatedGraph, component: VertexSet, attach: List[VertexSet], meta_edges: List[Tuple[int, int]],
           node_id: Optional[Hashable], disk_indices: List[int]) -> AnnotatedGraph:
    """Component graph plus one meta vertex per entry of `attach`, appended in order"""
    sub = induced(ag.graph, component)
    base = sub.graph.n
    edges = sub.graph.edges()
    for offset, touching in enumerate(attach):
        edges.extend((sub.old_to_new[x], base + offset) for x in sorted(touching))
    edges.extend((base + a, base + b) for a, b in meta_edges)
    tags: List[VertexKind] = [ag.tags[v] for v in sub.new_to_old]
    tags.extend(Meta(node_id, j) for j in disk_indices)
    return AnnotatedGraph(Graph.from_edges(base + len(attach), edges), tuple(tags))


def _touching(g: Graph, component: VertexSet, part: VertexSet) -> VertexSet:
    return frozenset(x for x in component if not part.isdisjoint(g.neighbor_sets[x]))


def split_k1(ag: AnnotatedGraph, sep: DiskSeparator, node_id: Optional[Hashable] = None) -> List[AnnotatedGraph]:
    """G_i^+ for every component G_i of G - D_r(v): the component plus one meta vertex
    adjacent to the component vertices at distance one from the disk."""
    g = ag.graph
    children = []
    for comp in components(g, sep.cover):
        touching = _touching(g, comp, sep.cover)
        children.append(_child(ag, comp, [touching], [], node_id, [0]))
    return children


def partition_disks(g: Graph, centers: Sequence[int], r: int) -> Tuple[VertexSet, ...]:
    """Split the union of the radius-r disks into connected parts D_1..D_k, c_j in D_j.

    Runs a BFS seeded with the centers in index order (as from a dummy vertex adjacent
    to all of them), truncated at depth r; every vertex joins the part of the center
    whose BFS branch reached it first.
    """
    if len(set(centers)) != len(centers):
        raise ContractViolation(f"centers must be distinct, got {list(centers)}")
    if r < 0:
        raise ContractViolation(f"radius must be non-negative, got {r}")
    owner = np.full(g.n, -1, dtype=np.int64)
    depth = np.zeros(g.n, dtype=np.int64)
    queue = deque()
    for j, c in enumerate(centers):
        owner[c] = j
        queue.append(c)
    while queue:
        u = queue.popleft()
        if depth[u] >= r:
            continue
        for w in g.adjacency[u]:
            if owner[w] < 0:
                owner[w] = owner[u]
                depth[w] = depth[u] + 1
                queue.append(w)
    return tuple(frozenset(np.flatnonzero(owner == j).tolist()) for j in range(len(centers)))


def split_general(ag: AnnotatedGraph, parts: Sequence[VertexSet], centers: Sequence[int],
                  node_id: Optional[Hashable] = None) -> List[AnnotatedGraph]:
    """G_i^+ for k disks: meta vertex c_i^j only when component G_i touches D_j, and an
    edge c_i^j c_i^l when c_j and c_l lie in one component of G - V(G_i)."""
    g = ag.graph
    cover = frozenset().union(*parts)
    children = []
    for comp in components(g, cover):
        attach, disk_indices = [], []
        for j, part in enumerate(parts):
            touching = _touching(g, comp, part)
            if touching:
                attach.append(touching)
                disk_indices.append(j)
        outside = components(g, comp)
        label = {v: idx for idx, block in enumerate(outside) for v in block}
        meta_edges = [
            (a, b)
            for a, b in combinations(range(len(disk_indices)), 2)
            if label[centers[disk_indices[a]]] == label[centers[disk_indices[b]]]
        ]
        children.append(_child(ag, comp, attach, meta_edges, node_id, disk_indices))
    return children


def dominating_set(g: Graph, max_size: int) -> Tuple[int, ...]:
    """Smallest dominating set of size at most max_size, lexicographically first"""
    everything = frozenset(range(g.n))
    closed = [g.neighbor_sets[v] | {v} for v in range(g.n)]
    for size in range(1, max_size + 1):
        for subset in combinations(range(g.n), size):
            if frozenset().union(*(closed[v] for v in subset)) == everything:
                return subset
    raise ContractViolation(f"no dominating set of size <= {max_size} in a graph on {g.n} vertices")


# ---------------------------------------------------------------------------
# The tree itself
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HierNode:
    id: int
    depth: int
    kind: NodeKind
    centers: Tuple[int, ...]
    radius: int
    bag: VertexSet
    graph: AnnotatedGraph
    children: Tuple[int, ...]
    parent: Optional[int]

    @property
    def is_leaf(self) -> bool:
        return self.kind is NodeKind.LEAF

    def bag_originals(self) -> VertexSet:
        return self.graph.originals_of(self.bag)

    def original_centers(self) -> Tuple[Optional[int], ...]:
        """Original id of each center, None where the center is a meta vertex"""
        return tuple(self.graph.original_id(c) for c in self.centers)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'id': self.id,
            'depth': self.depth,
            'kind': self.kind.value,
            # meta centers have no original id
            'centers': list(self.original_centers()),
            'radius': self.radius,
            'n': self.graph.n,
            'bag_original_ids': sorted(self.bag_originals()),
            'children': list(self.children),
        }


@dataclass(frozen=True)
class HierTree:
    nodes: Tuple[HierNode, ...]
    k: int
    original_n: int
    original_m: int
    node_of_vertex: Tuple[int, ...]

    root = 0

    @property
    def graph(self) -> Graph:
        """The input graph (the root's minor carries identity tags)"""
        return self.nodes[self.root].graph.graph

    @property
    def depth(self) -> int:
        return max(node.depth for node in self.nodes)

    @property
    def r_max(self) -> int:
        """Largest separator radius used; a lower bound on tb_k of the input"""
        return max((node.radius for node in self.nodes if not node.is_leaf), default=0)

    def path_to_root(self, node_id: int) -> List[int]:
        """Node ids from the root down to node_id"""
        path = []
        current: Optional[int] = node_id
        while current is not None:
            path.append(current)
            current = self.nodes[current].parent
        return path[::-1]

    def common_ancestors(self, a: int, b: int) -> List[int]:
        """Root-to-NCA path of two nodes"""
        pa, pb = self.path_to_root(a), self.path_to_root(b)
        out = []
        for x, y in zip(pa, pb):
            if x != y:
                break
            out.append(x)
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'n': self.original_n,
            'm': self.original_m,
            'depth': self.depth,
            'r_max': self.r_max,
            'breadth_lower_bound': self.r_max,
            'nodes': [node.to_dict() for node in self.nodes],
        }


@dataclass
class _Draft:
    path: Tuple[int, ...]
    graph: AnnotatedGraph
    kind: NodeKind
    centers: Tuple[int, ...]
    radius: int
    bag: VertexSet
    children: List["_Draft"] = field(default_factory=list)


def _grow(ag: AnnotatedGraph, path: Tuple[int, ...], k: int, k_cap: int, allow_over_cap: bool,
          threads: int) -> _Draft:
    g = ag.graph
    everything = frozenset(range(g.n))
    if g.n <= leaf_size(k):
        if k == 1:
            centers, radius = (), 0
        else:
            centers = dominating_set(g, k)
            radius = 0 if len(centers) == g.n else 1
        logger.info(f"leaf {path or 'root'}: n={g.n} centers={centers}")
        return _Draft(path, ag, NodeKind.LEAF, centers, radius, everything)

    sep = best_k_disk_separator(g, k, k_cap=k_cap, allow_over_cap=allow_over_cap, threads=threads)
    if k == 1:
        parts = (sep.cover,)
        children = split_k1(ag, sep, node_id=path)
    else:
        parts = partition_disks(g, sep.centers, sep.radius)
        children = split_general(ag, parts, sep.centers, node_id=path)
    logger.info(
        f"node {path or 'root'}: n={g.n} centers={sep.centers} r={sep.radius} "
        f"cover={len(sep.cover)} children={len(children)}"
    )
    draft = _Draft(path, ag, NodeKind.INTERNAL, sep.centers, sep.radius, sep.cover)

    if threads > 1 and len(children) > 1:
        draft.children = Parallel(n_jobs=threads, prefer="threads")(
            delayed(_grow)(child, path + (i,), k, k_cap, allow_over_cap, 1)
            for i, child in enumerate(children)
        )
    else:
        draft.children = [
            _grow(child, path + (i,), k, k_cap, allow_over_cap, threads) for i, child in enumerate(children)
        ]
    return draft


def _flatten(root: _Draft) -> List[Tuple[_Draft, Optional[Tuple[int, ...]]]]:
    out = []
    stack = [(root, None)]
    while stack:
        draft, parent = stack.pop()
        out.append((draft, parent))
        stack.extend((child, draft.path) for child in draft.children)
    return out


def build_hierarchy(g: Graph, k: int = 1, k_cap: int = DEFAULT_K_CAP, allow_over_cap: bool = False,
                    threads: int = 1) -> HierTree:
    if g.n < 1:
        raise ContractViolation("graph must have at least one vertex")
    if k < 1:
        raise ContractViolation(f"k must be at least 1, got {k}")
    g.require_connected()
    logger.info(f"building hierarchy n={g.n} m={g.m} k={k}")

    root = _grow(AnnotatedGraph.from_graph(g), (), k, k_cap, allow_over_cap, threads)
    drafts = sorted(_flatten(root), key=lambda item: (len(item[0].path), item[0].path))
    ids = {draft.path: i for i, (draft, _) in enumerate(drafts)}

    nodes = []
    node_of_vertex = [-1] * g.n
    for i, (draft, parent) in enumerate(drafts):
        node = HierNode(
            id=i,
            depth=len(draft.path),
            kind=draft.kind,
            centers=tuple(int(c) for c in draft.centers),
            radius=int(draft.radius),
            bag=draft.bag,
            graph=draft.graph.retag(ids),
            children=tuple(ids[child.path] for child in draft.children),
            parent=None if parent is None else ids[parent],
        )
        for v in node.bag_originals():
            if node_of_vertex[v] != -1:
                raise ContractViolation(f"vertex {v} lies in the bags of nodes {node_of_vertex[v]} and {i}")
            node_of_vertex[v] = i
        nodes.append(node)

    missing = [v for v, owner in enumerate(node_of_vertex) if owner == -1]
    if missing:
        raise ContractViolation(f"vertices {missing} are in no bag")
    tree = HierTree(tuple(nodes), k, g.n, g.m, tuple(node_of_vertex))
    logger.info(f"hierarchy done: {len(nodes)} nodes, depth {tree.depth}, r_max {tree.r_max}")
    return tree
