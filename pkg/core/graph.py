"""
Graph primitives used by every other spannerweave module.

Graphs are simple, undirected, unweighted and immutable. Vertex ids are the dense
integers 0..n-1 and every set-valued result is reported in ascending id order.
Distances are float arrays with ``INFINITY`` marking unreachable vertices, which is
what scipy's csgraph routines hand back.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .exceptions import ContractViolation, DisconnectedGraphError, InvalidEdgeError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
VertexSet = FrozenSet[int]

INFINITY = np.inf


def vertex_set(vertices: Iterable[int]) -> VertexSet:
    return frozenset(int(v) for v in vertices)


def normalize_edge(u: int, v: int) -> Edge:
    u, v = int(u), int(v)
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph stored as sorted adjacency tuples"""

    n: int
    adjacency: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ContractViolation(f"adjacency has {len(self.adjacency)} rows for n={self.n}")
        for v, row in enumerate(self.adjacency):
            previous = -1
            for w in row:
                if w <= previous:
                    raise ContractViolation(f"neighbors of {v} are not strictly ascending")
                if w == v:
                    raise ContractViolation(f"self-loop at vertex {v}")
                if not 0 <= w < self.n:
                    raise ContractViolation(f"neighbor {w} of {v} out of range")
                previous = w
        for v, row in enumerate(self.adjacency):
            for w in row:
                if v not in self.neighbor_sets[w]:
                    raise ContractViolation(f"adjacency not symmetric on ({v}, {w})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        """Build a graph on n vertices; duplicate edges are merged"""
        rows: List[set] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ContractViolation(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ContractViolation(f"self-loop at vertex {u}")
            rows[u].add(v)
            rows[v].add(u)
        return cls(n, tuple(tuple(sorted(r)) for r in rows))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, tuple(() for _ in range(n)))

    @cached_property
    def neighbor_sets(self) -> Tuple[FrozenSet[int], ...]:
        return tuple(frozenset(row) for row in self.adjacency)

    @cached_property
    def m(self) -> int:
        return sum(len(row) for row in self.adjacency) // 2

    @cached_property
    def csr(self) -> csr_matrix:
        degrees = [len(row) for row in self.adjacency]
        rows = np.repeat(np.arange(self.n), degrees)
        cols = np.fromiter((w for row in self.adjacency for w in row), dtype=np.int64, count=sum(degrees))
        data = np.ones(len(cols), dtype=np.int8)
        return csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        if not (0 <= u < self.n and 0 <= v < self.n):
            return False
        return v in self.neighbor_sets[u]

    def edges(self) -> List[Edge]:
        """All edges (u, v) with u < v, in ascending order"""
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def component_count(self) -> int:
        if self.n == 0:
            return 0
        count, _ = connected_components(self.csr, directed=False)
        return int(count)

    def is_connected(self) -> bool:
        return self.n <= 1 or self.component_count() == 1

    def require_connected(self) -> None:
        count = self.component_count()
        if count > 1:
            raise DisconnectedGraphError(count)

    def is_subgraph_of(self, other: "Graph") -> bool:
        if self.n != other.n:
            return False
        return all(other.has_edge(u, v) for u, v in self.edges())


class Induced(NamedTuple):
    graph: Graph
    new_to_old: Tuple[int, ...]
    old_to_new: Dict[int, int]


class Contraction(NamedTuple):
    graph: Graph
    mapping: Tuple[int, ...]


def _check_vertices(g: Graph, vertices: Iterable[int]) -> None:
    for v in vertices:
        if not 0 <= v < g.n:
            raise ContractViolation(f"vertex {v} out of range for n={g.n}")


def bfs_distances(g: Graph, sources: Iterable[int]) -> np.ndarray:
    """Hop distance from the nearest source to every vertex (INFINITY if unreachable)"""
    sources = sorted({int(s) for s in sources})
    if not sources:
        raise ContractViolation("bfs_distances needs at least one source")
    _check_vertices(g, sources)
    return dijkstra(g.csr, directed=False, indices=sources, unweighted=True, min_only=True)


def disk(g: Graph, v: int, r: int) -> VertexSet:
    """D_r(v, g): all vertices at distance at most r from v"""
    if r < 0:
        raise ContractViolation(f"radius must be non-negative, got {r}")
    dist = bfs_distances(g, [v])
    return vertex_set(np.flatnonzero(dist <= r))


def disks_union(g: Graph, centers: Iterable[int], r: int) -> VertexSet:
    """Union of the radius-r disks around the given centers"""
    if r < 0:
        raise ContractViolation(f"radius must be non-negative, got {r}")
    dist = bfs_distances(g, centers)
    return vertex_set(np.flatnonzero(dist <= r))


def components(g: Graph, removed: Iterable[int] = ()) -> List[VertexSet]:
    """Connected components of g - removed, ordered by their smallest vertex"""
    removed = list(removed)
    _check_vertices(g, removed)
    keep_mask = np.ones(g.n, dtype=bool)
    keep_mask[removed] = False
    keep = np.flatnonzero(keep_mask)
    if keep.size == 0:
        return []
    sub = g.csr[keep][:, keep]
    count, labels = connected_components(sub, directed=False)
    groups: List[List[int]] = [[] for _ in range(count)]
    for vertex, label in zip(keep.tolist(), labels.tolist()):
        groups[label].append(vertex)
    return sorted((frozenset(group) for group in groups), key=min)


def largest_component(g: Graph, removed_mask: np.ndarray) -> int:
    """Size of the largest component once the masked vertices are deleted"""
    keep = np.flatnonzero(~removed_mask)
    if keep.size == 0:
        return 0
    sub = g.csr[keep][:, keep]
    _, labels = connected_components(sub, directed=False)
    return int(np.bincount(labels).max())


def largest_components(g: Graph, removed_masks: np.ndarray) -> np.ndarray:
    """largest_component for every row of a (batch, n) removal mask, in one labelling pass.

    The rows become disjoint copies of g inside one block-diagonal graph.
    """
    batch, n = removed_masks.shape
    if batch == 0 or n == 0:
        return np.zeros(batch, dtype=np.int64)
    coo = g.csr.tocoo()
    keep = ~removed_masks
    which, edge = np.nonzero(keep[:, coo.row] & keep[:, coo.col])
    offset = which * n
    data = np.ones(len(edge), dtype=np.int8)
    block = csr_matrix((data, (offset + coo.row[edge], offset + coo.col[edge])), shape=(batch * n, batch * n))
    _, labels = connected_components(block, directed=False)
    sizes = np.bincount(labels)[labels].reshape(batch, n)
    sizes[removed_masks] = 0
    return sizes.max(axis=1)


def induced(g: Graph, keep: Iterable[int]) -> Induced:
    """g[keep] relabelled to 0..|keep|-1 in ascending order of old ids"""
    order = sorted({int(v) for v in keep})
    _check_vertices(g, order)
    index = {v: i for i, v in enumerate(order)}
    adjacency = tuple(tuple(index[w] for w in g.adjacency[v] if w in index) for v in order)
    return Induced(Graph(len(order), adjacency), tuple(order), index)


def contract_edge(g: Graph, e: Sequence[int]) -> Contraction:
    """G/e: merge the endpoints of e, keeping the smaller id, and drop duplicates"""
    u, v = normalize_edge(*e)
    if not g.has_edge(u, v):
        raise InvalidEdgeError((u, v))
    mapping = tuple(w if w < v else (u if w == v else w - 1) for w in range(g.n))
    edges = set()
    for a, b in g.edges():
        x, y = mapping[a], mapping[b]
        if x != y:
            edges.add(normalize_edge(x, y))
    return Contraction(Graph.from_edges(g.n - 1, edges), mapping)


def bfs_parents(g: Graph, root: int) -> Tuple[np.ndarray, np.ndarray]:
    """BFS tree from root; each vertex's parent is its smallest neighbor one layer up.

    Returns (dist, parent) with parent -1 for the root and unreachable vertices.
    """
    dist = bfs_distances(g, [root])
    parent = np.full(g.n, -1, dtype=np.int64)
    for v in range(g.n):
        if v == root or not np.isfinite(dist[v]):
            continue
        want = dist[v] - 1
        for w in g.adjacency[v]:
            if dist[w] == want:
                parent[v] = w
                break
    return dist, parent


def bfs_tree_edges(g: Graph, root: int) -> List[Edge]:
    _, parent = bfs_parents(g, root)
    return sorted(normalize_edge(v, p) for v, p in enumerate(parent.tolist()) if p >= 0)


# ---------------------------------------------------------------------------
# Annotated graphs: the minors G(↓Y) carried by hierarchy nodes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Original:
    original_id: int


@dataclass(frozen=True)
class Meta:
    """Representative of a separator disk; node_id is the creating hierarchy node"""

    node_id: Optional[Hashable]
    disk_index: int


VertexKind = Union[Original, Meta]


@dataclass(frozen=True)
class AnnotatedGraph:
    graph: Graph
    tags: Tuple[VertexKind, ...]

    def __post_init__(self):
        if len(self.tags) != self.graph.n:
            raise ContractViolation(f"{len(self.tags)} tags for {self.graph.n} vertices")
        ids = [t.original_id for t in self.tags if isinstance(t, Original)]
        if len(ids) != len(set(ids)):
            raise ContractViolation("original ids must be distinct")

    @classmethod
    def from_graph(cls, g: Graph) -> "AnnotatedGraph":
        return cls(g, tuple(Original(v) for v in range(g.n)))

    @property
    def n(self) -> int:
        return self.graph.n

    def is_meta(self, v: int) -> bool:
        return isinstance(self.tags[v], Meta)

    def original_id(self, v: int) -> Optional[int]:
        tag = self.tags[v]
        return tag.original_id if isinstance(tag, Original) else None

    def original_vertices(self) -> List[int]:
        return [v for v, t in enumerate(self.tags) if isinstance(t, Original)]

    def meta_vertices(self) -> List[int]:
        return [v for v, t in enumerate(self.tags) if isinstance(t, Meta)]

    def originals_of(self, vertices: Iterable[int]) -> VertexSet:
        return frozenset(t.original_id for t in (self.tags[v] for v in vertices) if isinstance(t, Original))

    def stripped(self) -> Induced:
        """Ĝ: the graph with every meta vertex removed (may be disconnected)"""
        return induced(self.graph, self.original_vertices())

    def retag(self, node_ids: Dict[Hashable, int]) -> "AnnotatedGraph":
        tags = tuple(
            Meta(node_ids[t.node_id], t.disk_index) if isinstance(t, Meta) else t
            for t in self.tags
        )
        return AnnotatedGraph(self.graph, tags)
