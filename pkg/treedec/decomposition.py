"""
Tree decompositions: data model, PACE-style I/O, validation, parameter evaluation,
disk expansion of bags and the lift of a decomposition of a spanner H to one of G.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.sparse.csgraph import dijkstra, shortest_path

from core.exceptions import (
    CapExceededError, ContractViolation, GraphFormatError, InvalidDecompositionError, NotASpannerError,
)
from core.graph import Edge, Graph, VertexSet, disks_union, induced, normalize_edge

logger = logging.getLogger(__name__)

DEFAULT_BREADTH_K_CAP = 3
DEFAULT_BREADTH_BAG_CAP = 24


@dataclass(frozen=True)
class TreeDecomposition:
    bags: Tuple[VertexSet, ...]
    tree_edges: Tuple[Edge, ...]
    host_n: int

    @classmethod
    def build(cls, bags: Iterable[Iterable[int]], tree_edges: Iterable[Sequence[int]], host_n: int) -> "TreeDecomposition":
        return cls(
            tuple(frozenset(int(v) for v in bag) for bag in bags),
            tuple(sorted({normalize_edge(a, b) for a, b in tree_edges})),
            int(host_n),
        )

    @property
    def width(self) -> int:
        return max((len(bag) for bag in self.bags), default=0) - 1

    # -- PACE "s td" format, 1-based ids --------------------------------------

    @classmethod
    def from_pace(cls, text: str) -> "TreeDecomposition":
        header: Optional[Tuple[int, int, int]] = None
        bags: Dict[int, VertexSet] = {}
        edges: List[Edge] = []
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith('c') or line.startswith('#'):
                continue
            parts = line.split()
            try:
                if parts[0] == 's':
                    if header is not None:
                        raise GraphFormatError("multiple 's td' lines", line_no)
                    if len(parts) != 5 or parts[1] != 'td':
                        raise GraphFormatError("solution line must be 's td <bags> <width+1> <n>'", line_no)
                    header = (int(parts[2]), int(parts[3]), int(parts[4]))
                    continue
                if header is None:
                    raise GraphFormatError("bag or edge line before the 's td' line", line_no)
                if parts[0] == 'b':
                    if len(parts) < 2:
                        raise GraphFormatError("bag line needs an id", line_no)
                    bag_id = int(parts[1])
                    members = parts[2:]
                    if members and members[-1] == '0':
                        members = members[:-1]
                    if not 1 <= bag_id <= header[0]:
                        raise GraphFormatError(f"bag id {bag_id} outside 1..{header[0]}", line_no)
                    if bag_id in bags:
                        raise GraphFormatError(f"duplicate bag id {bag_id}", line_no)
                    vertices = [int(v) - 1 for v in members]
                    if any(not 0 <= v < header[2] for v in vertices):
                        raise GraphFormatError(f"bag {bag_id} names a vertex outside 1..{header[2]}", line_no)
                    bags[bag_id] = frozenset(vertices)
                    continue
                ends = parts[:-1] if len(parts) == 3 and parts[-1] == '0' else parts
                if len(ends) != 2:
                    raise GraphFormatError(f"expected a bag-tree edge 'i j', got {line!r}", line_no)
                a, b = int(ends[0]), int(ends[1])
                if not (1 <= a <= header[0] and 1 <= b <= header[0]):
                    raise GraphFormatError(f"tree edge ({a}, {b}) names an undeclared bag", line_no)
                edges.append((a - 1, b - 1))
            except ValueError:
                raise GraphFormatError(f"non-integer token in {line!r}", line_no) from None
        if header is None:
            raise GraphFormatError("missing 's td' line")
        num_bags, declared_size, n = header
        td = cls.build((bags.get(i, frozenset()) for i in range(1, num_bags + 1)), edges, n)
        if num_bags and td.width + 1 != declared_size:
            logger.warning(f"declared max bag size {declared_size} but bags have {td.width + 1}")
        return td

    def to_pace(self) -> str:
        lines = [f"s td {len(self.bags)} {max(self.width + 1, 0)} {self.host_n}"]
        for i, bag in enumerate(self.bags, start=1):
            lines.append(" ".join(["b", str(i)] + [str(v + 1) for v in sorted(bag)]))
        lines.extend(f"{a + 1} {b + 1}" for a, b in self.tree_edges)
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

class ViolationKind(str, Enum):
    HOST_MISMATCH = 'host_mismatch'
    VERTEX_RANGE = 'vertex_range'
    NOT_A_TREE = 'not_a_tree'
    VERTEX_UNCOVERED = 'vertex_uncovered'
    EDGE_UNCOVERED = 'edge_uncovered'
    SUBTREE_DISCONNECTED = 'subtree_disconnected'


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str
    vertex: Optional[int] = None
    edge: Optional[Edge] = None
    bag: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {'kind': self.kind.value, 'detail': self.detail}
        if self.vertex is not None:
            out['vertex'] = self.vertex
        if self.edge is not None:
            out['edge'] = list(self.edge)
        if self.bag is not None:
            out['bag'] = self.bag
        return out


def _tree_violations(td: TreeDecomposition) -> Tuple[List[Violation], List[Edge]]:
    violations, usable = [], []
    count = len(td.bags)
    if count == 0:
        return [Violation(ViolationKind.NOT_A_TREE, "decomposition has no bags")], usable
    uf = DisjointSet(range(count))
    for a, b in td.tree_edges:
        if not (0 <= a < count and 0 <= b < count) or a == b:
            violations.append(Violation(ViolationKind.NOT_A_TREE, f"tree edge ({a}, {b}) is invalid", edge=(a, b)))
            continue
        if not uf.merge(a, b):
            violations.append(Violation(ViolationKind.NOT_A_TREE, f"tree edge ({a}, {b}) closes a cycle", edge=(a, b)))
            continue
        usable.append((a, b))
    pieces = len(uf.subsets())
    if pieces > 1:
        violations.append(Violation(ViolationKind.NOT_A_TREE, f"bag tree has {pieces} components"))
    return violations, usable


def validate(g: Graph, td: TreeDecomposition) -> List[Violation]:
    """Every way td fails to be a tree decomposition of g; empty when valid"""
    violations: List[Violation] = []
    if td.host_n != g.n:
        violations.append(Violation(ViolationKind.HOST_MISMATCH, f"decomposition is for n={td.host_n}, graph has n={g.n}"))

    bags_of: List[List[int]] = [[] for _ in range(g.n)]
    for i, bag in enumerate(td.bags):
        for v in sorted(bag):
            if 0 <= v < g.n:
                bags_of[v].append(i)
            else:
                violations.append(Violation(ViolationKind.VERTEX_RANGE, f"bag {i} contains vertex {v}", vertex=v, bag=i))

    tree_problems, usable = _tree_violations(td)
    violations.extend(tree_problems)

    for v in range(g.n):
        if not bags_of[v]:
            violations.append(Violation(ViolationKind.VERTEX_UNCOVERED, f"vertex {v} is in no bag", vertex=v))

    for u, v in g.edges():
        if not set(bags_of[u]).intersection(bags_of[v]):
            violations.append(Violation(ViolationKind.EDGE_UNCOVERED, f"edge ({u}, {v}) is in no bag", edge=(u, v)))

    if len(td.bags):
        tree = Graph.from_edges(len(td.bags), usable)
        for v in range(g.n):
            if len(bags_of[v]) > 1 and not induced(tree, bags_of[v]).graph.is_connected():
                violations.append(Violation(
                    ViolationKind.SUBTREE_DISCONNECTED, f"bags holding vertex {v} are not connected in the tree", vertex=v,
                ))
    return violations


def require_valid(g: Graph, td: TreeDecomposition) -> None:
    violations = validate(g, td)
    if violations:
        raise InvalidDecompositionError(f"{len(violations)} violation(s), first: {violations[0].detail}")


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionMetrics:
    width: int
    length: int
    breadth: int
    k: int
    k_breadth: int
    k_breadth_exact: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            'width': self.width,
            'length': self.length,
            'breadth': self.breadth,
            'k': self.k,
            'k_breadth': self.k_breadth,
            'k_breadth_method': 'exact' if self.k_breadth_exact else 'greedy',
        }


def _bag_masks(within: np.ndarray) -> List[int]:
    """Distinct inclusion-maximal bag subsets reachable by one disk (as bitmasks)"""
    weights = np.left_shift(np.int64(1), np.arange(within.shape[1], dtype=np.int64))
    masks = sorted({int(m) for m in within.astype(np.int64) @ weights if m}, key=lambda m: -bin(m).count('1'))
    maximal: List[int] = []
    for m in masks:
        if not any(m & keep == m for keep in maximal):
            maximal.append(m)
    return maximal


def _union(masks: Sequence[int]) -> int:
    out = 0
    for m in masks:
        out |= m
    return out


def _coverable(masks: List[int], full: int, k: int) -> bool:
    return any(
        _union(combo) == full
        for size in range(1, min(k, len(masks)) + 1)
        for combo in combinations(masks, size)
    )


def bag_k_radius(dist: np.ndarray, bag: Sequence[int], k: int) -> int:
    """Smallest r such that k disks of radius r cover the bag exactly"""
    bag = list(bag)
    if k >= len(bag):
        return 0
    cols = dist[:, bag]
    full = (1 << len(bag)) - 1
    for r in np.unique(cols[np.isfinite(cols)]):
        if _coverable(_bag_masks(cols <= r), full, k):
            return int(r)
    raise ContractViolation("bag cannot be covered; is the graph connected?")


def bag_k_radius_greedy(dist: np.ndarray, bag: Sequence[int], k: int) -> int:
    """Farthest-point k-center upper bound with centers taken from the bag"""
    bag = list(bag)
    if k >= len(bag):
        return 0
    cols = dist[:, bag]
    centers = [bag[0]]
    nearest = cols[bag[0]].copy()
    while len(centers) < k:
        far = bag[int(np.argmax(nearest))]
        centers.append(far)
        nearest = np.minimum(nearest, cols[far])
    return int(nearest.max())


def metrics(g: Graph, td: TreeDecomposition, k: int = 1, k_cap: int = DEFAULT_BREADTH_K_CAP,
            bag_cap: int = DEFAULT_BREADTH_BAG_CAP, greedy: bool = False) -> DecompositionMetrics:
    """Width, length, breadth and k-breadth of a valid decomposition of g"""
    if k < 1:
        raise ContractViolation(f"k must be at least 1, got {k}")
    require_valid(g, td)
    g.require_connected()
    dist = shortest_path(g.csr, directed=False, unweighted=True)
    bags = [sorted(bag) for bag in td.bags if bag]

    length = max((int(dist[np.ix_(bag, bag)].max()) for bag in bags), default=0)
    breadth = max((int(dist[:, bag].max(axis=1).min()) for bag in bags), default=0)

    exact = True
    if k == 1:
        k_breadth = breadth
    else:
        k_breadth = 0
        for bag in bags:
            if k >= len(bag):
                continue
            if k <= k_cap and len(bag) <= bag_cap:
                value = bag_k_radius(dist, bag, k)
            elif greedy:
                value = bag_k_radius_greedy(dist, bag, k)
                exact = False
            else:
                raise CapExceededError(
                    f"exact {k}-breadth refused for a bag of {len(bag)} vertices "
                    f"(caps k<={k_cap}, bag<={bag_cap}); request the greedy bound instead"
                )
            k_breadth = max(k_breadth, value)
    return DecompositionMetrics(td.width, length, breadth, k, k_breadth, exact)


# ---------------------------------------------------------------------------
# Expansion and lift
# ---------------------------------------------------------------------------

def expand(h: Graph, td: TreeDecomposition, r: int) -> TreeDecomposition:
    """Same tree, every bag X_i replaced by D_r(X_i, h)"""
    if r < 0:
        raise ContractViolation(f"radius must be non-negative, got {r}")
    bags = tuple(disks_union(h, bag, r) if bag else frozenset() for bag in td.bags)
    return TreeDecomposition(bags, td.tree_edges, h.n)


def check_spanner(g: Graph, h: Graph, t: int) -> None:
    """Raise NotASpannerError unless h is a spanning subgraph of g with d_h(u, v) <= t on every edge of g"""
    if h.n != g.n:
        raise NotASpannerError(f"spanner has {h.n} vertices, graph has {g.n}")
    for u, v in h.edges():
        if not g.has_edge(u, v):
            raise NotASpannerError(f"edge ({u}, {v}) of the spanner is not an edge of the graph", edge=(u, v))
    dist = dijkstra(h.csr, directed=False, unweighted=True, limit=t)
    for u, v in g.edges():
        if dist[u, v] > t:
            raise NotASpannerError(f"edge ({u}, {v}) has spanner distance above t={t}", edge=(u, v))


def lift(g: Graph, h: Graph, td_of_h: TreeDecomposition, t: int) -> TreeDecomposition:
    """Decomposition of g from one of its t-spanner h, by expanding bags to radius ceil(t/2)"""
    if t < 1:
        raise ContractViolation(f"t must be at least 1, got {t}")
    check_spanner(g, h, t)
    require_valid(h, td_of_h)
    lifted = expand(h, td_of_h, math.ceil(t / 2))
    logger.info(f"lifted decomposition: {len(lifted.bags)} bags, width {lifted.width}")
    return TreeDecomposition(lifted.bags, lifted.tree_edges, g.n)
