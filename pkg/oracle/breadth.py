"""
Brute-force k-tree-breadth for tiny graphs.

tb_k(G) is the minimum, over chordal supergraphs G* of G, of the largest radius
needed to cover a maximal clique of G* with k disks of G. Every minimal chordal
supergraph is the fill graph of some elimination ordering, and the cliques of a
fill graph are the sets {v} + later neighbours of v, so scanning all orderings is
enough. The literal scan over sets of added non-edges is kept as a cross-check.
"""
import logging
from itertools import chain, combinations, permutations
from typing import Dict, FrozenSet, List, Optional, Sequence

import networkx as nx
import numpy as np
from joblib import Parallel, delayed

from core.exceptions import CapExceededError, ContractViolation
from core.graph import Graph
from treedec.decomposition import bag_k_radius

from .distances import apsp

logger = logging.getLogger(__name__)

DEFAULT_BRUTE_CAPS: Dict[int, int] = {1: 7, 2: 6}
FILL_SUBSET_LIMIT = 12


class _BagRadius:
    def __init__(self, dist: np.ndarray, k: int):
        self.dist = dist
        self.k = k
        self._cache: Dict[FrozenSet[int], int] = {}

    def __call__(self, bag: FrozenSet[int]) -> int:
        if bag not in self._cache:
            self._cache[bag] = bag_k_radius(self.dist, sorted(bag), self.k)
        return self._cache[bag]


def _ordering_value(g: Graph, order: Sequence[int], radius: _BagRadius, bound: float) -> float:
    """Largest bag radius of the elimination ordering, stopping once it reaches bound"""
    adj = [set(row) for row in g.adjacency]
    worst = 0
    for v in order:
        later = adj[v]
        worst = max(worst, radius(frozenset(later | {v})))
        if worst >= bound:
            return worst
        for a in later:
            adj[a].discard(v)
            adj[a].update(later - {a})
    return worst


def _best_with_prefix(g: Graph, first: int, radius: _BagRadius, bound: float) -> float:
    best = bound
    rest = [v for v in range(g.n) if v != first]
    for tail in permutations(rest):
        best = min(best, _ordering_value(g, (first,) + tail, radius, best))
        if best == 0:
            break
    return best


def _by_orderings(g: Graph, radius: _BagRadius, threads: int) -> int:
    upper = float(radius(frozenset(range(g.n))))
    if threads > 1:
        found = Parallel(n_jobs=threads, prefer="threads")(
            delayed(_best_with_prefix)(g, first, radius, upper) for first in range(g.n)
        )
        return int(min(found))
    best = upper
    for first in range(g.n):
        best = _best_with_prefix(g, first, radius, best)
        if best == 0:
            break
    return int(best)


def _by_fill_subsets(g: Graph, radius: _BagRadius) -> int:
    missing = [(u, v) for u, v in combinations(range(g.n), 2) if not g.has_edge(u, v)]
    if len(missing) > FILL_SUBSET_LIMIT:
        raise CapExceededError(f"{len(missing)} non-edges is too many for the fill-subset scan (limit {FILL_SUBSET_LIMIT})")
    base = nx.Graph()
    base.add_nodes_from(range(g.n))
    base.add_edges_from(g.edges())
    best: Optional[int] = None
    subsets = chain.from_iterable(combinations(missing, size) for size in range(len(missing) + 1))
    for added in subsets:
        candidate = base.copy()
        candidate.add_edges_from(added)
        if not nx.is_chordal(candidate):
            continue
        value = max(radius(frozenset(c)) for c in nx.find_cliques(candidate))
        if best is None or value < best:
            best = value
    return int(best)


def brute_tree_breadth(g: Graph, k: int = 1, caps: Optional[Dict[int, int]] = None, method: str = "orderings",
                       threads: int = 1) -> int:
    """Exact tb_k(g) by exhaustive search; refuses graphs above the size cap for k"""
    if k < 1:
        raise ContractViolation(f"k must be at least 1, got {k}")
    caps = DEFAULT_BRUTE_CAPS if caps is None else caps
    cap = caps.get(k, caps[max(caps)])
    if g.n > cap:
        raise CapExceededError(f"brute-force tree-breadth refused for n={g.n} > cap {cap} at k={k}")
    if g.n < 1:
        raise ContractViolation("graph must have at least one vertex")
    g.require_connected()
    if k >= g.n:
        return 0
    radius = _BagRadius(apsp(g), k)
    if method == "orderings":
        value = _by_orderings(g, radius, threads)
    elif method == "fill_subsets":
        value = _by_fill_subsets(g, radius)
    else:
        raise ContractViolation(f"unknown method {method!r}")
    logger.debug(f"tb_{k} = {value} for n={g.n} m={g.m} ({method})")
    return value
