"""
Balanced disk separators.

A vertex set S is balanced when every component of G - S has at most floor(n/2)
vertices. For a fixed center v, balancedness of D_r(v) is monotone in r, so the
smallest balanced radius comes out of one BFS plus one union-find sweep over the
BFS layers taken deepest first. The k-center search uses the nearest-center
distance, which is what a BFS from a dummy vertex adjacent to the centers yields
after subtracting one.
"""
import logging
from dataclasses import dataclass
from itertools import combinations, islice
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.cluster.hierarchy import DisjointSet
from scipy.sparse.csgraph import shortest_path

from core.exceptions import CapExceededError, ContractViolation
from core.graph import Graph, VertexSet, bfs_distances, largest_component, largest_components, vertex_set

logger = logging.getLogger(__name__)

DEFAULT_K_CAP = 3
# center tuples screened per labelling pass
SUBSET_BATCH = 256


@dataclass(frozen=True)
class DiskSeparator:
    centers: Tuple[int, ...]
    radius: int
    cover: VertexSet
    max_component: int

    @property
    def k(self) -> int:
        return len(self.centers)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'centers': list(self.centers),
            'radius': self.radius,
            'cover_size': len(self.cover),
            'max_component': self.max_component,
        }


def balance_threshold(n: int) -> int:
    return n // 2


def max_component_after(g: Graph, cover: Iterable[int]) -> int:
    mask = np.zeros(g.n, dtype=bool)
    mask[list(cover)] = True
    return largest_component(g, mask)


def is_balanced(g: Graph, cover: Iterable[int]) -> bool:
    return max_component_after(g, cover) <= balance_threshold(g.n)


def _sweep(g: Graph, dist: np.ndarray, half: int) -> Tuple[int, int]:
    """Smallest r with every component of {dist > r} at most `half`.

    Layers are merged deepest first; after merging layer d the processed set is
    exactly {dist > d - 1}. Returns (r, largest component at that r).
    """
    if not np.all(np.isfinite(dist)):
        g.require_connected()
    depth = dist.astype(np.int64)
    ecc = int(depth.max()) if depth.size else 0
    order = np.argsort(-depth, kind='stable')
    uf = DisjointSet()
    largest = 0
    idx = 0
    for d in range(ecc, 0, -1):
        layer_largest = largest
        while idx < len(order) and depth[order[idx]] == d:
            v = int(order[idx])
            uf.add(v)
            layer_largest = max(layer_largest, 1)
            for w in g.adjacency[v]:
                if w in uf:
                    uf.merge(v, w)
                    layer_largest = max(layer_largest, uf.subset_size(v))
            idx += 1
        if layer_largest > half:
            return d, largest
        largest = layer_largest
    return 0, largest


def min_radius_at(g: Graph, v: int) -> int:
    """Minimum r such that D_r(v) is a balanced separator of the connected graph g"""
    g.require_connected()
    r, _ = _sweep(g, bfs_distances(g, [v]), balance_threshold(g.n))
    return r


def _separator(g: Graph, centers: Sequence[int], dist: np.ndarray, r: int, max_component: int) -> DiskSeparator:
    return DiskSeparator(
        centers=tuple(int(c) for c in centers),
        radius=int(r),
        cover=vertex_set(np.flatnonzero(dist <= r)),
        max_component=int(max_component),
    )


def _chunks(items: Sequence, parts: int) -> List[Sequence]:
    parts = max(1, min(parts, len(items)))
    size = -(-len(items) // parts)
    return [items[i:i + size] for i in range(0, len(items), size)]


def _scan_centers(g: Graph, candidates: Sequence[int], bound: int) -> Optional[Tuple[int, Tuple[int, ...], np.ndarray, int]]:
    """Best (r, centers) with r < bound among single-center candidates"""
    half = balance_threshold(g.n)
    best = None
    for v in candidates:
        if bound == 0:
            break
        dist = bfs_distances(g, [v])
        if largest_component(g, dist <= bound - 1) > half:
            continue
        r, largest = _sweep(g, dist, half)
        best = (r, (int(v),), dist, largest)
        bound = r
    return best


def _scan_subsets(g: Graph, apsp: np.ndarray, k: int, firsts: Sequence[int], bound: int):
    """Lexicographic scan of center tuples starting at `firsts`, screened a batch at a time.

    A tuple that cannot reach radius bound - 1 is skipped; the first one that can is
    swept, lowers the bound, and the rest of its batch is screened again.
    """
    half = balance_threshold(g.n)
    best = None
    subsets = ((first,) + rest for first in firsts for rest in combinations(range(first + 1, g.n), k - 1))
    while bound > 0:
        batch = list(islice(subsets, SUBSET_BATCH))
        if not batch:
            break
        dists = apsp[np.asarray(batch)].min(axis=1)
        while batch and bound > 0:
            fits = np.flatnonzero(largest_components(g, dists <= bound - 1) <= half)
            if fits.size == 0:
                break
            i = int(fits[0])
            r, largest = _sweep(g, dists[i], half)
            best = (r, batch[i], dists[i], largest)
            bound = r
            batch, dists = batch[i + 1:], dists[i + 1:]
    return best


def _reduce(found: Iterable, initial):
    best = initial
    for item in found:
        if item is not None and (item[0], item[1]) < (best[0], best[1]):
            best = item
    return best


def best_disk_separator(g: Graph, threads: int = 1) -> DiskSeparator:
    """Balanced disk separator of globally minimum radius, ties to the smallest center"""
    if g.n < 1:
        raise ContractViolation("graph must have at least one vertex")
    g.require_connected()
    half = balance_threshold(g.n)
    dist0 = bfs_distances(g, [0])
    r0, largest0 = _sweep(g, dist0, half)
    initial = (r0, (0,), dist0, largest0)
    rest = list(range(1, g.n))
    if r0 == 0 or not rest:
        found = []
    elif threads > 1 and len(rest) > threads:
        found = Parallel(n_jobs=threads, prefer="threads")(
            delayed(_scan_centers)(g, chunk, r0) for chunk in _chunks(rest, threads)
        )
    else:
        found = [_scan_centers(g, rest, r0)]
    r, centers, dist, largest = _reduce(found, initial)
    sep = _separator(g, centers, dist, r, largest)
    logger.debug(f"best disk separator n={g.n}: center={sep.centers[0]} r={sep.radius}")
    return sep


def best_k_disk_separator(g: Graph, k: int, k_cap: int = DEFAULT_K_CAP, allow_over_cap: bool = False,
                          threads: int = 1) -> DiskSeparator:
    """Balanced union of at most k disks of one common minimum radius.

    Center tuples are scanned in lexicographic order; ties keep the first tuple.
    """
    if k < 1:
        raise ContractViolation(f"k must be at least 1, got {k}")
    if k > k_cap and not allow_over_cap:
        raise CapExceededError(f"k={k} exceeds the configured cap {k_cap}; pass an explicit override to run it")
    if k > g.n:
        raise ContractViolation(f"k={k} exceeds the vertex count {g.n}")
    if k == 1:
        return best_disk_separator(g, threads=threads)
    g.require_connected()

    half = balance_threshold(g.n)
    apsp = shortest_path(g.csr, directed=False, unweighted=True)
    first = tuple(range(k))
    dist0 = apsp[list(first)].min(axis=0)
    r0, largest0 = _sweep(g, dist0, half)
    initial = (r0, first, dist0, largest0)

    firsts = list(range(0, g.n - k + 1))
    if r0 == 0:
        found = []
    elif threads > 1 and len(firsts) > threads:
        found = Parallel(n_jobs=threads, prefer="threads")(
            delayed(_scan_subsets)(g, apsp, k, chunk, r0) for chunk in _chunks(firsts, threads)
        )
    else:
        found = [_scan_subsets(g, apsp, k, firsts, r0)]
    r, centers, dist, largest = _reduce(found, initial)
    sep = _separator(g, centers, dist, r, largest)
    logger.debug(f"best {k}-disk separator n={g.n}: centers={sep.centers} r={sep.radius}")
    return sep
