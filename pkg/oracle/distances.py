"""
Exact distance oracle: all-pairs hop distances and the surplus / stretch of a
spanner or of a system of collective tree spanners.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from scipy.sparse.csgraph import dijkstra, shortest_path

from core.exceptions import ContractViolation, NotASpannerError
from core.graph import Graph

logger = logging.getLogger(__name__)

SHARD_MIN_ROWS = 256

Ratio = Union[Fraction, float]


def apsp(g: Graph, threads: int = 1) -> np.ndarray:
    """n x n hop distances, BFS from every vertex; rows are sharded across threads"""
    if threads > 1 and g.n >= SHARD_MIN_ROWS:
        shards = np.array_split(np.arange(g.n), threads)
        rows = Parallel(n_jobs=threads, prefer="threads")(
            delayed(dijkstra)(g.csr, directed=False, unweighted=True, indices=shard) for shard in shards if len(shard)
        )
        return np.vstack(rows)
    return shortest_path(g.csr, directed=False, unweighted=True)


@dataclass(frozen=True)
class SurplusReport:
    max_surplus: float
    max_stretch: Ratio
    argmax: Optional[Tuple[int, int]]
    edge_stretch: Optional[Ratio] = None
    coverage: Tuple[int, ...] = field(default_factory=tuple)

    def to_dict(self) -> Dict[str, Any]:
        def number(x):
            if isinstance(x, Fraction):
                return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
            if x is None:
                return None
            return "inf" if np.isinf(x) else int(x)

        out = {
            'max_surplus': number(self.max_surplus),
            'max_stretch': number(self.max_stretch),
            'argmax_pair': list(self.argmax) if self.argmax else None,
        }
        if self.edge_stretch is not None:
            out['edge_stretch'] = number(self.edge_stretch)
        if self.coverage:
            out['coverage'] = list(self.coverage)
        return out


def _check_spanning_subgraph(g: Graph, h: Graph, name: str = "spanner") -> None:
    if h.n != g.n:
        raise NotASpannerError(f"{name} has {h.n} vertices, graph has {g.n}")
    for u, v in h.edges():
        if not g.has_edge(u, v):
            raise NotASpannerError(f"edge ({u}, {v}) of the {name} is not an edge of the graph", edge=(u, v))


def _report(dg: np.ndarray, best: np.ndarray, coverage: Tuple[int, ...] = ()) -> SurplusReport:
    n = dg.shape[0]
    if n <= 1:
        return SurplusReport(0, Fraction(1), None, coverage=coverage)
    iu = np.triu_indices(n, k=1)
    base, got = dg[iu], best[iu]
    diff = got - base
    top = float(diff.max())
    pick = int(np.flatnonzero(diff == top)[0])
    argmax = (int(iu[0][pick]), int(iu[1][pick]))
    if np.isinf(top):
        return SurplusReport(float('inf'), float('inf'), argmax, coverage=coverage)
    ratios = got / base
    s = int(np.argmax(ratios))
    stretch = Fraction(int(got[s]), int(base[s]))
    return SurplusReport(int(top), stretch, argmax, coverage=coverage)


def edge_stretch(g: Graph, h: Graph) -> Ratio:
    """Largest d_h(u, v) over edges uv of g; equals the all-pairs stretch"""
    _check_spanning_subgraph(g, h)
    if g.m == 0:
        return Fraction(1)
    us, vs = zip(*g.edges())
    dh = dijkstra(h.csr, directed=False, unweighted=True, indices=sorted(set(us)))
    row = {u: i for i, u in enumerate(sorted(set(us)))}
    worst = max(dh[row[u], v] for u, v in zip(us, vs))
    return float('inf') if np.isinf(worst) else Fraction(int(worst))


def surplus(g: Graph, h: Graph, threads: int = 1, g_dist: Optional[np.ndarray] = None) -> SurplusReport:
    """Max additive surplus and multiplicative stretch of the spanning subgraph h"""
    _check_spanning_subgraph(g, h)
    g.require_connected()
    dg = apsp(g, threads) if g_dist is None else g_dist
    dh = apsp(h, threads)
    report = _report(dg, dh)
    report = SurplusReport(report.max_surplus, report.max_stretch, report.argmax, edge_stretch(g, h))
    logger.info(f"surplus {report.max_surplus}, stretch {report.max_stretch}")
    return report


def collective_surplus(g: Graph, trees: Sequence[Graph], threads: int = 1,
                       g_dist: Optional[np.ndarray] = None) -> SurplusReport:
    """Max over pairs of (min over trees of d_T) - d_G; coverage counts the pairs each
    tree serves first"""
    if not trees:
        raise ContractViolation("collective surplus needs at least one tree")
    g.require_connected()
    for i, tree in enumerate(trees):
        _check_spanning_subgraph(g, tree, name=f"tree {i}")
        if tree.m != g.n - 1 or not tree.is_connected():
            raise NotASpannerError(f"tree {i} is not a spanning tree ({tree.m} edges, {tree.component_count()} components)")
    dg = apsp(g, threads) if g_dist is None else g_dist
    best = np.full_like(dg, np.inf)
    owner = np.zeros(dg.shape, dtype=np.int64)
    for i, tree in enumerate(trees):
        dt = apsp(tree, threads)
        better = dt < best
        best = np.where(better, dt, best)
        owner[better] = i
    iu = np.triu_indices(g.n, k=1)
    coverage = tuple(int(c) for c in np.bincount(owner[iu], minlength=len(trees)))
    report = _report(dg, best, coverage)
    logger.info(f"collective surplus {report.max_surplus} over {len(trees)} trees")
    return report


def multiplicative_from_additive(surplus_value: float) -> float:
    """An additive r-spanner is a multiplicative (r + 1)-spanner"""
    return surplus_value + 1
