"""
Configurable guarantee checks for hierarchies, spanner systems and lifted
decompositions. Each check is a named evaluator returning a BoundResult; a
policy dict can switch individual checks off.
"""
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from decomposition.hierarchy import HierTree
from spanners.system import SpannerMode, SpannerSystem, edge_count_bound, surplus_bound, tree_count_bound
from treedec.decomposition import DecompositionMetrics

from .distances import SurplusReport, multiplicative_from_additive

BOUND_NAMES = (
    'depth',
    'radius_certificate',
    'tree_count',
    'edge_count',
    'spanning_trees',
    'surplus',
    'stretch_vs_surplus',
    'lift_breadth',
)


@dataclass
class BoundResult:
    name: str
    holds: bool
    measured: float
    bound: float
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        def number(x):
            if isinstance(x, float) and math.isinf(x):
                return "inf"
            return round(float(x), 4)

        return {
            'name': self.name,
            'holds': self.holds,
            'measured': number(self.measured),
            'bound': number(self.bound),
            'reason': self.reason,
        }


class BoundChecker:
    def __init__(self, config: Dict[str, Any] | None = None):
        cfg = config or {}
        enabled = cfg.get('bounds', {}) or {}
        self.enabled = {name: bool(enabled.get(name, True)) for name in BOUND_NAMES}

    def _result(self, results: List[BoundResult], name: str, measured: float, bound: float, reason: str) -> None:
        if not self.enabled.get(name, True):
            return
        results.append(BoundResult(name=name, holds=measured <= bound, measured=measured, bound=bound, reason=reason))

    def check_hierarchy(self, h: HierTree, radius_bound: Optional[int] = None) -> List[BoundResult]:
        results: List[BoundResult] = []
        n = h.original_n
        log_n = math.log2(n) if n > 1 else 0.0
        depth_bound = max(0.0, log_n - 1) if h.k == 1 else log_n
        self._result(results, 'depth', h.depth, depth_bound, f'depth {h.depth} vs log2(n){" - 1" if h.k == 1 else ""}')
        if radius_bound is not None:
            self._result(results, 'radius_certificate', h.r_max, radius_bound,
                         f'largest separator radius {h.r_max} vs certified tree-breadth {radius_bound}')
        return results

    def check_system(self, system: SpannerSystem, report: Optional[SurplusReport] = None) -> List[BoundResult]:
        results: List[BoundResult] = []
        n, k = system.n, system.k
        if system.mode is SpannerMode.BFS:
            tree_bound, surplus_limit = max(1, n - 1), 0.0
        else:
            tree_bound, surplus_limit = tree_count_bound(n, k), surplus_bound(n, k, system.r_max)

        if system.mode is SpannerMode.SPARSE:
            self._result(results, 'edge_count', system.num_edges, edge_count_bound(n, k),
                         f'{system.num_edges} edges vs the sparse spanner edge bound')
        else:
            self._result(results, 'tree_count', system.num_trees, tree_bound,
                         f'{system.num_trees} trees vs at most {tree_bound}')
            broken = sum(1 for t in system.trees if t.tree.m != n - 1 or not t.tree.is_connected())
            self._result(results, 'spanning_trees', broken, 0, f'{broken} tree(s) fail to span the graph')

        if report is not None:
            self._result(results, 'surplus', report.max_surplus, surplus_limit,
                         f'measured surplus {report.max_surplus} vs bound {surplus_limit:.3f} (r_max={system.r_max})')
            self._result(results, 'stretch_vs_surplus', float(report.max_stretch),
                         multiplicative_from_additive(float(report.max_surplus)),
                         'multiplicative stretch is at most surplus + 1')
        return results

    def check_lift(self, lifted: DecompositionMetrics, t: int) -> List[BoundResult]:
        results: List[BoundResult] = []
        limit = math.ceil(t / 2)
        self._result(results, 'lift_breadth', lifted.k_breadth, limit,
                     f'{lifted.k}-breadth {lifted.k_breadth} vs ceil(t/2) = {limit}')
        return results

    @staticmethod
    def violations(results: List[BoundResult]) -> List[BoundResult]:
        return [r for r in results if not r.holds]
