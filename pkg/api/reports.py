"""
Report builders for the management command: JSON documents and Graphviz drawings
"""
import json
import logging
import math
from typing import Any, Dict, Iterable, List, Optional

from decomposition.hierarchy import HierTree
from oracle.bounds import BoundResult
from spanners.system import SpannerMode, SpannerSystem, edge_count_bound, surplus_bound, tree_count_bound

logger = logging.getLogger(__name__)


def to_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def hierarchy_report(h: HierTree, tree_spanner_t: Optional[int] = None) -> Dict[str, Any]:
    report = h.to_dict()
    if tree_spanner_t is not None:
        limit = math.ceil(tree_spanner_t / 2)
        obstructed = h.r_max > limit
        what = 'tree t-spanner' if h.k == 1 else f't-spanner of tree-width at most {h.k - 1}'
        report['spanner_obstruction'] = {
            't': tree_spanner_t,
            'radius_limit': limit,
            'obstructed': obstructed,
            'reason': (
                f'separator radius {h.r_max} > ceil(t/2) = {limit}: the graph admits no {what}'
                if obstructed else f'separator radius {h.r_max} <= {limit}: no obstruction found'
            ),
        }
    return report


def hierarchy_dot(h: HierTree) -> str:
    lines = ["digraph hierarchy {", '  node [shape=box, fontname="monospace"];']
    for node in h.nodes:
        centers = ",".join(
            str(c) if c is not None else "meta" for c in node.original_centers()
        ) or "-"
        bag = " ".join(str(v) for v in sorted(node.bag_originals()))
        label = f"#{node.id} {node.kind.value}\\nr={node.radius} c={centers}\\nY={{{bag}}}"
        lines.append(f'  n{node.id} [label="{label}"];')
    for node in h.nodes:
        for child in node.children:
            lines.append(f"  n{node.id} -> n{child};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def system_report(system: SpannerSystem, checks: Iterable[BoundResult] = (),
                  measured: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    report = system.to_dict()
    if system.mode is SpannerMode.BFS:
        report['surplus_bound'] = 0
        report['tree_count_bound'] = max(1, system.n - 1)
    else:
        report['surplus_bound'] = round(surplus_bound(system.n, system.k, system.r_max), 4)
        if system.mode is SpannerMode.SPARSE:
            report['edge_count_bound'] = round(edge_count_bound(system.n, system.k), 4)
        else:
            report['tree_count_bound'] = tree_count_bound(system.n, system.k)
    if measured is not None:
        report['measured'] = measured
    checks = list(checks)
    if checks:
        report['checks'] = [c.to_dict() for c in checks]
    return report


def tree_edge_blocks(system: SpannerSystem) -> List[str]:
    """One '# tree <i> level=<l> center=<c>' block of edges per tree (or the union)"""
    if system.mode is SpannerMode.SPARSE:
        return [f"# union n={system.n} m={system.union.m}"] + [f"{u} {v}" for u, v in system.union.edges()]
    out = []
    for i, entry in enumerate(system.trees):
        out.append(f"# tree {i} level={entry.level} center={entry.center_index}")
        out.extend(f"{u} {v}" for u, v in entry.tree.edges())
    return out
