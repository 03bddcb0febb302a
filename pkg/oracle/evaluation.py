"""Evaluation harness for the spanner pipeline.
Runs hierarchy -> local subtrees -> spanner system -> exact verification over a grid of
generated instances and collects one row per (instance, k, mode) in a DataFrame.
"""
import logging
import time
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from decomposition.hierarchy import build_hierarchy
from spanners.local_subtrees import local_subtrees
from spanners.system import SpannerMode, bfs_system, collective_system, sparse_spanner

from .bounds import BoundChecker
from .distances import apsp, collective_surplus, surplus
from .generators import GeneratedInstance, gen

logger = logging.getLogger(__name__)

DEFAULT_SIZES = (250, 500, 1000, 2000)
SCALING_LIMIT = 2.5


def certified_radius(instance: GeneratedInstance, k: int) -> Optional[int]:
    """Best certified upper bound on tb_k; tb_k never exceeds tb_j for j <= k"""
    cert = instance.certificate
    bounds = [int(cert[key]) for key in ('tree_breadth', 'tree_breadth_upper') if key in cert]
    bounds.extend(int(r) for j, r in (cert.get('k_tree_breadth_upper') or {}).items() if int(j) <= k)
    return min(bounds) if bounds else None


def run_instance(instance: GeneratedInstance, k: int = 1, modes: Sequence[str] = ('sparse', 'collective'),
                 checker: Optional[BoundChecker] = None, threads: int = 1, verify: bool = True) -> List[Dict[str, Any]]:
    """One row per mode for a single generated instance"""
    checker = checker or BoundChecker()
    g = instance.graph
    started = time.perf_counter()
    h = build_hierarchy(g, k=k, threads=threads)
    subtrees = local_subtrees(h, threads=threads)
    build_seconds = time.perf_counter() - started
    hierarchy_checks = checker.check_hierarchy(h, certified_radius(instance, k))
    g_dist = apsp(g, threads) if verify else None

    rows = []
    for mode in modes:
        t0 = time.perf_counter()
        if mode == SpannerMode.SPARSE.value:
            system = sparse_spanner(h, subtrees)
        elif mode == SpannerMode.COLLECTIVE.value:
            system = collective_system(h, subtrees)
        else:
            system = bfs_system(g)
        seconds = build_seconds + time.perf_counter() - t0

        report = None
        if verify:
            if system.mode is SpannerMode.SPARSE:
                report = surplus(g, system.union, threads=threads, g_dist=g_dist)
            else:
                report = collective_surplus(g, [t.tree for t in system.trees], threads=threads, g_dist=g_dist)
        checks = hierarchy_checks + checker.check_system(system, report)
        failed = [c.name for c in BoundChecker.violations(checks)]
        rows.append({
            'kind': instance.kind,
            'seed': instance.seed,
            'n': g.n,
            'm': g.m,
            'k': k,
            'mode': mode,
            'depth': h.depth,
            'r_max': h.r_max,
            'trees': system.num_trees,
            'edges': system.num_edges,
            'surplus': None if report is None else report.max_surplus,
            'surplus_bound': next((c.bound for c in checks if c.name == 'surplus'), None),
            'seconds': round(seconds, 4),
            'passed': not failed,
            'failed_checks': ",".join(failed),
        })
    return rows


def default_grid(sizes: Iterable[int] = DEFAULT_SIZES, seed: int = 0) -> List[Tuple[str, Dict[str, int], int]]:
    """planted tree t-spanners at fixed density (extra edges = n) for t in 3, 5, 7"""
    return [
        ('planted_tree_spanner', {'n': n, 't': t, 'extra_edges': n}, seed + i)
        for i, (n, t) in enumerate((n, t) for n in sizes for t in (3, 5, 7))
    ]


def evaluate(grid: Iterable[Tuple[str, Dict[str, int], int]], k: int = 1,
             modes: Sequence[str] = ('sparse', 'collective'), checker: Optional[BoundChecker] = None,
             threads: int = 1, verify: bool = True) -> pd.DataFrame:
    rows: List[Dict[str, Any]] = []
    for kind, params, seed in grid:
        instance = gen(kind, params, seed)
        logger.info(f"evaluating {kind} {params} seed={seed}")
        rows.extend(run_instance(instance, k=k, modes=modes, checker=checker, threads=threads, verify=verify))
    return pd.DataFrame(rows)


def scaling_check(df: pd.DataFrame, limit: float = SCALING_LIMIT) -> pd.DataFrame:
    """Mean time per n and the ratio to the previous n; rows exceeding `limit` per doubling fail"""
    timing = df.groupby('n', as_index=False)['seconds'].mean().sort_values('n')
    growth = timing['n'] / timing['n'].shift(1)
    timing['ratio'] = timing['seconds'] / timing['seconds'].shift(1)
    # normalise to one doubling so irregular size grids still compare
    timing['ratio_per_doubling'] = timing['ratio'] ** (1 / np.log2(growth))
    timing['within_limit'] = timing['ratio_per_doubling'].isna() | (timing['ratio_per_doubling'] <= limit)
    return timing.reset_index(drop=True)
