"""
Seeded instance generators. Every instance carries a certificate (a planted tree,
spanner or decomposition plus the tree-breadth bound it implies) that is rechecked
through an independent code path before the instance is handed out.

Randomness comes from a counter-based Philox stream keyed by the seed, so the same
(kind, params, seed) always yields the same graph.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from core.exceptions import GeneratorError, NotASpannerError
from core.graph import Edge, Graph, normalize_edge
from treedec.decomposition import TreeDecomposition, check_spanner, validate

from .distances import apsp

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratedInstance:
    kind: str
    params: Dict[str, int]
    seed: int
    graph: Graph
    certificate: Dict[str, Any] = field(default_factory=dict)
    spanner: Optional[Graph] = None
    decomposition: Optional[TreeDecomposition] = None

    def certificate_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            'kind': self.kind,
            'params': dict(self.params),
            'seed': self.seed,
            'n': self.graph.n,
            'm': self.graph.m,
        }
        out.update(self.certificate)
        if self.spanner is not None:
            out['spanner_edges'] = [list(e) for e in self.spanner.edges()]
        if self.decomposition is not None:
            out['decomposition'] = {
                'bags': [sorted(bag) for bag in self.decomposition.bags],
                'tree_edges': [list(e) for e in self.decomposition.tree_edges],
            }
        return out


def make_rng(seed: int) -> np.random.Generator:
    if seed is None:
        raise GeneratorError("a seed is required")
    return np.random.Generator(np.random.Philox(int(seed)))


def _relabel(n: int, edges: Sequence[Edge], perm: np.ndarray) -> List[Edge]:
    return [normalize_edge(perm[u], perm[v]) for u, v in edges]


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise GeneratorError(message)


def _random_tree_edges(n: int, rng: np.random.Generator) -> List[Edge]:
    """Random recursive tree on a random labelling"""
    perm = rng.permutation(n)
    edges = [(int(rng.integers(0, v)), v) for v in range(1, n)]
    return _relabel(n, edges, perm)


def _sample_pairs(dist: np.ndarray, low: int, high: int, count: int, rng: np.random.Generator) -> List[Edge]:
    iu = np.triu_indices(dist.shape[0], k=1)
    d = dist[iu]
    pick = np.flatnonzero((d >= low) & (d <= high))
    if count > len(pick):
        raise GeneratorError(f"only {len(pick)} vertex pairs at distance {low}..{high}, {count} requested")
    chosen = np.sort(rng.choice(pick, size=count, replace=False)) if count else np.array([], dtype=np.int64)
    return [(int(iu[0][i]), int(iu[1][i])) for i in chosen]


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def cycle(rng: np.random.Generator, n: int) -> GeneratedInstance:
    _require(n >= 3, "cycle needs n >= 3")
    g = Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    cert = {'tree_breadth': n // 3} if n % 3 == 0 else {}
    return GeneratedInstance('cycle', {'n': n}, 0, g, cert)


def path(rng: np.random.Generator, n: int) -> GeneratedInstance:
    _require(n >= 1, "path needs n >= 1")
    g = Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    return GeneratedInstance('path', {'n': n}, 0, g, {'tree_breadth_upper': 1, 'spanner_stretch': 1}, spanner=g)


def grid(rng: np.random.Generator, rows: int, cols: int) -> GeneratedInstance:
    _require(rows >= 1 and cols >= 1, "grid needs positive dimensions")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return GeneratedInstance('grid', {'rows': rows, 'cols': cols}, 0, Graph.from_edges(rows * cols, edges))


def wheel(rng: np.random.Generator, n: int) -> GeneratedInstance:
    """Cycle 0..n-1 plus hub n adjacent to all of it: tree-breadth 1 although the cycle alone is not"""
    _require(n >= 3, "wheel needs a rim of at least 3 vertices")
    edges = [(i, (i + 1) % n) for i in range(n)] + [(i, n) for i in range(n)]
    return GeneratedInstance('wheel', {'n': n}, 0, Graph.from_edges(n + 1, edges), {'tree_breadth': 1})


def chordal(rng: np.random.Generator, n: int, max_clique: int = 4) -> GeneratedInstance:
    """Each new vertex is joined to a random subset of a random existing clique"""
    _require(n >= 1 and max_clique >= 2, "chordal needs n >= 1 and max_clique >= 2")
    cliques: List[Tuple[int, ...]] = [(0,)]
    tree_edges: List[Edge] = []
    edges: List[Edge] = []
    for v in range(1, n):
        host = int(rng.integers(0, len(cliques)))
        members = cliques[host]
        size = int(rng.integers(1, min(len(members), max_clique - 1) + 1))
        attach = sorted(int(x) for x in rng.choice(members, size=size, replace=False))
        edges.extend((a, v) for a in attach)
        cliques.append(tuple(attach) + (v,))
        tree_edges.append((host, len(cliques) - 1))
    perm = rng.permutation(n)
    g = Graph.from_edges(n, _relabel(n, edges, perm))
    td = TreeDecomposition.build(([int(perm[x]) for x in c] for c in cliques), tree_edges, n)
    return GeneratedInstance('chordal', {'n': n, 'max_clique': max_clique}, 0, g,
                             {'tree_breadth_upper': 1}, decomposition=td)


def random_connected(rng: np.random.Generator, n: int, extra_edges: int = 0) -> GeneratedInstance:
    _require(n >= 1, "random_connected needs n >= 1")
    tree = _random_tree_edges(n, rng)
    present = set(tree)
    missing = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in present]
    _require(extra_edges <= len(missing), f"only {len(missing)} non-edges available, {extra_edges} requested")
    picks = rng.choice(len(missing), size=extra_edges, replace=False) if extra_edges else []
    edges = tree + [missing[int(i)] for i in picks]
    return GeneratedInstance('random_connected', {'n': n, 'extra_edges': extra_edges}, 0, Graph.from_edges(n, edges))


def planted_tree_spanner(rng: np.random.Generator, n: int, t: int, extra_edges: int = 0) -> GeneratedInstance:
    """Random spanning tree T plus only edges uv with d_T(u, v) <= t: T is a tree t-spanner"""
    _require(n >= 1 and t >= 1, "planted_tree_spanner needs n >= 1 and t >= 1")
    tree = Graph.from_edges(n, _random_tree_edges(n, rng))
    extra = _sample_pairs(apsp(tree), 2, t, extra_edges, rng)
    g = Graph.from_edges(n, tree.edges() + extra)
    cert = {'t': t, 'spanner_stretch': t, 'tree_breadth_upper': math.ceil(t / 2)}
    return GeneratedInstance('planted_tree_spanner', {'n': n, 't': t, 'extra_edges': extra_edges}, 0, g, cert,
                             spanner=tree)


def planted_tw_spanner(rng: np.random.Generator, n: int, k: int, t: int, extra_edges: Optional[int] = None,
                       keep_probability: float = 0.5) -> GeneratedInstance:
    """Random connected partial k-tree H with its width-k decomposition, plus edges uv
    with d_H(u, v) <= t: H is a t-spanner of tree-width at most k"""
    _require(k >= 1 and n >= k + 1 and t >= 1, "planted_tw_spanner needs k >= 1, n >= k + 1 and t >= 1")
    extra_edges = n if extra_edges is None else extra_edges

    bags: List[Tuple[int, ...]] = [tuple(range(k + 1))]
    tree_edges: List[Edge] = []
    ktree = {normalize_edge(a, b) for a in range(k + 1) for b in range(a + 1, k + 1)}
    faces: List[Tuple[Tuple[int, ...], int]] = [
        (tuple(x for x in bags[0] if x != drop), 0) for drop in bags[0]
    ]
    for v in range(k + 1, n):
        face, owner = faces[int(rng.integers(0, len(faces)))]
        ktree.update(normalize_edge(a, v) for a in face)
        bags.append(face + (v,))
        tree_edges.append((owner, len(bags) - 1))
        new_bag = bags[-1]
        faces.extend((tuple(x for x in new_bag if x != drop), len(bags) - 1) for drop in face)

    edges = sorted(ktree)
    order = rng.permutation(len(edges))
    uf = DisjointSet(range(n))
    kept = []
    for i in order:
        u, v = edges[int(i)]
        if uf.merge(u, v) or rng.random() < keep_probability:
            kept.append((u, v))

    perm = rng.permutation(n)
    h = Graph.from_edges(n, _relabel(n, kept, perm))
    td = TreeDecomposition.build(([int(perm[x]) for x in bag] for bag in bags), tree_edges, n)
    extra = _sample_pairs(apsp(h), 2, t, extra_edges, rng)
    g = Graph.from_edges(n, h.edges() + extra)
    cert = {'t': t, 'k': k, 'spanner_stretch': t, 'k_tree_breadth_upper': {str(k + 1): math.ceil(t / 2)}}
    return GeneratedInstance('planted_tw_spanner', {'n': n, 'k': k, 't': t, 'extra_edges': extra_edges}, 0, g, cert,
                             spanner=h, decomposition=td)


GENERATORS: Dict[str, Tuple[Callable[..., GeneratedInstance], Tuple[str, ...]]] = {
    'cycle': (cycle, ('n',)),
    'path': (path, ('n',)),
    'grid': (grid, ('rows', 'cols')),
    'wheel': (wheel, ('n',)),
    'chordal': (chordal, ('n', 'max_clique')),
    'random_connected': (random_connected, ('n', 'extra_edges')),
    'planted_tree_spanner': (planted_tree_spanner, ('n', 't', 'extra_edges')),
    'planted_tw_spanner': (planted_tw_spanner, ('n', 'k', 't', 'extra_edges')),
}


def params_from_values(kind: str, values: Sequence[int]) -> Dict[str, int]:
    """Map positional CLI values onto a generator's parameter names"""
    if kind not in GENERATORS:
        raise GeneratorError(f"unknown generator {kind!r}; choose from {', '.join(sorted(GENERATORS))}")
    names = GENERATORS[kind][1]
    if len(values) > len(names):
        raise GeneratorError(f"{kind} takes at most {len(names)} parameters ({', '.join(names)})")
    return dict(zip(names, (int(v) for v in values)))


# ---------------------------------------------------------------------------
# Certificate recheck
# ---------------------------------------------------------------------------

def verify_certificate(instance: GeneratedInstance) -> None:
    """Recheck a certificate without reusing the code that planted it"""
    g = instance.graph
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from(g.edges())
    if g.n and not nx.is_connected(nxg):
        raise GeneratorError(f"{instance.kind} instance is disconnected")
    if instance.kind == 'cycle' and any(d != 2 for _, d in nxg.degree()):
        raise GeneratorError("cycle instance has a vertex of degree other than 2")
    if instance.kind == 'chordal' and not nx.is_chordal(nxg):
        raise GeneratorError("chordal instance is not chordal")
    if instance.decomposition is not None:
        host = instance.spanner if instance.spanner is not None else g
        problems = validate(host, instance.decomposition)
        if problems:
            raise GeneratorError(f"planted decomposition is invalid: {problems[0].detail}")
        if 'k' in instance.params and instance.decomposition.width > instance.params['k']:
            raise GeneratorError(f"planted decomposition has width {instance.decomposition.width}")
    if instance.spanner is not None:
        try:
            check_spanner(g, instance.spanner, int(instance.certificate.get('spanner_stretch', 1)))
        except NotASpannerError as e:
            raise GeneratorError(f"planted spanner fails its stretch: {e}") from e
        if instance.kind == 'planted_tree_spanner':
            tree = nx.Graph()
            tree.add_nodes_from(range(g.n))
            tree.add_edges_from(instance.spanner.edges())
            if not nx.is_tree(tree):
                raise GeneratorError("planted tree is not a tree")


def gen(kind: str, params: Optional[Dict[str, int]] = None, seed: Optional[int] = None) -> GeneratedInstance:
    if kind not in GENERATORS:
        raise GeneratorError(f"unknown generator {kind!r}; choose from {', '.join(sorted(GENERATORS))}")
    rng = make_rng(seed)
    builder, names = GENERATORS[kind]
    params = dict(params or {})
    unknown = set(params) - set(names)
    if unknown:
        raise GeneratorError(f"{kind} does not take {sorted(unknown)}")
    try:
        instance = builder(rng, **params)
    except TypeError as e:
        raise GeneratorError(f"bad parameters for {kind}: {e}") from e
    instance = GeneratedInstance(instance.kind, {**instance.params, **params}, int(seed), instance.graph,
                                 instance.certificate, instance.spanner, instance.decomposition)
    verify_certificate(instance)
    logger.info(f"generated {kind} {instance.params} seed={seed}: n={instance.graph.n} m={instance.graph.m}")
    return instance
